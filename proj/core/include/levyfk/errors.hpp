#pragma once

#include <stdexcept>
#include <string>

namespace levyfk {

// Error classes map onto the CLI exit-code vocabulary:
//   2 config, 3 hypothesis violated, 4 divergence, 5 insufficient data.

struct config_error : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct hypothesis_violation : std::runtime_error {
    std::string hypothesis;
    hypothesis_violation(std::string hyp, const std::string& what)
        : std::runtime_error(what), hypothesis(std::move(hyp)) {}
};

struct divergence_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct insufficient_data_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

} // namespace levyfk
