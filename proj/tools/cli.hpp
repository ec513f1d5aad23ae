#pragma once

#include "levyfk/model.hpp"

#include <string>
#include <vector>

namespace levyfk::cli {

// Parses the kernel grammar used by the CLI and config files, e.g.
// "riesz:beta=0.5", "fractional:beta=0.4,0.3", "ou:c=1,alpha=2",
// "cauchy:c=1", "poisson:c=2", "constant:level=1".
CovarianceKernel parse_kernel(const std::string& text, int dim);

// "brownian" or "stable:alpha=1.5"
LevyProcessSpec parse_process(const std::string& text, int dim);

// Entry point used by main(); returns the process exit code:
//   0 ok, 2 config error, 3 hypothesis violated, 4 divergence, 5 insufficient data
int run(int argc, const char* const* argv);

} // namespace levyfk::cli
