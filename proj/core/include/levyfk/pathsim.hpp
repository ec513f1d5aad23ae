#pragma once

#include "levyfk/model.hpp"

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

namespace levyfk {

struct TimeGrid {
    double horizon = 1.0;
    int n_steps = 1;

    static TimeGrid make(double t, int n_steps);
    double step() const { return horizon / n_steps; }
    double node(int i) const { return horizon * i / n_steps; }
};

// A Levy path on grid nodes t_0..t_n, X_0 = 0. values is row-major
// (node, coordinate). Identical (seed, stream_id, grid) always reproduces the
// same path, independent of scheduling.
struct PathSample {
    TimeGrid grid;
    int dim = 1;
    std::uint64_t seed = 0;
    std::uint64_t stream_id = 0;
    std::vector<double> values;

    std::span<const double> at(int node) const {
        return {values.data() + static_cast<size_t>(node) * dim, static_cast<size_t>(dim)};
    }
};

PathSample sample_path(const LevyProcessSpec& process, const TimeGrid& grid,
                       std::uint64_t seed, std::uint64_t stream_id);

// Two independent paths from disjoint substreams; stream ids must differ.
std::pair<PathSample, PathSample> path_pair(const LevyProcessSpec& process, const TimeGrid& grid,
                                            std::uint64_t seed,
                                            std::pair<std::uint64_t, std::uint64_t> stream_ids);

} // namespace levyfk
