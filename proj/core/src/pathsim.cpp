#include "levyfk/pathsim.hpp"

#include "levyfk/errors.hpp"
#include "levyfk/rng.hpp"

#include <cmath>

namespace levyfk {

TimeGrid TimeGrid::make(double t, int n_steps) {
    if (!(t > 0.0)) throw config_error("time grid horizon must be positive");
    if (n_steps < 1) throw config_error("time grid needs at least one step");
    return TimeGrid{t, n_steps};
}

PathSample sample_path(const LevyProcessSpec& process, const TimeGrid& grid,
                       std::uint64_t seed, std::uint64_t stream_id) {
    const int d = process.dim;
    const int n = grid.n_steps;
    const double h = grid.step();

    PathSample path;
    path.grid = grid;
    path.dim = d;
    path.seed = seed;
    path.stream_id = stream_id;
    path.values.assign(static_cast<size_t>(n + 1) * d, 0.0);

    Philox4x32 rng(seed, stream_id);

    if (process.family == ProcessFamily::brownian) {
        const double sd = std::sqrt(h);
        for (int i = 1; i <= n; ++i)
            for (int j = 0; j < d; ++j)
                path.values[static_cast<size_t>(i) * d + j] =
                    path.values[static_cast<size_t>(i - 1) * d + j] + sd * rng.normal();
        return path;
    }

    const double alpha = process.alpha;
    if (d == 1) {
        // direct symmetric draw, increment law exp(-h |xi|^alpha)
        const double scale = std::pow(h, 1.0 / alpha);
        for (int i = 1; i <= n; ++i)
            path.values[i] = path.values[i - 1] + scale * rng.stable_symmetric(alpha);
        return path;
    }

    if (alpha == 2.0) {
        // exp(-h|xi|^2): Gaussian with variance 2h per coordinate
        const double sd = std::sqrt(2.0 * h);
        for (int i = 1; i <= n; ++i)
            for (int j = 0; j < d; ++j)
                path.values[static_cast<size_t>(i) * d + j] =
                    path.values[static_cast<size_t>(i - 1) * d + j] + sd * rng.normal();
        return path;
    }

    // Isotropic stable via subordination: with Z one-sided (alpha/2)-stable
    // (Laplace exp(-lambda^{alpha/2})), the increment sqrt(2 h^{2/alpha} Z) N(0, I_d)
    // has characteristic function exp(-h |xi|^alpha). Componentwise draws would
    // give sum_j |xi_j|^alpha instead.
    const double rho = 0.5 * alpha;
    const double hscale = std::pow(h, 2.0 / alpha);
    for (int i = 1; i <= n; ++i) {
        const double z = rng.stable_one_sided(rho);
        const double sd = std::sqrt(2.0 * hscale * z);
        for (int j = 0; j < d; ++j)
            path.values[static_cast<size_t>(i) * d + j] =
                path.values[static_cast<size_t>(i - 1) * d + j] + sd * rng.normal();
    }
    return path;
}

std::pair<PathSample, PathSample> path_pair(const LevyProcessSpec& process, const TimeGrid& grid,
                                            std::uint64_t seed,
                                            std::pair<std::uint64_t, std::uint64_t> stream_ids) {
    if (stream_ids.first == stream_ids.second)
        throw config_error("path_pair requires distinct stream ids");
    return {sample_path(process, grid, seed, stream_ids.first),
            sample_path(process, grid, seed, stream_ids.second)};
}

} // namespace levyfk
