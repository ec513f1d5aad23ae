#include "levyfk/hamiltonian.hpp"

#include "gamma_dispatch.hpp"
#include "levyfk/errors.hpp"
#include "levyfk/quadrature.hpp"

#include <omp.h>

#include <cmath>
#include <cstring>
#include <stdexcept>

namespace levyfk {

namespace {

double pow_p(double x, double p) { return std::pow(x, p); }

int resolve_workers(int workers) {
    return workers > 0 ? workers : omp_get_max_threads();
}

} // namespace

double CellWeights::total_closed_form() const {
    const double b = beta0;
    return 2.0 * pow_p(grid.horizon, 2.0 - b) / ((1.0 - b) * (2.0 - b));
}

CellWeights cell_weights(const TimeGrid& grid, double beta0) {
    if (!(beta0 >= 0.0 && beta0 < 1.0))
        throw std::domain_error("cell_weights requires beta0 in [0,1)");
    const int n = grid.n_steps;
    const double h = grid.step();
    const double b = beta0;
    const double p = 2.0 - b;
    const double denom = (1.0 - b) * (2.0 - b);
    CellWeights cw{grid, beta0, {}};
    cw.w.resize(n);
    const double hp = pow_p(h, p);
    cw.w[0] = 2.0 * hp / denom;
    for (int k = 1; k < n; ++k)
        cw.w[k] = hp * (pow_p(k + 1.0, p) - 2.0 * pow_p(k, p) + pow_p(k - 1.0, p)) / denom;
    return cw;
}

HamiltonianValue hamiltonian_with_weights(const PathSample& a, const PathSample& b,
                                          const CovarianceKernel& kernel,
                                          const CellWeights& weights, DiagPolicy policy,
                                          std::optional<double> expected_gamma_h) {
    if (a.grid.n_steps != b.grid.n_steps || a.grid.horizon != b.grid.horizon)
        throw config_error("hamiltonian: paths must share the grid");
    if (a.dim != b.dim || a.dim != kernel.dim)
        throw config_error("hamiltonian: dimension mismatch");
    const int n = a.grid.n_steps;
    const int d = a.dim;
    const bool self = (&a == &b) || (a.seed == b.seed && a.stream_id == b.stream_id);

    HamiltonianValue out;
    out.policy = policy;
    out.grid = a.grid;
    out.beta0 = weights.beta0;

    if (self && policy == DiagPolicy::analytic && kernel.is_singular() && !expected_gamma_h)
        throw config_error("hamiltonian: analytic diagonal policy needs E[gamma(X_h)]");

    const double* xa = a.values.data();
    const double* xb = b.values.data();
    out.value = detail::with_gamma(kernel, d, [&](auto&& g) {
        return detail::ham_pair_loop(xa, n, xb, n, d, weights.w, self, kernel.is_singular(),
                                     detail::DiagPolicyTag{policy == DiagPolicy::analytic},
                                     expected_gamma_h.value_or(0.0), &out.dropped_cells, g);
    });
    out.finite = std::isfinite(out.value);
    return out;
}

HamiltonianValue hamiltonian(const PathSample& a, const PathSample& b,
                             const CovarianceKernel& kernel, double beta0, DiagPolicy policy,
                             std::optional<double> expected_gamma_h,
                             const LevyProcessSpec* process) {
    const CellWeights cw = cell_weights(a.grid, beta0);
    const bool self = (&a == &b) || (a.seed == b.seed && a.stream_id == b.stream_id);
    if (self && policy == DiagPolicy::analytic && kernel.is_singular() && !expected_gamma_h) {
        if (!process)
            throw config_error("hamiltonian: analytic policy needs E[gamma(X_h)] or a process");
        expected_gamma_h = std::pow(2.0 * M_PI, -kernel.dim) *
                           ExpPsiMuFn(kernel, *process)(a.grid.step());
    }
    return hamiltonian_with_weights(a, b, kernel, cw, policy, expected_gamma_h);
}

double expected_hamiltonian(const LevyProcessSpec& process, const CovarianceKernel& kernel,
                            double beta0, double t, HamMode mode) {
    if (t == 0.0) return 0.0;
    if (!(t > 0.0)) throw std::domain_error("expected_hamiltonian requires t >= 0");
    if (kernel.family == KernelFamily::constant_test) {
        const double b = beta0;
        const double total = 2.0 * pow_p(t, 2.0 - b) / ((1.0 - b) * (2.0 - b));
        return total * kernel.level;
    }

    NoiseSpec noise;
    noise.beta0 = beta0;
    noise.kernel = kernel;
    const HypothesisReport rep = (mode == HamMode::self)
                                     ? check_hypothesis_I(process, noise)
                                     : check_hypothesis_II(process, noise);
    if (!rep.holds)
        throw divergence_error("expected_hamiltonian diverges: hypothesis " +
                               to_string(rep.hypothesis) + " fails (tail exponent " +
                               std::to_string(rep.tail_exponent.value_or(0.0)) + ")");

    const ExpPsiMuFn ghat(kernel, process);
    const double inv2pi_d = std::pow(2.0 * M_PI, -kernel.dim);

    if (mode == HamMode::self) {
        auto f = [&](double, double da, double) {
            return (t - da) * pow_p(da, -beta0) * ghat(da);
        };
        return 2.0 * inv2pi_d * integrate_de(f, 0.0, t, 1e-12, 1e-10).value;
    }

    // cross: integrate Ghat against the closed-form u-mass min(v,t,2t-v)^{1-b}/(1-b)
    auto f1 = [&](double, double da, double) {
        return pow_p(da, 1.0 - beta0) * ghat(da);
    };
    auto f2 = [&](double v, double, double db) {
        (void)v;
        return pow_p(db, 1.0 - beta0) * ghat(2.0 * t - db);
    };
    const double part1 = integrate_de(f1, 0.0, t, 1e-12, 1e-10).value;
    const double part2 = integrate_de(f2, t, 2.0 * t, 1e-12, 1e-10).value;
    return inv2pi_d / (1.0 - beta0) * (part1 + part2);
}

HamiltonianPool sample_hamiltonian_pool(const LevyProcessSpec& process,
                                        const CovarianceKernel& kernel, double beta0, double t,
                                        HamMode mode, const McConfig& mc, DiagPolicy policy) {
    const TimeGrid grid = TimeGrid::make(t, mc.n_steps);
    const CellWeights cw = cell_weights(grid, beta0);
    const long long R = mc.replicates;
    if (R < 1) throw config_error("replicates must be >= 1");

    std::optional<double> patch;
    if (mode == HamMode::self && policy == DiagPolicy::analytic && kernel.is_singular())
        patch = std::pow(2.0 * M_PI, -kernel.dim) * ExpPsiMuFn(kernel, process)(grid.step());

    HamiltonianPool pool;
    pool.grid = grid;
    pool.mode = mode;
    pool.values.assign(static_cast<size_t>(R), 0.0);

    const int workers = resolve_workers(mc.workers);
#pragma omp parallel for schedule(static) num_threads(workers)
    for (long long r = 0; r < R; ++r) {
        if (mode == HamMode::self) {
            const PathSample x = sample_path(process, grid, mc.seed, mc.stream_offset + r);
            pool.values[static_cast<size_t>(r)] =
                hamiltonian_with_weights(x, x, kernel, cw, policy, patch).value;
        } else {
            const PathSample x =
                sample_path(process, grid, mc.seed, mc.stream_offset + 2 * r);
            const PathSample y =
                sample_path(process, grid, mc.seed, mc.stream_offset + 2 * r + 1);
            pool.values[static_cast<size_t>(r)] =
                hamiltonian_with_weights(x, y, kernel, cw, policy, patch).value;
        }
    }
    return pool;
}

HamiltonianMoment pool_moment(const HamiltonianPool& pool, int n) {
    const auto R = static_cast<long long>(pool.values.size());
    HamiltonianMoment m;
    m.order = n;
    m.replicates = R;
    if (n == 0) {
        m.value = 1.0;
        m.stderr_est = 0.0;
        return m;
    }
    std::vector<double> powed(pool.values.size());
    for (size_t i = 0; i < pool.values.size(); ++i) powed[i] = std::pow(pool.values[i], n);
    const double mean = pairwise_sum(powed) / static_cast<double>(R);
    std::vector<double> sq(powed.size());
    for (size_t i = 0; i < powed.size(); ++i) sq[i] = (powed[i] - mean) * (powed[i] - mean);
    const double var = R > 1 ? pairwise_sum(sq) / static_cast<double>(R - 1) : 0.0;
    m.value = mean;
    m.stderr_est = std::sqrt(var / static_cast<double>(R));
    return m;
}

HamiltonianMoment hamiltonian_moment(const LevyProcessSpec& process,
                                     const CovarianceKernel& kernel, double beta0, double t,
                                     int n, HamMode mode, const McConfig& mc) {
    if (n < 0 || n > 6)
        throw config_error("hamiltonian_moment supports orders 0..6 (variance control)");
    if (n == 0) return HamiltonianMoment{1.0, 0.0, mc.replicates, 0};
    const HamiltonianPool pool = sample_hamiltonian_pool(process, kernel, beta0, t, mode, mc);
    return pool_moment(pool, n);
}

} // namespace levyfk
