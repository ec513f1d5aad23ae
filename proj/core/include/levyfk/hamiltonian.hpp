#pragma once

#include "levyfk/model.hpp"
#include "levyfk/pathsim.hpp"
#include "levyfk/spectral.hpp"

#include <cstdint>
#include <optional>
#include <vector>

namespace levyfk {

// Exact integrals of |r-s|^{-beta0} over grid-cell pairs. On a uniform grid
// the weight depends on the lag only:
//   w_0 = 2 h^{2-b} / ((1-b)(2-b))
//   w_k = h^{2-b} [ (k+1)^{2-b} - 2 k^{2-b} + (k-1)^{2-b} ] / ((1-b)(2-b))
// and sum over all n x n cell pairs telescopes to 2 t^{2-b}/((1-b)(2-b)).
// beta0 = 0 is allowed for the beta0-free cross checks.
struct CellWeights {
    TimeGrid grid;
    double beta0 = 0.0;
    std::vector<double> w; // lag 0 .. n_steps-1

    double total_closed_form() const;
};

CellWeights cell_weights(const TimeGrid& grid, double beta0);

enum class DiagPolicy { drop, analytic };
enum class HamMode { self, cross };

struct HamiltonianValue {
    double value = 0.0;
    bool finite = true;       // false if an untreated singular hit leaked through
    int dropped_cells = 0;    // singular evaluations skipped (measure zero in the cross case)
    DiagPolicy policy = DiagPolicy::analytic;
    TimeGrid grid;
    double beta0 = 0.0;
};

// H = sum_{i,j} w_{|i-j|} gamma(X_{t_i} - Y_{t_j}), left-node evaluation.
// Passing the same sample twice is the self case; with a singular kernel the
// i = j diagonal is then dropped, or replaced by w_0 E[gamma(X_h)] per cell
// under the analytic policy. expected_gamma_h supplies that patch value (it
// is E[gamma(X_h)], computed once by the caller); if the patch is needed but
// absent it is derived from `process` when given.
HamiltonianValue hamiltonian(const PathSample& a, const PathSample& b,
                             const CovarianceKernel& kernel, double beta0, DiagPolicy policy,
                             std::optional<double> expected_gamma_h = {},
                             const LevyProcessSpec* process = nullptr);

// Same loop against precomputed weights (hot path for the estimators).
HamiltonianValue hamiltonian_with_weights(const PathSample& a, const PathSample& b,
                                          const CovarianceKernel& kernel,
                                          const CellWeights& weights, DiagPolicy policy,
                                          std::optional<double> expected_gamma_h = {});

// E[H] by nested quadrature:
//   self : 2 (2pi)^{-d} ∫_0^t (t-u) u^{-b} Ghat(u) du          (needs Hyp. I)
//   cross: (2pi)^{-d}/(1-b) ∫_0^{2t} min(v, t, 2t-v)^{1-b} Ghat(v) dv  (Hyp. II)
double expected_hamiltonian(const LevyProcessSpec& process, const CovarianceKernel& kernel,
                            double beta0, double t, HamMode mode);

struct McConfig {
    long long replicates = 10000;
    std::uint64_t seed = 0;
    int n_steps = 256;
    int workers = 0;  // 0: OpenMP default
    bool force = false;
    std::uint64_t stream_offset = 0; // shifts the replicate->stream map
};

struct HamiltonianPool {
    std::vector<double> values; // one discretized H per replicate
    TimeGrid grid;
    HamMode mode = HamMode::self;
};

HamiltonianPool sample_hamiltonian_pool(const LevyProcessSpec& process,
                                        const CovarianceKernel& kernel, double beta0, double t,
                                        HamMode mode, const McConfig& mc,
                                        DiagPolicy policy = DiagPolicy::analytic);

struct HamiltonianMoment {
    double value = 0.0;
    double stderr_est = 0.0;
    long long replicates = 0;
    int order = 0;
};

// Monte Carlo E[H^n]; n = 0 returns 1 exactly. n <= 6.
HamiltonianMoment hamiltonian_moment(const LevyProcessSpec& process,
                                     const CovarianceKernel& kernel, double beta0, double t,
                                     int n, HamMode mode, const McConfig& mc);
HamiltonianMoment pool_moment(const HamiltonianPool& pool, int n);

} // namespace levyfk
