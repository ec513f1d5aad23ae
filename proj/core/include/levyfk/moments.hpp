#pragma once

#include "levyfk/hamiltonian.hpp"
#include "levyfk/model.hpp"
#include "levyfk/spectral.hpp"

#include <span>
#include <vector>

namespace levyfk {

struct MomentEstimate {
    double value = 0.0;
    double stderr_est = 0.0;
    long long replicates = 0;
    int p = 1;
    Sense sense = Sense::stratonovich;
    double t = 0.0;
    std::vector<double> x;
    int n_steps = 0;
    std::uint64_t seed = 0;
};

// A space-time evaluation point for the multi-point moments.
struct Offset {
    double t = 1.0;
    std::vector<double> x;
};

// E[u(t,x)^p] in the Stratonovich sense: Monte Carlo average over p-tuples of
// independent paths of  prod_j u0(X^j_t + x) exp( (1/2) sum_{j,k} H^{jk} ),
// where H^{jj} is the self Hamiltonian and H^{jk} (j != k) the cross one.
// Requires Hypothesis (I) unless mc.force.
MomentEstimate moment_stratonovich(int p, double t, std::span<const double> x,
                                   const InitialCondition& u0, const LevyProcessSpec& process,
                                   const NoiseSpec& noise, const McConfig& mc);

// Skorohod sense: exponent sum_{j<k} H^{jk} only (no self terms). Requires
// Hypothesis (II) unless mc.force.
MomentEstimate moment_skorohod(int p, double t, std::span<const double> x,
                               const InitialCondition& u0, const LevyProcessSpec& process,
                               const NoiseSpec& noise, const McConfig& mc);

// Multi-point moment E[prod_j u(t_j, x_j)] with the pairwise coupling
//   H^{jk} = ∫_0^{t_j} ∫_0^{t_k} |(t_j - u) - (t_k - v)|^{-beta0}
//            gamma(X^j_u + x_j - X^k_v - x_k) du dv,
// reducing bit-for-bit to moment_* when all offsets coincide. Offset times
// must be integer multiples of the grid step. slot_streams, when nonempty,
// permutes the per-slot substream assignment so that permuting the offset
// list together with its streams reproduces the identical estimate.
MomentEstimate mixed_moment(Sense sense, std::span<const Offset> offsets,
                            const InitialCondition& u0, const LevyProcessSpec& process,
                            const NoiseSpec& noise, const McConfig& mc,
                            std::span<const std::uint64_t> slot_streams = {});

// Same estimators with the per-replicate values exposed (ordering and
// seed-matching tests assert on raw replicates).
struct MomentSample {
    MomentEstimate estimate;
    std::vector<double> replicate_values;
};

MomentSample moment_sample(Sense sense, int p, double t, std::span<const double> x,
                           const InitialCondition& u0, const LevyProcessSpec& process,
                           const NoiseSpec& noise, const McConfig& mc);

MomentSample mixed_moment_sample(Sense sense, std::span<const Offset> offsets,
                                 const InitialCondition& u0, const LevyProcessSpec& process,
                                 const NoiseSpec& noise, const McConfig& mc,
                                 std::span<const std::uint64_t> slot_streams = {});

enum class ScanAxis { space, time };

struct HolderScanResult {
    Sense sense = Sense::skorohod;
    ScanAxis axis = ScanAxis::space;
    std::vector<double> lags;
    std::vector<double> second_moments; // E|u(a) - u(b)|^2 per lag
    std::vector<double> stderrs;
    double fitted_slope = 0.0;
    double slope_stderr = 0.0;
    double exponent_estimate = 0.0; // fitted_slope / 2
};

// Dyadic increment scan of E|u(a)-u(b)|^2 with common random numbers across
// lags; u0 is identically 1 (the Holder statements assume it). Time lags must
// be integer multiples of the grid step. Fewer than 4 usable lags raises
// insufficient_data_error.
HolderScanResult holder_scan(Sense sense, ScanAxis axis, double t, std::span<const double> x,
                             std::span<const double> lags, const LevyProcessSpec& process,
                             const NoiseSpec& noise, const McConfig& mc);

} // namespace levyfk
