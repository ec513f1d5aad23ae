#pragma once

#include "levyfk/hamiltonian.hpp"
#include "levyfk/model.hpp"

#include <vector>

namespace levyfk {

enum class ChaosMethod { mc_cross_moment, quadrature };

// n-th chaos contribution n! |f_n|^2 to the Skorohod second moment. For
// constant initial data the cross-moment identity gives
//   n! |f_n|^2 = E[H_cross^n] / n!,
// which is the primary (Monte Carlo) route; direct quadrature is kept as an
// independent check for n <= 2.
struct ChaosTerm {
    int n = 0;
    double value = 0.0;
    double stderr_est = 0.0;
    ChaosMethod method = ChaosMethod::mc_cross_moment;
};

ChaosTerm chaos_term(int n, double t, const InitialCondition& u0,
                     const LevyProcessSpec& process, const NoiseSpec& noise, const McConfig& mc,
                     ChaosMethod method = ChaosMethod::mc_cross_moment);

struct ChaosPartialSum {
    std::vector<ChaosTerm> terms;        // orders 0..N
    std::vector<double> partial_sums;    // cumulative
    double tail_ratio = 0.0;             // term(N)/term(N-1)
    bool tail_flagged = false;           // ratio >= 1: not yet in the decaying regime
};

// Partial sums of the chaos series; all terms reuse one replicate pool of
// cross Hamiltonians, so the cumulative sums are monotone replicate by
// replicate. Requires Hypothesis (II) unless mc.force.
ChaosPartialSum chaos_partial_sum(int N, double t, const InitialCondition& u0,
                                  const LevyProcessSpec& process, const NoiseSpec& noise,
                                  const McConfig& mc);

namespace detail {
// E[H_cross^2] by deterministic quadrature. Supported where the displacement
// pair is jointly Gaussian (brownian or stable alpha = 2) with the Gaussian
// kernel, and for the constant kernel; used only as the n = 2 oracle.
double cross_hamiltonian_second_moment_quadrature(const LevyProcessSpec& process,
                                                  const CovarianceKernel& kernel, double beta0,
                                                  double t);
} // namespace detail

} // namespace levyfk
