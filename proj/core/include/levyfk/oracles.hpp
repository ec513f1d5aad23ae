#pragma once

#include "levyfk/model.hpp"
#include "levyfk/spectral.hpp"

#include <span>
#include <string>
#include <vector>

namespace levyfk {

struct BoundCheckResult {
    std::string name;
    double lhs = 0.0;        // quantity being bounded (or the identity LHS)
    double rhs = 0.0;        // upper bound (or the identity RHS)
    double rhs_lower = 0.0;  // lower bound for sandwich checks, else 0
    bool two_sided = false;
    bool satisfied = false;
    double tolerance = 0.0;
};

// ∫ over {0 < r_1 < ... < r_n < t} of prod (r_i - r_{i-1})^{alpha_i}
// = prod Gamma(alpha_i + 1) t^{sum + n} / Gamma(sum + n + 1); each alpha_i
// must lie in (-1, 1).
double dirichlet_beta_integral(std::span<const double> alphas, double t);

// ∫_0^t s^{-b} e^{-sx} ds sandwiched between
//   (1+x^{1-b})^{-1} ∫_0^t s^{-b} e^{-s} ds   and
//   (1+x^{1-b})^{-1} (C1 + C2 t^{1-b}),  C1 = Gamma(1-b), C2 = 1/(1-b).
// If the natural constants fail, a x{1,2,5,10} scale search on (C1, C2) runs
// before a violation is reported.
BoundCheckResult lemma0_sandwich(double beta0, double t, double x);

// ∫ g(x + a) f(x) dx <= ∫ g(x) f(x) dx for kernels of positive type with
// g integrable (d = 1).
BoundCheckResult maximum_principle_check(const CovarianceKernel& g, const CovarianceKernel& f,
                                         double shift);

// E[gamma(X_t)] = (2pi)^{-d} ∫ exp(-t Psi) dmu
double expected_gamma(const LevyProcessSpec& process, const CovarianceKernel& kernel, double t);

// Simplex-moment bound: for each N,
//   ∫_{Omega_t^n} ∫ prod r_j^{-b} e^{-r_j Psi(xi_j)} mu(dxi) dr
//     <= sum_k C(n,k) (Gamma(1-b) t^{1-b})^k / Gamma(k(1-b)+1) m_N^k (A0 eps_N)^{n-k}
// with A0 = Gamma(1-b), eps_N = ∫_{|xi|>=N} Psi^{b-1} dmu, m_N = mu(|xi|<=N).
std::vector<BoundCheckResult> hhnt_bound_check(const LevyProcessSpec& process,
                                               const CovarianceKernel& kernel, double beta0,
                                               int n, double t,
                                               std::span<const double> N_values);

// Mutual-energy identity between two Gaussian probability measures (d = 1):
//   ∫∫ gamma(x - y) nu1(dx) nu2(dy) = (2pi)^{-1} ∫ ghat(xi) Fnu1 conj(Fnu2) dxi
struct GaussianMeasure {
    double mean = 0.0;
    double sd = 1.0;
};
BoundCheckResult energy_identity_check(const CovarianceKernel& kernel,
                                       const GaussianMeasure& nu1, const GaussianMeasure& nu2);

} // namespace levyfk
