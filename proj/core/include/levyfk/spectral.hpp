#pragma once

#include "levyfk/model.hpp"

#include <functional>
#include <optional>
#include <string>

namespace levyfk {

enum class Hypothesis { I, II, S1, T1, S2, T2 };
enum class CheckMethod { closed_form, quadrature };
enum class Sense { stratonovich, skorohod };

std::string to_string(Hypothesis h);
std::string to_string(Sense s);

struct MuIntegralResult {
    double value = 0.0;
    bool converged = false;
    // fitted exponent q of the integrand profile f(r) rho(r) ~ r^q over the
    // dyadic window [2^4, 2^14]; divergence is declared when q >= -1.
    // -inf marks an exponentially negligible tail.
    double tail_exponent = 0.0;
    bool near_boundary = false;
};

// Radial (1-d) view of the spectral measure: for every radial integrand f,
//   ∫_{R^d} f(|xi|) mu(dxi) = ∫_0^∞ f(r) rho(r) dr.
// The angular factor is closed-form for all families except cauchy in d >= 2,
// where it is a cached low-order quadrature over the sphere.
class SpectralMeasure {
  public:
    explicit SpectralMeasure(const CovarianceKernel& kernel);

    int dim() const { return kernel_.dim; }
    const CovarianceKernel& kernel() const { return kernel_; }

    double radial_profile(double r) const;      // rho(r)
    double origin_exponent() const { return origin_exponent_; } // rho ~ r^s at 0
    std::optional<double> tail_power() const { return tail_power_; } // rho tail order, nullopt = exponential decay

    // Adaptive integral of a nonnegative radial integrand over mu, split at
    // |xi| = 1, with dyadic-annulus tail diagnostics. exp_decaying_integrand
    // extends the annulus ladder until the integrand itself is negligible.
    MuIntegralResult integrate(const std::function<double(double)>& f,
                               std::optional<double> f_tail_order = {},
                               bool exp_decaying_integrand = false) const;

    double mass_up_to(double R) const;                            // mu(|xi| <= R)
    MuIntegralResult integrate_from(const std::function<double(double)>& f, double N,
                                    std::optional<double> f_tail_order = {}) const;

  private:
    CovarianceKernel kernel_;
    double origin_exponent_ = 0.0;
    std::optional<double> tail_power_;
    double angular_const_ = 0.0; // closed-form part of the angular integral

    double annulus(const std::function<double(double)>& f, double lo, double hi) const;
};

// Generic ∫ f d mu with convergence verdict (spec surface; the constant test
// kernel is rejected). tail_order_hint is the power-law order of f itself.
MuIntegralResult mu_integral(const CovarianceKernel& kernel,
                             const std::function<double(double)>& radial_integrand,
                             std::optional<double> tail_order_hint = {});

struct HypothesisReport {
    Hypothesis hypothesis = Hypothesis::I;
    bool holds = false;
    CheckMethod method = CheckMethod::quadrature;
    std::optional<double> integral_value;
    std::optional<double> tail_exponent;
    std::optional<double> admissible_exponent;
    bool near_boundary = false;
};

// Hypothesis (I): ∫ (1 + Psi^{1-beta0})^{-1} dmu < ∞. Closed form
// beta < alpha (1 - beta0) for the riesz / fractional-product families.
HypothesisReport check_hypothesis_I(const LevyProcessSpec& process, const NoiseSpec& noise,
                                    bool force_quadrature = false);
// Hypothesis (II): ∫ (1 + Psi)^{-1} dmu < ∞; closed form beta < alpha.
HypothesisReport check_hypothesis_II(const LevyProcessSpec& process, const NoiseSpec& noise,
                                     bool force_quadrature = false);

struct HolderExponents {
    double spatial_sup = 0.0;   // sup of admissible spatial Holder exponents
    double temporal_sup = 0.0;  // sup of admissible temporal Holder exponents
    CheckMethod method = CheckMethod::quadrature;
};

// Admissible Holder brackets. Stratonovich: theta1 < [alpha(1-b0)-beta]/2 and
// theta2 < [(1-b0)-beta/alpha]/2 in the closed-form families; Skorohod:
// theta1 < (alpha-beta)/2 and theta2 < min(1-beta/alpha, 1-b0)/2. Other
// kernels are swept by quadrature on the sufficient integral conditions.
HolderExponents holder_exponents(const LevyProcessSpec& process, const NoiseSpec& noise,
                                 Sense sense);

// Ghat(r) = ∫ exp(-r Psi(xi)) mu(dxi)   (no (2pi)^{-d} factor)
double exp_psi_mu(const CovarianceKernel& kernel, const LevyProcessSpec& process, double r);

// Reusable Ghat evaluator for the nested time quadratures. Closed forms for
// power-law spectral densities and for the Gaussian kernel under brownian /
// stable(2); finite-measure kernels get a dense interpolation table, anything
// else falls back on direct quadrature per call. Not thread-safe.
class ExpPsiMuFn {
  public:
    ExpPsiMuFn(CovarianceKernel kernel, LevyProcessSpec process);
    double operator()(double r) const;

  private:
    enum class Kind { power_law, gaussian_pair, table, direct };
    double direct(double r) const;
    void build_table(double r_max) const;

    CovarianceKernel kernel_;
    LevyProcessSpec process_;
    Kind kind_ = Kind::direct;
    double power_const_ = 0.0, power_exp_ = 0.0; // Ghat = const * r^{-exp}
    double gauss_scale_ = 0.0;                   // Ghat = (2pi)^d (1 + scale r)^{-d/2}
    mutable std::vector<double> tab_r_, tab_g_;
    mutable double tab_rmax_ = 0.0;
};

// mu({ xi : |xi + z| <= 1 }) for the Lemma-style shifted-ball diagnostics.
// Radial families support d <= 3; product families d = 1.
double mu_mass_shifted_ball(const CovarianceKernel& kernel, double z);

} // namespace levyfk
