#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

namespace levyfk {

// Spatial covariance families. gamma is symmetric, nonnegative, and
// nonnegative-definite; its Fourier transform ghat (the spectral density) is
// fixed by the convention  ghat(xi) = ∫ exp(-i xi.x) gamma(x) dx,  so that
// ∫ gamma f = (2pi)^{-d} ∫ fhat ghat holds exactly. The per-family constants
// below were calibrated once against that identity with a Gaussian test
// function (see spectral_density and the Parseval tests):
//   riesz |x|^{-beta}          : ghat = 2^{d-beta} pi^{d/2} G((d-beta)/2)/G(beta/2) |xi|^{beta-d}
//   product prod |x_j|^{-b_j}  : ghat = prod 2 G(1-b_j) sin(pi b_j/2) |xi_j|^{b_j-1}
//   cauchy prod (x_j^2+c)^{-1} : ghat = prod (pi/sqrt(c)) exp(-sqrt(c)|xi_j|)
//   poisson (|x|^2+c)^{-(d+1)/2}: ghat = pi^{(d+1)/2}/(G((d+1)/2) sqrt(c)) exp(-sqrt(c)|xi|)
//   ou  exp(-c|x|^a), a in (0,2]: closed forms at a=1,2; otherwise the radial
//       Fourier transform of the isotropic stable profile, evaluated
//       numerically (quadrature at moderate |xi|, a power series in the tail).
enum class KernelFamily {
    riesz,
    fractional_product,
    cauchy,
    poisson,
    ornstein_uhlenbeck,
    constant_test,
};

struct CovarianceKernel {
    KernelFamily family = KernelFamily::riesz;
    int dim = 1;
    double beta = 0.0;               // riesz
    std::vector<double> betas;       // fractional_product, one exponent per axis
    double c = 0.0;                  // cauchy / poisson / ornstein_uhlenbeck
    double alpha_ou = 0.0;           // ornstein_uhlenbeck
    double level = 0.0;              // constant_test

    static CovarianceKernel riesz_kernel(double beta, int dim);
    static CovarianceKernel fractional_product_kernel(std::vector<double> betas);
    static CovarianceKernel cauchy_kernel(double c, int dim);
    static CovarianceKernel poisson_kernel(double c, int dim);
    static CovarianceKernel ornstein_uhlenbeck_kernel(double c, double alpha_ou, int dim);
    static CovarianceKernel constant_kernel(double level, int dim);

    bool is_singular() const; // true iff gamma(0) = +inf
    // beta for riesz, sum of betas for the product kernel
    double total_beta() const;
    std::string describe() const;
};

// gamma(x); +inf on the singular set (origin, or the coordinate hyperplanes
// for the fractional product kernel)
double kernel_eval(const CovarianceKernel& k, std::span<const double> x);

// ghat(xi) >= 0. The constant kernel has an atomic spectral measure and is
// rejected with config_error.
double spectral_density(const CovarianceKernel& k, std::span<const double> xi);

enum class ProcessFamily { brownian, symmetric_stable };

struct LevyProcessSpec {
    ProcessFamily family = ProcessFamily::brownian;
    int dim = 1;
    double alpha = 2.0; // symmetric_stable only

    static LevyProcessSpec brownian(int dim);
    static LevyProcessSpec symmetric_stable(double alpha, int dim);

    // exponent alpha for stable, 2 for brownian (the closed-form criteria
    // beta < alpha(1-beta0) etc. use this value)
    double effective_alpha() const;
    std::string describe() const;
};

double levy_exponent(const LevyProcessSpec& p, std::span<const double> xi);
double levy_exponent_radial(const LevyProcessSpec& p, double r);

// q_t(x) = (2pi)^{-d} ∫ exp(i xi.x - t Psi(xi)) dxi. Closed form for brownian
// and stable alpha in {1,2}; Fourier inversion otherwise (d <= 3).
double transition_density(const LevyProcessSpec& p, double t, std::span<const double> x);

struct NoiseSpec {
    double beta0 = 0.5;
    CovarianceKernel kernel;

    // validated constructor: beta0 strictly inside (0,1). Aggregate
    // construction with beta0 = 0 stays available for the beta0-free cross
    // checks the Hamiltonian operations support.
    static NoiseSpec make(double beta0, CovarianceKernel kernel);
};

class InitialCondition {
  public:
    static InitialCondition constant(double value);
    // d = 1 only: piecewise-linear through (x_i, v_i), clamped outside the range
    static InitialCondition tabulated(std::vector<double> xs, std::vector<double> vs);

    double operator()(std::span<const double> x) const;
    double sup_abs() const { return sup_abs_; }
    bool is_constant() const { return constant_; }
    double constant_value() const { return value_; }

  private:
    bool constant_ = true;
    double value_ = 1.0;
    std::vector<double> xs_, vs_;
    double sup_abs_ = 1.0;
};

namespace detail {
// FT of exp(-c|x|^alpha) in R^d evaluated at radius q, forced through the
// numeric path (tests compare it with the alpha=1,2 closed forms)
double isotropic_stable_ft_numeric(double q, double c, double alpha, int dim);
double isotropic_stable_ft(double q, double c, double alpha, int dim);
double sphere_area(int dim); // |S^{d-1}|
} // namespace detail

} // namespace levyfk
