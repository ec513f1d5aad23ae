#include "levyfk/oracles.hpp"

#include "levyfk/errors.hpp"
#include "levyfk/quadrature.hpp"

#include <algorithm>
#include <cmath>

namespace levyfk {

namespace {

bool integrable_family(const CovarianceKernel& k) {
    switch (k.family) {
        case KernelFamily::cauchy:
        case KernelFamily::poisson:
        case KernelFamily::ornstein_uhlenbeck: return true;
        default: return false;
    }
}

double eval1(const CovarianceKernel& k, double x) {
    const double p[1] = {x};
    return kernel_eval(k, std::span<const double>(p, 1));
}

// ∫ g(x + a) f(x) dx in d = 1 with f possibly singular at 0
double shifted_pairing(const CovarianceKernel& g, const CovarianceKernel& f, double a) {
    const double R = 60.0 + std::abs(a);
    // split at the singular point of f and at -a (sharpest feature of g)
    double total = 0.0;
    std::vector<double> cuts = {-R, -std::abs(a), 0.0, std::abs(a), R};
    std::sort(cuts.begin(), cuts.end());
    cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
    for (size_t i = 0; i + 1 < cuts.size(); ++i) {
        auto fx = [&](double x, double da, double db) {
            // near a zero endpoint evaluate f at the exact distance
            double xv = x;
            if (cuts[i] == 0.0) xv = da;
            if (cuts[i + 1] == 0.0) xv = -db;
            return eval1(g, xv + a) * eval1(f, xv);
        };
        total += integrate_de(fx, cuts[i], cuts[i + 1], 1e-12, 1e-9).value;
    }
    return total;
}

} // namespace

double dirichlet_beta_integral(std::span<const double> alphas, double t) {
    if (alphas.empty()) throw std::domain_error("dirichlet_beta_integral needs n >= 1");
    double sum = 0.0, lognum = 0.0;
    for (double a : alphas) {
        if (!(a > -1.0 && a < 1.0))
            throw std::domain_error("dirichlet_beta_integral: each exponent must be in (-1,1)");
        sum += a;
        lognum += std::lgamma(a + 1.0);
    }
    const double n = static_cast<double>(alphas.size());
    return std::exp(lognum - std::lgamma(sum + n + 1.0)) * std::pow(t, sum + n);
}

BoundCheckResult lemma0_sandwich(double beta0, double t, double x) {
    if (!(beta0 > 0.0 && beta0 < 1.0)) throw std::domain_error("beta0 must be in (0,1)");
    if (!(t > 0.0) || x < 0.0) throw std::domain_error("lemma0_sandwich: t > 0, x >= 0");

    const double middle =
        integrate_power_weighted([&](double s) { return std::exp(-s * x); }, -beta0, t).value;
    const double lower_int =
        integrate_power_weighted([](double s) { return std::exp(-s); }, -beta0, t).value;
    const double damp = 1.0 / (1.0 + std::pow(x, 1.0 - beta0));

    const double c1 = std::tgamma(1.0 - beta0);
    const double c2 = 1.0 / (1.0 - beta0);

    BoundCheckResult res;
    res.name = "time-weight sandwich (beta0=" + std::to_string(beta0) + ")";
    res.two_sided = true;
    res.tolerance = 1e-9;
    res.lhs = middle;
    res.rhs_lower = damp * lower_int;

    for (double scale : {1.0, 2.0, 5.0, 10.0}) {
        const double upper = damp * (scale * c1 + scale * c2 * std::pow(t, 1.0 - beta0));
        if (res.rhs_lower <= middle * (1.0 + res.tolerance) &&
            middle <= upper * (1.0 + res.tolerance)) {
            res.rhs = upper;
            res.satisfied = true;
            return res;
        }
        res.rhs = upper;
    }
    res.satisfied = false;
    return res;
}

BoundCheckResult maximum_principle_check(const CovarianceKernel& g, const CovarianceKernel& f,
                                         double shift) {
    if (g.dim != 1 || f.dim != 1)
        throw config_error("maximum_principle_check is implemented for d = 1");
    if (!integrable_family(g))
        throw config_error("maximum_principle_check needs an integrable g (cauchy/poisson/ou)");

    BoundCheckResult res;
    res.name = "maximum principle";
    res.tolerance = 1e-7;
    res.lhs = shifted_pairing(g, f, shift);
    res.rhs = shifted_pairing(g, f, 0.0);
    if (!std::isfinite(res.rhs)) throw divergence_error("maximum principle: pairing diverges");
    res.satisfied = res.lhs <= res.rhs * (1.0 + res.tolerance) + 1e-12;
    return res;
}

double expected_gamma(const LevyProcessSpec& process, const CovarianceKernel& kernel, double t) {
    if (kernel.family == KernelFamily::constant_test) return kernel.level;
    return std::pow(2.0 * M_PI, -kernel.dim) * ExpPsiMuFn(kernel, process)(t);
}

std::vector<BoundCheckResult> hhnt_bound_check(const LevyProcessSpec& process,
                                               const CovarianceKernel& kernel, double beta0,
                                               int n, double t,
                                               std::span<const double> N_values) {
    if (n < 1 || n > 3) throw config_error("hhnt_bound_check supports n in 1..3");
    if (!(beta0 >= 0.0 && beta0 < 1.0))
        throw std::domain_error("hhnt_bound_check: beta0 in [0,1)");
    {
        // the bound is meaningful exactly when the epsilon_N tail converges
        auto integrand = [&](double r) {
            return std::pow(levy_exponent_radial(process, r), beta0 - 1.0);
        };
        SpectralMeasure mu(kernel);
        if (!mu.integrate_from(integrand, 1.0).converged)
            throw divergence_error("hhnt_bound_check: epsilon_N diverges (hypothesis I fails)");
    }

    const ExpPsiMuFn ghat(kernel, process);
    // I_1(T) = ∫_0^T r^{-b} Ghat(r) dr; I_k(T) nests I_{k-1}(T - r).
    auto I1 = [&](double T) {
        if (T <= 0.0) return 0.0;
        return integrate_de([&](double, double da, double) {
                                return std::pow(da, -beta0) * ghat(da);
                            },
                            0.0, T, 1e-11, 1e-9)
            .value;
    };
    auto I2 = [&](double T) {
        if (T <= 0.0) return 0.0;
        return integrate_de([&](double, double da, double) {
                                return std::pow(da, -beta0) * ghat(da) * I1(T - da);
                            },
                            0.0, T, 1e-10, 1e-8, 8)
            .value;
    };
    auto I3 = [&](double T) {
        if (T <= 0.0) return 0.0;
        return integrate_de([&](double, double da, double) {
                                return std::pow(da, -beta0) * ghat(da) * I2(T - da);
                            },
                            0.0, T, 1e-9, 1e-7, 7)
            .value;
    };
    const double lhs = (n == 1) ? I1(t) : (n == 2 ? I2(t) : I3(t));

    SpectralMeasure mu(kernel);
    const double a0 = std::tgamma(1.0 - beta0);
    std::vector<BoundCheckResult> out;
    for (double N : N_values) {
        const double mN = mu.mass_up_to(N);
        const double epsN = mu.integrate_from(
                                  [&](double r) {
                                      return std::pow(levy_exponent_radial(process, r),
                                                      beta0 - 1.0);
                                  },
                                  N)
                                .value;
        double rhs = 0.0;
        for (int k = 0; k <= n; ++k) {
            const double binom = std::exp(std::lgamma(n + 1.0) - std::lgamma(k + 1.0) -
                                          std::lgamma(n - k + 1.0));
            rhs += binom *
                   std::pow(a0 * std::pow(t, 1.0 - beta0), k) /
                   std::tgamma(k * (1.0 - beta0) + 1.0) * std::pow(mN, k) *
                   std::pow(a0 * epsN, n - k);
        }
        BoundCheckResult res;
        res.name = "simplex moment bound n=" + std::to_string(n) +
                   " N=" + std::to_string(N);
        res.lhs = lhs;
        res.rhs = rhs;
        res.tolerance = 1e-6;
        res.satisfied = lhs <= rhs * (1.0 + res.tolerance);
        out.push_back(res);
    }
    return out;
}

BoundCheckResult energy_identity_check(const CovarianceKernel& kernel,
                                       const GaussianMeasure& nu1, const GaussianMeasure& nu2) {
    if (kernel.dim != 1) throw config_error("energy_identity_check is implemented for d = 1");
    const double m = nu1.mean - nu2.mean;
    const double v = nu1.sd * nu1.sd + nu2.sd * nu2.sd;

    // LHS: ∫ gamma(u) phi_v(u - m) du with phi_v the N(0, v) density
    auto phi = [&](double u) {
        return std::exp(-(u - m) * (u - m) / (2.0 * v)) / std::sqrt(2.0 * M_PI * v);
    };
    const double R = m + 12.0 * std::sqrt(v) + 12.0;
    const double L = m - 12.0 * std::sqrt(v) - 12.0;
    double lhs = 0.0;
    std::vector<double> cuts = {L, 0.0, R};
    std::sort(cuts.begin(), cuts.end());
    for (size_t i = 0; i + 1 < cuts.size(); ++i) {
        if (cuts[i] == cuts[i + 1]) continue;
        lhs += integrate_de(
                   [&](double u, double da, double db) {
                       double uv = u;
                       if (cuts[i] == 0.0) uv = da;
                       if (cuts[i + 1] == 0.0) uv = -db;
                       return eval1(kernel, uv) * phi(uv);
                   },
                   cuts[i], cuts[i + 1], 1e-12, 1e-9)
                   .value;
    }

    // RHS: (2pi)^{-1} ∫ ghat(xi) exp(-v xi^2 / 2) cos(m xi) dxi
    SpectralMeasure mu(kernel);
    const double rhs = mu.integrate(
                             [&](double r) {
                                 return std::exp(-0.5 * v * r * r) * std::cos(m * r);
                             },
                             std::nullopt, true)
                           .value /
                       (2.0 * M_PI);

    BoundCheckResult res;
    res.name = "mutual energy identity";
    res.lhs = lhs;
    res.rhs = rhs;
    res.tolerance = 1e-6;
    res.satisfied = std::abs(lhs - rhs) <=
                    res.tolerance * std::max({1.0, std::abs(lhs), std::abs(rhs)});
    return res;
}

} // namespace levyfk
