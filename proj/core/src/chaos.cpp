#include "levyfk/chaos.hpp"

#include "levyfk/errors.hpp"
#include "levyfk/quadrature.hpp"
#include "levyfk/spectral.hpp"

#include <cmath>
#include <vector>

namespace levyfk {

namespace {

double lfact(int n) { return std::lgamma(n + 1.0); }

void require_constant_one(const InitialCondition& u0, const char* who) {
    if (!u0.is_constant() || u0.constant_value() != 1.0)
        throw config_error(std::string(who) +
                           ": the cross-moment identity needs u0 identically 1; "
                           "only the n = 0 quadrature supports other initial data");
}

// nodes and weights of a 2-d rule for ∫∫_{[0,t]^2} |r-s|^{-b} F(r,s) dr ds,
// built from the two triangles with the substitution tau = v^{1/(1-b)}
struct WeightedSquareRule {
    std::vector<double> r, s, w;
};

WeightedSquareRule weighted_square_rule(double t, double beta0, int n_outer, int n_inner) {
    // Gauss-Legendre nodes on [0,1]
    auto leg = [](int n) {
        std::vector<double> x(n), w(n);
        // Newton on Legendre polynomials
        for (int i = 0; i < n; ++i) {
            double z = std::cos(M_PI * (i + 0.75) / (n + 0.5));
            for (int it = 0; it < 100; ++it) {
                double p0 = 1.0, p1 = 0.0;
                for (int j = 0; j < n; ++j) {
                    const double p2 = p1;
                    p1 = p0;
                    p0 = ((2.0 * j + 1.0) * z * p1 - j * p2) / (j + 1.0);
                }
                const double dp = n * (z * p0 - p1) / (z * z - 1.0);
                const double dz = p0 / dp;
                z -= dz;
                if (std::abs(dz) < 1e-15) break;
            }
            double p0 = 1.0, p1 = 0.0;
            for (int j = 0; j < n; ++j) {
                const double p2 = p1;
                p1 = p0;
                p0 = ((2.0 * j + 1.0) * z * p1 - j * p2) / (j + 1.0);
            }
            const double dp = n * (z * p0 - p1) / (z * z - 1.0);
            x[i] = 0.5 * (1.0 - z);
            w[i] = 1.0 / ((1.0 - z * z) * dp * dp);
        }
        return std::pair(x, w);
    };
    const auto [ox, ow] = leg(n_outer);
    const auto [ix, iw] = leg(n_inner);

    WeightedSquareRule rule;
    const double q = 1.0 - beta0;
    for (int a = 0; a < n_outer; ++a) {
        const double s0 = t * ox[a];
        const double vmax = std::pow(t - s0, q);
        for (int b = 0; b < n_inner; ++b) {
            const double v = vmax * ix[b];
            const double tau = std::pow(v, 1.0 / q);
            const double wt = t * ow[a] * vmax * iw[b] / q;
            // triangle r > s and its mirror
            rule.r.push_back(s0 + tau);
            rule.s.push_back(s0);
            rule.w.push_back(wt);
            rule.r.push_back(s0);
            rule.s.push_back(s0 + tau);
            rule.w.push_back(wt);
        }
    }
    return rule;
}

} // namespace

namespace detail {

double cross_hamiltonian_second_moment_quadrature(const LevyProcessSpec& process,
                                                  const CovarianceKernel& kernel, double beta0,
                                                  double t) {
    if (kernel.family == KernelFamily::constant_test) {
        const double total =
            2.0 * std::pow(t, 2.0 - beta0) / ((1.0 - beta0) * (2.0 - beta0));
        const double h = total * kernel.level;
        return h * h;
    }
    const bool gaussian_process = process.family == ProcessFamily::brownian ||
                                  (process.family == ProcessFamily::symmetric_stable &&
                                   process.alpha == 2.0);
    const bool gaussian_kernel =
        kernel.family == KernelFamily::ornstein_uhlenbeck && kernel.alpha_ou == 2.0;
    if (!gaussian_process || !gaussian_kernel)
        throw config_error(
            "n = 2 chaos quadrature supports gaussian kernel with brownian/stable(2), "
            "or the constant kernel");

    // per-coordinate variance of X_r is vscale * r
    const double vscale = process.family == ProcessFamily::brownian ? 1.0 : 2.0;
    const double c = kernel.c;
    const int d = kernel.dim;

    const WeightedSquareRule rule = weighted_square_rule(t, beta0, 48, 48);
    const size_t M = rule.w.size();
    double total = 0.0;
    // E[gamma(Z1)gamma(Z2)] = det(I + 2cS)^{-d_block/2} with S the 2x2
    // covariance of a single coordinate of (Z1, Z2), Z_i = X_{r_i} - Y_{s_i}
    for (size_t a = 0; a < M; ++a) {
        const double r1 = rule.r[a], s1 = rule.s[a];
        const double v1 = vscale * (r1 + s1);
        double inner = 0.0;
        for (size_t b = 0; b < M; ++b) {
            const double r2 = rule.r[b], s2 = rule.s[b];
            const double v2 = vscale * (r2 + s2);
            const double cov = vscale * (std::min(r1, r2) + std::min(s1, s2));
            const double det = (1.0 + 2.0 * c * v1) * (1.0 + 2.0 * c * v2) -
                               4.0 * c * c * cov * cov;
            inner += rule.w[b] * std::pow(det, -0.5 * d);
        }
        total += rule.w[a] * inner;
    }
    return total;
}

} // namespace detail

ChaosTerm chaos_term(int n, double t, const InitialCondition& u0,
                     const LevyProcessSpec& process, const NoiseSpec& noise, const McConfig& mc,
                     ChaosMethod method) {
    if (n < 0) throw config_error("chaos order must be >= 0");
    ChaosTerm term;
    term.n = n;
    term.method = method;

    if (n == 0) {
        // (Q_t u0(x))^2 at the origin; exact 1 for u0 == 1
        if (u0.is_constant()) {
            term.value = u0.constant_value() * u0.constant_value();
            term.method = ChaosMethod::quadrature;
            return term;
        }
        const double qtu0 =
            integrate(
                [&](double y) {
                    const double pt[1] = {y};
                    const double q = transition_density(process, t, std::span(pt, 1));
                    const double yy[1] = {y};
                    return q * u0(std::span(yy, 1));
                },
                -60.0, 60.0, 1e-10, 1e-8)
                .value;
        term.value = qtu0 * qtu0;
        term.method = ChaosMethod::quadrature;
        return term;
    }

    require_constant_one(u0, "chaos_term");
    if (method == ChaosMethod::quadrature) {
        if (n == 1) {
            term.value = expected_hamiltonian(process, noise.kernel, noise.beta0, t,
                                              HamMode::cross);
            return term;
        }
        if (n == 2) {
            term.value = 0.5 * detail::cross_hamiltonian_second_moment_quadrature(
                                   process, noise.kernel, noise.beta0, t);
            return term;
        }
        throw config_error("chaos quadrature method is implemented for n <= 2 only");
    }

    if (n > 6) throw config_error("chaos_term: n <= 6 (Hamiltonian moment cap)");
    const HamiltonianMoment m =
        hamiltonian_moment(process, noise.kernel, noise.beta0, t, n, HamMode::cross, mc);
    const double inv_fact = std::exp(-lfact(n));
    term.value = m.value * inv_fact;
    term.stderr_est = m.stderr_est * inv_fact;
    return term;
}

ChaosPartialSum chaos_partial_sum(int N, double t, const InitialCondition& u0,
                                  const LevyProcessSpec& process, const NoiseSpec& noise,
                                  const McConfig& mc) {
    if (N < 0) throw config_error("chaos_partial_sum needs N >= 0");
    require_constant_one(u0, "chaos_partial_sum");
    if (!mc.force) {
        const HypothesisReport rep = check_hypothesis_II(process, noise);
        if (!rep.holds)
            throw hypothesis_violation(to_string(rep.hypothesis),
                                       "chaos_partial_sum: hypothesis II fails");
    }

    const HamiltonianPool pool =
        sample_hamiltonian_pool(process, noise.kernel, noise.beta0, t, HamMode::cross, mc);

    ChaosPartialSum out;
    out.terms.reserve(static_cast<size_t>(N) + 1);
    out.partial_sums.reserve(static_cast<size_t>(N) + 1);
    double acc = 0.0;
    for (int n = 0; n <= N; ++n) {
        ChaosTerm term;
        term.n = n;
        term.method = ChaosMethod::mc_cross_moment;
        if (n == 0) {
            term.value = 1.0;
        } else {
            const HamiltonianMoment m = pool_moment(pool, n);
            const double inv_fact = std::exp(-lfact(n));
            term.value = m.value * inv_fact;
            term.stderr_est = m.stderr_est * inv_fact;
        }
        acc += term.value;
        out.terms.push_back(term);
        out.partial_sums.push_back(acc);
    }
    if (N >= 1) {
        const double prev = out.terms[static_cast<size_t>(N) - 1].value;
        out.tail_ratio = prev > 0.0 ? out.terms[static_cast<size_t>(N)].value / prev : 0.0;
        out.tail_flagged = out.tail_ratio >= 1.0;
    }
    return out;
}

} // namespace levyfk
