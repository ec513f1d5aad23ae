#include "levyfk/spectral.hpp"

#include "levyfk/errors.hpp"
#include "levyfk/quadrature.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <vector>

namespace levyfk {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr int kTailWindowLo = 4;   // fit window [2^4, 2^14] in |xi|
constexpr int kTailWindowHi = 14;
constexpr double kBoundaryBand = 0.05;

// 16-point Gauss-Legendre on [0,1] (nodes, weights) for the cauchy angular factor
constexpr int kGl = 16;
constexpr double kGlX[kGl] = {
    0.005299532504175031, 0.027712488463383712, 0.067184398806084128, 0.122297795822498445,
    0.191061877798678115, 0.270991611171386371, 0.359198224610370542, 0.452493745081181231,
    0.547506254918818769, 0.640801775389629458, 0.729008388828613629, 0.808938122201321885,
    0.877702204177501555, 0.932815601193915872, 0.972287511536616288, 0.994700467495824969};
constexpr double kGlW[kGl] = {
    0.013576229705877047, 0.031126761969323946, 0.047579255841246392, 0.062314485627766936,
    0.074797994408288368, 0.084578259697501270, 0.091301707522461794, 0.094725305227534248,
    0.094725305227534248, 0.091301707522461794, 0.084578259697501270, 0.074797994408288368,
    0.062314485627766936, 0.047579255841246392, 0.031126761969323946, 0.013576229705877047};

std::string hyp_name(Hypothesis h) {
    switch (h) {
        case Hypothesis::I: return "I";
        case Hypothesis::II: return "II";
        case Hypothesis::S1: return "S1";
        case Hypothesis::T1: return "T1";
        case Hypothesis::S2: return "S2";
        case Hypothesis::T2: return "T2";
    }
    return "?";
}

} // namespace

std::string to_string(Hypothesis h) { return hyp_name(h); }
std::string to_string(Sense s) { return s == Sense::stratonovich ? "stratonovich" : "skorohod"; }

SpectralMeasure::SpectralMeasure(const CovarianceKernel& kernel) : kernel_(kernel) {
    const int d = kernel_.dim;
    if (kernel_.family == KernelFamily::constant_test)
        throw config_error("constant kernel: spectral measure is atomic, quadrature unsupported");
    if (d > 3) throw config_error("spectral quadrature supports d <= 3");

    switch (kernel_.family) {
        case KernelFamily::riesz: {
            // rho(r) = |S^{d-1}| C_{d,beta} r^{beta-1}
            const double beta = kernel_.beta;
            const double c = std::pow(2.0, d - beta) * std::pow(M_PI, 0.5 * d) *
                             std::tgamma(0.5 * (d - beta)) / std::tgamma(0.5 * beta);
            angular_const_ = detail::sphere_area(d) * c;
            origin_exponent_ = beta - 1.0;
            tail_power_ = beta - 1.0;
            break;
        }
        case KernelFamily::fractional_product: {
            // surface integral of prod |w_j|^{b_j - 1} is 2 prod G(b_j/2) / G(beta/2)
            double c = 1.0, gs = 1.0, bsum = 0.0;
            for (double b : kernel_.betas) {
                c *= 2.0 * std::tgamma(1.0 - b) * std::sin(0.5 * M_PI * b);
                gs *= std::tgamma(0.5 * b);
                bsum += b;
            }
            angular_const_ = c * 2.0 * gs / std::tgamma(0.5 * bsum);
            origin_exponent_ = bsum - 1.0;
            tail_power_ = bsum - 1.0;
            break;
        }
        case KernelFamily::cauchy:
            angular_const_ = std::pow(M_PI / std::sqrt(kernel_.c), d);
            origin_exponent_ = d - 1.0;
            tail_power_ = std::nullopt;
            break;
        case KernelFamily::poisson:
        case KernelFamily::ornstein_uhlenbeck:
            origin_exponent_ = d - 1.0;
            tail_power_ = (kernel_.family == KernelFamily::ornstein_uhlenbeck &&
                           kernel_.alpha_ou < 2.0 && kernel_.alpha_ou != 1.0)
                              ? std::optional<double>(-kernel_.alpha_ou - 1.0)
                              : std::nullopt;
            if (kernel_.family == KernelFamily::ornstein_uhlenbeck && kernel_.alpha_ou == 1.0)
                tail_power_ = -kernel_.alpha_ou - 1.0;
            break;
        case KernelFamily::constant_test: break;
    }
}

double SpectralMeasure::radial_profile(double r) const {
    const int d = kernel_.dim;
    switch (kernel_.family) {
        case KernelFamily::riesz:
        case KernelFamily::fractional_product:
            return angular_const_ * std::pow(r, origin_exponent_);
        case KernelFamily::poisson: {
            const double sc = std::sqrt(kernel_.c);
            const double cst = std::pow(M_PI, 0.5 * (d + 1)) / (std::tgamma(0.5 * (d + 1)) * sc);
            return detail::sphere_area(d) * cst * std::exp(-sc * r) * std::pow(r, d - 1.0);
        }
        case KernelFamily::ornstein_uhlenbeck:
            return detail::sphere_area(d) *
                   detail::isotropic_stable_ft(r, kernel_.c, kernel_.alpha_ou, d) *
                   std::pow(r, d - 1.0);
        case KernelFamily::cauchy: {
            const double sc = std::sqrt(kernel_.c);
            if (d == 1) return 2.0 * angular_const_ * std::exp(-sc * r);
            if (d == 2) {
                // 4 ∫_0^{pi/2} exp(-sc r (cos + sin)) dtheta
                double s = 0.0;
                for (int i = 0; i < kGl; ++i) {
                    const double th = 0.5 * M_PI * kGlX[i];
                    s += kGlW[i] * std::exp(-sc * r * (std::cos(th) + std::sin(th)));
                }
                return angular_const_ * 4.0 * 0.5 * M_PI * s * r;
            }
            // d == 3: 8 ∫∫ over the positive octant
            double s = 0.0;
            for (int i = 0; i < kGl; ++i) {
                const double th = 0.5 * M_PI * kGlX[i];
                const double st = std::sin(th), ct = std::cos(th);
                double inner = 0.0;
                for (int j = 0; j < kGl; ++j) {
                    const double ph = 0.5 * M_PI * kGlX[j];
                    inner += kGlW[j] *
                             std::exp(-sc * r * (st * std::cos(ph) + st * std::sin(ph) + ct));
                }
                s += kGlW[i] * st * inner * 0.5 * M_PI;
            }
            return angular_const_ * 8.0 * 0.5 * M_PI * s * r * r;
        }
        case KernelFamily::constant_test: break;
    }
    return 0.0;
}

double SpectralMeasure::annulus(const std::function<double(double)>& f, double lo,
                                double hi) const {
    auto g = [&](double r) { return f(r) * radial_profile(r); };
    return levyfk::integrate(g, lo, hi, 1e-13, 1e-9).value;
}

MuIntegralResult SpectralMeasure::integrate(const std::function<double(double)>& f,
                                            std::optional<double> f_tail_order,
                                            bool exp_decaying_integrand) const {
    MuIntegralResult out;

    // inner ball, with the algebraic origin weight absorbed by substitution
    const double s0 = origin_exponent_;
    auto g = [&](double r) {
        if (r == 0.0) return 0.0;
        return f(r) * radial_profile(r) * std::pow(r, -s0);
    };
    double total = integrate_power_weighted(g, s0, 1.0, 1e-13, 1e-9).value;

    // dyadic tail; the ladder is capped at 2^14 unless the integrand decays
    // exponentially, in which case we walk out until it is negligible.
    const int jmax = exp_decaying_integrand ? 60 : kTailWindowHi;
    std::vector<double> lr, li; // fit window samples
    int negligible_run = 0;
    double last_mass = 0.0;
    for (int j = 0; j < jmax; ++j) {
        const double lo = std::pow(2.0, j), hi = 2.0 * lo;
        const double mass = annulus(f, lo, hi);
        total += mass;
        last_mass = mass;
        if (std::abs(mass) <= 1e-14 * std::max(std::abs(total), 1e-12)) {
            if (++negligible_run >= 2 && j >= 2) {
                out.value = total;
                out.converged = true;
                out.tail_exponent = -kInf;
                return out;
            }
        } else {
            negligible_run = 0;
        }
        if (j >= kTailWindowLo && j <= kTailWindowHi - 1 && mass > 0.0) {
            lr.push_back(j * std::log(2.0));
            li.push_back(std::log(mass));
        }
    }

    if (lr.size() < 3) {
        // tail became negligible before the window; treat as convergent
        out.value = total;
        out.converged = true;
        out.tail_exponent = -kInf;
        return out;
    }

    // least-squares slope of log(annulus mass) against log(radius)
    const size_t m = lr.size();
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (size_t i = 0; i < m; ++i) {
        sx += lr[i];
        sy += li[i];
        sxx += lr[i] * lr[i];
        sxy += lr[i] * li[i];
    }
    const double slope = (m * sxy - sx * sy) / (m * sxx - sx * sx);
    const double q = slope - 1.0; // integrand exponent
    out.tail_exponent = q;
    out.near_boundary = std::abs(q + 1.0) < kBoundaryBand;

    if (q < -1.0) {
        out.converged = true;
        const double ratio = std::pow(2.0, q + 1.0);
        out.value = total + last_mass * ratio / (1.0 - ratio);
    } else {
        out.converged = false;
        out.value = total; // partial sum, diagnostic only
    }
    (void)f_tail_order;
    return out;
}

double SpectralMeasure::mass_up_to(double R) const {
    auto one = [](double) { return 1.0; };
    const double s0 = origin_exponent_;
    auto g = [&](double r) {
        if (r == 0.0) return 0.0;
        return radial_profile(r) * std::pow(r, -s0);
    };
    const double r0 = std::min(R, 1.0);
    double total = integrate_power_weighted(g, s0, r0, 1e-13, 1e-10).value;
    if (R > 1.0) {
        std::vector<double> brk;
        for (double p = 2.0; p < R; p *= 2.0) brk.push_back(p);
        total += integrate_segments([&](double r) { return radial_profile(r); }, 1.0, R, brk,
                                    1e-13, 1e-10)
                     .value;
    }
    return total;
}

MuIntegralResult SpectralMeasure::integrate_from(const std::function<double(double)>& f, double N,
                                                 std::optional<double> f_tail_order) const {
    MuIntegralResult out;
    double total = 0.0;
    std::vector<double> lr, li;
    double last_mass = 0.0;
    int negligible_run = 0;
    for (int j = 0; j < 40; ++j) {
        const double lo = N * std::pow(2.0, j), hi = 2.0 * lo;
        const double mass = annulus(f, lo, hi);
        total += mass;
        last_mass = mass;
        if (std::abs(mass) <= 1e-14 * std::max(std::abs(total), 1e-12)) {
            if (++negligible_run >= 2 && j >= 2) {
                out.value = total;
                out.converged = true;
                out.tail_exponent = -kInf;
                return out;
            }
        } else {
            negligible_run = 0;
        }
        if (j >= 2 && j <= 13 && mass > 0.0) {
            lr.push_back(std::log(lo));
            li.push_back(std::log(mass));
        }
    }
    if (lr.size() < 3) {
        out.value = total;
        out.converged = true;
        out.tail_exponent = -kInf;
        return out;
    }
    const size_t m = lr.size();
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (size_t i = 0; i < m; ++i) {
        sx += lr[i];
        sy += li[i];
        sxx += lr[i] * lr[i];
        sxy += lr[i] * li[i];
    }
    const double slope = (m * sxy - sx * sy) / (m * sxx - sx * sx);
    const double q = slope - 1.0;
    out.tail_exponent = q;
    out.near_boundary = std::abs(q + 1.0) < kBoundaryBand;
    if (q < -1.0) {
        const double ratio = std::pow(2.0, q + 1.0);
        out.value = total + last_mass * ratio / (1.0 - ratio);
        out.converged = true;
    } else {
        out.value = total;
        out.converged = false;
    }
    (void)f_tail_order;
    return out;
}

MuIntegralResult mu_integral(const CovarianceKernel& kernel,
                             const std::function<double(double)>& radial_integrand,
                             std::optional<double> tail_order_hint) {
    SpectralMeasure mu(kernel);
    return mu.integrate(radial_integrand, tail_order_hint);
}

namespace {

bool closed_form_available(const LevyProcessSpec&, const NoiseSpec& noise) {
    const auto f = noise.kernel.family;
    return f == KernelFamily::riesz || f == KernelFamily::fractional_product;
}

HypothesisReport check_integrability(Hypothesis which, const LevyProcessSpec& process,
                                     const NoiseSpec& noise, double exponent,
                                     bool force_quadrature) {
    HypothesisReport rep;
    rep.hypothesis = which;

    if (noise.kernel.family == KernelFamily::constant_test) {
        // atomic spectral measure at 0: the integral is level (2pi)^d < inf
        rep.holds = true;
        rep.method = CheckMethod::closed_form;
        rep.integral_value =
            noise.kernel.level * std::pow(2.0 * M_PI, noise.kernel.dim);
        return rep;
    }

    auto integrand = [&](double r) {
        return 1.0 / (1.0 + std::pow(levy_exponent_radial(process, r), exponent));
    };
    SpectralMeasure mu(noise.kernel);
    const MuIntegralResult q =
        mu.integrate(integrand, -process.effective_alpha() * exponent);
    rep.tail_exponent = q.tail_exponent;
    rep.near_boundary = q.near_boundary;
    if (q.converged) rep.integral_value = q.value;

    if (closed_form_available(process, noise) && !force_quadrature) {
        const double alpha = process.effective_alpha();
        const double beta = noise.kernel.total_beta();
        const double threshold = alpha * exponent;
        rep.method = CheckMethod::closed_form;
        rep.holds = beta < threshold;
        rep.near_boundary = std::abs(beta - threshold) < kBoundaryBand;
    } else {
        rep.method = CheckMethod::quadrature;
        rep.holds = q.converged;
    }
    return rep;
}

} // namespace

HypothesisReport check_hypothesis_I(const LevyProcessSpec& process, const NoiseSpec& noise,
                                    bool force_quadrature) {
    return check_integrability(Hypothesis::I, process, noise, 1.0 - noise.beta0,
                               force_quadrature);
}

HypothesisReport check_hypothesis_II(const LevyProcessSpec& process, const NoiseSpec& noise,
                                     bool force_quadrature) {
    return check_integrability(Hypothesis::II, process, noise, 1.0, force_quadrature);
}

namespace {

// largest a in (0, 1] with ∫ weight(r, a) dmu convergent, by bisection on the
// quadrature verdict
double sweep_sup(const SpectralMeasure& mu,
                 const std::function<double(double, double)>& weighted_integrand) {
    auto converges = [&](double a) {
        auto f = [&](double r) { return weighted_integrand(r, a); };
        return mu.integrate(f).converged;
    };
    if (converges(1.0)) return 1.0;
    double lo = 0.0, hi = 1.0;
    for (int it = 0; it < 14; ++it) {
        const double mid = 0.5 * (lo + hi);
        (converges(mid) ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

} // namespace

HolderExponents holder_exponents(const LevyProcessSpec& process, const NoiseSpec& noise,
                                 Sense sense) {
    const HypothesisReport pre = (sense == Sense::stratonovich)
                                     ? check_hypothesis_I(process, noise)
                                     : check_hypothesis_II(process, noise);
    if (!pre.holds)
        throw hypothesis_violation(to_string(pre.hypothesis),
                                   "holder_exponents: prerequisite hypothesis " +
                                       to_string(pre.hypothesis) + " fails");

    HolderExponents out;
    const double b0 = noise.beta0;

    if (closed_form_available(process, noise)) {
        const double alpha = process.effective_alpha();
        const double beta = noise.kernel.total_beta();
        out.method = CheckMethod::closed_form;
        if (sense == Sense::stratonovich) {
            out.spatial_sup = 0.5 * (alpha * (1.0 - b0) - beta);
            out.temporal_sup = 0.5 * ((1.0 - b0) - beta / alpha);
        } else {
            out.spatial_sup = std::min(1.0, 0.5 * (alpha - beta));
            const double a2 = std::min(1.0, 1.0 - beta / alpha);
            out.temporal_sup = 0.5 * std::min(a2, 1.0 - b0);
        }
        return out;
    }

    SpectralMeasure mu(noise.kernel);
    const double e = (sense == Sense::stratonovich) ? 1.0 - b0 : 1.0;
    auto psi = [&](double r) { return levy_exponent_radial(process, r); };

    const double a1 = sweep_sup(mu, [&](double r, double a) {
        return std::pow(r, 2.0 * a) / (1.0 + std::pow(psi(r), e));
    });
    const double a2 = sweep_sup(mu, [&](double r, double a) {
        return std::pow(psi(r), a) / (1.0 + std::pow(psi(r), e));
    });

    out.method = CheckMethod::quadrature;
    out.spatial_sup = a1;
    out.temporal_sup = (sense == Sense::stratonovich) ? 0.5 * a2
                                                      : 0.5 * std::min(a2, 1.0 - b0);
    return out;
}

double exp_psi_mu(const CovarianceKernel& kernel, const LevyProcessSpec& process, double r) {
    if (!(r > 0.0)) throw std::domain_error("exp_psi_mu requires r > 0");
    SpectralMeasure mu(kernel);
    auto f = [&](double s) { return std::exp(-r * levy_exponent_radial(process, s)); };
    const MuIntegralResult res = mu.integrate(f, std::nullopt, true);
    if (!res.converged) throw divergence_error("exp_psi_mu: integral did not converge");
    return res.value;
}

ExpPsiMuFn::ExpPsiMuFn(CovarianceKernel kernel, LevyProcessSpec process)
    : kernel_(std::move(kernel)), process_(std::move(process)) {
    const int d = kernel_.dim;
    if (kernel_.family == KernelFamily::riesz ||
        kernel_.family == KernelFamily::fractional_product) {
        // Ghat(r) = A ∫_0^∞ exp(-r Psi(s)) s^{beta-1} ds with A the angular constant
        SpectralMeasure mu(kernel_);
        const double beta = kernel_.total_beta();
        const double A = mu.radial_profile(1.0); // A * 1^{beta-1}
        if (process_.family == ProcessFamily::brownian) {
            // ∫ exp(-r s^2/2) s^{beta-1} ds = 2^{beta/2-1} Gamma(beta/2) r^{-beta/2}
            kind_ = Kind::power_law;
            power_const_ = A * std::pow(2.0, 0.5 * beta - 1.0) * std::tgamma(0.5 * beta);
            power_exp_ = 0.5 * beta;
        } else {
            const double a = process_.alpha;
            kind_ = Kind::power_law;
            power_const_ = A * std::tgamma(beta / a) / a;
            power_exp_ = beta / a;
        }
        return;
    }
    if (kernel_.family == KernelFamily::ornstein_uhlenbeck && kernel_.alpha_ou == 2.0 &&
        (process_.family == ProcessFamily::brownian ||
         (process_.family == ProcessFamily::symmetric_stable && process_.alpha == 2.0))) {
        // gaussian kernel against a gaussian transition law
        kind_ = Kind::gaussian_pair;
        gauss_scale_ = (process_.family == ProcessFamily::brownian) ? 2.0 * kernel_.c
                                                                    : 4.0 * kernel_.c;
        (void)d;
        return;
    }
    if (kernel_.family == KernelFamily::cauchy || kernel_.family == KernelFamily::poisson ||
        kernel_.family == KernelFamily::ornstein_uhlenbeck) {
        kind_ = Kind::table; // finite total mass, Ghat bounded and smooth
        return;
    }
    kind_ = Kind::direct;
}

double ExpPsiMuFn::direct(double r) const { return exp_psi_mu(kernel_, process_, r); }

void ExpPsiMuFn::build_table(double r_max) const {
    const int m = 240;
    SpectralMeasure mu(kernel_);
    tab_r_.resize(m + 1);
    tab_g_.resize(m + 1);
    for (int i = 0; i <= m; ++i) {
        const double x = static_cast<double>(i) / m;
        tab_r_[i] = r_max * x * x; // cluster near 0 where Ghat is steepest
        tab_g_[i] = (i == 0)
                        ? mu.mass_up_to(1.0) +
                              mu.integrate_from([](double) { return 1.0; }, 1.0).value
                        : direct(tab_r_[i]);
    }
    tab_rmax_ = r_max;
}

double ExpPsiMuFn::operator()(double r) const {
    if (!(r > 0.0)) throw std::domain_error("ExpPsiMuFn requires r > 0");
    switch (kind_) {
        case Kind::power_law: return power_const_ * std::pow(r, -power_exp_);
        case Kind::gaussian_pair:
            return std::pow(2.0 * M_PI, kernel_.dim) *
                   std::pow(1.0 + gauss_scale_ * r, -0.5 * kernel_.dim);
        case Kind::table: {
            if (tab_r_.empty() || r > tab_rmax_) build_table(std::max(2.0 * r, 4.0));
            const int m = static_cast<int>(tab_r_.size()) - 1;
            const double x = std::sqrt(r / tab_rmax_) * m;
            const int j = std::clamp(static_cast<int>(x), 0, m - 1);
            const double u = (r - tab_r_[j]) / (tab_r_[j + 1] - tab_r_[j]);
            if (j == 0 || j == m - 1) // linear near the edges
                return tab_g_[j] * (1.0 - u) + tab_g_[j + 1] * u;
            const double p0 = tab_g_[j - 1], p1 = tab_g_[j], p2 = tab_g_[j + 1],
                         p3 = tab_g_[j + 2];
            const double dj = tab_r_[j + 1] - tab_r_[j];
            const double m1 = (p2 - p0) * dj / (tab_r_[j + 1] - tab_r_[j - 1]);
            const double m2 = (p3 - p1) * dj / (tab_r_[j + 2] - tab_r_[j]);
            const double u2 = u * u, u3 = u2 * u;
            return (2 * u3 - 3 * u2 + 1) * p1 + (u3 - 2 * u2 + u) * m1 +
                   (-2 * u3 + 3 * u2) * p2 + (u3 - u2) * m2;
        }
        case Kind::direct: return direct(r);
    }
    return 0.0;
}

double mu_mass_shifted_ball(const CovarianceKernel& kernel, double z) {
    SpectralMeasure mu(kernel);
    const int d = kernel.dim;
    const double az = std::abs(z);
    if (d == 1) {
        // interval [-z-1, -z+1]; integrate the even profile by |xi|
        const double lo = -z - 1.0, hi = -z + 1.0;
        auto dens = [&](double r) { return 0.5 * mu.radial_profile(std::abs(r)); };
        if (lo < 0.0 && hi > 0.0) {
            const double s0 = mu.origin_exponent();
            auto g = [&](double r) {
                return r == 0.0 ? 0.0 : dens(r) * std::pow(r, -s0);
            };
            return integrate_power_weighted(g, s0, -lo).value +
                   integrate_power_weighted(g, s0, hi).value;
        }
        return integrate([&](double r) { return dens(r); }, lo, hi, 1e-12, 1e-9).value;
    }
    if (kernel.family == KernelFamily::cauchy || kernel.family == KernelFamily::fractional_product)
        throw config_error("mu_mass_shifted_ball: product kernels supported in d = 1 only");
    // radial profile: integrate the spherical cap overlap of the unit ball at
    // distance |z| from the origin
    auto frac = [&](double r) -> double {
        if (az == 0.0) return r <= 1.0 ? 1.0 : 0.0;
        if (r + az <= 1.0) return 1.0;
        if (r >= az + 1.0 || az >= r + 1.0) return 0.0;
        const double cosg = (r * r + az * az - 1.0) / (2.0 * r * az);
        if (d == 2) return std::acos(std::clamp(cosg, -1.0, 1.0)) / M_PI;
        return 0.5 * (1.0 - std::clamp(cosg, -1.0, 1.0));
    };
    const double lo = std::max(0.0, az - 1.0), hi = az + 1.0;
    if (lo == 0.0) {
        const double s0 = mu.origin_exponent();
        auto g = [&](double r) {
            return r == 0.0 ? 0.0 : mu.radial_profile(r) * frac(r) * std::pow(r, -s0);
        };
        return integrate_power_weighted(g, s0, hi).value;
    }
    return integrate([&](double r) { return mu.radial_profile(r) * frac(r); }, lo, hi, 1e-12,
                     1e-9)
        .value;
}

} // namespace levyfk
