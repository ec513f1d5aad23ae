#include "levyfk/model.hpp"

#include "levyfk/errors.hpp"
#include "levyfk/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace levyfk {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double norm2(std::span<const double> x) {
    double s = 0.0;
    for (double v : x) s += v * v;
    return std::sqrt(s);
}

void check_dim(int dim) {
    if (dim < 1) throw config_error("dimension must be a positive integer");
}

} // namespace

namespace detail {

double sphere_area(int dim) {
    // |S^{d-1}| = 2 pi^{d/2} / Gamma(d/2); |S^0| = 2
    return 2.0 * std::pow(M_PI, 0.5 * dim) / std::tgamma(0.5 * dim);
}

namespace {

// m-th coefficient of the large-q expansion of the FT of exp(-c|x|^alpha):
//   FT(q) = sum_{m>=1} a_m q^{-d-alpha m},
//   a_m = (-1)^{m+1} c^m/m! 2^{d+alpha m} pi^{d/2-1}
//         Gamma((d+alpha m)/2) Gamma(alpha m/2 + 1) sin(pi alpha m / 2).
// Convergent for alpha < 1, asymptotic for alpha in (1,2).
double tail_coeff(int m, double c, double alpha, int d) {
    const double am = alpha * m;
    const double sign = (m % 2 == 1) ? 1.0 : -1.0;
    const double lg = m * std::log(c) - std::lgamma(m + 1.0) + (d + am) * std::log(2.0) +
                      (0.5 * d - 1.0) * std::log(M_PI) + std::lgamma(0.5 * (d + am)) +
                      std::lgamma(0.5 * am + 1.0);
    return sign * std::exp(lg) * std::sin(0.5 * M_PI * am);
}

double tail_series(double q, double c, double alpha, int d, bool* ok) {
    double sum = 0.0;
    double prev_abs = kInf;
    int tiny_run = 0;
    const double lq = std::log(q);
    *ok = false;
    for (int m = 1; m <= 400; ++m) {
        const double am = alpha * m;
        const double term = tail_coeff(m, c, alpha, d) * std::exp(-(d + am) * lq);
        const double ta = std::abs(term);
        if (ta == 0.0) continue; // sin(pi alpha m / 2) hits an exact zero
        if (alpha > 1.0 && ta > prev_abs) {
            // asymptotic regime: stop at the smallest term
            *ok = prev_abs <= 1e-13 * std::max(std::abs(sum), 1e-300);
            return sum;
        }
        sum += term;
        if (ta <= 1e-15 * std::max(std::abs(sum), 1e-300)) {
            if (++tiny_run >= 2) {
                *ok = true;
                return sum;
            }
        } else {
            tiny_run = 0;
        }
        prev_abs = ta;
    }
    *ok = (alpha < 1.0); // convergent series, just slow
    return sum;
}

double hankel_direct(double q, double c, double alpha, int d) {
    // radius beyond which exp(-c r^alpha) < 1e-18
    const double R = std::pow(41.5 / c, 1.0 / alpha);
    std::function<double(double)> f;
    switch (d) {
        case 1:
            f = [=](double r) { return 2.0 * std::cos(q * r) * std::exp(-c * std::pow(r, alpha)); };
            break;
        case 2:
            f = [=](double r) {
                return 2.0 * M_PI * r * std::cyl_bessel_j(0.0, q * r) *
                       std::exp(-c * std::pow(r, alpha));
            };
            break;
        case 3:
            f = [=](double r) {
                const double s = (q * r < 1e-8) ? r * r : r * std::sin(q * r) / q;
                return 4.0 * M_PI * s * std::exp(-c * std::pow(r, alpha));
            };
            break;
        default:
            throw config_error("isotropic stable FT supports d <= 3");
    }
    // split at oscillation half-periods so each panel is smooth
    std::vector<double> breaks;
    if (q > 0.0) {
        const double step = M_PI / q;
        for (double p = step; p < R; p += step) breaks.push_back(p);
    }
    return integrate_segments(f, 0.0, R, breaks, 1e-12, 1e-10).value;
}

} // namespace

double isotropic_stable_ft_numeric(double q, double c, double alpha, int dim) {
    if (q == 0.0)
        return sphere_area(dim) * std::tgamma(dim / alpha) / (alpha * std::pow(c, dim / alpha));
    const double R = std::pow(41.5 / c, 1.0 / alpha);
    if (q * R <= 600.0) return std::max(0.0, hankel_direct(q, c, alpha, dim));
    bool ok = false;
    const double s = tail_series(q, c, alpha, dim, &ok);
    if (!ok) {
        // fall back on direct quadrature even though it is oscillatory
        return std::max(0.0, hankel_direct(q, c, alpha, dim));
    }
    return std::max(0.0, s);
}

double isotropic_stable_ft(double q, double c, double alpha, int dim) {
    if (alpha == 2.0) {
        // FT of exp(-c|x|^2)
        return std::pow(M_PI / c, 0.5 * dim) * std::exp(-q * q / (4.0 * c));
    }
    if (alpha == 1.0) {
        // FT of exp(-c|x|)
        const double cd = std::pow(2.0, dim) * std::pow(M_PI, 0.5 * (dim - 1)) *
                          std::tgamma(0.5 * (dim + 1));
        return cd * c / std::pow(c * c + q * q, 0.5 * (dim + 1));
    }
    return isotropic_stable_ft_numeric(q, c, alpha, dim);
}

} // namespace detail

CovarianceKernel CovarianceKernel::riesz_kernel(double beta, int dim) {
    check_dim(dim);
    if (!(beta > 0.0 && beta < dim))
        throw config_error("riesz kernel requires 0 < beta < d");
    CovarianceKernel k;
    k.family = KernelFamily::riesz;
    k.dim = dim;
    k.beta = beta;
    return k;
}

CovarianceKernel CovarianceKernel::fractional_product_kernel(std::vector<double> betas) {
    if (betas.empty()) throw config_error("fractional product kernel needs >= 1 exponent");
    for (double b : betas)
        if (!(b > 0.0 && b < 1.0))
            throw config_error("fractional product kernel requires each beta_j in (0,1)");
    CovarianceKernel k;
    k.family = KernelFamily::fractional_product;
    k.dim = static_cast<int>(betas.size());
    k.betas = std::move(betas);
    return k;
}

CovarianceKernel CovarianceKernel::cauchy_kernel(double c, int dim) {
    check_dim(dim);
    if (!(c > 0.0)) throw config_error("cauchy kernel requires c > 0");
    CovarianceKernel k;
    k.family = KernelFamily::cauchy;
    k.dim = dim;
    k.c = c;
    return k;
}

CovarianceKernel CovarianceKernel::poisson_kernel(double c, int dim) {
    check_dim(dim);
    if (!(c > 0.0)) throw config_error("poisson kernel requires c > 0");
    CovarianceKernel k;
    k.family = KernelFamily::poisson;
    k.dim = dim;
    k.c = c;
    return k;
}

CovarianceKernel CovarianceKernel::ornstein_uhlenbeck_kernel(double c, double alpha_ou, int dim) {
    check_dim(dim);
    if (!(c > 0.0)) throw config_error("ornstein-uhlenbeck kernel requires c > 0");
    if (!(alpha_ou > 0.0 && alpha_ou <= 2.0))
        throw config_error("ornstein-uhlenbeck kernel requires alpha in (0,2]");
    CovarianceKernel k;
    k.family = KernelFamily::ornstein_uhlenbeck;
    k.dim = dim;
    k.c = c;
    k.alpha_ou = alpha_ou;
    return k;
}

CovarianceKernel CovarianceKernel::constant_kernel(double level, int dim) {
    check_dim(dim);
    if (!(level > 0.0)) throw config_error("constant test kernel requires level > 0");
    CovarianceKernel k;
    k.family = KernelFamily::constant_test;
    k.dim = dim;
    k.level = level;
    return k;
}

bool CovarianceKernel::is_singular() const {
    return family == KernelFamily::riesz || family == KernelFamily::fractional_product;
}

double CovarianceKernel::total_beta() const {
    if (family == KernelFamily::riesz) return beta;
    if (family == KernelFamily::fractional_product) {
        double s = 0.0;
        for (double b : betas) s += b;
        return s;
    }
    return 0.0;
}

std::string CovarianceKernel::describe() const {
    std::ostringstream os;
    switch (family) {
        case KernelFamily::riesz: os << "riesz:beta=" << beta; break;
        case KernelFamily::fractional_product:
            os << "fractional:beta=";
            for (size_t i = 0; i < betas.size(); ++i) os << (i ? "," : "") << betas[i];
            break;
        case KernelFamily::cauchy: os << "cauchy:c=" << c; break;
        case KernelFamily::poisson: os << "poisson:c=" << c; break;
        case KernelFamily::ornstein_uhlenbeck:
            os << "ou:c=" << c << ",alpha=" << alpha_ou;
            break;
        case KernelFamily::constant_test: os << "constant:level=" << level; break;
    }
    return os.str();
}

double kernel_eval(const CovarianceKernel& k, std::span<const double> x) {
    if (static_cast<int>(x.size()) != k.dim)
        throw config_error("kernel_eval: point dimension mismatch");
    switch (k.family) {
        case KernelFamily::riesz: {
            const double r = norm2(x);
            return r == 0.0 ? kInf : std::pow(r, -k.beta);
        }
        case KernelFamily::fractional_product: {
            double v = 1.0;
            for (int j = 0; j < k.dim; ++j) {
                const double a = std::abs(x[j]);
                if (a == 0.0) return kInf;
                v *= std::pow(a, -k.betas[j]);
            }
            return v;
        }
        case KernelFamily::cauchy: {
            double v = 1.0;
            for (int j = 0; j < k.dim; ++j) v /= x[j] * x[j] + k.c;
            return v;
        }
        case KernelFamily::poisson: {
            double s = k.c;
            for (double xj : x) s += xj * xj;
            return std::pow(s, -0.5 * (k.dim + 1));
        }
        case KernelFamily::ornstein_uhlenbeck:
            return std::exp(-k.c * std::pow(norm2(x), k.alpha_ou));
        case KernelFamily::constant_test: return k.level;
    }
    return 0.0;
}

double spectral_density(const CovarianceKernel& k, std::span<const double> xi) {
    if (static_cast<int>(xi.size()) != k.dim)
        throw config_error("spectral_density: point dimension mismatch");
    switch (k.family) {
        case KernelFamily::riesz: {
            const double r = norm2(xi);
            const double d = k.dim;
            const double cst = std::pow(2.0, d - k.beta) * std::pow(M_PI, 0.5 * d) *
                               std::tgamma(0.5 * (d - k.beta)) / std::tgamma(0.5 * k.beta);
            return r == 0.0 ? kInf : cst * std::pow(r, k.beta - d);
        }
        case KernelFamily::fractional_product: {
            double v = 1.0;
            for (int j = 0; j < k.dim; ++j) {
                const double b = k.betas[j];
                const double cst = 2.0 * std::tgamma(1.0 - b) * std::sin(0.5 * M_PI * b);
                const double a = std::abs(xi[j]);
                if (a == 0.0) return kInf;
                v *= cst * std::pow(a, b - 1.0);
            }
            return v;
        }
        case KernelFamily::cauchy: {
            const double sc = std::sqrt(k.c);
            double v = 1.0;
            for (int j = 0; j < k.dim; ++j) v *= (M_PI / sc) * std::exp(-sc * std::abs(xi[j]));
            return v;
        }
        case KernelFamily::poisson: {
            const double sc = std::sqrt(k.c);
            const double cst = std::pow(M_PI, 0.5 * (k.dim + 1)) /
                               (std::tgamma(0.5 * (k.dim + 1)) * sc);
            return cst * std::exp(-sc * norm2(xi));
        }
        case KernelFamily::ornstein_uhlenbeck:
            return detail::isotropic_stable_ft(norm2(xi), k.c, k.alpha_ou, k.dim);
        case KernelFamily::constant_test:
            throw config_error(
                "constant kernel has an atomic spectral measure; spectral_density unsupported");
    }
    return 0.0;
}

LevyProcessSpec LevyProcessSpec::brownian(int dim) {
    check_dim(dim);
    LevyProcessSpec p;
    p.family = ProcessFamily::brownian;
    p.dim = dim;
    p.alpha = 2.0;
    return p;
}

LevyProcessSpec LevyProcessSpec::symmetric_stable(double alpha, int dim) {
    check_dim(dim);
    if (!(alpha > 0.0 && alpha <= 2.0))
        throw config_error("symmetric stable process requires alpha in (0,2]");
    LevyProcessSpec p;
    p.family = ProcessFamily::symmetric_stable;
    p.dim = dim;
    p.alpha = alpha;
    return p;
}

double LevyProcessSpec::effective_alpha() const {
    return family == ProcessFamily::brownian ? 2.0 : alpha;
}

std::string LevyProcessSpec::describe() const {
    if (family == ProcessFamily::brownian) return "brownian";
    std::ostringstream os;
    os << "stable:alpha=" << alpha;
    return os.str();
}

double levy_exponent(const LevyProcessSpec& p, std::span<const double> xi) {
    if (static_cast<int>(xi.size()) != p.dim)
        throw config_error("levy_exponent: point dimension mismatch");
    return levy_exponent_radial(p, norm2(xi));
}

double levy_exponent_radial(const LevyProcessSpec& p, double r) {
    if (p.family == ProcessFamily::brownian) return 0.5 * r * r;
    return std::pow(r, p.alpha);
}

double transition_density(const LevyProcessSpec& p, double t, std::span<const double> x) {
    if (!(t > 0.0)) throw std::domain_error("transition_density requires t > 0");
    if (static_cast<int>(x.size()) != p.dim)
        throw config_error("transition_density: point dimension mismatch");
    const double r = norm2(x);
    const int d = p.dim;
    if (p.family == ProcessFamily::brownian)
        return std::pow(2.0 * M_PI * t, -0.5 * d) * std::exp(-r * r / (2.0 * t));
    if (p.alpha == 2.0)
        return std::pow(4.0 * M_PI * t, -0.5 * d) * std::exp(-r * r / (4.0 * t));
    if (p.alpha == 1.0) {
        const double cd = std::tgamma(0.5 * (d + 1)) / std::pow(M_PI, 0.5 * (d + 1));
        return cd * t / std::pow(t * t + r * r, 0.5 * (d + 1));
    }
    if (d > 3)
        throw config_error("transition_density: Fourier inversion supports d <= 3");
    return std::pow(2.0 * M_PI, -d) * detail::isotropic_stable_ft(r, t, p.alpha, d);
}

NoiseSpec NoiseSpec::make(double beta0, CovarianceKernel kernel) {
    if (!(beta0 > 0.0 && beta0 < 1.0)) throw config_error("beta0 must lie strictly in (0,1)");
    NoiseSpec n;
    n.beta0 = beta0;
    n.kernel = std::move(kernel);
    return n;
}

InitialCondition InitialCondition::constant(double value) {
    InitialCondition u;
    u.constant_ = true;
    u.value_ = value;
    u.sup_abs_ = std::abs(value);
    return u;
}

InitialCondition InitialCondition::tabulated(std::vector<double> xs, std::vector<double> vs) {
    if (xs.size() != vs.size() || xs.size() < 2)
        throw config_error("tabulated initial condition needs >= 2 samples");
    if (!std::is_sorted(xs.begin(), xs.end()))
        throw config_error("tabulated initial condition abscissae must be sorted");
    InitialCondition u;
    u.constant_ = false;
    u.xs_ = std::move(xs);
    u.vs_ = std::move(vs);
    u.sup_abs_ = 0.0;
    for (double v : u.vs_) u.sup_abs_ = std::max(u.sup_abs_, std::abs(v));
    return u;
}

double InitialCondition::operator()(std::span<const double> x) const {
    if (constant_) return value_;
    if (x.size() != 1)
        throw config_error("tabulated initial condition is implemented for d = 1");
    const double q = x[0];
    if (q <= xs_.front()) return vs_.front();
    if (q >= xs_.back()) return vs_.back();
    const auto it = std::upper_bound(xs_.begin(), xs_.end(), q);
    const size_t i = static_cast<size_t>(it - xs_.begin());
    const double w = (q - xs_[i - 1]) / (xs_[i] - xs_[i - 1]);
    return vs_[i - 1] * (1.0 - w) + vs_[i] * w;
}

} // namespace levyfk
