#include "levyfk/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace levyfk {

namespace {

// Gauss-Kronrod 7/15 nodes and weights (QUADPACK dqk15 constants).
constexpr double kXgk[8] = {
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144838258730,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000};
constexpr double kWgk[8] = {
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714};
constexpr double kWg[4] = {
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327};

struct Gk15 {
    double value;
    double error;
};

Gk15 gk15(const std::function<double(double)>& f, double a, double b) {
    const double c = 0.5 * (a + b);
    const double h = 0.5 * (b - a);
    const double fc = f(c);
    double res_g = fc * kWg[3];
    double res_k = fc * kWgk[7];
    for (int i = 0; i < 7; ++i) {
        const double dx = h * kXgk[i];
        const double f1 = f(c - dx);
        const double f2 = f(c + dx);
        res_k += kWgk[i] * (f1 + f2);
        if (i % 2 == 1) res_g += kWg[i / 2] * (f1 + f2);
    }
    const double value = res_k * h;
    const double err = std::abs((res_k - res_g) * h);
    return {value, err};
}

void adapt(const std::function<double(double)>& f, double a, double b, double abs_tol,
           double rel_tol, int depth, QuadResult& acc) {
    const Gk15 r = gk15(f, a, b);
    const double tol = std::max(abs_tol, rel_tol * std::abs(r.value));
    if (r.error <= tol || depth <= 0 || (b - a) < 1e-15 * (std::abs(a) + std::abs(b) + 1.0)) {
        acc.value += r.value;
        acc.error += r.error;
        return;
    }
    const double m = 0.5 * (a + b);
    adapt(f, a, m, 0.5 * abs_tol, rel_tol, depth - 1, acc);
    adapt(f, m, b, 0.5 * abs_tol, rel_tol, depth - 1, acc);
}

} // namespace

QuadResult integrate(const std::function<double(double)>& f, double a, double b,
                     double abs_tol, double rel_tol, int max_depth) {
    if (a == b) return {0.0, 0.0};
    QuadResult acc;
    adapt(f, a, b, abs_tol, rel_tol, max_depth, acc);
    return acc;
}

QuadResult integrate_segments(const std::function<double(double)>& f, double a, double b,
                              std::span<const double> breakpoints, double abs_tol,
                              double rel_tol) {
    std::vector<double> pts;
    pts.push_back(a);
    for (double p : breakpoints)
        if (p > a && p < b) pts.push_back(p);
    pts.push_back(b);
    std::sort(pts.begin(), pts.end());
    QuadResult acc;
    for (size_t i = 0; i + 1 < pts.size(); ++i) {
        const QuadResult r =
            integrate(f, pts[i], pts[i + 1], abs_tol / static_cast<double>(pts.size()), rel_tol);
        acc.value += r.value;
        acc.error += r.error;
    }
    return acc;
}

QuadResult integrate_de(const std::function<double(double, double, double)>& f, double a,
                        double b, double abs_tol, double rel_tol, int max_level) {
    // x(t) = m + hw * tanh((pi/2) sinh(t)); the distances from the endpoints
    // are hw*(1 +- tanh(.)) evaluated through exp to avoid cancellation.
    const double m = 0.5 * (a + b);
    const double hw = 0.5 * (b - a);
    const double tmax = 3.8; // weights underflow beyond this for double precision

    auto eval_at = [&](double t) -> double {
        const double u = 0.5 * M_PI * std::sinh(t);
        const double w = 0.5 * M_PI * std::cosh(t) / (std::cosh(u) * std::cosh(u));
        if (!std::isfinite(w) || w < 1e-300) return 0.0;
        // 1 - tanh(u) = 2 e^{-2u} / (1 + e^{-2u}); accurate for large |u|.
        const double e2 = std::exp(-2.0 * std::abs(u));
        const double dist_small = hw * 2.0 * e2 / (1.0 + e2);
        const double dist_large = 2.0 * hw - dist_small;
        double x, da, db;
        if (u >= 0) {
            db = dist_small;
            da = dist_large;
            x = b - db;
        } else {
            da = dist_small;
            db = dist_large;
            x = a + da;
        }
        const double fx = f(x, da, db);
        if (!std::isfinite(fx)) return 0.0;
        return fx * w;
    };

    double h = 1.0;
    int n = static_cast<int>(tmax / h);
    double sum = eval_at(0.0);
    for (int k = 1; k <= n; ++k) sum += eval_at(k * h) + eval_at(-k * h);
    double prev = sum * h * hw;

    double value = prev;
    double err = std::abs(prev);
    for (int level = 1; level <= max_level; ++level) {
        h *= 0.5;
        n = static_cast<int>(tmax / h);
        double add = 0.0;
        for (int k = 1; k <= n; k += 2) add += eval_at(k * h) + eval_at(-k * h);
        value = 0.5 * prev + add * h * hw;
        err = std::abs(value - prev);
        prev = value;
        if (err <= std::max(abs_tol, rel_tol * std::abs(value)) && level >= 3) break;
    }
    return {value, err};
}

QuadResult integrate_power_weighted(const std::function<double(double)>& g, double s,
                                    double T, double abs_tol, double rel_tol) {
    if (T <= 0.0) return {0.0, 0.0};
    if (s == 0.0) return integrate(g, 0.0, T, abs_tol, rel_tol);
    const double p = 1.0 + s; // > 0
    const double V = std::pow(T, p);
    auto h = [&](double v) {
        const double u = std::pow(v, 1.0 / p);
        return g(u) / p;
    };
    return integrate(h, 0.0, V, abs_tol, rel_tol);
}

double pairwise_sum(std::span<const double> x) {
    const size_t n = x.size();
    if (n == 0) return 0.0;
    if (n <= 8) {
        double s = 0.0;
        for (double v : x) s += v;
        return s;
    }
    const size_t half = n / 2;
    return pairwise_sum(x.first(half)) + pairwise_sum(x.subspan(half));
}

} // namespace levyfk
