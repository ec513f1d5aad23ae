#pragma once

#include <functional>
#include <span>
#include <vector>

namespace levyfk {

struct QuadResult {
    double value = 0.0;
    double error = 0.0;
};

// Adaptive Gauss-Kronrod 7/15 on a finite interval. Suitable for smooth or
// mildly singular integrands; endpoint singularities should go through
// integrate_de or a power substitution instead.
QuadResult integrate(const std::function<double(double)>& f, double a, double b,
                     double abs_tol = 1e-11, double rel_tol = 1e-10,
                     int max_depth = 48);

// Splits [a,b] at the given interior breakpoints and integrates each piece
// adaptively. Breakpoints outside (a,b) are ignored.
QuadResult integrate_segments(const std::function<double(double)>& f, double a, double b,
                              std::span<const double> breakpoints,
                              double abs_tol = 1e-11, double rel_tol = 1e-10);

// Double-exponential (tanh-sinh) rule on [a,b]. The callback receives the
// abscissa together with its exact distances from both endpoints so that
// integrands singular at an endpoint can be evaluated without cancellation:
//   f(x, x - a, b - x)  with the distances computed in exact arithmetic.
QuadResult integrate_de(const std::function<double(double, double, double)>& f,
                        double a, double b,
                        double abs_tol = 1e-12, double rel_tol = 1e-11,
                        int max_level = 9);

// ∫_0^T u^s g(u) du for s > -1 with g bounded near 0, via the substitution
// v = u^{1+s} that absorbs the algebraic endpoint weight.
QuadResult integrate_power_weighted(const std::function<double(double)>& g, double s,
                                    double T, double abs_tol = 1e-11,
                                    double rel_tol = 1e-10);

// Deterministic pairwise summation (order fixed by the array layout, so the
// result is independent of how many threads produced the entries).
double pairwise_sum(std::span<const double> x);

} // namespace levyfk
