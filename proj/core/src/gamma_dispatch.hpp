#pragma once

// Internal: dispatches the kernel family once per Hamiltonian evaluation so
// the O(n^2) cell loops run against an inlined gamma. Displacements are read
// as raw node pointers; d = 1 gets scalar fast paths (the Monte Carlo
// acceptance runs live there).

#include "levyfk/errors.hpp"
#include "levyfk/model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <span>

namespace levyfk::detail {

struct DiagPolicyTag {
    bool value = true; // true: analytic patch, false: drop
};

template <class Body>
double with_gamma(const CovarianceKernel& k, int d, Body&& body) {
    constexpr double inf = std::numeric_limits<double>::infinity();
    if (d > 16) throw config_error("Monte Carlo Hamiltonians support d <= 16");
    if (d == 1) {
        switch (k.family) {
            case KernelFamily::riesz:
            case KernelFamily::fractional_product: {
                const double b =
                    k.family == KernelFamily::riesz ? k.beta : k.betas.front();
                if (b == 0.5)
                    return body([](const double* x, const double* y) {
                        const double r = std::fabs(x[0] - y[0]);
                        return r == 0.0 ? inf : 1.0 / std::sqrt(r);
                    });
                return body([b](const double* x, const double* y) {
                    const double r = std::fabs(x[0] - y[0]);
                    return r == 0.0 ? inf : std::pow(r, -b);
                });
            }
            case KernelFamily::cauchy:
                return body([c = k.c](const double* x, const double* y) {
                    const double r = x[0] - y[0];
                    return 1.0 / (r * r + c);
                });
            case KernelFamily::poisson:
                return body([c = k.c](const double* x, const double* y) {
                    const double r = x[0] - y[0];
                    return 1.0 / (r * r + c); // d = 1: exponent (d+1)/2 = 1
                });
            case KernelFamily::ornstein_uhlenbeck: {
                if (k.alpha_ou == 2.0)
                    return body([c = k.c](const double* x, const double* y) {
                        const double r = x[0] - y[0];
                        return std::exp(-c * r * r);
                    });
                if (k.alpha_ou == 1.0)
                    return body([c = k.c](const double* x, const double* y) {
                        return std::exp(-c * std::fabs(x[0] - y[0]));
                    });
                return body([c = k.c, a = k.alpha_ou](const double* x, const double* y) {
                    return std::exp(-c * std::pow(std::fabs(x[0] - y[0]), a));
                });
            }
            case KernelFamily::constant_test:
                return body([lv = k.level](const double*, const double*) { return lv; });
        }
    }
    // generic d-dimensional fallback
    return body([&k, d](const double* x, const double* y) {
        double diff[16];
        for (int c = 0; c < d; ++c) diff[c] = x[c] - y[c];
        return kernel_eval(k, std::span<const double>(diff, static_cast<size_t>(d)));
    });
}

// Weighted double sum over cell pairs: nodes A_0..A_{na-1} against
// B_0..B_{nb-1} with weight w[|dn - i + j|], dn = na - nb (the lag of the
// time-reversed cells used by the multi-point moments; dn = 0 reproduces the
// plain Hamiltonian). same_slot marks the self case and triggers the
// diagonal policy.
template <class G>
double ham_pair_loop(const double* A, int na, const double* B, int nb, int d,
                     std::span<const double> w, bool same_slot, bool singular_kernel,
                     DiagPolicyTag policy_analytic, double patch_per_cell, int* dropped,
                     G&& g) {
    double acc = 0.0;
    if (same_slot) {
        if (singular_kernel) {
            if (dropped) *dropped += na;
            if (policy_analytic.value) acc += na * w[0] * patch_per_cell;
        } else {
            acc += na * w[0] * g(A, A);
        }
        for (int k = 1; k < na; ++k) {
            double s = 0.0;
            for (int i = 0; i + k < na; ++i) {
                const double v =
                    g(A + static_cast<size_t>(i + k) * d, A + static_cast<size_t>(i) * d);
                if (std::isinf(v)) {
                    if (dropped) *dropped += 2;
                    continue;
                }
                s += 2.0 * v;
            }
            acc += w[k] * s;
        }
        return acc;
    }
    const int dn = na - nb;
    for (int m = dn - (na - 1); m <= dn + (nb - 1); ++m) {
        const int off = m - dn; // j - i
        const int i0 = off < 0 ? -off : 0;
        const int i1 = std::min(na - 1, nb - 1 - off);
        double s = 0.0;
        for (int i = i0; i <= i1; ++i) {
            const double v = g(A + static_cast<size_t>(i) * d,
                               B + static_cast<size_t>(i + off) * d);
            if (std::isinf(v)) {
                if (dropped) ++*dropped;
                continue;
            }
            s += v;
        }
        acc += w[m < 0 ? -m : m] * s;
    }
    return acc;
}

} // namespace levyfk::detail
