#include "levyfk/moments.hpp"

#include "gamma_dispatch.hpp"
#include "levyfk/errors.hpp"
#include "levyfk/quadrature.hpp"

#include <omp.h>

#include <algorithm>
#include <cmath>
#include <numeric>

namespace levyfk {

namespace {

constexpr int kDefaultPCap = 6;

struct SlotSpec {
    int n_nodes = 0;              // offset time in grid steps
    std::vector<double> x;        // spatial offset
    std::uint64_t substream = 0;  // stream index within the replicate block
};

// sum over cells (i of A, j of B) of w_{|dn - i + j|} gamma(XA_i + xa - XB_j - xb),
// where dn = na - nb; the self case (same slot) gets the diagonal treatment.
// The net spatial offset xa - xb is folded into a shifted copy of A so the
// inner loop sees plain displacements.
double pair_term(const PathSample& A, const SlotSpec& sa, const PathSample& B,
                 const SlotSpec& sb, bool same_slot, const CovarianceKernel& kernel,
                 const CellWeights& w, DiagPolicy policy, double patch_per_cell) {
    const int na = sa.n_nodes, nb = sb.n_nodes;
    const int d = A.dim;
    const double* xa = A.values.data();
    const double* xb = B.values.data();

    std::vector<double> shifted;
    bool zero_shift = true;
    for (int c = 0; c < d; ++c) zero_shift = zero_shift && sa.x[c] == sb.x[c];
    if (!zero_shift) {
        shifted.assign(xa, xa + static_cast<size_t>(na) * d);
        for (int i = 0; i < na; ++i)
            for (int c = 0; c < d; ++c)
                shifted[static_cast<size_t>(i) * d + c] += sa.x[c] - sb.x[c];
        xa = shifted.data();
    }

    return detail::with_gamma(kernel, d, [&](auto&& g) {
        return detail::ham_pair_loop(xa, na, xb, nb, d, w.w, same_slot,
                                     kernel.is_singular(),
                                     detail::DiagPolicyTag{policy == DiagPolicy::analytic},
                                     patch_per_cell, nullptr, g);
    });
}

struct MixedPlan {
    TimeGrid grid;              // common grid up to the largest offset time
    std::vector<SlotSpec> slots;
    std::vector<int> eval_order; // slot indices sorted by substream (canonical)
    CellWeights weights;
    double patch_per_cell = 0.0; // E[gamma(X_h)] for the analytic diagonal
    bool needs_self = false;
};

MixedPlan make_plan(Sense sense, std::span<const Offset> offsets,
                    const LevyProcessSpec& process, const NoiseSpec& noise, const McConfig& mc,
                    std::span<const std::uint64_t> slot_streams) {
    const auto p = static_cast<int>(offsets.size());
    if (p < 1) throw config_error("mixed_moment needs at least one offset");
    if (p > kDefaultPCap && !mc.force)
        throw config_error("moment order p capped at 6 (exponent variance); use force to lift");
    if (!slot_streams.empty() && static_cast<int>(slot_streams.size()) != p)
        throw config_error("slot_streams must match the offset count");

    double t_max = 0.0;
    for (const auto& o : offsets) {
        if (!(o.t > 0.0)) throw config_error("offset times must be positive");
        if (static_cast<int>(o.x.size()) != process.dim)
            throw config_error("offset point dimension mismatch");
        t_max = std::max(t_max, o.t);
    }

    MixedPlan plan{TimeGrid::make(t_max, mc.n_steps), {}, {}, CellWeights{}, 0.0, false};
    const double h = plan.grid.step();
    plan.slots.resize(static_cast<size_t>(p));
    for (int j = 0; j < p; ++j) {
        const double steps = offsets[j].t / h;
        const int n = static_cast<int>(std::lround(steps));
        if (std::abs(steps - n) > 1e-9 * std::max(1.0, steps) || n < 1)
            throw config_error("offset times must be integer multiples of the grid step");
        plan.slots[static_cast<size_t>(j)] =
            SlotSpec{n, offsets[j].x,
                     slot_streams.empty() ? static_cast<std::uint64_t>(j) : slot_streams[j]};
    }
    plan.eval_order.resize(static_cast<size_t>(p));
    std::iota(plan.eval_order.begin(), plan.eval_order.end(), 0);
    std::sort(plan.eval_order.begin(), plan.eval_order.end(), [&](int a, int b) {
        return plan.slots[static_cast<size_t>(a)].substream <
               plan.slots[static_cast<size_t>(b)].substream;
    });

    plan.weights = cell_weights(plan.grid, noise.beta0);
    plan.needs_self = (sense == Sense::stratonovich);
    if (plan.needs_self && noise.kernel.is_singular())
        plan.patch_per_cell =
            std::pow(2.0 * M_PI, -noise.kernel.dim) * ExpPsiMuFn(noise.kernel, process)(h);
    return plan;
}

void gate(Sense sense, bool mixed, const LevyProcessSpec& process, const NoiseSpec& noise,
          const McConfig& mc) {
    if (mc.force) return;
    // the shifted-point representation rests on Hypothesis (I) in both senses;
    // same-point Skorohod moments only need Hypothesis (II)
    const bool need_I = (sense == Sense::stratonovich) || mixed;
    const HypothesisReport rep = need_I ? check_hypothesis_I(process, noise)
                                        : check_hypothesis_II(process, noise);
    if (!rep.holds)
        throw hypothesis_violation(to_string(rep.hypothesis),
                                   "moment estimator: hypothesis " + to_string(rep.hypothesis) +
                                       " fails for this configuration (use force to override)");
}

std::vector<double> run_replicates(Sense sense, const MixedPlan& plan,
                                   const InitialCondition& u0, const LevyProcessSpec& process,
                                   const McConfig& mc, const CovarianceKernel& kernel) {
    const long long R = mc.replicates;
    if (R < 1) throw config_error("replicates must be >= 1");
    const auto p = static_cast<int>(plan.slots.size());
    std::vector<double> values(static_cast<size_t>(R), 0.0);
    const int workers = mc.workers > 0 ? mc.workers : omp_get_max_threads();

#pragma omp parallel num_threads(workers)
    {
        std::vector<PathSample> paths(static_cast<size_t>(p));
        std::vector<double> point(static_cast<size_t>(process.dim));
#pragma omp for schedule(static)
        for (long long r = 0; r < R; ++r) {
            for (int j = 0; j < p; ++j)
                paths[static_cast<size_t>(j)] =
                    sample_path(process, plan.grid, mc.seed,
                                mc.stream_offset + static_cast<std::uint64_t>(r) * p +
                                    plan.slots[static_cast<size_t>(j)].substream);

            // canonical (substream-sorted) evaluation order keeps the result
            // exactly invariant under offset/stream permutations
            double expo = 0.0;
            if (sense == Sense::stratonovich) {
                for (int idx : plan.eval_order) {
                    const auto& s = plan.slots[static_cast<size_t>(idx)];
                    expo += 0.5 * pair_term(paths[static_cast<size_t>(idx)], s,
                                            paths[static_cast<size_t>(idx)], s, true, kernel,
                                            plan.weights, DiagPolicy::analytic,
                                            plan.patch_per_cell);
                }
            }
            for (int a = 0; a < p; ++a) {
                for (int b = a + 1; b < p; ++b) {
                    const int ja = plan.eval_order[static_cast<size_t>(a)];
                    const int jb = plan.eval_order[static_cast<size_t>(b)];
                    expo += pair_term(paths[static_cast<size_t>(ja)],
                                      plan.slots[static_cast<size_t>(ja)],
                                      paths[static_cast<size_t>(jb)],
                                      plan.slots[static_cast<size_t>(jb)], false, kernel,
                                      plan.weights, DiagPolicy::analytic, plan.patch_per_cell);
                }
            }

            double u0prod = 1.0;
            for (int idx : plan.eval_order) {
                const auto& s = plan.slots[static_cast<size_t>(idx)];
                const auto node = paths[static_cast<size_t>(idx)].at(s.n_nodes);
                for (int c = 0; c < process.dim; ++c) point[static_cast<size_t>(c)] =
                    node[static_cast<size_t>(c)] + s.x[static_cast<size_t>(c)];
                u0prod *= u0(point);
            }
            values[static_cast<size_t>(r)] = u0prod * std::exp(expo);
        }
    }
    return values;
}

MomentEstimate summarize(std::vector<double>& vals, Sense sense, int p, double t,
                         std::span<const double> x, const McConfig& mc) {
    const auto R = static_cast<long long>(vals.size());
    const double mean = pairwise_sum(vals) / static_cast<double>(R);
    std::vector<double> sq(vals.size());
    for (size_t i = 0; i < vals.size(); ++i) sq[i] = (vals[i] - mean) * (vals[i] - mean);
    const double var = R > 1 ? pairwise_sum(sq) / static_cast<double>(R - 1) : 0.0;
    MomentEstimate est;
    est.value = mean;
    est.stderr_est = std::sqrt(var / static_cast<double>(R));
    est.replicates = R;
    est.p = p;
    est.sense = sense;
    est.t = t;
    est.x.assign(x.begin(), x.end());
    est.n_steps = mc.n_steps;
    est.seed = mc.seed;
    return est;
}

} // namespace

MomentSample mixed_moment_sample(Sense sense, std::span<const Offset> offsets,
                                 const InitialCondition& u0, const LevyProcessSpec& process,
                                 const NoiseSpec& noise, const McConfig& mc,
                                 std::span<const std::uint64_t> slot_streams) {
    bool all_equal = true;
    for (const auto& o : offsets)
        all_equal = all_equal && o.t == offsets[0].t && o.x == offsets[0].x;
    gate(sense, !all_equal, process, noise, mc);
    const MixedPlan plan = make_plan(sense, offsets, process, noise, mc, slot_streams);
    auto vals = run_replicates(sense, plan, u0, process, mc, noise.kernel);
    MomentSample out;
    out.estimate = summarize(vals, sense, static_cast<int>(offsets.size()), offsets[0].t,
                             offsets[0].x, mc);
    out.replicate_values = std::move(vals);
    return out;
}

MomentEstimate mixed_moment(Sense sense, std::span<const Offset> offsets,
                            const InitialCondition& u0, const LevyProcessSpec& process,
                            const NoiseSpec& noise, const McConfig& mc,
                            std::span<const std::uint64_t> slot_streams) {
    return mixed_moment_sample(sense, offsets, u0, process, noise, mc, slot_streams).estimate;
}

MomentSample moment_sample(Sense sense, int p, double t, std::span<const double> x,
                           const InitialCondition& u0, const LevyProcessSpec& process,
                           const NoiseSpec& noise, const McConfig& mc) {
    std::vector<Offset> offsets(static_cast<size_t>(p));
    for (auto& o : offsets) {
        o.t = t;
        o.x.assign(x.begin(), x.end());
    }
    return mixed_moment_sample(sense, offsets, u0, process, noise, mc);
}

MomentEstimate moment_stratonovich(int p, double t, std::span<const double> x,
                                   const InitialCondition& u0, const LevyProcessSpec& process,
                                   const NoiseSpec& noise, const McConfig& mc) {
    return moment_sample(Sense::stratonovich, p, t, x, u0, process, noise, mc).estimate;
}

MomentEstimate moment_skorohod(int p, double t, std::span<const double> x,
                               const InitialCondition& u0, const LevyProcessSpec& process,
                               const NoiseSpec& noise, const McConfig& mc) {
    return moment_sample(Sense::skorohod, p, t, x, u0, process, noise, mc).estimate;
}

HolderScanResult holder_scan(Sense sense, ScanAxis axis, double t, std::span<const double> x,
                             std::span<const double> lags, const LevyProcessSpec& process,
                             const NoiseSpec& noise, const McConfig& mc) {
    if (lags.size() < 4)
        throw insufficient_data_error("holder_scan needs at least 4 lags");
    {
        const HypothesisReport rep = (sense == Sense::stratonovich)
                                         ? check_hypothesis_I(process, noise)
                                         : check_hypothesis_II(process, noise);
        if (!rep.holds && !mc.force)
            throw hypothesis_violation(to_string(rep.hypothesis),
                                       "holder_scan: prerequisite hypothesis fails");
    }

    const TimeGrid grid = TimeGrid::make(t, mc.n_steps);
    const double h = grid.step();
    const CellWeights weights = cell_weights(grid, noise.beta0);
    const int d = process.dim;
    const auto L = static_cast<int>(lags.size());

    std::vector<int> lag_steps(static_cast<size_t>(L), 0);
    if (axis == ScanAxis::time) {
        for (int m = 0; m < L; ++m) {
            const double steps = lags[m] / h;
            const int k = static_cast<int>(std::lround(steps));
            if (std::abs(steps - k) > 1e-9 || k < 1 || k >= grid.n_steps)
                throw insufficient_data_error(
                    "time-axis lags must be positive multiples of the grid step below t");
            lag_steps[static_cast<size_t>(m)] = k;
        }
    }

    double patch = 0.0;
    if (sense == Sense::stratonovich && noise.kernel.is_singular())
        patch = std::pow(2.0 * M_PI, -noise.kernel.dim) * ExpPsiMuFn(noise.kernel, process)(h);

    const long long R = mc.replicates;
    std::vector<std::vector<double>> diffs(static_cast<size_t>(L),
                                           std::vector<double>(static_cast<size_t>(R), 0.0));
    const int workers = mc.workers > 0 ? mc.workers : omp_get_max_threads();
    const auto& kernel = noise.kernel;

#pragma omp parallel num_threads(workers)
    {
        std::vector<double> zero(static_cast<size_t>(d), 0.0);
#pragma omp for schedule(static)
        for (long long r = 0; r < R; ++r) {
            const PathSample X = sample_path(process, grid, mc.seed, mc.stream_offset + 2 * r);
            const PathSample Y =
                sample_path(process, grid, mc.seed, mc.stream_offset + 2 * r + 1);
            const SlotSpec base{grid.n_steps, zero, 0};

            if (axis == ScanAxis::space) {
                double self_part = 0.0;
                if (sense == Sense::stratonovich) {
                    self_part =
                        0.5 * pair_term(X, base, X, base, true, kernel, weights,
                                        DiagPolicy::analytic, patch) +
                        0.5 * pair_term(Y, base, Y, base, true, kernel, weights,
                                        DiagPolicy::analytic, patch);
                }
                const double m0 = std::exp(self_part + pair_term(X, base, Y, base, false,
                                                                 kernel, weights,
                                                                 DiagPolicy::analytic, patch));
                for (int m = 0; m < L; ++m) {
                    SlotSpec shifted = base;
                    shifted.x[0] += lags[m];
                    const double mm = std::exp(
                        self_part + pair_term(X, base, Y, shifted, false, kernel, weights,
                                              DiagPolicy::analytic, patch));
                    diffs[static_cast<size_t>(m)][static_cast<size_t>(r)] = 2.0 * (m0 - mm);
                }
            } else {
                auto self_h = [&](const PathSample& P, int n_nodes) {
                    SlotSpec s{n_nodes, zero, 0};
                    return pair_term(P, s, P, s, true, kernel, weights, DiagPolicy::analytic,
                                     patch);
                };
                auto cross_h = [&](int na, int nb) {
                    SlotSpec sa{na, zero, 0}, sb{nb, zero, 0};
                    return pair_term(X, sa, Y, sb, false, kernel, weights,
                                     DiagPolicy::analytic, patch);
                };
                const int n = grid.n_steps;
                const double sx_t = (sense == Sense::stratonovich) ? self_h(X, n) : 0.0;
                const double sy_t = (sense == Sense::stratonovich) ? self_h(Y, n) : 0.0;
                const double m_tt = std::exp(0.5 * (sx_t + sy_t) + cross_h(n, n));
                for (int m = 0; m < L; ++m) {
                    const int np = n - lag_steps[static_cast<size_t>(m)];
                    double sx_p = 0.0, sy_p = 0.0;
                    if (sense == Sense::stratonovich) {
                        sx_p = self_h(X, np);
                        sy_p = self_h(Y, np);
                    }
                    const double m_pp = std::exp(0.5 * (sx_p + sy_p) + cross_h(np, np));
                    const double m_tp = std::exp(0.5 * (sx_t + sy_p) + cross_h(n, np));
                    diffs[static_cast<size_t>(m)][static_cast<size_t>(r)] =
                        m_tt + m_pp - 2.0 * m_tp;
                }
            }
        }
    }

    HolderScanResult res;
    res.sense = sense;
    res.axis = axis;
    res.lags.assign(lags.begin(), lags.end());
    res.second_moments.resize(static_cast<size_t>(L));
    res.stderrs.resize(static_cast<size_t>(L));
    std::vector<double> lx, ly;
    for (int m = 0; m < L; ++m) {
        auto& v = diffs[static_cast<size_t>(m)];
        const double mean = pairwise_sum(v) / static_cast<double>(R);
        std::vector<double> sq(v.size());
        for (size_t i = 0; i < v.size(); ++i) sq[i] = (v[i] - mean) * (v[i] - mean);
        const double sd = std::sqrt(pairwise_sum(sq) / static_cast<double>(R - 1));
        res.second_moments[static_cast<size_t>(m)] = mean;
        res.stderrs[static_cast<size_t>(m)] = sd / std::sqrt(static_cast<double>(R));
        if (mean > 0.0) {
            lx.push_back(std::log(lags[m]));
            ly.push_back(std::log(mean));
        }
    }
    if (lx.size() < 4)
        throw insufficient_data_error("holder_scan: fewer than 4 usable (positive) lags");

    const auto m = static_cast<double>(lx.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (size_t i = 0; i < lx.size(); ++i) {
        sx += lx[i];
        sy += ly[i];
        sxx += lx[i] * lx[i];
        sxy += lx[i] * ly[i];
    }
    const double denom = m * sxx - sx * sx;
    res.fitted_slope = (m * sxy - sx * sy) / denom;
    const double intercept = (sy - res.fitted_slope * sx) / m;
    double rss = 0.0;
    for (size_t i = 0; i < lx.size(); ++i) {
        const double e = ly[i] - (intercept + res.fitted_slope * lx[i]);
        rss += e * e;
    }
    const double s2 = lx.size() > 2 ? rss / (m - 2.0) : 0.0;
    res.slope_stderr = std::sqrt(s2 * m / denom);
    res.exponent_estimate = 0.5 * res.fitted_slope;
    return res;
}

} // namespace levyfk
