#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <thread>
#include <vector>

#include "jumplab/common.hpp"
#include "jumplab/grid.hpp"
#include "jumplab/integrator.hpp"
#include "jumplab/model.hpp"
#include "jumplab/rng.hpp"
#include "jumplab/sumnorm.hpp"

namespace jumplab {

struct McOptions {
    std::uint64_t seed = 1;
    std::size_t replicas = 10000;
    int workers = 1;
    bool bootstrap = false;
    int bootstrap_resamples = 200;
};

namespace detail {

// Replica r is a pure function of (seed, r); workers carve the index range
// into contiguous blocks and every reduction happens afterwards in replica
// order, so results do not depend on the worker count.
template <class Fn>
void for_each_replica(std::size_t n, int workers, Fn&& fn) {
    const std::size_t nw = std::min<std::size_t>(std::max(workers, 1), std::max<std::size_t>(n, 1));
    if (nw <= 1) {
        for (std::size_t r = 0; r < n; ++r) fn(r);
        return;
    }
    const std::size_t block = (n + nw - 1) / nw;
    std::vector<std::thread> threads;
    threads.reserve(nw);
    for (std::size_t w = 0; w < nw; ++w) {
        const std::size_t lo = w * block;
        const std::size_t hi = std::min(n, lo + block);
        threads.emplace_back([lo, hi, &fn] {
            for (std::size_t r = lo; r < hi; ++r) fn(r);
        });
    }
    for (auto& t : threads) t.join();
}

struct MeanWithError {
    double mean = 0.0;
    double se = 0.0;
};

inline MeanWithError mean_and_se(std::span<const double> values) {
    const std::size_t n = values.size();
    MeanWithError out;
    out.mean = pairwise_sum(values) / static_cast<double>(n);
    if (n < 2) return out;
    std::vector<double> sq(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double d = values[i] - out.mean;
        sq[i] = d * d;
    }
    const double var = pairwise_sum(sq) / static_cast<double>(n - 1);
    out.se = std::sqrt(var / static_cast<double>(n));
    return out;
}

// (mean of x)^{1/p} with the delta-method standard error, optionally
// replaced by a bootstrap SE for heavy-tailed cases.
inline MeanWithError root_moment(std::span<const double> pow_values, double p,
                                 const McOptions& mc) {
    const auto base = mean_and_se(pow_values);
    MeanWithError out;
    if (base.mean <= 0.0) return out;
    out.mean = std::pow(base.mean, 1.0 / p);
    out.se = std::pow(base.mean, 1.0 / p - 1.0) * base.se / p;
    if (mc.bootstrap && pow_values.size() >= 2) {
        const std::size_t n = pow_values.size();
        std::vector<double> resampled(static_cast<std::size_t>(mc.bootstrap_resamples));
        std::vector<double> draw(n);
        for (std::size_t b = 0; b < resampled.size(); ++b) {
            ReplicaStream stream(mc.seed ^ 0x517CC1B727220A95ULL, b);
            for (std::size_t i = 0; i < n; ++i)
                draw[i] = pow_values[stream.next_u64() % n];
            const double m = pairwise_sum(draw) / static_cast<double>(n);
            resampled[b] = m <= 0.0 ? 0.0 : std::pow(m, 1.0 / p);
        }
        const auto boot = mean_and_se(resampled);
        std::vector<double> sq(resampled.size());
        for (std::size_t i = 0; i < resampled.size(); ++i) {
            const double d = resampled[i] - boot.mean;
            sq[i] = d * d;
        }
        out.se = std::sqrt(pairwise_sum(sq) /
                           static_cast<double>(resampled.size() - 1));
    }
    return out;
}

}  // namespace detail

struct MomentEstimate {
    double value = 0.0;
    double std_error = 0.0;
    std::size_t replicas = 0;
    std::uint64_t seed = 0;
};

// ( E sup_{t<=T} ||(g * mu_bar)_t||_{L_q}^p )^{1/p} by Monte Carlo.
inline MomentEstimate estimate_lhs(const Integrand& g, double p, double q,
                                   const RandomMeasureModel& model, const SpaceGrid& grid,
                                   const McOptions& mc) {
    require_exponent_open(p, "p");
    require_exponent_ge1(q, "q");
    if (mc.replicas < 2) throw InvalidInput("need at least 2 replicas");
    g.check_shape(model.nu(), grid);

    // Homogeneity: run the paths on g scaled into [-1, 1] by an exact power
    // of two, so rescaled integrands reuse the identical path arithmetic.
    const double scale = pow2_ceil_scale(g.flat());
    Integrand ghat = g;
    ghat *= 1.0 / scale;

    std::vector<double> sup_pow(mc.replicas);
    const double qs[1] = {q};
    detail::for_each_replica(mc.replicas, mc.workers, [&](std::size_t r) {
        ReplicaStream stream(mc.seed, r);
        const PointPattern pattern = sample(model, stream);
        const PathSummary summary = path_summary(ghat, pattern, model, grid, qs);
        sup_pow[r] = std::pow(summary.sup_norm[0], p);
    });
    const auto est = detail::root_moment(sup_pow, p, mc);
    return {scale * est.mean, scale * est.se, mc.replicas, mc.seed};
}

struct RatioRow {
    double p = 0.0;
    double q = 0.0;
    std::string regime_case;
    std::string family;
    double lhs = 0.0;
    double lhs_se = 0.0;
    double rhs = 0.0;
    double ratio = 0.0;
    bool ratio_defined = false;
    bool violation = false;  // rhs == 0 while lhs > 0; should be impossible
    std::size_t replicas = 0;
    std::uint64_t seed = 0;
};

struct LabeledIntegrand {
    std::string label;
    Integrand g;
};

// One row per (integrand, p, q): Monte Carlo LHS against the regime norm,
// with common random numbers across every row (patterns depend only on
// (model, seed, replica)).
inline std::vector<RatioRow> ratio_report(const std::vector<LabeledIntegrand>& family,
                                          const std::vector<std::pair<double, double>>& pq_list,
                                          const RandomMeasureModel& model,
                                          const SpaceGrid& grid, const McOptions& mc,
                                          const SumNormOptions& sum_opts = {}) {
    if (family.empty() || pq_list.empty())
        throw InvalidInput("ratio_report needs a nonempty family and pq list");
    for (const auto& member : family) member.g.check_shape(model.nu(), grid);

    std::vector<double> qs;
    for (const auto& pq : pq_list) qs.push_back(pq.second);
    std::sort(qs.begin(), qs.end());
    qs.erase(std::unique(qs.begin(), qs.end()), qs.end());
    const auto q_index = [&](double q) {
        return static_cast<std::size_t>(std::lower_bound(qs.begin(), qs.end(), q) -
                                        qs.begin());
    };

    std::vector<double> scales(family.size());
    std::vector<Integrand> ghat;
    ghat.reserve(family.size());
    for (std::size_t f = 0; f < family.size(); ++f) {
        scales[f] = pow2_ceil_scale(family[f].g.flat());
        ghat.push_back(family[f].g);
        ghat.back() *= 1.0 / scales[f];
    }

    // sup_pow[f][pq][replica]
    std::vector<std::vector<std::vector<double>>> sup_pow(
        family.size(), std::vector<std::vector<double>>(
                           pq_list.size(), std::vector<double>(mc.replicas)));
    detail::for_each_replica(mc.replicas, mc.workers, [&](std::size_t r) {
        ReplicaStream stream(mc.seed, r);
        const PointPattern pattern = sample(model, stream);
        for (std::size_t f = 0; f < family.size(); ++f) {
            const PathSummary summary = path_summary(ghat[f], pattern, model, grid, qs);
            for (std::size_t i = 0; i < pq_list.size(); ++i)
                sup_pow[f][i][r] = std::pow(summary.sup_norm[q_index(pq_list[i].second)],
                                            pq_list[i].first);
        }
    });

    std::vector<RatioRow> rows;
    for (std::size_t i = 0; i < pq_list.size(); ++i) {
        const auto [p, q] = pq_list[i];
        const RegimeFormula formula = regime_select(p, q);
        for (std::size_t f = 0; f < family.size(); ++f) {
            RatioRow row;
            row.p = p;
            row.q = q;
            row.regime_case = "case" + std::to_string(formula.case_index);
            row.family = family[f].label;
            const auto est = detail::root_moment(sup_pow[f][i], p, mc);
            row.lhs = scales[f] * est.mean;
            row.lhs_se = scales[f] * est.se;
            row.rhs = norm_value(formula.expr, family[f].g, model.nu(), grid, sum_opts);
            row.replicas = mc.replicas;
            row.seed = mc.seed;
            if (row.rhs > 0.0) {
                row.ratio = row.lhs / row.rhs;
                row.ratio_defined = true;
            } else {
                row.violation = row.lhs > 0.0;
            }
            rows.push_back(std::move(row));
        }
    }
    std::sort(rows.begin(), rows.end(), [](const RatioRow& a, const RatioRow& b) {
        if (a.p != b.p) return a.p < b.p;
        if (a.q != b.q) return a.q < b.q;
        return a.family < b.family;
    });
    return rows;
}

// Hilbert-case checks, H = L_2(X): ratios of the p-th maximal moment
// against the nu-side bounds each inequality prescribes.
struct HilbertRow {
    std::string inequality;  // "sqh" | "mejeto" | "mejo"
    bool applicable = false;
    bool trivial = false;  // 0/0
    double lhs = 0.0;      // E sup ||M||_H^p
    double lhs_se = 0.0;
    double rhs = 0.0;
    double ratio = 0.0;
};

struct HilbertReport {
    double p = 0.0;
    std::vector<HilbertRow> rows;
};

inline HilbertReport hilbert_checks(const Integrand& g, double p,
                                    const RandomMeasureModel& model, const SpaceGrid& grid,
                                    const McOptions& mc) {
    if (!(p > 0.0) || !std::isfinite(p)) throw InvalidInput("p must be positive and finite");
    g.check_shape(model.nu(), grid);
    if (mc.replicas < 2) throw InvalidInput("need at least 2 replicas");

    const double scale = pow2_ceil_scale(g.flat());
    Integrand ghat = g;
    ghat *= 1.0 / scale;
    const double scale_pow = std::pow(scale, p);

    std::vector<double> sup_pow(mc.replicas);
    const double qs[1] = {2.0};
    detail::for_each_replica(mc.replicas, mc.workers, [&](std::size_t r) {
        ReplicaStream stream(mc.seed, r);
        const PointPattern pattern = sample(model, stream);
        const PathSummary summary = path_summary(ghat, pattern, model, grid, qs);
        sup_pow[r] = std::pow(summary.sup_norm[0], p);
    });
    auto lhs = detail::mean_and_se(sup_pow);
    lhs.mean *= scale_pow;
    lhs.se *= scale_pow;

    const auto& nu = model.nu();
    std::vector<double> h2(nu.size()), hp(nu.size());
    std::vector<double> scratch;
    for (std::size_t c = 0; c < nu.size(); ++c) {
        const double hn = detail::row_lq(g.cell_row(c), 2.0, grid.weights, scratch);
        h2[c] = hn * hn * nu.nu_weights[c];
        hp[c] = std::pow(hn, p) * nu.nu_weights[c];
    }
    const double int_g2 = pairwise_sum(h2);
    const double int_gp = pairwise_sum(hp);
    const double sq_term = std::pow(int_g2, 0.5 * p);

    HilbertReport report;
    report.p = p;
    const auto push = [&](const char* name, bool applicable, double rhs) {
        HilbertRow row;
        row.inequality = name;
        row.applicable = applicable;
        if (!applicable) {
            report.rows.push_back(std::move(row));
            return;
        }
        row.lhs = lhs.mean;
        row.lhs_se = lhs.se;
        row.rhs = rhs;
        if (rhs > 0.0) {
            row.ratio = lhs.mean / rhs;
        } else {
            row.trivial = lhs.mean == 0.0;
            row.ratio = 0.0;
        }
        report.rows.push_back(std::move(row));
    };
    push("sqh", p <= 2.0, sq_term);
    push("mejeto", p >= 1.0 && p <= 2.0, int_gp);
    push("mejo", p >= 2.0, int_gp + sq_term);
    return report;
}

// Both directions of the bracket/maximal comparison:
// || [M,M]^{1/2}_inf ||_{L_p L_q} against || M*_inf ||_{L_p L_q}.
struct BdgReport {
    double p = 0.0;
    double q = 0.0;
    double bracket = 0.0;
    double bracket_se = 0.0;
    double maximal = 0.0;
    double maximal_se = 0.0;
    double ratio_bracket_over_maximal = 0.0;
    double ratio_maximal_over_bracket = 0.0;
};

inline BdgReport bdg_check(const Integrand& g, double p, double q,
                           const RandomMeasureModel& model, const SpaceGrid& grid,
                           const McOptions& mc) {
    require_exponent_open(p, "p");
    require_exponent_open(q, "q");
    g.check_shape(model.nu(), grid);
    if (mc.replicas < 2) throw InvalidInput("need at least 2 replicas");

    const double scale = pow2_ceil_scale(g.flat());
    Integrand ghat = g;
    ghat *= 1.0 / scale;

    std::vector<double> bracket_pow(mc.replicas), sup_pow(mc.replicas);
    const double qs[1] = {q};
    detail::for_each_replica(mc.replicas, mc.workers, [&](std::size_t r) {
        ReplicaStream stream(mc.seed, r);
        const PointPattern pattern = sample(model, stream);
        const PathSummary summary = path_summary(ghat, pattern, model, grid, qs);
        bracket_pow[r] = std::pow(summary.bracket_root_norm[0], p);
        sup_pow[r] = std::pow(summary.sup_norm[0], p);
    });
    const auto bracket = detail::root_moment(bracket_pow, p, mc);
    const auto maximal = detail::root_moment(sup_pow, p, mc);

    BdgReport report;
    report.p = p;
    report.q = q;
    report.bracket = scale * bracket.mean;
    report.bracket_se = scale * bracket.se;
    report.maximal = scale * maximal.mean;
    report.maximal_se = scale * maximal.se;
    if (bracket.mean > 0.0 && maximal.mean > 0.0) {
        report.ratio_bracket_over_maximal = bracket.mean / maximal.mean;
        report.ratio_maximal_over_bracket = maximal.mean / bracket.mean;
    }
    return report;
}

}  // namespace jumplab
