#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <string>
#include <vector>

#include "jumplab/config.hpp"
#include "jumplab/dualnorm.hpp"
#include "jumplab/integrator.hpp"
#include "jumplab/montecarlo.hpp"
#include "jumplab/oracle.hpp"
#include "jumplab/report.hpp"

namespace jumplab {

namespace detail {

inline std::string short_num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%g", v);
    return buf;
}

}  // namespace detail

struct RatiosOutcome {
    std::vector<RatioRow> rows;
    std::vector<std::string> failures;
};

// Two-sided maximal-moment / regime-norm comparison: every lhs/rhs ratio
// inside the band and a bounded per-(p,q) spread across families.
inline RatiosOutcome run_ratios_suite(const ExperimentConfig& cfg) {
    RatiosOutcome out;
    std::vector<LabeledIntegrand> family;
    for (const auto& spec : cfg.families)
        family.push_back({spec.name, make_family(spec, cfg.model, cfg.grid)});
    if (family.empty()) {
        out.failures.push_back("ratios: no families configured");
        return out;
    }
    out.rows =
        ratio_report(family, cfg.pq_list, cfg.model, cfg.grid, cfg.mc, cfg.optimizer);
    for (const auto& row : out.rows) {
        if (row.violation)
            out.failures.push_back("ratios: rhs = 0 with lhs > 0 for family " + row.family);
        if (!row.ratio_defined) continue;
        if (!(row.ratio >= cfg.bands.ratio_low && row.ratio <= cfg.bands.ratio_high))
            out.failures.push_back(
                "ratios: p=" + detail::short_num(row.p) + " q=" + detail::short_num(row.q) +
                " family=" + row.family + " ratio=" + detail::short_num(row.ratio) +
                " outside [" + detail::short_num(cfg.bands.ratio_low) + ", " +
                detail::short_num(cfg.bands.ratio_high) + "]");
    }
    for (const auto& pq : cfg.pq_list) {
        double lo = std::numeric_limits<double>::infinity();
        double hi = 0.0;
        for (const auto& row : out.rows) {
            if (row.p != pq.first || row.q != pq.second || !row.ratio_defined) continue;
            lo = std::min(lo, row.ratio);
            hi = std::max(hi, row.ratio);
        }
        if (hi > 0.0 && std::isfinite(lo) && hi / lo > cfg.bands.ratio_spread)
            out.failures.push_back("ratios: spread " + detail::short_num(hi / lo) +
                                   " at p=" + detail::short_num(pq.first) +
                                   " q=" + detail::short_num(pq.second) + " exceeds " +
                                   detail::short_num(cfg.bands.ratio_spread));
    }
    return out;
}

struct CheckOutcome {
    std::vector<CheckRow> rows;
    std::vector<std::string> failures;
};

// Hilbert-space maximal inequalities on random scalar integrands: the p-th
// maximal moment against the nu-side bounds, ratio below the configured
// constant.
inline CheckOutcome run_hilbert_suite(const ExperimentConfig& cfg) {
    CheckOutcome out;
    const SpaceGrid point = SpaceGrid::uniform(1);
    const std::vector<double> ps = {1.25, 1.5, 2.0, 3.0, 4.0};
    for (std::size_t i = 0; i < cfg.bands.hilbert_integrands; ++i) {
        ReplicaStream gstream(cfg.mc.seed ^ 0xA54FF53A5F1D36F1ULL, i);
        const Integrand g = random_integrand(cfg.model.n_cells(), 1, gstream, 2.0);
        for (const double p : ps) {
            const auto report = hilbert_checks(g, p, cfg.model, point, cfg.mc);
            for (const auto& row : report.rows) {
                if (!row.applicable) continue;
                CheckRow check;
                check.suite = "hilbert";
                check.case_label = row.inequality + " p=" + detail::short_num(p) +
                                   " g=" + std::to_string(i);
                check.value = row.ratio;
                check.bound = cfg.bands.hilbert_bound;
                check.pass = row.trivial ||
                             (std::isfinite(row.ratio) && row.ratio <= check.bound);
                if (!check.pass)
                    out.failures.push_back("hilbert: " + check.case_label + " ratio " +
                                           detail::short_num(check.value) + " exceeds " +
                                           detail::short_num(check.bound));
                out.rows.push_back(std::move(check));
            }
        }
    }
    return out;
}

// Both directions of the bracket/maximal comparison over the family sweep,
// with the sharp [1, 4] window at p = q = 2.
inline CheckOutcome run_bdg_suite(const ExperimentConfig& cfg) {
    CheckOutcome out;
    for (const auto& spec : cfg.families) {
        const Integrand g = make_family(spec, cfg.model, cfg.grid);
        for (const auto& [p, q] : cfg.pq_list) {
            const auto report = bdg_check(g, p, q, cfg.model, cfg.grid, cfg.mc);
            const std::string tag =
                "p=" + detail::short_num(p) + " q=" + detail::short_num(q) + " family=" +
                spec.name;
            const bool zero = report.bracket == 0.0 && report.maximal == 0.0;
            CheckRow bm{"bdg", tag + " bracket/maximal", report.ratio_bracket_over_maximal,
                        cfg.bands.bdg_high, true};
            bm.pass = zero || (bm.value >= cfg.bands.bdg_low && bm.value <= cfg.bands.bdg_high);
            CheckRow mb{"bdg", tag + " maximal/bracket", report.ratio_maximal_over_bracket,
                        cfg.bands.bdg_high, true};
            mb.pass = zero || (mb.value >= cfg.bands.bdg_low && mb.value <= cfg.bands.bdg_high);
            if (!bm.pass || !mb.pass)
                out.failures.push_back("bdg: " + tag + " ratios " +
                                       detail::short_num(bm.value) + ", " +
                                       detail::short_num(mb.value) + " leave the band");
            out.rows.push_back(std::move(bm));
            out.rows.push_back(std::move(mb));

            if (p == 2.0 && q == 2.0 && !zero) {
                const double ratio2 = (report.maximal / report.bracket) *
                                      (report.maximal / report.bracket);
                const double rel_se = 2.0 * report.maximal_se / report.maximal +
                                      2.0 * report.bracket_se / report.bracket;
                const double noise = 3.0 * rel_se * ratio2;
                CheckRow low{"bdg", tag + " isometry_low", ratio2, 1.0,
                             ratio2 >= 1.0 - noise};
                CheckRow high{"bdg", tag + " doob_high", ratio2, 4.0,
                              ratio2 <= 4.0 + noise};
                if (!low.pass || !high.pass)
                    out.failures.push_back("bdg: " + tag + " E sup^2 / E bracket = " +
                                           detail::short_num(ratio2) +
                                           " outside [1, 4] + noise");
                out.rows.push_back(std::move(low));
                out.rows.push_back(std::move(high));
            }
        }
    }
    return out;
}

// Exact pathwise Davis bound: total variation of the big-jump part never
// exceeds twice the running jump sup, on every sampled realization.
inline CheckOutcome run_davis_suite(const ExperimentConfig& cfg) {
    CheckOutcome out;
    std::vector<double> qs;
    for (const auto& pq : cfg.pq_list) qs.push_back(pq.second);
    std::sort(qs.begin(), qs.end());
    qs.erase(std::unique(qs.begin(), qs.end()), qs.end());
    for (const auto& spec : cfg.families) {
        const Integrand g = make_family(spec, cfg.model, cfg.grid);
        std::vector<double> worst(qs.size(), 0.0);
        for (std::size_t r = 0; r < cfg.bands.davis_paths; ++r) {
            ReplicaStream stream(cfg.mc.seed ^ 0x3C6EF372FE94F82BULL, r);
            const PointPattern pattern = sample(cfg.model, stream);
            const PathRealization path = integrate_path(g, pattern, cfg.model);
            for (std::size_t qi = 0; qi < qs.size(); ++qi) {
                const auto split = davis_split(path.jumps, qs[qi], cfg.grid);
                if (split.s_inf > 0.0)
                    worst[qi] = std::max(worst[qi], split.big_tv / (2.0 * split.s_inf));
            }
        }
        for (std::size_t qi = 0; qi < qs.size(); ++qi) {
            CheckRow row{"davis",
                         "family=" + spec.name + " q=" + detail::short_num(qs[qi]),
                         worst[qi], 1.0, worst[qi] <= 1.0};
            if (!row.pass)
                out.failures.push_back("davis: TV bound violated for " + row.case_label);
            out.rows.push_back(std::move(row));
        }
    }
    return out;
}

// Deterministic norm identities: the interpolation bound, the mixed-norm
// order swap, and the q = 2 collapse of the tilde norm.
inline CheckOutcome run_lemma_suite(const ExperimentConfig& cfg) {
    CheckOutcome out;
    ReplicaStream stream(cfg.mc.seed ^ 0xBB67AE8584CAA73BULL, 0);

    double worst34 = 0.0;
    for (std::size_t trial = 0; trial < cfg.bands.lemma_trials; ++trial) {
        const std::size_t n = 1 + stream.next_u32() % 6;
        std::vector<double> w(n), v(n);
        for (auto& x : w) x = stream.next_uniform(0.05, 3.0);
        for (auto& x : v) x = stream.next_uniform(-2.0, 2.0);
        const SpaceGrid grid({}, w);
        const double r = stream.next_uniform(1.0, 3.0);
        const double s = r + stream.next_uniform(0.01, 2.0);
        const double t = s + stream.next_uniform(0.01, 2.0);
        const double nr = lq_norm(v, r, grid);
        const double ns = lq_norm(v, s, grid);
        const double nt = lq_norm(v, t, grid);
        for (const double alpha : {0.5, 1.0, 2.0}) {
            const double lhs = std::pow(ns, alpha);
            const double rhs = std::pow(nr, alpha) + std::pow(nt, alpha);
            worst34 = std::max(worst34, (lhs - rhs) / (1.0 + rhs));
        }
    }
    out.rows.push_back({"lemma", "interpolation_alpha_bound", worst34, cfg.bands.lemma_tol,
                        worst34 <= cfg.bands.lemma_tol});

    double worst_hm = 0.0;
    for (std::size_t trial = 0; trial < cfg.bands.lemma_trials; ++trial) {
        const std::size_t rows = 1 + stream.next_u32() % 5;
        const std::size_t cols = 1 + stream.next_u32() % 5;
        std::vector<double> u(rows), w(cols), f(rows * cols), ft(rows * cols);
        for (auto& x : u) x = stream.next_uniform(0.05, 2.0);
        for (auto& x : w) x = stream.next_uniform(0.05, 2.0);
        for (auto& x : f) x = stream.next_uniform(-3.0, 3.0);
        for (std::size_t i = 0; i < rows; ++i)
            for (std::size_t j = 0; j < cols; ++j) ft[j * rows + i] = f[i * cols + j];
        const double q = stream.next_uniform(1.0, 4.0);
        const double p = q + stream.next_uniform(0.0, 3.0);
        const double lhs = mixed_norm_2d(f, rows, cols, u, w, p, q);
        const double rhs = mixed_norm_2d(ft, cols, rows, w, u, q, p);
        worst_hm = std::max(worst_hm, (lhs - rhs) / (1.0 + rhs));
    }
    out.rows.push_back({"lemma", "holder_minkowski", worst_hm, cfg.bands.lemma_tol,
                        worst_hm <= cfg.bands.lemma_tol});

    double worst_collapse = 0.0;
    for (std::size_t trial = 0; trial < cfg.bands.collapse_trials; ++trial) {
        const std::size_t cells = 1 + stream.next_u32() % 6;
        const std::size_t points = 1 + stream.next_u32() % 5;
        NuGrid nu;
        for (std::size_t c = 0; c < cells; ++c) {
            nu.cells.push_back({c, 0});
            nu.nu_weights.push_back(stream.next_uniform(0.0, 3.0));
        }
        std::vector<double> w(points);
        for (auto& x : w) x = stream.next_uniform(0.1, 2.0);
        const SpaceGrid grid({}, w);
        const Integrand g = random_integrand(cells, points, stream, 2.0);
        const double p = stream.next_uniform(1.1, 4.0);
        const double a = atomic_norm(g, AtomicKind::Tilde, p, 2.0, nu, grid);
        const double b = atomic_norm(g, AtomicKind::Lpqq, p, 2.0, nu, grid);
        worst_collapse =
            std::max(worst_collapse, std::abs(a - b) / std::max({a, b, 1e-300}));
    }
    out.rows.push_back({"lemma", "q2_collapse", worst_collapse, cfg.bands.collapse_tol,
                        worst_collapse <= cfg.bands.collapse_tol});

    for (const auto& row : out.rows)
        if (!row.pass)
            out.failures.push_back("lemma: " + row.case_label + " worst value " +
                                   detail::short_num(row.value) + " exceeds " +
                                   detail::short_num(row.bound));
    return out;
}

// Monte Carlo LHS against exhaustive enumeration on the configured
// Bernoulli model; passes when the in-band fraction reaches the floor.
inline CheckOutcome run_oracle_suite(const ExperimentConfig& cfg) {
    CheckOutcome out;
    if (cfg.model.kind() != RandomMeasureModel::Kind::BernoulliCells) {
        out.failures.push_back("oracle: configured model is not bernoulli_cells");
        return out;
    }
    std::size_t passed = 0, total = 0;
    for (const auto& spec : cfg.families) {
        const Integrand g = make_family(spec, cfg.model, cfg.grid);
        for (const auto& [p, q] : cfg.pq_list) {
            const double exact = enumerate_lhs(g, cfg.model, p, q, cfg.grid);
            const auto est = estimate_lhs(g, p, q, cfg.model, cfg.grid, cfg.mc);
            const double diff = std::abs(est.value - exact);
            CheckRow row;
            row.suite = "oracle";
            row.case_label = "family=" + spec.name + " p=" + detail::short_num(p) +
                             " q=" + detail::short_num(q);
            // Deterministic integrand/model pairs can have zero MC variance,
            // so the SE gets a floating-point floor before dividing.
            const double floor = 1e-12 * std::max(exact, 1e-300);
            row.value = diff / (est.std_error + floor);
            row.bound = cfg.bands.oracle_se_mult;
            row.pass = row.value <= row.bound;
            passed += row.pass ? 1 : 0;
            ++total;
            out.rows.push_back(std::move(row));
        }
    }
    const double fraction =
        total == 0 ? 0.0 : static_cast<double>(passed) / static_cast<double>(total);
    CheckRow summary{"oracle", "pass_fraction", fraction, cfg.bands.oracle_min_pass,
                     fraction >= cfg.bands.oracle_min_pass};
    if (!summary.pass)
        out.failures.push_back("oracle: only " + detail::short_num(100.0 * fraction) +
                               "% of cells within " +
                               detail::short_num(cfg.bands.oracle_se_mult) + " SE");
    out.rows.push_back(std::move(summary));
    return out;
}

// Optimizer against the lattice oracle on random low-dimensional sum-space
// instances, plus the certified ell_1 / 2 ell_2 instance with value 2.
inline CheckOutcome run_optimizer_suite(const ExperimentConfig& cfg) {
    CheckOutcome out;
    ReplicaStream stream(cfg.mc.seed ^ 0x2B992DDFA23249D6ULL, 0);
    for (std::size_t i = 0; i < cfg.bands.optimizer_instances; ++i) {
        const bool three_parts = i % 5 == 0;
        const std::size_t cells = three_parts ? 1 : 1 + stream.next_u32() % 3;
        NuGrid nu;
        for (std::size_t c = 0; c < cells; ++c) {
            nu.cells.push_back({c, 0});
            nu.nu_weights.push_back(stream.next_uniform(0.3, 1.8));
        }
        const SpaceGrid grid = SpaceGrid::uniform(1);
        const Integrand g = random_integrand(cells, 1, stream, 2.0);
        const double p = stream.next_uniform(1.1, 3.5);
        const double q = stream.next_uniform(1.1, 3.5);
        std::vector<NormExpr> parts{NormExpr::lppq(p, q),
                                    NormExpr::scaled(stream.next_uniform(0.5, 2.0),
                                                     NormExpr::tilde(q))};
        if (three_parts) parts.push_back(NormExpr::lpqq(q));
        const double opt = sum_norm(g, parts, nu, grid, cfg.optimizer);
        const double reference = grid_search_sum_norm(g, parts, nu, grid, 1e-4);
        const double rel =
            std::abs(opt - reference) / std::max({opt, reference, 1e-300});
        CheckRow row{"optimizer", "instance=" + std::to_string(i), rel,
                     cfg.bands.optimizer_rel_tol, rel <= cfg.bands.optimizer_rel_tol};
        if (!row.pass)
            out.failures.push_back("optimizer: instance " + std::to_string(i) +
                                   " off the lattice oracle by " + detail::short_num(rel));
        out.rows.push_back(std::move(row));
    }

    NuGrid nu;
    nu.cells = {{0, 0}, {1, 0}};
    nu.nu_weights = {1.0, 1.0};
    const SpaceGrid grid = SpaceGrid::uniform(1);
    Integrand g(2, 1, 1.0);
    const double value =
        sum_norm(g,
                 {NormExpr::mixed(1.0, 2.0), NormExpr::scaled(2.0, NormExpr::mixed(2.0, 2.0))},
                 nu, grid, cfg.optimizer);
    const double rel = std::abs(value - 2.0) / 2.0;
    CheckRow certified{"optimizer", "certified_ell1_2ell2", rel, 1e-4, rel <= 1e-4};
    if (!certified.pass)
        out.failures.push_back("optimizer: certified instance returned " +
                               detail::short_num(value));
    out.rows.push_back(std::move(certified));
    return out;
}

// Conjugate-exponent duality spot check on tiny instances: the brute-force
// dual norm against the (p', q') regime norm, as an equivalence ratio.
inline CheckOutcome run_duality_suite(const ExperimentConfig& cfg) {
    CheckOutcome out;
    ReplicaStream stream(cfg.mc.seed ^ 0x452821E638D01377ULL, 0);
    const std::vector<std::pair<double, double>> pqs = {{1.5, 3.0}, {3.0, 1.5}};
    for (std::size_t i = 0; i < cfg.bands.duality_instances; ++i) {
        NuGrid nu;
        nu.cells = {{0, 0}, {1, 0}};
        nu.nu_weights = {stream.next_uniform(0.3, 2.0), stream.next_uniform(0.3, 2.0)};
        const SpaceGrid grid = SpaceGrid::uniform(1);
        const Integrand f = random_integrand(2, 1, stream, 2.0);
        for (const auto& [p, q] : pqs) {
            const double dual = dual_norm_bruteforce(f, p, q, nu, grid);
            const double conj =
                ipq_norm(f, p / (p - 1.0), q / (q - 1.0), nu, grid, cfg.optimizer);
            CheckRow row;
            row.suite = "duality";
            row.case_label = "instance=" + std::to_string(i) + " p=" +
                             detail::short_num(p) + " q=" + detail::short_num(q);
            row.value = conj > 0.0 ? dual / conj : 0.0;
            row.bound = cfg.bands.duality_high;
            row.pass = row.value >= cfg.bands.duality_low && row.value <= cfg.bands.duality_high;
            if (!row.pass)
                out.failures.push_back("duality: " + row.case_label + " ratio " +
                                       detail::short_num(row.value) + " outside [" +
                                       detail::short_num(cfg.bands.duality_low) + ", " +
                                       detail::short_num(cfg.bands.duality_high) + "]");
            out.rows.push_back(std::move(row));
        }
    }
    return out;
}

}  // namespace jumplab
