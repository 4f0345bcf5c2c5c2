#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include "jumplab/common.hpp"
#include "jumplab/grid.hpp"
#include "jumplab/regimes.hpp"
#include "jumplab/rng.hpp"

namespace jumplab {

struct SumNormOptions {
    double tol = 1e-6;            // relative stopping tolerance
    int max_iter = 10000;         // subgradient iterations
    long polish_budget = 200000;  // objective evaluations in the polish phase
    bool require_convergence = true;
};

struct SumNormResult {
    double value = 0.0;
    double lower_bound = 0.0;      // best dual certificate (0 when none found)
    double single_part_min = 0.0;  // min_i N_i(g); the value never exceeds this
    long iterations = 0;
    long evaluations = 0;
    bool converged = false;
};

namespace detail {

// inf { sum_i N_i(h_i) : sum_i h_i = g } over (k-1) free blocks; the last
// block is the residual. The objective is convex and positively homogeneous
// but nonsmooth, so the search combines an accelerated subgradient phase
// (diminishing steps, Polyak steps once a dual certificate exists) with a
// deterministic pattern-search polish.
class SumNormProblem {
public:
    SumNormProblem(const Integrand& g, const std::vector<NormExpr>& parts, const NuGrid& nu,
                   const SpaceGrid& grid)
        : g_(g), parts_(parts), nu_(nu), grid_(grid), d_(g.size()),
          n_free_((parts.size() - 1) * g.size()) {
        h_.assign(parts.size(), Integrand(g.n_cells(), g.n_points(), 0.0));
        weights_.resize(d_);
        for (std::size_t c = 0; c < g.n_cells(); ++c)
            for (std::size_t j = 0; j < g.n_points(); ++j)
                weights_[c * g.n_points() + j] = nu.nu_weights[c] * grid.weights[j];
    }

    std::size_t n_free() const { return n_free_; }

    void unflatten(std::span<const double> x) {
        const std::size_t k = parts_.size();
        for (std::size_t i = 0; i + 1 < k; ++i) {
            auto dst = h_[i].flat();
            std::copy(x.begin() + static_cast<long>(i * d_),
                      x.begin() + static_cast<long>((i + 1) * d_), dst.begin());
        }
        auto last = h_[k - 1].flat();
        const auto gflat = g_.flat();
        for (std::size_t j = 0; j < d_; ++j) last[j] = gflat[j];
        for (std::size_t i = 0; i + 1 < k; ++i) {
            const auto block = h_[i].flat();
            for (std::size_t j = 0; j < d_; ++j) last[j] -= block[j];
        }
    }

    double value(std::span<const double> x) {
        unflatten(x);
        ++evals_;
        double total = 0.0;
        for (std::size_t i = 0; i < parts_.size(); ++i)
            total += parts_[i].plain_value(h_[i], nu_, grid_);
        return total;
    }

    double value_and_subgrad(std::span<const double> x, std::vector<double>& grad) {
        unflatten(x);
        ++evals_;
        const std::size_t k = parts_.size();
        grad.assign(n_free_, 0.0);
        double total = 0.0;
        Integrand phi;
        std::vector<double> last_grad(d_, 0.0);
        std::vector<std::vector<double>> block_grad(k - 1,
                                                    std::vector<double>(d_, 0.0));
        for (std::size_t i = 0; i < k; ++i) {
            total += parts_[i].plain_value(h_[i], nu_, grid_);
            parts_[i].pairing_subgradient(h_[i], nu_, grid_, phi);
            const auto pf = phi.flat();
            auto& dst = i + 1 < k ? block_grad[i] : last_grad;
            for (std::size_t j = 0; j < d_; ++j) dst[j] = pf[j] * weights_[j];
        }
        for (std::size_t i = 0; i + 1 < k; ++i)
            for (std::size_t j = 0; j < d_; ++j)
                grad[i * d_ + j] = block_grad[i][j] - last_grad[j];
        return total;
    }

    // Dual certificate: any phi with dual_upper(part, phi) <= 1 for every
    // part gives the lower bound <g, phi>_w. Candidates are the pairing
    // subgradients of the active parts, rescaled into the feasible set.
    double certificate(std::span<const double> x, double scale_hint) {
        unflatten(x);
        double best = 0.0;
        Integrand phi;
        for (std::size_t i = 0; i < parts_.size(); ++i) {
            const double vi = parts_[i].plain_value(h_[i], nu_, grid_);
            if (!(vi > 1e-14 * scale_hint)) continue;
            parts_[i].pairing_subgradient(h_[i], nu_, grid_, phi);
            best = std::max(best, certified_pairing(phi));
        }
        return best;
    }

    double certificate_at_g(std::size_t part_index) {
        Integrand phi;
        parts_[part_index].pairing_subgradient(g_, nu_, grid_, phi);
        return certified_pairing(phi);
    }

    long evaluations() const { return evals_; }

private:
    double certified_pairing(const Integrand& phi) {
        double c = 0.0;
        for (const auto& part : parts_)
            c = std::max(c, part.dual_upper(phi, nu_, grid_));
        if (!(c > 0.0) || !std::isfinite(c)) return 0.0;
        const auto pf = phi.flat();
        const auto gf = g_.flat();
        std::vector<double> terms(d_);
        for (std::size_t j = 0; j < d_; ++j) terms[j] = gf[j] * pf[j] * weights_[j];
        return pairwise_sum(terms) / c;
    }

    const Integrand& g_;
    const std::vector<NormExpr>& parts_;
    const NuGrid& nu_;
    const SpaceGrid& grid_;
    std::size_t d_;
    std::size_t n_free_;
    std::vector<Integrand> h_;
    std::vector<double> weights_;
    long evals_ = 0;
};

}  // namespace detail

namespace detail {

inline SumNormResult sum_norm_normalized(const Integrand& g, const std::vector<NormExpr>& parts,
                                         const NuGrid& nu, const SpaceGrid& grid,
                                         const SumNormOptions& opts) {

    SumNormResult result;
    std::vector<double> single(parts.size());
    std::size_t cheapest = 0;
    for (std::size_t i = 0; i < parts.size(); ++i) {
        single[i] = parts[i].plain_value(g, nu, grid);
        if (single[i] < single[cheapest]) cheapest = i;
    }
    result.single_part_min = single[cheapest];
    if (result.single_part_min == 0.0) {
        result.converged = true;
        return result;
    }
    if (parts.size() == 1) {
        result.value = single[0];
        result.lower_bound = single[0];
        result.converged = true;
        return result;
    }

    detail::SumNormProblem problem(g, parts, nu, grid);
    const std::size_t n = problem.n_free();
    const std::size_t d = g.size();

    std::vector<double> x(n, 0.0);
    if (cheapest + 1 < parts.size()) {
        const auto gf = g.flat();
        for (std::size_t j = 0; j < d; ++j) x[cheapest * d + j] = gf[j];
    }
    double f_best = result.single_part_min;
    std::vector<double> x_best = x;

    double lower = std::max(problem.certificate(x_best, f_best),
                            problem.certificate_at_g(cheapest));
    const auto gap_closed = [&] {
        return f_best - lower <= opts.tol * std::max(f_best, 1e-300);
    };

    double r_scale = 0.0;
    for (double v : g.flat()) r_scale += v * v;
    r_scale = std::sqrt(r_scale) + 1e-300;

    // Phase 1: accelerated subgradient with diminishing steps, switching to
    // Polyak steps once the certificate gives a positive lower bound.
    std::vector<double> x_prev = x;
    std::vector<double> y(n), grad;
    long it = 0;
    if (!gap_closed()) {
        for (it = 1; it <= opts.max_iter; ++it) {
            const double beta = static_cast<double>(it - 1) / static_cast<double>(it + 2);
            for (std::size_t j = 0; j < n; ++j)
                y[j] = x[j] + beta * (x[j] - x_prev[j]);
            const double fy = problem.value_and_subgrad(y, grad);
            if (fy < f_best) {
                f_best = fy;
                x_best = y;
            }
            double gn2 = 0.0;
            for (double v : grad) gn2 += v * v;
            if (gn2 <= 1e-300) break;
            const double gn = std::sqrt(gn2);
            const double dim_step = 0.35 * r_scale / (std::sqrt(static_cast<double>(it)) * gn);
            double step = dim_step;
            if (lower > 0.0 && fy > lower)
                step = std::min((fy - lower) / gn2, 8.0 * dim_step);
            x_prev = x;
            for (std::size_t j = 0; j < n; ++j) x[j] = y[j] - step * grad[j];
            const double fx = problem.value(x);
            if (fx < f_best) {
                f_best = fx;
                x_best = x;
            }
            if (it % 250 == 0) {
                lower = std::max(lower, problem.certificate(x_best, f_best));
                if (gap_closed()) break;
            }
        }
    }
    result.iterations = it;

    // Phase 2: deterministic pattern-search polish around the incumbent.
    // Coordinate moves plus a per-level batch of fixed-seed directions to
    // slide along nonsmooth ridges. The step shrinks whenever a sweep gains
    // less than a tol-sized slice of the value; the upper bound is declared
    // stationary once the step underflows the tol-scaled floor.
    bool stationary = gap_closed();
    if (!stationary) {
        double step = r_scale / 8.0;
        const double floor = r_scale * std::max(1e-13, 1e-2 * opts.tol);
        std::uint64_t level = 0;
        std::vector<double> trial(n);
        std::vector<std::vector<double>> extras;
        const auto regen_extras = [&] {
            extras.clear();
            const std::size_t count = std::min<std::size_t>(2 * n, 16);
            ReplicaStream stream(0x6A09E667F3BCC909ULL, level);
            for (std::size_t e = 0; e < count; ++e) {
                std::vector<double> dir(n);
                double norm2 = 0.0;
                for (auto& v : dir) {
                    v = stream.next_uniform(-1.0, 1.0);
                    norm2 += v * v;
                }
                const double norm = std::sqrt(norm2);
                if (norm > 0.0)
                    for (auto& v : dir) v /= norm;
                extras.push_back(std::move(dir));
            }
        };
        regen_extras();
        while (step > floor && problem.evaluations() < opts.polish_budget) {
            const double f_enter = f_best;
            for (std::size_t j = 0; j < n && problem.evaluations() < opts.polish_budget; ++j) {
                for (const double sign : {1.0, -1.0}) {
                    trial = x_best;
                    trial[j] += sign * step;
                    const double f = problem.value(trial);
                    if (f < f_best) {
                        f_best = f;
                        x_best = trial;
                    }
                }
            }
            for (const auto& dir : extras) {
                if (problem.evaluations() >= opts.polish_budget) break;
                for (std::size_t j = 0; j < n; ++j) trial[j] = x_best[j] + step * dir[j];
                const double f = problem.value(trial);
                if (f < f_best) {
                    f_best = f;
                    x_best = trial;
                }
            }
            if (f_enter - f_best <= 0.25 * opts.tol * std::max(f_best, 1e-300)) {
                step *= 0.5;
                ++level;
                regen_extras();
            }
            lower = std::max(lower, problem.certificate(x_best, f_best));
            if (gap_closed()) break;
        }
        stationary = gap_closed() || step <= floor;
    }

    lower = std::max(lower, problem.certificate(x_best, f_best));
    result.value = f_best;
    result.lower_bound = std::min(lower, f_best);
    result.evaluations = problem.evaluations();
    result.converged = stationary || gap_closed();
    if (!result.converged && opts.require_convergence)
        throw NonConvergence("sum_norm stopped before meeting its stopping rule; best value " +
                                 std::to_string(f_best),
                             f_best);
    return result;
}

}  // namespace detail

// Positive homogeneity lets the search run on g scaled into [-1, 1] by an
// exact power of two; rescaling the input by 2^k then reuses the identical
// floating-point trajectory.
inline SumNormResult sum_norm_full(const Integrand& g, const std::vector<NormExpr>& parts,
                                   const NuGrid& nu, const SpaceGrid& grid,
                                   const SumNormOptions& opts = {}) {
    if (parts.empty()) throw InvalidInput("sum_norm needs at least one part");
    for (const auto& part : parts)
        if (part.contains_sum())
            throw InvalidInput("nested sum-space parts are not supported");
    g.check_shape(nu, grid);
    g.check_finite();
    const double scale = pow2_ceil_scale(g.flat());
    if (scale == 1.0) return detail::sum_norm_normalized(g, parts, nu, grid, opts);
    Integrand ghat = g;
    ghat *= 1.0 / scale;
    SumNormResult result = detail::sum_norm_normalized(ghat, parts, nu, grid, opts);
    result.value *= scale;
    result.lower_bound *= scale;
    result.single_part_min *= scale;
    return result;
}

inline double sum_norm(const Integrand& g, const std::vector<NormExpr>& parts,
                       const NuGrid& nu, const SpaceGrid& grid,
                       const SumNormOptions& opts = {}) {
    return sum_norm_full(g, parts, nu, grid, opts).value;
}

namespace detail {

inline double norm_value_normalized(const NormExpr& expr, const Integrand& g,
                                    const NuGrid& nu, const SpaceGrid& grid,
                                    const SumNormOptions& opts) {
    switch (expr.kind()) {
        case NormExpr::Kind::SumOf:
            return sum_norm_normalized(g, expr.children(), nu, grid, opts).value;
        case NormExpr::Kind::MaxOf: {
            double best = 0.0;
            for (const auto& c : expr.children())
                best = std::max(best, norm_value_normalized(c, g, nu, grid, opts));
            return best;
        }
        case NormExpr::Kind::Scale:
            return expr.scale_factor() *
                   norm_value_normalized(expr.children()[0], g, nu, grid, opts);
        default:
            return expr.plain_value(g, nu, grid);
    }
}

}  // namespace detail

// Evaluates any norm expression, routing SumOf nodes through the optimizer
// and MaxOf nodes through max of the child values.
inline double norm_value(const NormExpr& expr, const Integrand& g, const NuGrid& nu,
                         const SpaceGrid& grid, const SumNormOptions& opts = {}) {
    if (expr.contains_sum()) {
        g.check_shape(nu, grid);
        g.check_finite();
    }
    const double scale = pow2_ceil_scale(g.flat());
    if (scale == 1.0) return detail::norm_value_normalized(expr, g, nu, grid, opts);
    Integrand ghat = g;
    ghat *= 1.0 / scale;
    return scale * detail::norm_value_normalized(expr, ghat, nu, grid, opts);
}

// || g ||_{I_{p,q}}: the regime formula for (p, q) evaluated on g.
inline double ipq_norm(const Integrand& g, double p, double q, const NuGrid& nu,
                       const SpaceGrid& grid, const SumNormOptions& opts = {}) {
    return norm_value(regime_select(p, q).expr, g, nu, grid, opts);
}

}  // namespace jumplab
