#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include "jumplab/common.hpp"
#include "jumplab/grid.hpp"
#include "jumplab/model.hpp"
#include "jumplab/norms.hpp"
#include "jumplab/regimes.hpp"

namespace jumplab {

inline constexpr std::size_t kEnumerationCellCap = 16;

// Exact left-hand side ( E sup_t ||M_t||_{L_q}^p )^{1/p} for a Bernoulli-cell
// model by exhausting all 2^C outcome vectors. Paths are rebuilt here by
// direct cumulative sums, independent of the integrator.
inline double enumerate_lhs(const Integrand& g, const RandomMeasureModel& model, double p,
                            double q, const SpaceGrid& grid) {
    if (model.kind() != RandomMeasureModel::Kind::BernoulliCells)
        throw InvalidInput("enumerate_lhs needs a Bernoulli-cell model");
    const auto& cells = model.bernoulli_spec().cells;
    if (cells.size() > kEnumerationCellCap)
        throw InvalidInput("enumerate_lhs capped at " + std::to_string(kEnumerationCellCap) +
                           " cells");
    require_exponent_ge1(p, "p");
    g.check_shape(model.nu(), grid);
    g.check_finite();

    const std::size_t n_cells = cells.size();
    const std::size_t nx = grid.size();
    std::vector<double> m(nx);
    std::vector<double> terms(nx);
    long double total = 0.0L;
    const std::uint64_t n_outcomes = std::uint64_t{1} << n_cells;
    for (std::uint64_t mask = 0; mask < n_outcomes; ++mask) {
        long double weight = 1.0L;
        for (std::size_t c = 0; c < n_cells; ++c)
            weight *= (mask >> c) & 1 ? static_cast<long double>(cells[c].prob)
                                      : static_cast<long double>(1.0 - cells[c].prob);
        if (weight == 0.0L) continue;
        std::fill(m.begin(), m.end(), 0.0);
        double sup = 0.0;
        for (std::size_t c = 0; c < n_cells; ++c) {
            const double factor = ((mask >> c) & 1 ? 1.0 : 0.0) - cells[c].prob;
            const auto row = g.cell_row(c);
            for (std::size_t j = 0; j < nx; ++j) {
                m[j] += factor * row[j];
                terms[j] = std::pow(std::abs(m[j]), q) * grid.weights[j];
            }
            const double s = pairwise_sum(terms);
            sup = std::max(sup, s == 0.0 ? 0.0 : std::pow(s, 1.0 / q));
        }
        total += weight * static_cast<long double>(std::pow(sup, p));
    }
    return static_cast<double>(std::pow(total, 1.0L / static_cast<long double>(p)));
}

// Upper bound for the sum-space norm by exhaustive lattice search, refined
// multilevel on a window around the incumbent; the objective is convex so
// the refinement tracks the value down to the requested resolution. Total
// free dimension capped at 3.
inline double grid_search_sum_norm(const Integrand& g, const std::vector<NormExpr>& parts,
                                   const NuGrid& nu, const SpaceGrid& grid,
                                   double resolution) {
    if (parts.empty()) throw InvalidInput("grid search needs at least one part");
    if (!(resolution > 0.0)) throw InvalidInput("resolution must be positive");
    g.check_shape(nu, grid);
    const std::size_t k = parts.size();
    const std::size_t d = g.size();
    const std::size_t n = (k - 1) * d;
    if (n > 3)
        throw InvalidInput("grid search limited to 3 free dimensions, got " +
                           std::to_string(n));

    std::vector<double> single(k);
    std::size_t cheapest = 0;
    for (std::size_t i = 0; i < k; ++i) {
        single[i] = parts[i].plain_value(g, nu, grid);
        if (single[i] < single[cheapest]) cheapest = i;
    }
    const double f_init = single[cheapest];
    if (f_init == 0.0 || k == 1 || n == 0) return f_init;

    // Per-part norms of the unit basis vectors, for the search box.
    std::vector<std::vector<double>> unit_norm(k, std::vector<double>(d, 0.0));
    for (std::size_t j = 0; j < d; ++j) {
        Integrand e(g.n_cells(), g.n_points(), 0.0);
        e.flat()[j] = 1.0;
        for (std::size_t i = 0; i < k; ++i) unit_norm[i][j] = parts[i].plain_value(e, nu, grid);
    }
    const auto gf = g.flat();
    std::vector<double> box(n, 0.0);
    for (std::size_t i = 0; i + 1 < k; ++i)
        for (std::size_t j = 0; j < d; ++j) {
            double bound;
            if (unit_norm[i][j] > 0.0) {
                bound = f_init / unit_norm[i][j];
            } else {
                bound = std::abs(gf[j]);
                for (std::size_t l = 0; l < k; ++l)
                    if (l != i && unit_norm[l][j] > 0.0) bound += f_init / unit_norm[l][j];
            }
            box[i * d + j] = bound * 1.05;
        }

    std::vector<Integrand> h(k, Integrand(g.n_cells(), g.n_points(), 0.0));
    const auto objective = [&](const std::vector<double>& x) {
        auto last = h[k - 1].flat();
        for (std::size_t j = 0; j < d; ++j) last[j] = gf[j];
        for (std::size_t i = 0; i + 1 < k; ++i) {
            auto block = h[i].flat();
            for (std::size_t j = 0; j < d; ++j) {
                block[j] = x[i * d + j];
                last[j] -= block[j];
            }
        }
        double total = 0.0;
        for (std::size_t i = 0; i < k; ++i) total += parts[i].plain_value(h[i], nu, grid);
        return total;
    };

    std::vector<double> center(n, 0.0);
    std::vector<double> width = box;
    std::size_t points_per_dim = 33;
    double best = f_init;  // the split assigning all of g to the cheapest part
    std::vector<double> best_x = center;

    for (int level = 0; level < 200; ++level) {
        double spacing_max = 0.0;
        std::vector<double> lo(n), spacing(n);
        for (std::size_t j = 0; j < n; ++j) {
            const double w = std::max(width[j], 1e-300);
            lo[j] = center[j] - w;
            spacing[j] = 2.0 * w / static_cast<double>(points_per_dim - 1);
            spacing_max = std::max(spacing_max, width[j] > 0.0 ? spacing[j] : 0.0);
        }
        std::size_t total_points = 1;
        for (std::size_t j = 0; j < n; ++j) total_points *= points_per_dim;
        std::vector<double> x(n);
        std::vector<std::size_t> best_idx(n, points_per_dim / 2);
        for (std::size_t flat = 0; flat < total_points; ++flat) {
            std::size_t rem = flat;
            for (std::size_t j = 0; j < n; ++j) {
                const std::size_t idx = rem % points_per_dim;
                rem /= points_per_dim;
                x[j] = lo[j] + spacing[j] * static_cast<double>(idx);
            }
            const double f = objective(x);
            if (f < best) {
                best = f;
                best_x = x;
                rem = flat;
                for (std::size_t j = 0; j < n; ++j) {
                    best_idx[j] = rem % points_per_dim;
                    rem /= points_per_dim;
                }
            }
        }
        if (spacing_max <= resolution) break;
        bool on_edge = false;
        for (std::size_t j = 0; j < n; ++j)
            if (best_idx[j] == 0 || best_idx[j] + 1 == points_per_dim) on_edge = true;
        center = best_x;
        for (std::size_t j = 0; j < n; ++j)
            width[j] = on_edge ? std::min(2.0 * width[j], box[j] * 4.0)
                               : std::max(3.0 * spacing[j], resolution);
        points_per_dim = 13;
    }
    return best;
}

}  // namespace jumplab
