#pragma once

#include <cmath>
#include <span>
#include <vector>

#include "jumplab/common.hpp"
#include "jumplab/grid.hpp"

namespace jumplab {

// || v ||_{L_q(X,n)} = (sum_j |v_j|^q n_j)^{1/q}, q in [1, inf).
inline double lq_norm(std::span<const double> v, double q, const SpaceGrid& grid) {
    require_exponent_ge1(q, "q");
    if (v.size() != grid.size()) throw DimensionMismatch("vector/grid size mismatch");
    std::vector<double> terms(v.size());
    for (std::size_t j = 0; j < v.size(); ++j) {
        require_finite(v[j], "vector entry");
        terms[j] = std::pow(std::abs(v[j]), q) * grid.weights[j];
    }
    const double s = pairwise_sum(terms);
    return s == 0.0 ? 0.0 : std::pow(s, 1.0 / q);
}

namespace detail {

// Inner lq over a row, no validation; shared by the mixed norms below.
inline double row_lq(std::span<const double> row, double q,
                     std::span<const double> weights, std::vector<double>& scratch) {
    scratch.resize(row.size());
    for (std::size_t j = 0; j < row.size(); ++j)
        scratch[j] = std::pow(std::abs(row[j]), q) * weights[j];
    const double s = pairwise_sum(scratch);
    return s == 0.0 ? 0.0 : std::pow(s, 1.0 / q);
}

}  // namespace detail

// Iterated norm: outer L_a over nu cells of the inner L_b(X) slice norms,
//   ( sum_c nu_c ||g_c||_{L_b}^a )^{1/a}.
inline double mixed_nu_norm(const Integrand& g, double outer_a, double inner_b,
                            const NuGrid& nu, const SpaceGrid& grid) {
    require_exponent_ge1(outer_a, "outer exponent");
    require_exponent_ge1(inner_b, "inner exponent");
    g.check_shape(nu, grid);
    std::vector<double> scratch;
    std::vector<double> terms(nu.size());
    for (std::size_t c = 0; c < nu.size(); ++c) {
        const double slice = detail::row_lq(g.cell_row(c), inner_b, grid.weights, scratch);
        terms[c] = std::pow(slice, outer_a) * nu.nu_weights[c];
    }
    const double s = pairwise_sum(terms);
    return s == 0.0 ? 0.0 : std::pow(s, 1.0 / outer_a);
}

// || (sum_c g_c^2 nu_c)^{1/2} ||_{L_b(X)} with the square and sum pointwise in x.
inline double tilde_nu_norm(const Integrand& g, double inner_b, const NuGrid& nu,
                            const SpaceGrid& grid) {
    require_exponent_ge1(inner_b, "inner exponent");
    g.check_shape(nu, grid);
    std::vector<double> sq(grid.size());
    std::vector<double> col(nu.size());
    for (std::size_t j = 0; j < grid.size(); ++j) {
        for (std::size_t c = 0; c < nu.size(); ++c) {
            const double v = g(c, j);
            col[c] = v * v * nu.nu_weights[c];
        }
        sq[j] = std::sqrt(pairwise_sum(col));
    }
    return lq_norm(sq, inner_b, grid);
}

enum class AtomicKind { Lppq, Lpqq, Tilde };

// The three atomic predictable norms with deterministic integrands, where
// the outer expectation is trivial:
//   Lppq:  ( int ||g||_{L_q}^p dnu )^{1/p}
//   Lpqq:  ( int ||g||_{L_q}^q dnu )^{1/q}   (p-th power and 1/p cancel)
//   Tilde: || ( int |g|^2 dnu )^{1/2} ||_{L_q}
inline double atomic_norm(const Integrand& g, AtomicKind which, double p, double q,
                          const NuGrid& nu, const SpaceGrid& grid) {
    require_exponent_open(p, "p");
    require_exponent_open(q, "q");
    g.check_finite();
    switch (which) {
        case AtomicKind::Lppq:
            return mixed_nu_norm(g, p, q, nu, grid);
        case AtomicKind::Lpqq:
            return mixed_nu_norm(g, q, q, nu, grid);
        case AtomicKind::Tilde:
            return tilde_nu_norm(g, q, nu, grid);
    }
    throw InvalidInput("unknown atomic norm kind");
}

// Generic two-axis mixed norm on a row-major matrix: outer L_a over rows
// (weights u), inner L_b over columns (weights w). Used for the
// Holder-Minkowski comparisons.
inline double mixed_norm_2d(std::span<const double> values, std::size_t n_rows,
                            std::size_t n_cols, std::span<const double> row_weights,
                            std::span<const double> col_weights, double outer_a,
                            double inner_b) {
    require_exponent_ge1(outer_a, "outer exponent");
    require_exponent_ge1(inner_b, "inner exponent");
    if (values.size() != n_rows * n_cols || row_weights.size() != n_rows ||
        col_weights.size() != n_cols)
        throw DimensionMismatch("mixed_norm_2d shape mismatch");
    std::vector<double> scratch;
    std::vector<double> terms(n_rows);
    for (std::size_t i = 0; i < n_rows; ++i) {
        const double inner =
            detail::row_lq(values.subspan(i * n_cols, n_cols), inner_b, col_weights, scratch);
        terms[i] = std::pow(inner, outer_a) * row_weights[i];
    }
    const double s = pairwise_sum(terms);
    return s == 0.0 ? 0.0 : std::pow(s, 1.0 / outer_a);
}

}  // namespace jumplab
