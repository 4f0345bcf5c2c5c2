#pragma once

#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "jumplab/common.hpp"
#include "jumplab/grid.hpp"
#include "jumplab/norms.hpp"

namespace jumplab {

// Expression tree over the atomic predictable norms. Leaves are iterated
// (nu, X) norms; Scale/MaxOf/SumOf combine them. SumOf nodes carry the
// infimal-convolution norm of the sum space and need the optimizer to
// evaluate (see sumnorm.hpp); everything else has a closed form.
class NormExpr {
public:
    enum class Kind { MixedNu, TildeNu, Scale, MaxOf, SumOf };

    static NormExpr mixed(double outer_a, double inner_b) {
        require_exponent_ge1(outer_a, "outer exponent");
        require_exponent_ge1(inner_b, "inner exponent");
        NormExpr e;
        e.kind_ = Kind::MixedNu;
        e.a_ = outer_a;
        e.b_ = inner_b;
        return e;
    }
    static NormExpr lppq(double p, double q) { return mixed(p, q); }
    static NormExpr lpqq(double q) { return mixed(q, q); }

    static NormExpr tilde(double inner_b) {
        require_exponent_ge1(inner_b, "inner exponent");
        NormExpr e;
        e.kind_ = Kind::TildeNu;
        e.b_ = inner_b;
        return e;
    }

    static NormExpr scaled(double alpha, NormExpr base) {
        if (!(alpha > 0.0) || !std::isfinite(alpha))
            throw InvalidInput("scale factor must be positive and finite");
        NormExpr e;
        e.kind_ = Kind::Scale;
        e.alpha_ = alpha;
        e.children_.push_back(std::move(base));
        return e;
    }

    static NormExpr max_of(std::vector<NormExpr> children) {
        if (children.empty()) throw InvalidInput("max_of needs children");
        NormExpr e;
        e.kind_ = Kind::MaxOf;
        e.children_ = std::move(children);
        return e;
    }

    static NormExpr sum_of(std::vector<NormExpr> children) {
        if (children.empty()) throw InvalidInput("sum_of needs children");
        NormExpr e;
        e.kind_ = Kind::SumOf;
        e.children_ = std::move(children);
        return e;
    }

    Kind kind() const { return kind_; }
    const std::vector<NormExpr>& children() const { return children_; }
    double outer_exponent() const { return a_; }
    double inner_exponent() const { return b_; }
    double scale_factor() const { return alpha_; }

    bool contains_sum() const {
        if (kind_ == Kind::SumOf) return true;
        for (const auto& c : children_)
            if (c.contains_sum()) return true;
        return false;
    }

    // Value of a sum-free expression.
    double plain_value(const Integrand& h, const NuGrid& nu, const SpaceGrid& grid) const {
        switch (kind_) {
            case Kind::MixedNu:
                return mixed_nu_norm(h, a_, b_, nu, grid);
            case Kind::TildeNu:
                return tilde_nu_norm(h, b_, nu, grid);
            case Kind::Scale:
                return alpha_ * children_[0].plain_value(h, nu, grid);
            case Kind::MaxOf: {
                double best = 0.0;
                for (const auto& c : children_)
                    best = std::max(best, c.plain_value(h, nu, grid));
                return best;
            }
            case Kind::SumOf:
                throw InvalidInput("sum-space norm has no closed form; use sum_norm");
        }
        return 0.0;
    }

    // Dual-pairing subgradient phi at h: plain_value(h) = <h, phi>_w with
    // the weighted pairing <f,phi>_w = sum nu_c n_x f phi, and the dual norm
    // of phi equals 1 at smooth points. Kinks get a valid element of the
    // subdifferential (zero blocks).
    void pairing_subgradient(const Integrand& h, const NuGrid& nu, const SpaceGrid& grid,
                             Integrand& out) const {
        out = Integrand(h.n_cells(), h.n_points(), 0.0);
        accumulate_pairing_subgradient(h, nu, grid, out, 1.0);
    }

    // Upper bound on the dual norm of phi (weighted pairing). Exact for
    // leaves, Scale, and SumOf; conservative (>= exact) for MaxOf, which is
    // all a feasibility certificate needs.
    double dual_upper(const Integrand& phi, const NuGrid& nu, const SpaceGrid& grid) const {
        switch (kind_) {
            case Kind::MixedNu:
                return dual_mixed(phi, conj(a_), conj(b_), nu, grid);
            case Kind::TildeNu:
                return dual_tilde(phi, conj(b_), nu, grid);
            case Kind::Scale:
                return children_[0].dual_upper(phi, nu, grid) / alpha_;
            case Kind::MaxOf: {
                double best = std::numeric_limits<double>::infinity();
                for (const auto& c : children_)
                    best = std::min(best, c.dual_upper(phi, nu, grid));
                return best;
            }
            case Kind::SumOf: {
                double best = 0.0;
                for (const auto& c : children_)
                    best = std::max(best, c.dual_upper(phi, nu, grid));
                return best;
            }
        }
        return 0.0;
    }

    std::string describe() const {
        switch (kind_) {
            case Kind::MixedNu:
                return a_ == b_ ? "Lpqq" : "Lppq";
            case Kind::TildeNu:
                return "Tilde";
            case Kind::Scale:
                return std::to_string(alpha_) + "*" + children_[0].describe();
            case Kind::MaxOf:
            case Kind::SumOf: {
                std::string s = kind_ == Kind::MaxOf ? "max(" : "sum(";
                for (std::size_t i = 0; i < children_.size(); ++i) {
                    if (i) s += ",";
                    s += children_[i].describe();
                }
                return s + ")";
            }
        }
        return "?";
    }

private:
    static double conj(double e) {
        return e == 1.0 ? std::numeric_limits<double>::infinity() : e / (e - 1.0);
    }

    // Weighted mixed dual norm, allowing infinite exponents (ess sup).
    static double dual_mixed(const Integrand& phi, double a, double b, const NuGrid& nu,
                             const SpaceGrid& grid) {
        std::vector<double> scratch;
        std::vector<double> terms(nu.size(), 0.0);
        for (std::size_t c = 0; c < nu.size(); ++c) {
            double inner;
            const auto row = phi.cell_row(c);
            if (std::isinf(b)) {
                inner = 0.0;
                for (double v : row) inner = std::max(inner, std::abs(v));
            } else {
                inner = detail::row_lq(row, b, grid.weights, scratch);
            }
            terms[c] = inner;
        }
        if (std::isinf(a)) {
            double best = 0.0;
            for (std::size_t c = 0; c < nu.size(); ++c)
                if (nu.nu_weights[c] > 0.0) best = std::max(best, terms[c]);
            return best;
        }
        for (std::size_t c = 0; c < nu.size(); ++c)
            terms[c] = std::pow(terms[c], a) * nu.nu_weights[c];
        const double s = pairwise_sum(terms);
        return s == 0.0 ? 0.0 : std::pow(s, 1.0 / a);
    }

    static double dual_tilde(const Integrand& phi, double b, const NuGrid& nu,
                             const SpaceGrid& grid) {
        std::vector<double> col(nu.size());
        std::vector<double> pointwise(grid.size());
        for (std::size_t j = 0; j < grid.size(); ++j) {
            for (std::size_t c = 0; c < nu.size(); ++c) {
                const double v = phi(c, j);
                col[c] = v * v * nu.nu_weights[c];
            }
            pointwise[j] = std::sqrt(pairwise_sum(col));
        }
        if (std::isinf(b)) {
            double best = 0.0;
            for (double v : pointwise) best = std::max(best, v);
            return best;
        }
        return lq_norm(pointwise, b, grid);
    }

    void accumulate_pairing_subgradient(const Integrand& h, const NuGrid& nu,
                                        const SpaceGrid& grid, Integrand& out,
                                        double factor) const {
        switch (kind_) {
            case Kind::MixedNu: {
                const double f = mixed_nu_norm(h, a_, b_, nu, grid);
                if (f <= 0.0) return;
                std::vector<double> scratch;
                const double f_pow = std::pow(f, 1.0 - a_);
                for (std::size_t c = 0; c < h.n_cells(); ++c) {
                    const double slice =
                        detail::row_lq(h.cell_row(c), b_, grid.weights, scratch);
                    if (slice <= 0.0) continue;
                    const double cell_factor = factor * f_pow * std::pow(slice, a_ - 1.0);
                    for (std::size_t j = 0; j < h.n_points(); ++j) {
                        const double v = h(c, j);
                        if (v == 0.0) continue;
                        // |v|/slice is bounded, keeping small slices stable.
                        out(c, j) += cell_factor * std::pow(std::abs(v) / slice, b_ - 1.0) *
                                     (v > 0.0 ? 1.0 : -1.0);
                    }
                }
                return;
            }
            case Kind::TildeNu: {
                const double f = tilde_nu_norm(h, b_, nu, grid);
                if (f <= 0.0) return;
                const double f_pow = std::pow(f, 1.0 - b_);
                std::vector<double> col(nu.size());
                for (std::size_t j = 0; j < h.n_points(); ++j) {
                    for (std::size_t c = 0; c < nu.size(); ++c) {
                        const double v = h(c, j);
                        col[c] = v * v * nu.nu_weights[c];
                    }
                    const double bx = std::sqrt(pairwise_sum(col));
                    if (bx <= 0.0) continue;
                    const double point_factor = factor * f_pow * std::pow(bx, b_ - 1.0);
                    for (std::size_t c = 0; c < nu.size(); ++c)
                        out(c, j) += point_factor * (h(c, j) / bx);
                }
                return;
            }
            case Kind::Scale:
                children_[0].accumulate_pairing_subgradient(h, nu, grid, out,
                                                            factor * alpha_);
                return;
            case Kind::MaxOf: {
                double best = -1.0;
                const NormExpr* arg = nullptr;
                for (const auto& c : children_) {
                    const double v = c.plain_value(h, nu, grid);
                    if (v > best) {
                        best = v;
                        arg = &c;
                    }
                }
                if (arg) arg->accumulate_pairing_subgradient(h, nu, grid, out, factor);
                return;
            }
            case Kind::SumOf:
                throw InvalidInput("sum-space norm has no closed-form subgradient");
        }
    }

    Kind kind_ = Kind::MixedNu;
    double a_ = 2.0;
    double b_ = 2.0;
    double alpha_ = 1.0;
    std::vector<NormExpr> children_;
};

// One of the six composite-norm shapes, dispatched on (p, q) in the listed
// order (first matching branch wins on boundaries).
struct RegimeFormula {
    int case_index = 0;
    double p = 2.0;
    double q = 2.0;
    NormExpr expr;
    std::string label;
};

inline RegimeFormula regime_select(double p, double q) {
    require_exponent_open(p, "p");
    require_exponent_open(q, "q");
    const NormExpr A = NormExpr::lppq(p, q);
    const NormExpr B = NormExpr::lpqq(q);
    const NormExpr C = NormExpr::tilde(q);
    RegimeFormula f;
    f.p = p;
    f.q = q;
    if (p <= q && q <= 2.0) {
        f.case_index = 1;
        f.expr = NormExpr::sum_of({A, B, C});
    } else if (q <= p && p <= 2.0) {
        f.case_index = 2;
        f.expr = NormExpr::sum_of({NormExpr::max_of({A, B}), C});
    } else if (q < 2.0 && 2.0 <= p) {
        f.case_index = 3;
        f.expr = NormExpr::max_of({A, NormExpr::sum_of({B, C})});
    } else if (p < 2.0 && 2.0 <= q) {
        f.case_index = 4;
        f.expr = NormExpr::sum_of({A, NormExpr::max_of({B, C})});
    } else if (2.0 <= p && p <= q) {
        f.case_index = 5;
        f.expr = NormExpr::max_of({NormExpr::sum_of({A, B}), C});
    } else {
        f.case_index = 6;
        f.expr = NormExpr::max_of({A, B, C});
    }
    f.label = f.expr.describe();
    return f;
}

}  // namespace jumplab
