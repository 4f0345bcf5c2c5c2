#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "jumplab/common.hpp"

namespace jumplab {

// Finite measure space (X, A, n): labelled points with strictly positive
// weights. Hosts the inner L_q norms.
struct SpaceGrid {
    std::vector<std::string> points;
    std::vector<double> weights;

    SpaceGrid() = default;
    SpaceGrid(std::vector<std::string> pts, std::vector<double> w)
        : points(std::move(pts)), weights(std::move(w)) {
        validate();
    }

    static SpaceGrid uniform(std::size_t n, double weight = 1.0) {
        SpaceGrid g;
        g.points.reserve(n);
        g.weights.assign(n, weight);
        for (std::size_t j = 0; j < n; ++j) g.points.push_back("x" + std::to_string(j));
        g.validate();
        return g;
    }

    std::size_t size() const { return weights.size(); }

    void validate() const {
        if (weights.empty()) throw InvalidInput("space grid needs at least one point");
        if (!points.empty() && points.size() != weights.size())
            throw DimensionMismatch("space grid labels/weights size mismatch");
        for (double w : weights)
            if (!(w > 0.0) || !std::isfinite(w))
                throw InvalidInput("space grid weights must be strictly positive and finite");
    }
};

// Discrete compensator on R_+ x Z: one cell per (time-cell, mark) slot with
// its nu-mass.
struct NuGrid {
    struct Cell {
        std::size_t time_cell = 0;
        std::size_t mark = 0;
    };

    std::vector<Cell> cells;
    std::vector<double> nu_weights;

    std::size_t size() const { return cells.size(); }

    double total_mass() const {
        return pairwise_sum(std::span<const double>(nu_weights));
    }

    void validate() const {
        if (cells.size() != nu_weights.size())
            throw DimensionMismatch("nu grid cells/weights size mismatch");
        double total = 0.0;
        for (double w : nu_weights) {
            if (!(w >= 0.0) || !std::isfinite(w))
                throw InvalidInput("nu weights must be nonnegative and finite");
            total += w;
        }
        if (!std::isfinite(total)) throw InvalidInput("nu total mass must be finite");
    }
};

// Deterministic predictable field g indexed by (nu cell, space point),
// stored row-major with one row per cell.
class Integrand {
public:
    Integrand() = default;
    Integrand(std::size_t n_cells, std::size_t n_points, double fill = 0.0)
        : n_cells_(n_cells), n_points_(n_points), values_(n_cells * n_points, fill) {}

    std::size_t n_cells() const { return n_cells_; }
    std::size_t n_points() const { return n_points_; }
    std::size_t size() const { return values_.size(); }

    double& operator()(std::size_t cell, std::size_t point) {
        return values_[cell * n_points_ + point];
    }
    double operator()(std::size_t cell, std::size_t point) const {
        return values_[cell * n_points_ + point];
    }

    std::span<const double> cell_row(std::size_t cell) const {
        return {values_.data() + cell * n_points_, n_points_};
    }
    std::span<double> cell_row(std::size_t cell) {
        return {values_.data() + cell * n_points_, n_points_};
    }

    std::span<const double> flat() const { return values_; }
    std::span<double> flat() { return values_; }

    void check_shape(const NuGrid& nu, const SpaceGrid& grid) const {
        if (n_cells_ != nu.size() || n_points_ != grid.size())
            throw DimensionMismatch("integrand shape does not match (nu, grid)");
    }

    void check_finite() const {
        for (double v : values_)
            if (!std::isfinite(v)) throw InvalidInput("integrand entries must be finite");
    }

    Integrand& operator*=(double c) {
        for (double& v : values_) v *= c;
        return *this;
    }

    friend Integrand operator*(double c, Integrand g) {
        g *= c;
        return g;
    }

    friend Integrand operator+(const Integrand& a, const Integrand& b) {
        if (a.n_cells_ != b.n_cells_ || a.n_points_ != b.n_points_)
            throw DimensionMismatch("integrand shapes differ");
        Integrand out = a;
        for (std::size_t i = 0; i < out.values_.size(); ++i) out.values_[i] += b.values_[i];
        return out;
    }

private:
    std::size_t n_cells_ = 0;
    std::size_t n_points_ = 0;
    std::vector<double> values_;
};

}  // namespace jumplab
