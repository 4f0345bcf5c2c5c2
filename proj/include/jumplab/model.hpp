#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <variant>
#include <vector>

#include "jumplab/common.hpp"
#include "jumplab/grid.hpp"
#include "jumplab/rng.hpp"

namespace jumplab {

// Marked Poisson random measure: piecewise-constant intensity per
// (time-cell, mark), time cells partitioning [0, T].
struct PoissonSpec {
    double horizon = 1.0;
    std::vector<double> edges;   // size n_time_cells + 1, edges.front()=0, edges.back()=T
    std::size_t n_marks = 1;
    std::vector<double> rates;   // row-major [time_cell][mark], >= 0

    static PoissonSpec uniform(double horizon, std::size_t time_cells, std::size_t marks,
                               double rate) {
        PoissonSpec s;
        s.horizon = horizon;
        s.edges.resize(time_cells + 1);
        for (std::size_t i = 0; i <= time_cells; ++i)
            s.edges[i] = horizon * static_cast<double>(i) / static_cast<double>(time_cells);
        s.n_marks = marks;
        s.rates.assign(time_cells * marks, rate);
        return s;
    }
};

// Independent Bernoulli cells: cell c may place one atom at the fixed time
// t_c with probability p_c. The compensator has the atom p_c at t_c.
struct BernoulliSpec {
    struct Cell {
        double time = 0.0;
        double prob = 0.0;
    };
    double horizon = 1.0;
    std::vector<Cell> cells;
};

// One sampled point pattern; atoms sorted by strictly increasing time and
// tagged with the nu cell they were generated from.
struct PointPattern {
    struct Atom {
        double time = 0.0;
        std::size_t mark = 0;
        std::size_t cell = 0;
    };
    std::vector<Atom> atoms;
};

class RandomMeasureModel {
public:
    enum class Kind { Poisson, BernoulliCells };

    static RandomMeasureModel poisson(PoissonSpec spec) {
        validate_poisson(spec);
        RandomMeasureModel m;
        m.kind_ = Kind::Poisson;
        const std::size_t n_tc = spec.edges.size() - 1;
        for (std::size_t tc = 0; tc < n_tc; ++tc) {
            const double dt = spec.edges[tc + 1] - spec.edges[tc];
            for (std::size_t k = 0; k < spec.n_marks; ++k) {
                m.nu_.cells.push_back({tc, k});
                m.nu_.nu_weights.push_back(spec.rates[tc * spec.n_marks + k] * dt);
            }
        }
        m.nu_.validate();
        m.spec_ = std::move(spec);
        return m;
    }

    static RandomMeasureModel bernoulli_cells(BernoulliSpec spec) {
        std::sort(spec.cells.begin(), spec.cells.end(),
                  [](const auto& a, const auto& b) { return a.time < b.time; });
        validate_bernoulli(spec);
        RandomMeasureModel m;
        m.kind_ = Kind::BernoulliCells;
        for (std::size_t c = 0; c < spec.cells.size(); ++c) {
            m.nu_.cells.push_back({c, 0});
            m.nu_.nu_weights.push_back(spec.cells[c].prob);
        }
        m.nu_.validate();
        m.spec_ = std::move(spec);
        return m;
    }

    Kind kind() const { return kind_; }
    const NuGrid& nu() const { return nu_; }
    std::size_t n_cells() const { return nu_.size(); }

    double horizon() const {
        return kind_ == Kind::Poisson ? poisson_spec().horizon : bernoulli_spec().horizon;
    }

    const PoissonSpec& poisson_spec() const { return std::get<PoissonSpec>(spec_); }
    const BernoulliSpec& bernoulli_spec() const { return std::get<BernoulliSpec>(spec_); }

private:
    static void validate_poisson(const PoissonSpec& s) {
        if (!(s.horizon > 0.0) || !std::isfinite(s.horizon))
            throw InvalidInput("horizon must be positive and finite");
        if (s.edges.size() < 2) throw InvalidInput("poisson model needs at least one time cell");
        if (s.edges.front() != 0.0 || s.edges.back() != s.horizon)
            throw InvalidInput("time-cell edges must run from 0 to the horizon");
        for (std::size_t i = 1; i < s.edges.size(); ++i)
            if (!(s.edges[i] > s.edges[i - 1]))
                throw InvalidInput("time-cell edges must be strictly increasing");
        if (s.n_marks == 0) throw InvalidInput("poisson model needs at least one mark");
        if (s.rates.size() != (s.edges.size() - 1) * s.n_marks)
            throw DimensionMismatch("rates size must be time_cells * marks");
        double total = 0.0;
        for (double r : s.rates) {
            if (!(r >= 0.0) || !std::isfinite(r))
                throw InvalidInput("rates must be nonnegative and finite");
            total += r;
        }
        if (!std::isfinite(total)) throw InvalidInput("total intensity mass must be finite");
    }

    static void validate_bernoulli(const BernoulliSpec& s) {
        if (!(s.horizon > 0.0) || !std::isfinite(s.horizon))
            throw InvalidInput("horizon must be positive and finite");
        if (s.cells.empty()) throw InvalidInput("bernoulli model needs at least one cell");
        double prev = 0.0;
        for (const auto& c : s.cells) {
            if (!(c.time > 0.0) || !(c.time <= s.horizon))
                throw InvalidInput("bernoulli cell times must lie in (0, horizon]");
            if (!(c.time > prev))
                throw InvalidInput("bernoulli cell times must be strictly increasing");
            if (!(c.prob >= 0.0 && c.prob <= 1.0))
                throw InvalidInput("bernoulli probabilities must lie in [0, 1]");
            prev = c.time;
        }
    }

    Kind kind_ = Kind::Poisson;
    NuGrid nu_;
    std::variant<PoissonSpec, BernoulliSpec> spec_;
};

namespace detail {

// Strictly order sampled times by sub-ulp nudges; the cell assignment of
// each atom is untouched. Times never exceed the horizon.
inline void enforce_strict_order(std::vector<PointPattern::Atom>& atoms, double horizon) {
    for (std::size_t i = 1; i < atoms.size(); ++i)
        if (!(atoms[i].time > atoms[i - 1].time))
            atoms[i].time = std::nextafter(atoms[i - 1].time, horizon * 2.0 + 1.0);
    if (!atoms.empty() && atoms.back().time > horizon) {
        atoms.back().time = horizon;
        for (std::size_t i = atoms.size() - 1; i > 0; --i)
            if (!(atoms[i].time > atoms[i - 1].time))
                atoms[i - 1].time = std::nextafter(atoms[i].time, 0.0);
    }
}

}  // namespace detail

// Draw one point pattern. Deterministic given the stream: cells are visited
// in a fixed order and consume the stream sequentially.
inline PointPattern sample(const RandomMeasureModel& model, ReplicaStream& stream) {
    PointPattern pattern;
    if (model.kind() == RandomMeasureModel::Kind::Poisson) {
        const auto& spec = model.poisson_spec();
        const std::size_t n_tc = spec.edges.size() - 1;
        for (std::size_t tc = 0; tc < n_tc; ++tc) {
            const double a = spec.edges[tc];
            const double b = spec.edges[tc + 1];
            for (std::size_t k = 0; k < spec.n_marks; ++k) {
                const double mean = spec.rates[tc * spec.n_marks + k] * (b - a);
                const std::uint64_t count = stream.poisson(mean);
                for (std::uint64_t i = 0; i < count; ++i)
                    pattern.atoms.push_back(
                        {stream.next_uniform(a, b), k, tc * spec.n_marks + k});
            }
        }
        std::sort(pattern.atoms.begin(), pattern.atoms.end(),
                  [](const auto& x, const auto& y) {
                      return x.time != y.time ? x.time < y.time : x.cell < y.cell;
                  });
        detail::enforce_strict_order(pattern.atoms, model.horizon());
    } else {
        const auto& spec = model.bernoulli_spec();
        for (std::size_t c = 0; c < spec.cells.size(); ++c) {
            const double u = stream.next_unit();
            if (u <= spec.cells[c].prob)
                pattern.atoms.push_back({spec.cells[c].time, 0, c});
        }
    }
    return pattern;
}

// int_0^t int_Z field dnu for a scalar field over nu cells. Piecewise linear
// in t for Poisson models; a right-continuous step function for Bernoulli.
inline double compensator_cumulative(std::span<const double> field,
                                     const RandomMeasureModel& model, double t) {
    if (field.size() != model.n_cells())
        throw DimensionMismatch("field size must match nu cell count");
    if (!(t >= 0.0) || !(t <= model.horizon()))
        throw InvalidInput("time must lie in [0, horizon]");
    std::vector<double> terms(field.size(), 0.0);
    if (model.kind() == RandomMeasureModel::Kind::Poisson) {
        const auto& spec = model.poisson_spec();
        const std::size_t n_tc = spec.edges.size() - 1;
        for (std::size_t tc = 0; tc < n_tc; ++tc) {
            const double a = spec.edges[tc];
            const double overlap = std::max(0.0, std::min(t, spec.edges[tc + 1]) - a);
            if (overlap == 0.0) continue;
            for (std::size_t k = 0; k < spec.n_marks; ++k) {
                const std::size_t c = tc * spec.n_marks + k;
                terms[c] = field[c] * spec.rates[c] * overlap;
            }
        }
    } else {
        const auto& spec = model.bernoulli_spec();
        for (std::size_t c = 0; c < spec.cells.size(); ++c)
            if (spec.cells[c].time <= t) terms[c] = field[c] * spec.cells[c].prob;
    }
    return pairwise_sum(terms);
}

}  // namespace jumplab
