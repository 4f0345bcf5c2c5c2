#pragma once

#include <algorithm>
#include <cmath>
#include <span>
#include <vector>

#include "jumplab/common.hpp"
#include "jumplab/grid.hpp"
#include "jumplab/model.hpp"
#include "jumplab/norms.hpp"

namespace jumplab {

namespace detail {

// Single walk of M = g * (mu - nu) over [0, T], shared by every consumer so
// the floating-point history of the path is identical everywhere.
//
// Consumer contract, in time order:
//   segment(t0, t1, m_start, slope): M(t) = m_start + (t - t0) * slope on
//     [t0, t1]; segments partition [0, T] and may have zero length.
//   event(t, cell, delta, m_after): Delta M at t (the vector may be zero for
//     Bernoulli cells with p_c = 0 or null integrand rows).
template <class Consumer>
void walk_path(const Integrand& g, const PointPattern& pattern,
               const RandomMeasureModel& model, Consumer&& consumer) {
    const std::size_t nx = g.n_points();
    if (g.n_cells() != model.n_cells())
        throw DimensionMismatch("integrand cell count does not match model");
    for (const auto& atom : pattern.atoms)
        if (atom.cell >= g.n_cells())
            throw DimensionMismatch("pattern atom falls in a cell where g is undefined");
    const double horizon = model.horizon();

    std::vector<double> m(nx, 0.0);
    std::vector<double> delta(nx, 0.0);

    if (model.kind() == RandomMeasureModel::Kind::Poisson) {
        const auto& spec = model.poisson_spec();
        const std::size_t n_tc = spec.edges.size() - 1;
        const std::size_t n_marks = spec.n_marks;

        // Drift slope per time cell: -sum_k rate(tc,k) g((tc,k), x).
        std::vector<double> slopes(n_tc * nx, 0.0);
        for (std::size_t tc = 0; tc < n_tc; ++tc)
            for (std::size_t k = 0; k < n_marks; ++k) {
                const std::size_t c = tc * n_marks + k;
                const double rate = spec.rates[c];
                if (rate == 0.0) continue;
                const auto row = g.cell_row(c);
                for (std::size_t j = 0; j < nx; ++j) slopes[tc * nx + j] -= rate * row[j];
            }

        std::size_t ai = 0;
        for (std::size_t tc = 0; tc < n_tc; ++tc) {
            const double b = spec.edges[tc + 1];
            const std::span<const double> slope(slopes.data() + tc * nx, nx);
            double t0 = spec.edges[tc];
            while (ai < pattern.atoms.size() && pattern.atoms[ai].time <= b) {
                const auto& atom = pattern.atoms[ai];
                consumer.segment(t0, atom.time, std::span<const double>(m), slope);
                const double dt = atom.time - t0;
                const auto row = g.cell_row(atom.cell);
                for (std::size_t j = 0; j < nx; ++j) {
                    const double left = m[j] + dt * slope[j];
                    delta[j] = row[j];
                    m[j] = left + row[j];
                }
                consumer.event(atom.time, atom.cell, std::span<const double>(delta),
                               std::span<const double>(m));
                t0 = atom.time;
                ++ai;
            }
            consumer.segment(t0, b, std::span<const double>(m), slope);
            const double dt = b - t0;
            for (std::size_t j = 0; j < nx; ++j) m[j] += dt * slope[j];
        }
    } else {
        const auto& spec = model.bernoulli_spec();
        const std::vector<double> zero_slope(nx, 0.0);
        std::size_t ai = 0;
        double t0 = 0.0;
        for (std::size_t c = 0; c < spec.cells.size(); ++c) {
            const double tc = spec.cells[c].time;
            consumer.segment(t0, tc, std::span<const double>(m),
                             std::span<const double>(zero_slope));
            const bool fired = ai < pattern.atoms.size() && pattern.atoms[ai].cell == c;
            if (fired) ++ai;
            const double xi = fired ? 1.0 : 0.0;
            const double factor = xi - spec.cells[c].prob;
            const auto row = g.cell_row(c);
            for (std::size_t j = 0; j < nx; ++j) {
                delta[j] = factor * row[j];
                m[j] += delta[j];
            }
            consumer.event(tc, c, std::span<const double>(delta), std::span<const double>(m));
            t0 = tc;
        }
        consumer.segment(t0, horizon, std::span<const double>(m),
                         std::span<const double>(zero_slope));
    }
}

}  // namespace detail

// One realized path: affine segments, jumps, terminal state, and brackets.
struct PathRealization {
    struct Segment {
        double t0 = 0.0;
        double t1 = 0.0;
        std::vector<double> m_start;  // M at t0 (after any jump at t0)
        std::vector<double> slope;
    };
    struct Jump {
        double time = 0.0;
        std::size_t cell = 0;
        std::vector<double> delta;
    };

    std::vector<double> event_times;
    std::vector<std::vector<double>> states;  // M after each event, then M at T
    std::vector<Jump> jumps;
    std::vector<Segment> segments;
    std::vector<double> qv;  // [M,M]_inf pointwise in x
    std::vector<double> pb;  // <M,M>_inf = int |g|^2 dnu, pointwise in x

    std::span<const double> terminal() const { return states.back(); }
};

// Pathwise integral M = g * (mu - nu) evaluated along one point pattern.
inline PathRealization integrate_path(const Integrand& g, const PointPattern& pattern,
                                      const RandomMeasureModel& model) {
    const std::size_t nx = g.n_points();
    PathRealization path;
    path.qv.assign(nx, 0.0);

    struct Recorder {
        PathRealization& out;
        void segment(double t0, double t1, std::span<const double> m,
                     std::span<const double> slope) {
            PathRealization::Segment s;
            s.t0 = t0;
            s.t1 = t1;
            s.m_start.assign(m.begin(), m.end());
            s.slope.assign(slope.begin(), slope.end());
            out.segments.push_back(std::move(s));
        }
        void event(double t, std::size_t cell, std::span<const double> delta,
                   std::span<const double> m_after) {
            out.event_times.push_back(t);
            out.states.emplace_back(m_after.begin(), m_after.end());
            out.jumps.push_back({t, cell, std::vector<double>(delta.begin(), delta.end())});
            for (std::size_t j = 0; j < delta.size(); ++j) out.qv[j] += delta[j] * delta[j];
        }
    } recorder{path};

    detail::walk_path(g, pattern, model, recorder);

    // Terminal state from the last segment.
    const auto& last = path.segments.back();
    std::vector<double> m_T(nx);
    const double dt = last.t1 - last.t0;
    for (std::size_t j = 0; j < nx; ++j) m_T[j] = last.m_start[j] + dt * last.slope[j];
    path.states.push_back(std::move(m_T));

    const auto& nu = model.nu();
    std::vector<double> col(nu.size());
    path.pb.resize(nx);
    for (std::size_t j = 0; j < nx; ++j) {
        for (std::size_t c = 0; c < nu.size(); ++c) {
            const double v = g(c, j);
            col[c] = v * v * nu.nu_weights[c];
        }
        path.pb[j] = pairwise_sum(col);
    }
    return path;
}

// sup_{t in [0,T]} ||M_t||_{L_q}. Along each affine segment t -> ||M_t|| is
// convex, so the sup over the segment sits at its endpoints.
inline double sup_lq(const PathRealization& path, double q, const SpaceGrid& grid) {
    require_exponent_ge1(q, "q");
    std::vector<double> scratch;
    std::vector<double> end;
    double best = 0.0;
    for (const auto& seg : path.segments) {
        best = std::max(best, detail::row_lq(seg.m_start, q, grid.weights, scratch));
        end.resize(seg.m_start.size());
        const double dt = seg.t1 - seg.t0;
        for (std::size_t j = 0; j < end.size(); ++j)
            end[j] = seg.m_start[j] + dt * seg.slope[j];
        best = std::max(best, detail::row_lq(end, q, grid.weights, scratch));
    }
    return best;
}

// Davis split of a time-ordered jump sequence: jump s is "big" when its
// L_q norm exceeds twice the running sup S_{s-} of the earlier jump norms.
struct DavisSplit {
    std::vector<std::size_t> big_indices;
    std::vector<double> jump_norms;
    std::vector<double> running_sup;  // S_s after each jump
    double s_inf = 0.0;
    double big_tv = 0.0;  // total variation of the big-jump part K^1
};

inline DavisSplit davis_split(std::span<const PathRealization::Jump> jumps, double q,
                              const SpaceGrid& grid) {
    DavisSplit split;
    std::vector<double> scratch;
    double prev_time = -std::numeric_limits<double>::infinity();
    double s = 0.0;
    for (std::size_t i = 0; i < jumps.size(); ++i) {
        if (!(jumps[i].time >= prev_time)) throw InvalidInput("jumps must be time-ordered");
        prev_time = jumps[i].time;
        const double norm = detail::row_lq(jumps[i].delta, q, grid.weights, scratch);
        if (norm > 2.0 * s) {
            split.big_indices.push_back(i);
            split.big_tv += norm;
        }
        s = std::max(s, norm);
        split.jump_norms.push_back(norm);
        split.running_sup.push_back(s);
    }
    split.s_inf = s;
    return split;
}

// Streaming per-replica statistics for the Monte Carlo estimators: running
// sup of ||M_t||_{L_q} over segment endpoints, terminal norms, and the norm
// of [M,M]^{1/2}, for several q at once from a single walk.
struct PathSummary {
    std::vector<double> sup_norm;
    std::vector<double> terminal_norm;
    std::vector<double> bracket_root_norm;
};

inline PathSummary path_summary(const Integrand& g, const PointPattern& pattern,
                                const RandomMeasureModel& model, const SpaceGrid& grid,
                                std::span<const double> qs) {
    g.check_shape(model.nu(), grid);
    const std::size_t nx = grid.size();

    struct Stats {
        std::span<const double> qs;
        const SpaceGrid& grid;
        std::vector<double> sup;
        std::vector<double> qv;
        std::vector<double> terminal;
        std::vector<double> scratch;
        std::vector<double> end;

        void eval_state(std::span<const double> m) {
            for (std::size_t qi = 0; qi < qs.size(); ++qi)
                sup[qi] = std::max(sup[qi],
                                   detail::row_lq(m, qs[qi], grid.weights, scratch));
        }
        void segment(double t0, double t1, std::span<const double> m,
                     std::span<const double> slope) {
            eval_state(m);
            end.resize(m.size());
            const double dt = t1 - t0;
            for (std::size_t j = 0; j < m.size(); ++j) end[j] = m[j] + dt * slope[j];
            eval_state(end);
            terminal.assign(end.begin(), end.end());
        }
        void event(double, std::size_t, std::span<const double> delta,
                   std::span<const double>) {
            for (std::size_t j = 0; j < delta.size(); ++j) qv[j] += delta[j] * delta[j];
        }
    } stats{qs, grid, std::vector<double>(qs.size(), 0.0), std::vector<double>(nx, 0.0),
            std::vector<double>(nx, 0.0), {}, {}};

    detail::walk_path(g, pattern, model, stats);

    PathSummary out;
    out.sup_norm = std::move(stats.sup);
    out.terminal_norm.resize(qs.size());
    out.bracket_root_norm.resize(qs.size());
    std::vector<double> root(nx);
    for (std::size_t j = 0; j < nx; ++j) root[j] = std::sqrt(stats.qv[j]);
    std::vector<double> scratch;
    for (std::size_t qi = 0; qi < qs.size(); ++qi) {
        out.terminal_norm[qi] =
            detail::row_lq(stats.terminal, qs[qi], grid.weights, scratch);
        out.bracket_root_norm[qi] = detail::row_lq(root, qs[qi], grid.weights, scratch);
    }
    return out;
}

}  // namespace jumplab
