#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include "jumplab/common.hpp"
#include "jumplab/grid.hpp"
#include "jumplab/rng.hpp"
#include "jumplab/sumnorm.hpp"

namespace jumplab {

struct DualNormOptions {
    std::size_t max_dimension = 6;
    int random_starts = 3;
    double step_init = 0.4;
    double step_floor = 1e-4;
    long max_ratio_evals = 2500;
    SumNormOptions inner{1e-5, 600, 20000, true};
};

// sup { <f,g>_w : ||g||_{I_{p,q}} <= 1 } on tiny instances, by deterministic
// multi-start pattern search over the scale-invariant ratio
// |<f,g>_w| / ||g||_{I_{p,q}}. Test oracle only; refuses large instances.
inline double dual_norm_bruteforce(const Integrand& f, double p, double q, const NuGrid& nu,
                                   const SpaceGrid& grid, const DualNormOptions& opts = {}) {
    f.check_shape(nu, grid);
    const std::size_t d = f.size();
    if (d > opts.max_dimension)
        throw InvalidInput("dual_norm_bruteforce limited to dimension " +
                           std::to_string(opts.max_dimension));

    std::vector<double> weights(d);
    for (std::size_t c = 0; c < f.n_cells(); ++c)
        for (std::size_t j = 0; j < f.n_points(); ++j)
            weights[c * f.n_points() + j] = nu.nu_weights[c] * grid.weights[j];

    const auto ff = f.flat();
    bool f_zero = true;
    for (double v : ff)
        if (v != 0.0) f_zero = false;
    if (f_zero) return 0.0;

    long evals = 0;
    const auto ratio = [&](const std::vector<double>& gv) {
        ++evals;
        Integrand g(f.n_cells(), f.n_points());
        auto gf = g.flat();
        std::copy(gv.begin(), gv.end(), gf.begin());
        const double denom = ipq_norm(g, p, q, nu, grid, opts.inner);
        if (!(denom > 1e-300)) return 0.0;
        std::vector<double> terms(d);
        for (std::size_t j = 0; j < d; ++j) terms[j] = ff[j] * gv[j] * weights[j];
        return std::abs(pairwise_sum(terms)) / denom;
    };

    std::vector<std::vector<double>> starts;
    starts.emplace_back(ff.begin(), ff.end());
    for (std::size_t j = 0; j < d; ++j) {
        std::vector<double> e(d, 0.0);
        e[j] = 1.0;
        starts.push_back(std::move(e));
    }
    ReplicaStream stream(0xB504F333F9DE6484ULL, 0);
    for (int s = 0; s < opts.random_starts; ++s) {
        std::vector<double> r(d);
        for (auto& v : r) v = stream.next_uniform(-1.0, 1.0);
        starts.push_back(std::move(r));
    }

    const auto normalize = [](std::vector<double>& v) {
        double m = 0.0;
        for (double x : v) m = std::max(m, std::abs(x));
        if (m > 0.0)
            for (double& x : v) x /= m;
    };

    double best = 0.0;
    for (auto& start : starts) {
        normalize(start);
        double local = ratio(start);
        std::vector<double> g = start;
        double step = opts.step_init;
        std::vector<double> trial(d);
        while (step > opts.step_floor && evals < opts.max_ratio_evals) {
            bool improved = false;
            for (std::size_t j = 0; j < d; ++j) {
                for (const double sign : {1.0, -1.0}) {
                    trial = g;
                    trial[j] += sign * step;
                    const double r = ratio(trial);
                    if (r > local) {
                        local = r;
                        g = trial;
                        improved = true;
                    }
                }
            }
            if (!improved) step *= 0.5;
            else normalize(g);
        }
        best = std::max(best, local);
        if (evals >= opts.max_ratio_evals) break;
    }
    return best;
}

}  // namespace jumplab
