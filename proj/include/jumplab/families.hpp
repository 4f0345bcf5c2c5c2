#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "jumplab/common.hpp"
#include "jumplab/grid.hpp"
#include "jumplab/model.hpp"
#include "jumplab/rng.hpp"

namespace jumplab {

// Named deterministic integrand generators. The shapes are deliberately far
// apart (flat, smooth separable, one-cell spike, heavy cell tail,
// sign-alternating) so ratio bands cannot be passed by coincidence.
struct FamilySpec {
    std::string name;
    std::string kind = "constant";
    double scale = 1.0;
    double alpha = 1.0;        // heavy_tail: g ~ (cell index + 1)^{-1/alpha}
    std::size_t cell = 0;      // single_cell_spike location
    double time_ratio = 0.7;   // separable: factor^time_cell
    double mark_ratio = 0.6;   // separable: factor^mark
    double space_power = 1.0;  // separable: (j + 1)^{-power}
};

inline const std::vector<std::string>& known_family_kinds() {
    static const std::vector<std::string> kinds = {
        "constant", "separable", "single_cell_spike", "heavy_tail", "alternating"};
    return kinds;
}

inline Integrand make_family(const FamilySpec& spec, const RandomMeasureModel& model,
                             const SpaceGrid& grid) {
    const auto& nu = model.nu();
    Integrand g(nu.size(), grid.size());
    if (spec.kind == "constant") {
        for (std::size_t c = 0; c < nu.size(); ++c)
            for (std::size_t j = 0; j < grid.size(); ++j) g(c, j) = spec.scale;
    } else if (spec.kind == "separable") {
        for (std::size_t c = 0; c < nu.size(); ++c) {
            const auto cell = nu.cells[c];
            const double tf = std::pow(spec.time_ratio, static_cast<double>(cell.time_cell));
            const double mf = std::pow(spec.mark_ratio, static_cast<double>(cell.mark));
            for (std::size_t j = 0; j < grid.size(); ++j)
                g(c, j) = spec.scale * tf * mf *
                          std::pow(static_cast<double>(j + 1), -spec.space_power);
        }
    } else if (spec.kind == "single_cell_spike") {
        if (spec.cell >= nu.size())
            throw InvalidInput("spike cell index out of range for family '" + spec.name + "'");
        for (std::size_t j = 0; j < grid.size(); ++j) g(spec.cell, j) = spec.scale;
    } else if (spec.kind == "heavy_tail") {
        if (!(spec.alpha > 0.0))
            throw InvalidInput("heavy_tail alpha must be positive for family '" + spec.name +
                               "'");
        for (std::size_t c = 0; c < nu.size(); ++c) {
            const double v =
                spec.scale * std::pow(static_cast<double>(c + 1), -1.0 / spec.alpha);
            for (std::size_t j = 0; j < grid.size(); ++j) g(c, j) = v;
        }
    } else if (spec.kind == "alternating") {
        for (std::size_t c = 0; c < nu.size(); ++c)
            for (std::size_t j = 0; j < grid.size(); ++j)
                g(c, j) = (c + j) % 2 == 0 ? spec.scale : -spec.scale;
    } else {
        std::string known;
        for (const auto& k : known_family_kinds()) {
            if (!known.empty()) known += ", ";
            known += k;
        }
        throw InvalidInput("unknown integrand family kind '" + spec.kind + "' (known: " +
                           known + ")");
    }
    return g;
}

// Seeded random field, used by the randomized suites.
inline Integrand random_integrand(std::size_t n_cells, std::size_t n_points,
                                  ReplicaStream& stream, double amplitude = 1.0) {
    Integrand g(n_cells, n_points);
    for (std::size_t c = 0; c < n_cells; ++c)
        for (std::size_t j = 0; j < n_points; ++j)
            g(c, j) = stream.next_uniform(-amplitude, amplitude);
    return g;
}

}  // namespace jumplab
