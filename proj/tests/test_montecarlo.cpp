#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "jumplab/families.hpp"
#include "jumplab/montecarlo.hpp"
#include "jumplab/oracle.hpp"

using namespace jumplab;

namespace {

RandomMeasureModel sweep_poisson() {
    PoissonSpec spec;
    spec.horizon = 1.0;
    spec.edges = {0.0, 0.25, 0.5, 0.75, 1.0};
    spec.n_marks = 2;
    spec.rates = {2.0, 0.5, 1.0, 1.5, 0.3, 2.5, 1.0, 1.0};
    return RandomMeasureModel::poisson(spec);
}

}  // namespace

TEST_CASE("estimate_lhs on trivial and exact cases") {
    const auto model = sweep_poisson();
    const auto grid = SpaceGrid::uniform(2);
    Integrand zero(model.n_cells(), grid.size(), 0.0);
    McOptions mc;
    mc.seed = 7;
    mc.replicas = 500;
    const auto est = estimate_lhs(zero, 2.0, 2.0, model, grid, mc);
    CHECK(est.value == 0.0);
    CHECK(est.std_error == 0.0);

    BernoulliSpec coin;
    coin.horizon = 1.0;
    coin.cells = {{0.5, 0.5}};
    const auto bern = RandomMeasureModel::bernoulli_cells(coin);
    const auto point = SpaceGrid::uniform(1);
    Integrand one(1, 1, 1.0);
    McOptions mc2;
    mc2.seed = 11;
    mc2.replicas = 40000;
    const auto est2 = estimate_lhs(one, 2.0, 2.0, bern, point, mc2);
    CHECK(std::abs(est2.value - 0.5) <= 3.0 * est2.std_error);
    CHECK_THROWS_AS(estimate_lhs(one, 2.0, 2.0, bern, point, McOptions{1, 1, 1}),
                    InvalidInput);
}

TEST_CASE("worker count never changes results") {
    const auto model = sweep_poisson();
    const auto grid = SpaceGrid::uniform(3, 0.8);
    ReplicaStream gstream(5, 0);
    const auto g = random_integrand(model.n_cells(), grid.size(), gstream, 1.2);
    McOptions one;
    one.seed = 99;
    one.replicas = 4000;
    one.workers = 1;
    McOptions eight = one;
    eight.workers = 8;
    const auto a = estimate_lhs(g, 2.5, 1.5, model, grid, one);
    const auto b = estimate_lhs(g, 2.5, 1.5, model, grid, eight);
    CHECK(a.value == b.value);
    CHECK(a.std_error == b.std_error);

    const auto bdg1 = bdg_check(g, 3.0, 2.0, model, grid, one);
    const auto bdg8 = bdg_check(g, 3.0, 2.0, model, grid, eight);
    CHECK(bdg1.bracket == bdg8.bracket);
    CHECK(bdg1.maximal == bdg8.maximal);
}

TEST_CASE("power-of-two scaling moves both sides exactly") {
    const auto model = sweep_poisson();
    const auto grid = SpaceGrid::uniform(2, 1.5);
    ReplicaStream gstream(15, 0);
    const auto g = random_integrand(model.n_cells(), grid.size(), gstream, 1.0);
    Integrand g16 = g;
    g16 *= 16.0;
    McOptions mc;
    mc.seed = 31;
    mc.replicas = 2000;
    for (const auto [p, q] :
         std::vector<std::pair<double, double>>{{1.5, 2.0}, {2.0, 2.0}, {3.0, 1.25}}) {
        const auto base = estimate_lhs(g, p, q, model, grid, mc);
        const auto scaled = estimate_lhs(g16, p, q, model, grid, mc);
        CHECK(scaled.value == 16.0 * base.value);
        const double rhs = ipq_norm(g, p, q, model.nu(), grid);
        const double rhs16 = ipq_norm(g16, p, q, model.nu(), grid);
        CHECK(rhs16 == 16.0 * rhs);
        CHECK(scaled.value / rhs16 == base.value / rhs);
    }
}

TEST_CASE("scaling by ten leaves ratios unchanged within tolerance") {
    const auto model = sweep_poisson();
    const auto grid = SpaceGrid::uniform(2);
    ReplicaStream gstream(16, 0);
    const auto g = random_integrand(model.n_cells(), grid.size(), gstream, 1.0);
    Integrand g10 = g;
    g10 *= 10.0;
    McOptions mc;
    mc.seed = 32;
    mc.replicas = 1500;
    const auto a = estimate_lhs(g, 2.0, 2.0, model, grid, mc);
    const auto b = estimate_lhs(g10, 2.0, 2.0, model, grid, mc);
    CHECK(rel_close(b.value, 10.0 * a.value, 1e-12));
}

TEST_CASE("standard error shrinks like one over root n") {
    const auto model = sweep_poisson();
    const auto grid = SpaceGrid::uniform(2);
    ReplicaStream gstream(17, 0);
    const auto g = random_integrand(model.n_cells(), grid.size(), gstream, 1.0);
    McOptions small;
    small.seed = 77;
    small.replicas = 4000;
    McOptions large = small;
    large.replicas = 16000;
    const auto a = estimate_lhs(g, 2.0, 2.0, model, grid, small);
    const auto b = estimate_lhs(g, 2.0, 2.0, model, grid, large);
    CHECK(b.std_error < a.std_error);
    CHECK(std::abs(a.std_error / b.std_error - 2.0) < 0.4);
}

TEST_CASE("bootstrap standard error roughly agrees with the delta method") {
    const auto model = sweep_poisson();
    const auto grid = SpaceGrid::uniform(2);
    ReplicaStream gstream(26, 0);
    const auto g = random_integrand(model.n_cells(), grid.size(), gstream, 1.0);
    McOptions delta;
    delta.seed = 91;
    delta.replicas = 8000;
    McOptions boot = delta;
    boot.bootstrap = true;
    const auto a = estimate_lhs(g, 2.0, 2.0, model, grid, delta);
    const auto b = estimate_lhs(g, 2.0, 2.0, model, grid, boot);
    CHECK(a.value == b.value);  // only the SE estimate changes
    CHECK(b.std_error > 0.0);
    CHECK(b.std_error / a.std_error > 0.5);
    CHECK(b.std_error / a.std_error < 2.0);
    const auto b2 = estimate_lhs(g, 2.0, 2.0, model, grid, boot);
    CHECK(b.std_error == b2.std_error);  // bootstrap resampling is seeded
}

TEST_CASE("ratio report structure and consistency") {
    const auto model = sweep_poisson();
    const auto grid = SpaceGrid::uniform(2, 0.9);
    std::vector<LabeledIntegrand> family;
    family.push_back({"flat", make_family({"flat", "constant", 1.0}, model, grid)});
    family.push_back(
        {"spike", make_family({"spike", "single_cell_spike", 3.0, 1.0, 2}, model, grid)});
    const std::vector<std::pair<double, double>> pq{{2.0, 2.0}, {1.5, 3.0}};
    McOptions mc;
    mc.seed = 88;
    mc.replicas = 3000;
    mc.workers = 4;
    const auto rows = ratio_report(family, pq, model, grid, mc);
    REQUIRE(rows.size() == 4);
    CHECK(rows[0].p == 1.5);  // sorted by (p, q, label)
    CHECK(rows[0].family == "flat");
    CHECK(rows[1].family == "spike");
    for (const auto& row : rows) {
        CHECK(row.ratio_defined);
        CHECK(!row.violation);
        CHECK(row.ratio > 0.0);
        CHECK(std::isfinite(row.ratio));
    }

    // The lhs column is bitwise the standalone estimator.
    const auto direct = estimate_lhs(family[0].g, 2.0, 2.0, model, grid, mc);
    const auto& row22 =
        *std::find_if(rows.begin(), rows.end(), [](const RatioRow& r) {
            return r.p == 2.0 && r.family == "flat";
        });
    CHECK(row22.lhs == direct.value);
    CHECK(row22.lhs_se == direct.std_error);
    CHECK(row22.regime_case == "case1");

    CHECK_THROWS_AS(ratio_report({}, pq, model, grid, mc), InvalidInput);
    CHECK_THROWS_AS(ratio_report(family, {}, model, grid, mc), InvalidInput);

    // Zero family: undefined-by-zero rows with lhs 0, no violation.
    std::vector<LabeledIntegrand> zero_family;
    zero_family.push_back({"null", Integrand(model.n_cells(), grid.size(), 0.0)});
    const auto zero_rows = ratio_report(zero_family, pq, model, grid, mc);
    for (const auto& row : zero_rows) {
        CHECK(!row.ratio_defined);
        CHECK(!row.violation);
        CHECK(row.lhs == 0.0);
        CHECK(row.rhs == 0.0);
    }
}

TEST_CASE("hilbert-case ratios respect doob at p = 2") {
    const auto model = sweep_poisson();
    const auto grid = SpaceGrid::uniform(1);
    ReplicaStream gstream(19, 0);
    McOptions mc;
    mc.seed = 55;
    mc.replicas = 20000;
    for (int trial = 0; trial < 5; ++trial) {
        const auto g = random_integrand(model.n_cells(), 1, gstream, 2.0);
        const auto report = hilbert_checks(g, 2.0, model, grid, mc);
        REQUIRE(report.rows.size() == 3);
        for (const auto& row : report.rows) {
            if (!row.applicable) continue;
            REQUIRE(row.rhs > 0.0);
            const double slack = 3.0 * row.lhs_se / row.rhs;
            if (row.inequality == "sqh") CHECK(row.ratio <= 4.0 + slack);
            if (row.inequality == "mejo") CHECK(row.ratio <= 4.0 + slack);
        }
        CHECK(report.rows[1].applicable);  // mejeto at p = 2
    }

    // p outside a range marks that inequality not applicable.
    const auto g = random_integrand(model.n_cells(), 1, gstream, 1.0);
    const auto high = hilbert_checks(g, 3.0, model, grid, mc);
    CHECK(!high.rows[0].applicable);
    CHECK(!high.rows[1].applicable);
    CHECK(high.rows[2].applicable);

    Integrand zero(model.n_cells(), 1, 0.0);
    const auto trivial = hilbert_checks(zero, 2.0, model, grid, mc);
    for (const auto& row : trivial.rows)
        if (row.applicable) CHECK(row.trivial);
}

TEST_CASE("bdg two-sided check brackets the maximal function") {
    const auto model = sweep_poisson();
    const auto grid = SpaceGrid::uniform(2, 1.2);
    ReplicaStream gstream(23, 0);
    McOptions mc;
    mc.seed = 66;
    mc.replicas = 20000;

    Integrand zero(model.n_cells(), grid.size(), 0.0);
    const auto z = bdg_check(zero, 2.0, 2.0, model, grid, mc);
    CHECK(z.bracket == 0.0);
    CHECK(z.maximal == 0.0);

    const auto g = random_integrand(model.n_cells(), grid.size(), gstream, 1.5);
    const auto r = bdg_check(g, 2.0, 2.0, model, grid, mc);
    // E sup ||M||^2 / E ||[M,M]^{1/2}||^2 sits in [1, 4] up to noise.
    const double ratio2 =
        (r.maximal * r.maximal) / (r.bracket * r.bracket);
    const double noise = 3.0 * (2.0 * r.maximal_se / r.maximal + 2.0 * r.bracket_se / r.bracket);
    CHECK(ratio2 >= 1.0 - noise);
    CHECK(ratio2 <= 4.0 + 4.0 * noise);
}
