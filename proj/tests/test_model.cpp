#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "jumplab/families.hpp"
#include "jumplab/model.hpp"
#include "jumplab/rng.hpp"

using namespace jumplab;

namespace {

RandomMeasureModel two_mark_poisson() {
    PoissonSpec spec;
    spec.horizon = 2.0;
    spec.edges = {0.0, 0.5, 1.2, 2.0};
    spec.n_marks = 2;
    spec.rates = {1.0, 0.5, 2.0, 0.0, 0.7, 1.3};
    return RandomMeasureModel::poisson(spec);
}

RandomMeasureModel three_cell_bernoulli() {
    BernoulliSpec spec;
    spec.horizon = 1.0;
    spec.cells = {{0.25, 0.3}, {0.5, 0.8}, {0.9, 0.05}};
    return RandomMeasureModel::bernoulli_cells(spec);
}

}  // namespace

TEST_CASE("nu grid derives from the model") {
    const auto poisson = two_mark_poisson();
    REQUIRE(poisson.n_cells() == 6);
    CHECK(poisson.nu().nu_weights[0] == Catch::Approx(0.5));   // 1.0 * 0.5
    CHECK(poisson.nu().nu_weights[2] == Catch::Approx(1.4));   // 2.0 * 0.7
    CHECK(poisson.nu().nu_weights[3] == Catch::Approx(0.0));
    CHECK(poisson.nu().cells[4].time_cell == 2);
    CHECK(poisson.nu().cells[4].mark == 0);

    const auto bernoulli = three_cell_bernoulli();
    REQUIRE(bernoulli.n_cells() == 3);
    CHECK(bernoulli.nu().nu_weights[1] == Catch::Approx(0.8));
}

TEST_CASE("model validation") {
    PoissonSpec bad = PoissonSpec::uniform(1.0, 2, 1, 1.0);
    bad.rates[0] = -0.5;
    CHECK_THROWS_AS(RandomMeasureModel::poisson(bad), InvalidInput);
    PoissonSpec edges = PoissonSpec::uniform(1.0, 2, 1, 1.0);
    edges.edges[1] = 0.0;
    CHECK_THROWS_AS(RandomMeasureModel::poisson(edges), InvalidInput);

    BernoulliSpec bern;
    bern.horizon = 1.0;
    bern.cells = {{0.5, 1.5}};
    CHECK_THROWS_AS(RandomMeasureModel::bernoulli_cells(bern), InvalidInput);
    bern.cells = {{0.5, 0.5}, {0.5, 0.2}};
    CHECK_THROWS_AS(RandomMeasureModel::bernoulli_cells(bern), InvalidInput);
    bern.cells = {{0.0, 0.2}};
    CHECK_THROWS_AS(RandomMeasureModel::bernoulli_cells(bern), InvalidInput);
}

TEST_CASE("null intensity yields empty patterns") {
    const auto model = RandomMeasureModel::poisson(PoissonSpec::uniform(1.0, 4, 2, 0.0));
    ReplicaStream stream(5, 0);
    CHECK(sample(model, stream).atoms.empty());
}

TEST_CASE("poisson atom count matches lambda*T") {
    const auto model = RandomMeasureModel::poisson(PoissonSpec::uniform(1.5, 3, 1, 2.0));
    const std::size_t n = 10000;
    double count = 0.0;
    for (std::size_t r = 0; r < n; ++r) {
        ReplicaStream stream(11, r);
        count += static_cast<double>(sample(model, stream).atoms.size());
    }
    const double se = std::sqrt(3.0 / static_cast<double>(n));
    CHECK(std::abs(count / static_cast<double>(n) - 3.0) < 3.0 * se);
}

TEST_CASE("sampling is reproducible and well-formed") {
    const auto model = two_mark_poisson();
    ReplicaStream s1(99, 3), s2(99, 3);
    const auto a = sample(model, s1);
    const auto b = sample(model, s2);
    REQUIRE(a.atoms.size() == b.atoms.size());
    for (std::size_t i = 0; i < a.atoms.size(); ++i) {
        CHECK(a.atoms[i].time == b.atoms[i].time);
        CHECK(a.atoms[i].cell == b.atoms[i].cell);
    }
    for (std::size_t r = 0; r < 200; ++r) {
        ReplicaStream stream(17, r);
        const auto pattern = sample(model, stream);
        double prev = 0.0;
        for (const auto& atom : pattern.atoms) {
            CHECK(atom.time > prev);
            CHECK(atom.time <= model.horizon());
            CHECK(model.nu().nu_weights[atom.cell] > 0.0);
            prev = atom.time;
        }
    }
}

TEST_CASE("compensator accumulates nu") {
    const auto unit = RandomMeasureModel::poisson(PoissonSpec::uniform(1.0, 1, 1, 1.0));
    const std::vector<double> one{1.0};
    CHECK(compensator_cumulative(one, unit, 1.0) == Catch::Approx(1.0));
    CHECK(compensator_cumulative(one, unit, 0.25) == Catch::Approx(0.25));
    CHECK_THROWS_AS(compensator_cumulative(one, unit, 1.5), InvalidInput);

    BernoulliSpec bspec;
    bspec.horizon = 1.0;
    bspec.cells = {{0.5, 0.5}};
    const auto bern = RandomMeasureModel::bernoulli_cells(bspec);
    CHECK(compensator_cumulative(one, bern, 0.4) == 0.0);
    CHECK(compensator_cumulative(one, bern, 0.5) == Catch::Approx(0.5));

    const auto model = two_mark_poisson();
    ReplicaStream stream(3, 0);
    std::vector<double> field(model.n_cells());
    for (auto& f : field) f = stream.next_uniform(-1.0, 1.0);
    double direct = 0.0;
    for (std::size_t c = 0; c < model.n_cells(); ++c)
        direct += field[c] * model.nu().nu_weights[c];
    CHECK(rel_close(compensator_cumulative(field, model, model.horizon()), direct, 1e-12));
}

TEST_CASE("empirical mu-integral matches the nu-integral") {
    for (const auto& model : {two_mark_poisson(), three_cell_bernoulli()}) {
        ReplicaStream fstream(21, 0);
        std::vector<double> field(model.n_cells());
        for (auto& f : field) f = fstream.next_uniform(0.0, 2.0);
        double expect = 0.0;
        for (std::size_t c = 0; c < model.n_cells(); ++c)
            expect += field[c] * model.nu().nu_weights[c];

        const std::size_t n = 20000;
        std::vector<double> draws(n);
        for (std::size_t r = 0; r < n; ++r) {
            ReplicaStream stream(22, r);
            const auto pattern = sample(model, stream);
            double v = 0.0;
            for (const auto& atom : pattern.atoms) v += field[atom.cell];
            draws[r] = v;
        }
        const double mean = pairwise_sum(draws) / static_cast<double>(n);
        double var = 0.0;
        for (double d : draws) var += (d - mean) * (d - mean);
        const double se = std::sqrt(var / static_cast<double>(n - 1) / static_cast<double>(n));
        CHECK(std::abs(mean - expect) <= 3.0 * se + 1e-12);
    }
}
