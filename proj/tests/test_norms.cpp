#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "jumplab/families.hpp"
#include "jumplab/norms.hpp"
#include "jumplab/rng.hpp"

using namespace jumplab;

namespace {

SpaceGrid grid_with(std::vector<double> w) { return SpaceGrid({}, std::move(w)); }

NuGrid nu_with(std::vector<double> w) {
    NuGrid nu;
    for (std::size_t c = 0; c < w.size(); ++c) nu.cells.push_back({c, 0});
    nu.nu_weights = std::move(w);
    nu.validate();
    return nu;
}

// Direct long-double summation, the reference for the pairwise-sum path.
long double direct_lq(const std::vector<double>& v, double q, const std::vector<double>& w) {
    long double s = 0.0L;
    for (std::size_t j = 0; j < v.size(); ++j)
        s += std::pow(static_cast<long double>(std::abs(v[j])), static_cast<long double>(q)) *
             static_cast<long double>(w[j]);
    return std::pow(s, 1.0L / static_cast<long double>(q));
}

}  // namespace

TEST_CASE("lq_norm basics") {
    const auto grid = grid_with({1.0, 1.0});
    CHECK(lq_norm(std::vector<double>{3.0, 4.0}, 2.0, grid) == Catch::Approx(5.0).epsilon(1e-14));

    const auto single = grid_with({1.0});
    for (const double q : {1.0, 1.7, 2.0, 5.0})
        CHECK(lq_norm(std::vector<double>{-2.5}, q, single) ==
              Catch::Approx(2.5).epsilon(1e-14));

    const auto g3 = grid_with({0.5, 1.0, 2.0});
    const std::vector<double> v{1.0, 2.0, 3.0};
    const double expect = static_cast<double>(direct_lq(v, 3.0, g3.weights));
    CHECK(lq_norm(v, 3.0, g3) == Catch::Approx(expect).epsilon(1e-12));
}

TEST_CASE("lq_norm rejects bad input") {
    const auto grid = grid_with({1.0, 1.0});
    CHECK_THROWS_AS(lq_norm(std::vector<double>{1.0, 2.0}, 0.5, grid), InvalidInput);
    CHECK_THROWS_AS(lq_norm(std::vector<double>{1.0, std::nan("")}, 2.0, grid), InvalidInput);
    CHECK_THROWS_AS(lq_norm(std::vector<double>{1.0}, 2.0, grid), DimensionMismatch);
    CHECK_THROWS_AS(grid_with({1.0, -1.0}), InvalidInput);
    CHECK_THROWS_AS(grid_with({}), InvalidInput);
}

TEST_CASE("atomic norms on trivial instances") {
    const auto grid = grid_with({1.0});
    const auto nu = nu_with({4.0});
    Integrand zero(1, 1, 0.0);
    Integrand one(1, 1, 1.0);
    for (const auto kind : {AtomicKind::Lppq, AtomicKind::Lpqq, AtomicKind::Tilde})
        CHECK(atomic_norm(zero, kind, 2.0, 2.0, nu, grid) == 0.0);
    CHECK(atomic_norm(one, AtomicKind::Tilde, 3.0, 2.0, nu, grid) ==
          Catch::Approx(2.0).epsilon(1e-14));
    CHECK_THROWS_AS(atomic_norm(one, AtomicKind::Lppq, 1.0, 2.0, nu, grid), InvalidInput);
    CHECK_THROWS_AS(atomic_norm(Integrand(2, 1, 1.0), AtomicKind::Lppq, 2.0, 2.0, nu, grid),
                    DimensionMismatch);
}

TEST_CASE("q=2 collapse: Tilde equals Lpqq by Fubini") {
    ReplicaStream stream(2024, 0);
    for (int trial = 0; trial < 100; ++trial) {
        const std::size_t cells = 1 + stream.next_u32() % 6;
        const std::size_t points = 1 + stream.next_u32() % 5;
        std::vector<double> nw(cells), gw(points);
        for (auto& w : nw) w = stream.next_uniform(0.0, 3.0);
        for (auto& w : gw) w = stream.next_uniform(0.1, 2.0);
        const auto nu = nu_with(nw);
        const auto grid = grid_with(gw);
        const auto g = random_integrand(cells, points, stream, 2.0);
        const double p = stream.next_uniform(1.1, 4.0);
        const double a = atomic_norm(g, AtomicKind::Tilde, p, 2.0, nu, grid);
        const double b = atomic_norm(g, AtomicKind::Lpqq, p, 2.0, nu, grid);
        REQUIRE(rel_close(a, b, 1e-12));
    }
}

TEST_CASE("homogeneity and triangle inequality") {
    ReplicaStream stream(77, 0);
    for (int trial = 0; trial < 60; ++trial) {
        const std::size_t cells = 1 + stream.next_u32() % 5;
        const std::size_t points = 1 + stream.next_u32() % 4;
        std::vector<double> nw(cells), gw(points);
        for (auto& w : nw) w = stream.next_uniform(0.0, 2.0);
        for (auto& w : gw) w = stream.next_uniform(0.2, 2.5);
        const auto nu = nu_with(nw);
        const auto grid = grid_with(gw);
        const auto g = random_integrand(cells, points, stream, 3.0);
        const auto h = random_integrand(cells, points, stream, 3.0);
        const double p = stream.next_uniform(1.05, 4.5);
        const double q = stream.next_uniform(1.05, 4.5);
        for (const auto kind : {AtomicKind::Lppq, AtomicKind::Lpqq, AtomicKind::Tilde}) {
            const double ng = atomic_norm(g, kind, p, q, nu, grid);
            for (const double c : {-2.0, 0.5, 10.0}) {
                Integrand cg = g;
                cg *= c;
                REQUIRE(rel_close(atomic_norm(cg, kind, p, q, nu, grid), std::abs(c) * ng,
                                  1e-10));
            }
            const double nh = atomic_norm(h, kind, p, q, nu, grid);
            const double nsum = atomic_norm(g + h, kind, p, q, nu, grid);
            REQUIRE(nsum <= ng + nh + 1e-10 * (1.0 + ng + nh));
        }
    }
}

TEST_CASE("interpolation bound between outer exponents") {
    // ||f||_{L_s}^alpha <= ||f||_{L_r}^alpha + ||f||_{L_t}^alpha for r < s < t.
    ReplicaStream stream(501, 0);
    for (int trial = 0; trial < 10000; ++trial) {
        const std::size_t n = 1 + stream.next_u32() % 6;
        std::vector<double> w(n), v(n);
        for (auto& x : w) x = stream.next_uniform(0.05, 3.0);
        for (auto& x : v) x = stream.next_uniform(-2.0, 2.0);
        const auto grid = grid_with(w);
        const double r = stream.next_uniform(1.0, 3.0);
        const double s = r + stream.next_uniform(0.01, 2.0);
        const double t = s + stream.next_uniform(0.01, 2.0);
        const double nr = lq_norm(v, r, grid);
        const double ns = lq_norm(v, s, grid);
        const double nt = lq_norm(v, t, grid);
        for (const double alpha : {0.5, 1.0, 2.0}) {
            const double lhs = std::pow(ns, alpha);
            const double rhs = std::pow(nr, alpha) + std::pow(nt, alpha);
            REQUIRE(lhs <= rhs + 1e-10 * (1.0 + rhs));
        }
    }
}

TEST_CASE("outer-p inner-q mixed norm is dominated by the swapped order") {
    ReplicaStream stream(903, 0);
    for (int trial = 0; trial < 10000; ++trial) {
        const std::size_t rows = 1 + stream.next_u32() % 5;
        const std::size_t cols = 1 + stream.next_u32() % 5;
        std::vector<double> u(rows), w(cols), f(rows * cols), ft(rows * cols);
        for (auto& x : u) x = stream.next_uniform(0.05, 2.0);
        for (auto& x : w) x = stream.next_uniform(0.05, 2.0);
        for (auto& x : f) x = stream.next_uniform(-3.0, 3.0);
        for (std::size_t i = 0; i < rows; ++i)
            for (std::size_t j = 0; j < cols; ++j) ft[j * rows + i] = f[i * cols + j];
        const double q = stream.next_uniform(1.0, 4.0);
        const double p = q + stream.next_uniform(0.0, 3.0);
        const double lhs = mixed_norm_2d(f, rows, cols, u, w, p, q);
        const double rhs = mixed_norm_2d(ft, cols, rows, w, u, q, p);
        REQUIRE(lhs <= rhs + 1e-10 * (1.0 + rhs));
    }
}
