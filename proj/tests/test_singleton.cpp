#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "helpers.hpp"
#include "wardrop/errors.hpp"
#include "wardrop/singleton.hpp"
#include "wardrop/solver.hpp"

using namespace wardrop;
using namespace testutil;

namespace {

// Euclidean projection onto {x >= 0, sum x = z} (sort-and-threshold).
std::vector<double> project_simplex(std::vector<double> v, double z) {
    std::vector<double> u = v;
    std::sort(u.begin(), u.end(), std::greater<double>());
    double acc = 0.0, theta = 0.0;
    std::size_t rho = 0;
    for (std::size_t j = 0; j < u.size(); ++j) {
        acc += u[j];
        const double t = (acc - z) / static_cast<double>(j + 1);
        if (u[j] - t > 0.0) {
            rho = j + 1;
            theta = t;
        }
    }
    for (auto& x : v) x = std::max(x - theta, 0.0);
    return v;
}

// Projected gradient descent on the Beckmann objective over the load simplex;
// independent oracle for the single-commodity equilibrium.
std::vector<double> pg_oracle(const std::vector<Resource>& resources, double demand,
                              int iters = 20000) {
    const std::size_t n = resources.size();
    std::vector<double> x(n, demand / static_cast<double>(n));
    double lipschitz = 0.0;
    for (const auto& r : resources) {
        const double slope =
            (r.cost.eval(demand + 1.0) - r.cost.eval(0.0)) / (demand + 1.0);
        lipschitz = std::max(lipschitz, slope);
    }
    const double step = 1.0 / std::max(lipschitz, 1e-6);
    for (int i = 0; i < iters; ++i) {
        std::vector<double> v(n);
        for (std::size_t r = 0; r < n; ++r)
            v[r] = x[r] - step * resources[r].cost.eval(x[r]);
        x = project_simplex(std::move(v), demand);
    }
    return x;
}

std::vector<bool> active_set(const std::vector<Resource>& resources, double demand) {
    const auto wf = water_fill(resources, demand);
    std::vector<bool> active(resources.size());
    for (std::size_t r = 0; r < resources.size(); ++r)
        active[r] = wf.loads[r] > 1e-9 * (1.0 + demand);
    return active;
}

}  // namespace

TEST_SUITE("singleton-engine") {

TEST_CASE("water fill on the three-link affine instance") {
    const std::vector<Resource> res{{"r1", CostFunction::affine(1, 1)},
                                    {"r2", CostFunction::affine(1, 0)},
                                    {"r3", CostFunction::affine(1, 2)}};

    const auto at4 = water_fill(res, 4.0);
    CHECK(at4.lambda == doctest::Approx(7.0 / 3.0).epsilon(1e-10));
    CHECK(at4.loads[0] == doctest::Approx(4.0 / 3.0).epsilon(1e-9));
    CHECK(at4.loads[1] == doctest::Approx(7.0 / 3.0).epsilon(1e-9));
    CHECK(at4.loads[2] == doctest::Approx(1.0 / 3.0).epsilon(1e-9));

    const auto at2 = water_fill(res, 2.0);
    CHECK(at2.lambda == doctest::Approx(1.5).epsilon(1e-10));
    CHECK(at2.loads[0] == doctest::Approx(0.5).epsilon(1e-9));
    CHECK(at2.loads[1] == doctest::Approx(1.5).epsilon(1e-9));
    CHECK(at2.loads[2] == doctest::Approx(0.0));

    const auto at0 = water_fill(res, 0.0);
    CHECK(at0.lambda == doctest::Approx(0.0));
    CHECK(at0.loads == std::vector<double>{0, 0, 0});

    CHECK_THROWS_AS(
        water_fill({{"flat", CostFunction::constant(1)}}, 1.0), StructuralError);
}

TEST_CASE("water fill conservation and level conditions on random instances") {
    std::mt19937 rng(42);
    std::uniform_real_distribution<double> slope(0.5, 3.0), icpt(0.0, 5.0),
        dem(0.0, 20.0);
    for (int trial = 0; trial < 200; ++trial) {
        std::vector<Resource> res;
        const std::size_t n = 2 + rng() % 4;
        for (std::size_t i = 0; i < n; ++i)
            res.push_back({"r" + std::to_string(i),
                           CostFunction::affine(slope(rng), icpt(rng))});
        const double demand = dem(rng);
        const auto wf = water_fill(res, demand);
        const double total = std::accumulate(wf.loads.begin(), wf.loads.end(), 0.0);
        CHECK(std::abs(total - demand) <= 1e-10 * (1.0 + demand));
        for (std::size_t r = 0; r < n; ++r) {
            if (wf.loads[r] > 0.0)
                CHECK(std::abs(res[r].cost.eval(wf.loads[r]) - wf.lambda) <= 1e-9);
            else
                CHECK(res[r].cost.eval(0.0) >= wf.lambda - 1e-9);
        }
    }
}

TEST_CASE("water fill agrees with a projected-gradient oracle") {
    std::mt19937 rng(4242);
    std::uniform_real_distribution<double> slope(0.5, 3.0), icpt(0.0, 5.0),
        dem(0.1, 10.0);
    for (int trial = 0; trial < 100; ++trial) {
        std::vector<Resource> res;
        for (int i = 0; i < 3; ++i)
            res.push_back({"r" + std::to_string(i),
                           CostFunction::affine(slope(rng), icpt(rng))});
        const double demand = dem(rng);
        const auto wf = water_fill(res, demand);
        const auto pg = pg_oracle(res, demand);
        for (std::size_t r = 0; r < res.size(); ++r)
            CHECK(std::abs(wf.loads[r] - pg[r]) <= 1e-6);
    }
}

TEST_CASE("break points of the catalogued fixtures") {
    const auto affine = break_points({{"r1", CostFunction::affine(1, 1)},
                                      {"r2", CostFunction::affine(1, 0)},
                                      {"r3", CostFunction::affine(1, 2)}});
    REQUIRE(affine.size() == 2);
    CHECK(affine[0] == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(affine[1] == doctest::Approx(3.0).epsilon(1e-12));

    const auto quad = break_points({{"r1", CostFunction::monomial(1, 2, 1)},
                                    {"r2", CostFunction::monomial(1, 2, 0)},
                                    {"r3", CostFunction::monomial(1, 2, 2)}});
    REQUIRE(quad.size() == 2);
    CHECK(quad[0] == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(std::abs(quad[1] - (1.0 + std::sqrt(2.0))) <= 1e-12);

    const auto pair = break_points({{"r2", CostFunction::monomial(1, 2, 0)},
                                    {"r3", CostFunction::monomial(1, 2, 2)}});
    REQUIRE(pair.size() == 1);
    CHECK(std::abs(pair[0] - std::sqrt(2.0)) <= 1e-12);
}

TEST_CASE("active sets change exactly at break points") {
    std::mt19937 rng(77);
    std::uniform_real_distribution<double> slope(0.5, 2.0), icpt(0.0, 4.0);
    for (int trial = 0; trial < 25; ++trial) {
        std::vector<Resource> res;
        const std::size_t n = 2 + rng() % 3;
        for (std::size_t i = 0; i < n; ++i)
            res.push_back({"r" + std::to_string(i),
                           CostFunction::affine(slope(rng), icpt(rng))});
        const auto bps = break_points(res);
        for (std::size_t b = 0; b < bps.size(); ++b) {
            const double delta = 1e-6 * (1.0 + bps[b]);
            CHECK(active_set(res, bps[b] - delta) != active_set(res, bps[b] + delta));
            // constant strictly between consecutive break points
            const double lo = bps[b] + delta;
            const double hi = (b + 1 < bps.size() ? bps[b + 1] : bps[b] + 5.0) - delta;
            if (lo < hi) {
                const auto ref = active_set(res, lo);
                for (int i = 1; i <= 10; ++i)
                    CHECK(active_set(res, lo + (hi - lo) * i / 10.0) == ref);
            }
        }
    }
}

TEST_CASE("region classification on the affine two-commodity instance") {
    const CongestionGame game = ex41_game();

    // balanced demands share one cost class over all resources
    {
        const DemandVector mu{1, 1};
        const auto label = classify_region(game, mu, solve_beckmann(game, mu));
        REQUIRE(label.classes.size() == 1);
        CHECK(label.classes[0].commodities == std::vector<std::size_t>{0, 1});
        CHECK(label.classes[0].resources == std::vector<std::size_t>{0, 1, 2});
        CHECK(label.classes[0].aggregate_demand == doctest::Approx(2.0));
    }

    // heavy alpha, light beta: beta undercuts on its exclusive resource
    {
        const DemandVector mu{3.8, 0.2};
        const EquilibriumReport rep = solve_beckmann(game, mu);
        CHECK(rep.commodity_costs[0] > rep.commodity_costs[1] + 1e-6);
        const auto label = classify_region(game, mu, rep);
        REQUIRE(label.classes.size() == 2);
        CHECK(label.classes[0].commodities == std::vector<std::size_t>{1});  // beta low
        CHECK(label.classes[0].resources == std::vector<std::size_t>{2});
        CHECK(label.classes[1].commodities == std::vector<std::size_t>{0});
        CHECK(label.classes[1].resources == std::vector<std::size_t>{0, 1});
    }

    // the (3, 0.5) demand still balances: one shared water system
    {
        const DemandVector mu{3, 0.5};
        const EquilibriumReport rep = solve_beckmann(game, mu);
        CHECK(rep.commodity_costs[0] ==
              doctest::Approx(rep.commodity_costs[1]).epsilon(1e-7));
        const auto label = classify_region(game, mu, rep);
        CHECK(label.classes.size() == 1);
    }

    // light alpha, heavy beta: green ordering
    {
        const DemandVector mu{0.5, 3};
        const auto label = classify_region(game, mu, solve_beckmann(game, mu));
        REQUIRE(label.classes.size() == 2);
        CHECK(label.classes[0].commodities == std::vector<std::size_t>{0});
        CHECK(label.classes[0].resources == std::vector<std::size_t>{0});
        CHECK(label.classes[1].commodities == std::vector<std::size_t>{1});
        CHECK(label.classes[1].resources == std::vector<std::size_t>{1, 2});
    }

    // single-commodity game: everything in one class
    {
        CongestionGame solo({{"a", CostFunction::affine(1, 0)},
                             {"b", CostFunction::affine(1, 1)}},
                            {{"h", {{{"a"}}, {{"b"}}}}});
        const DemandVector mu{2};
        const auto label = classify_region(solo, mu, solve_beckmann(solo, mu));
        REQUIRE(label.classes.size() == 1);
        CHECK(label.classes[0].resources == std::vector<std::size_t>{0, 1});
    }
}

TEST_CASE("per-class loads replay the single-commodity water fill") {
    const CongestionGame ex41 = ex41_game();
    {
        const DemandVector mu{1, 1};
        const EquilibriumReport rep = solve_beckmann(ex41, mu);
        const auto label = classify_region(ex41, mu, rep);
        const auto check = restricted_equilibrium_check(ex41, mu, label, rep, 1e-6);
        CHECK(check.pass);
        REQUIRE(check.classes.size() == 1);
        CHECK(check.classes[0].checked_water_fill);
        // the class water fill itself is the known split (0.5, 1.5, 0)
        const auto wf = water_fill(
            {ex41.resources()[0], ex41.resources()[1], ex41.resources()[2]}, 2.0);
        CHECK(wf.loads[0] == doctest::Approx(0.5).epsilon(1e-9));
        CHECK(wf.loads[1] == doctest::Approx(1.5).epsilon(1e-9));
        CHECK(wf.loads[2] == doctest::Approx(0.0));
    }

    const CongestionGame ex45 = ex45_game();
    {
        // green ordering: beta's class spreads over r2 and r3 past sqrt(2)
        const DemandVector mu{1.0, 1.5};
        const EquilibriumReport rep = solve_beckmann(ex45, mu);
        const auto label = classify_region(ex45, mu, rep);
        REQUIRE(label.classes.size() == 2);
        const auto check = restricted_equilibrium_check(ex45, mu, label, rep, 1e-6);
        CHECK(check.pass);
        CHECK(rep.loads[2] > 0.05);  // r3 active since 1.5 >= sqrt(2)
    }
    {
        // purple past the second break point: all three resources loaded
        const DemandVector mu{1.5, 1.5};
        const EquilibriumReport rep = solve_beckmann(ex45, mu);
        const auto label = classify_region(ex45, mu, rep);
        REQUIRE(label.classes.size() == 1);
        const auto check = restricted_equilibrium_check(ex45, mu, label, rep, 1e-6);
        CHECK(check.pass);
        for (double x : rep.loads) CHECK(x > 0.1);
    }
    {
        // zero demand: single class, vacuous pass
        const DemandVector mu{0, 0};
        const EquilibriumReport rep = solve_beckmann(ex45, mu);
        const auto label = classify_region(ex45, mu, rep);
        CHECK(restricted_equilibrium_check(ex45, mu, label, rep, 1e-6).pass);
    }
}

TEST_CASE("sub-region boundaries per class") {
    const CongestionGame ex41 = ex41_game();
    {
        const DemandVector mu{1, 1};  // purple
        const auto label = classify_region(ex41, mu, solve_beckmann(ex41, mu));
        const auto bounds = subregion_boundaries(ex41, label);
        REQUIRE(bounds.size() == 2);
        CHECK(bounds[0].break_point == doctest::Approx(1.0).epsilon(1e-12));
        CHECK(bounds[1].break_point == doctest::Approx(3.0).epsilon(1e-12));
    }
    const CongestionGame ex45 = ex45_game();
    {
        const DemandVector mu{1, 1};  // purple
        const auto label = classify_region(ex45, mu, solve_beckmann(ex45, mu));
        const auto bounds = subregion_boundaries(ex45, label);
        REQUIRE(bounds.size() == 2);
        CHECK(bounds[0].break_point == doctest::Approx(1.0).epsilon(1e-12));
        CHECK(std::abs(bounds[1].break_point - (1.0 + std::sqrt(2.0))) <= 1e-12);
    }
    {
        const DemandVector mu{0.5, 3};  // green: {alpha} < {beta}
        const auto label = classify_region(ex45, mu, solve_beckmann(ex45, mu));
        const auto bounds = subregion_boundaries(ex45, label);
        REQUIRE(bounds.size() == 1);  // alpha's single-resource class has none
        CHECK(bounds[0].class_index == 1);
        CHECK(std::abs(bounds[0].break_point - std::sqrt(2.0)) <= 1e-12);
    }
}

TEST_CASE("regime census hits every nonempty subset on the pinned construction") {
    const CongestionGame game = ex46_game(3);
    // mu_i = 0 if i in rho else max(rho); mu_free = sum_{i in rho} (max - i)
    std::vector<DemandVector> demands;
    std::vector<std::vector<std::size_t>> subsets{{0}, {1}, {2}, {0, 1},
                                                  {0, 2}, {1, 2}, {0, 1, 2}};
    for (const auto& rho : subsets) {
        const std::size_t imax = *std::max_element(rho.begin(), rho.end()) + 1;
        DemandVector mu(4, 0.0);
        for (std::size_t i = 0; i < 3; ++i)
            mu[i] = std::count(rho.begin(), rho.end(), i) ? 0.0
                                                          : static_cast<double>(imax);
        double free = 0.0;
        for (std::size_t i : rho) free += static_cast<double>(imax - (i + 1));
        mu[3] = free;
        demands.push_back(std::move(mu));
    }
    const RegimeCensus census = regime_census(game, demands);
    CHECK(census.failed.empty());
    std::set<std::vector<std::size_t>> free_regimes;
    for (const auto& e : census.entries) free_regimes.insert(e.regime.active[3]);
    CHECK(free_regimes.size() == 7);
    for (const auto& rho : subsets)
        CHECK(free_regimes.count(rho) == 1);
}

TEST_CASE("a two-resource single commodity has at most two regimes") {
    CongestionGame game({{"cheap", CostFunction::affine(1, 0)},
                         {"dear", CostFunction::affine(1, 2)}},
                        {{"h", {{{"cheap"}}, {{"dear"}}}}});
    const RegimeCensus census = regime_census(game, {{0.0, 8.0}}, 17);
    CHECK(census.entries.size() <= 2);

    const RegimeCensus degenerate = regime_census(game, {{1.0, 1.0}}, 2);
    CHECK(degenerate.entries.size() == 1);
}

TEST_CASE("loads within a class are comonotone and strictly increasing in mu_C") {
    const CongestionGame game = ex41_game();
    // purple samples with increasing aggregate demand
    std::vector<std::pair<double, double>> demands{
        {0.6, 0.7}, {0.9, 0.8}, {1.2, 1.1}, {1.6, 1.5}, {2.0, 1.9}, {2.3, 2.2}};
    std::vector<LoadProfile> loads;
    for (const auto& [a, b] : demands) {
        const EquilibriumReport rep = solve_beckmann(game, {a, b});
        const auto label = classify_region(game, {a, b}, rep);
        REQUIRE(label.classes.size() == 1);  // all purple
        loads.push_back(rep.loads);
    }
    for (std::size_t i = 0; i + 1 < loads.size(); ++i) {
        for (std::size_t r = 0; r < 3; ++r) {
            CHECK(loads[i + 1][r] >= loads[i][r] - 1e-8);
            const bool loaded = loads[i][r] > 1e-7 || loads[i + 1][r] > 1e-7;
            if (loaded) CHECK(loads[i + 1][r] > loads[i][r] - 1e-8);
        }
        // strictly increasing for resources active at both samples
        for (std::size_t r = 0; r < 3; ++r)
            if (loads[i][r] > 1e-3 && loads[i + 1][r] > 1e-3)
                CHECK(loads[i + 1][r] > loads[i][r] + 1e-9);
    }
}

TEST_CASE("mes loads are monotone along random axis chains") {
    std::mt19937 rng(2718);
    std::uniform_real_distribution<double> unif(0.0, 2.0);
    for (int trial = 0; trial < 15; ++trial) {
        const CongestionGame game = random_singleton_game(rng, 5, 3);
        DemandVector mu(game.num_commodities());
        for (auto& m : mu) m = unif(rng);
        for (std::size_t h = 0; h < mu.size(); ++h) {
            LoadProfile prev = solve_mes(game, mu).loads;
            for (double t : {0.4, 0.8, 1.2}) {
                DemandVector up = mu;
                up[h] += t;
                const LoadProfile next = solve_mes(game, up).loads;
                for (std::size_t r = 0; r < next.size(); ++r)
                    CHECK(next[r] >= prev[r] - 1e-7);
                prev = next;
            }
        }
    }
}

}  // TEST_SUITE
