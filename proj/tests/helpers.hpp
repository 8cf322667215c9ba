#pragma once

#include <cmath>
#include <random>
#include <string>
#include <vector>

#include "wardrop/compose.hpp"
#include "wardrop/game.hpp"

namespace testutil {

using namespace wardrop;

#ifndef WARDROP_FIXTURE_DIR
#define WARDROP_FIXTURE_DIR "fixtures"
#endif

inline std::string fixture_path(const std::string& name) {
    return std::string(WARDROP_FIXTURE_DIR) + "/" + name;
}

// Three-link network with OD pairs (a,b), (a,c), (b,c); the classic
// demand-increase paradox fixture. Commodity order: ab, ac, bc.
inline CongestionGame fisk_game() {
    std::vector<Resource> r{{"e1", CostFunction::affine(1, 0)},
                            {"e2", CostFunction::affine(1, 0)},
                            {"e3", CostFunction::affine(1, 90)}};
    std::vector<Commodity> c{{"ab", {{{"e1"}}}},
                             {"ac", {{{"e1", "e2"}}, {{"e3"}}}},
                             {"bc", {{{"e2"}}}}};
    return CongestionGame(std::move(r), std::move(c));
}

// Wheatstone network in strategy form; paths ordered zigzag, upper, lower.
inline CongestionGame braess_game() {
    std::vector<Resource> r{{"O_v1", CostFunction::affine(1, 0)},
                            {"O_v2", CostFunction::constant(1)},
                            {"v1_v2", CostFunction::constant(0)},
                            {"v1_D", CostFunction::constant(1)},
                            {"v2_D", CostFunction::affine(1, 0)}};
    std::vector<Commodity> c{{"h1",
                              {{{"O_v1", "v1_v2", "v2_D"}},
                               {{"O_v1", "v1_D"}},
                               {{"O_v2", "v2_D"}}}}};
    return CongestionGame(std::move(r), std::move(c));
}

// Two commodities sharing the middle of three affine parallel links.
inline CongestionGame ex41_game() {
    std::vector<Resource> r{{"r1", CostFunction::affine(1, 1)},
                            {"r2", CostFunction::affine(1, 0)},
                            {"r3", CostFunction::affine(1, 2)}};
    std::vector<Commodity> c{{"alpha", {{{"r1"}}, {{"r2"}}}},
                             {"beta", {{{"r2"}}, {{"r3"}}}}};
    return CongestionGame(std::move(r), std::move(c));
}

// Quadratic-cost variant of the same structure.
inline CongestionGame ex45_game() {
    std::vector<Resource> r{{"r1", CostFunction::monomial(1, 2, 1)},
                            {"r2", CostFunction::monomial(1, 2, 0)},
                            {"r3", CostFunction::monomial(1, 2, 2)}};
    std::vector<Commodity> c{{"alpha", {{{"r1"}}, {{"r2"}}}},
                             {"beta", {{{"r2"}}, {{"r3"}}}}};
    return CongestionGame(std::move(r), std::move(c));
}

// m pinned commodities plus one free commodity over all resources; the free
// commodity realizes every nonempty active set.
inline CongestionGame ex46_game(std::size_t m = 3) {
    std::vector<Resource> r;
    std::vector<Commodity> c;
    for (std::size_t i = 1; i <= m; ++i) {
        r.push_back({"r" + std::to_string(i),
                     CostFunction::affine(1, static_cast<double>(i))});
        c.push_back({"c" + std::to_string(i), {{{"r" + std::to_string(i)}}}});
    }
    Commodity free{"free", {}};
    for (std::size_t i = 1; i <= m; ++i) free.strategies.push_back({{"r" + std::to_string(i)}});
    c.push_back(std::move(free));
    return CongestionGame(std::move(r), std::move(c));
}

// Flat-cost multiplicity fixture: c1 = c3 = 1, c2 = x; commodities
// alpha:{r1,r2}, beta:{r2,r3}. The selection at (2,0) and (0,2) is the
// standard counterexample to cross-demand comonotonicity.
inline CongestionGame flat_cost_game() {
    std::vector<Resource> r{{"r1", CostFunction::constant(1)},
                            {"r2", CostFunction::affine(1, 0)},
                            {"r3", CostFunction::constant(1)}};
    std::vector<Commodity> c{{"alpha", {{{"r1"}}, {{"r2"}}}},
                             {"beta", {{{"r2"}}, {{"r3"}}}}};
    return CongestionGame(std::move(r), std::move(c));
}

// Random singleton game with strictly increasing affine costs.
inline CongestionGame random_singleton_game(std::mt19937& rng,
                                            std::size_t max_resources = 5,
                                            std::size_t max_commodities = 4,
                                            const std::string& prefix = "") {
    std::uniform_int_distribution<std::size_t> n_res(2, max_resources);
    std::uniform_int_distribution<std::size_t> n_com(1, max_commodities);
    std::uniform_real_distribution<double> slope(0.5, 3.0);
    std::uniform_real_distribution<double> intercept(0.0, 5.0);
    const std::size_t n = n_res(rng);
    const std::size_t k = n_com(rng);
    std::vector<Resource> resources;
    for (std::size_t i = 0; i < n; ++i)
        resources.push_back({prefix + "r" + std::to_string(i),
                             CostFunction::affine(slope(rng), intercept(rng))});
    std::vector<Commodity> commodities;
    std::uniform_int_distribution<int> coin(0, 1);
    for (std::size_t h = 0; h < k; ++h) {
        Commodity c{prefix + "h" + std::to_string(h), {}};
        for (std::size_t i = 0; i < n; ++i)
            if (coin(rng)) c.strategies.push_back({{resources[i].id}});
        if (c.strategies.empty())
            c.strategies.push_back({{resources[rng() % n].id}});
        commodities.push_back(std::move(c));
    }
    return CongestionGame(std::move(resources), std::move(commodities));
}


// Random composition of singleton blocks under product/union, capped at a
// handful of commodities so demand sweeps stay cheap.
inline CongestionGame random_product_union(std::mt19937& rng, int depth,
                                           const std::string& prefix) {
    if (depth <= 0 || rng() % 3 == 0)
        return random_singleton_game(rng, 3, 2, prefix + "_");
    const CongestionGame g1 = random_product_union(rng, depth - 1, prefix + "l");
    const CongestionGame g2 = random_product_union(rng, depth - 1, prefix + "r");
    if (g1.num_commodities() * g2.num_commodities() > 4 || rng() % 2)
        return union_game(g1, g2);
    return product(g1, g2);
}

inline bool close(double a, double b, double tol) { return std::abs(a - b) <= tol; }

}  // namespace testutil
