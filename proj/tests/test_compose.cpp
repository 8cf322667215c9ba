#include <doctest.h>

#include <cmath>
#include <random>
#include <set>

#include "helpers.hpp"
#include "wardrop/compose.hpp"
#include "wardrop/errors.hpp"
#include "wardrop/io.hpp"
#include "wardrop/solver.hpp"

using namespace wardrop;
using namespace testutil;

namespace {

CongestionGame two_link_game(const std::string& prefix) {
    return CongestionGame({{prefix + "a", CostFunction::affine(1, 0)},
                           {prefix + "b", CostFunction::affine(1, 1)}},
                          {{prefix + "h", {{{prefix + "a"}}, {{prefix + "b"}}}}});
}

}  // namespace

TEST_SUITE("composer") {

TEST_CASE("product multiplies commodities and strategies") {
    const CongestionGame g1 = two_link_game("x");
    const CongestionGame g2 = two_link_game("y");
    const CongestionGame prod = product(g1, g2);
    CHECK(prod.num_resources() == 4);
    REQUIRE(prod.num_commodities() == 1);
    CHECK(prod.commodities()[0].id == "xh⊗yh");
    REQUIRE(prod.num_strategies(0) == 4);
    for (std::size_t s = 0; s < 4; ++s)
        CHECK(prod.strategy(0, s).size() == 2);
    CHECK(validate_game(prod).empty());

    const CongestionGame multi = product(ex41_game(), two_link_game("z"));
    CHECK(multi.num_commodities() == 2);

    CongestionGame r1({{"p", CostFunction::affine(1, 0)}}, {{"h1", {{{"p"}}}}});
    CongestionGame r2({{"q", CostFunction::affine(1, 0)}}, {{"h2", {{{"q"}}}}});
    const CongestionGame series = product(r1, r2);
    REQUIRE(series.num_commodities() == 1);
    REQUIRE(series.num_strategies(0) == 1);
    CHECK(series.strategy(0, 0).size() == 2);

    CHECK_THROWS_AS(product(two_link_game("x"), two_link_game("x")), StructuralError);
}

TEST_CASE("union concatenates blocks") {
    CongestionGame fresh({{"w", CostFunction::affine(1, 0)}}, {{"hw", {{{"w"}}}}});
    const CongestionGame u = union_game(ex41_game(), fresh);
    CHECK(u.num_commodities() == 3);
    CHECK(u.num_resources() == 4);
    CHECK(validate_game(u).empty());

    CHECK_THROWS_AS(union_game(ex41_game(), ex41_game()), StructuralError);
    // a block without commodities violates the core invariants
    CongestionGame empty({{"q", CostFunction::affine(1, 0)}}, {});
    CHECK_THROWS_AS(union_game(fresh, empty), StructuralError);
}

TEST_CASE("split_demand computes marginals") {
    const auto [mu1, mu2] = split_demand(2, 2, {1, 2, 3, 4});
    CHECK(mu1 == DemandVector{3, 7});
    CHECK(mu2 == DemandVector{4, 6});

    const auto [z1, z2] = split_demand(2, 2, {0, 0, 0, 0});
    CHECK(z1 == DemandVector{0, 0});
    CHECK(z2 == DemandVector{0, 0});

    const auto [s1, s2] = split_demand(1, 1, {5});
    CHECK(s1 == DemandVector{5});
    CHECK(s2 == DemandVector{5});

    CHECK_THROWS_AS(split_demand(2, 2, {1, 2, 3}), StructuralError);
}

TEST_CASE("product equilibria superpose blockwise") {
    std::mt19937 rng(1234);
    std::uniform_real_distribution<double> unif(0.0, 2.0);
    for (int trial = 0; trial < 8; ++trial) {
        const CongestionGame g1 = random_singleton_game(rng, 3, 2, "L");
        const CongestionGame g2 = random_singleton_game(rng, 3, 2, "R");
        const CongestionGame prod = product(g1, g2);
        DemandVector mu(prod.num_commodities());
        for (auto& m : mu) m = unif(rng);
        const auto [mu1, mu2] = split_demand(g1.num_commodities(),
                                             g2.num_commodities(), mu);
        const LoadProfile joint = solve_mes(prod, mu).loads;
        const LoadProfile part1 = solve_mes(g1, mu1).loads;
        const LoadProfile part2 = solve_mes(g2, mu2).loads;
        for (std::size_t r = 0; r < g1.num_resources(); ++r)
            CHECK(std::abs(joint[r] - part1[r]) <= 1e-6);
        for (std::size_t r = 0; r < g2.num_resources(); ++r)
            CHECK(std::abs(joint[g1.num_resources() + r] - part2[r]) <= 1e-6);
    }
}

TEST_CASE("union equilibria superpose blockwise") {
    std::mt19937 rng(4321);
    std::uniform_real_distribution<double> unif(0.0, 2.0);
    const CongestionGame g1 = random_singleton_game(rng, 3, 2, "A");
    const CongestionGame g2 = random_singleton_game(rng, 3, 2, "B");
    const CongestionGame u = union_game(g1, g2);
    DemandVector mu(u.num_commodities());
    for (auto& m : mu) m = unif(rng);
    const DemandVector mu1(mu.begin(), mu.begin() + g1.num_commodities());
    const DemandVector mu2(mu.begin() + g1.num_commodities(), mu.end());
    const LoadProfile joint = solve_mes(u, mu).loads;
    const LoadProfile part1 = solve_mes(g1, mu1).loads;
    const LoadProfile part2 = solve_mes(g2, mu2).loads;
    for (std::size_t r = 0; r < g1.num_resources(); ++r)
        CHECK(std::abs(joint[r] - part1[r]) <= 1e-6);
    for (std::size_t r = 0; r < g2.num_resources(); ++r)
        CHECK(std::abs(joint[g1.num_resources() + r] - part2[r]) <= 1e-6);
}

TEST_CASE("mes is preserved under random product/union composition") {
    std::mt19937 rng(5150);
    std::uniform_real_distribution<double> unif(0.0, 1.5);
    int built = 0;
    while (built < 6) {
        const CongestionGame game =
            random_product_union(rng, 3, "t" + std::to_string(built));
        if (game.num_commodities() > 4) continue;
        ++built;
        DemandVector mu(game.num_commodities());
        for (auto& m : mu) m = unif(rng);
        for (std::size_t h = 0; h < mu.size(); ++h) {
            LoadProfile prev = solve_mes(game, mu).loads;
            for (double t : {0.5, 1.0}) {
                DemandVector up = mu;
                up[h] += t;
                const LoadProfile next = solve_mes(game, up).loads;
                for (std::size_t r = 0; r < next.size(); ++r)
                    CHECK(next[r] >= prev[r] - 1e-6);
                prev = next;
            }
        }
    }
}

TEST_CASE("series-parallel chain embedding of a strategy game") {
    const CongestionGame braess = braess_game();
    const SpEmbedding emb = embed_sp(braess);
    CHECK(validate_crg(emb.crg).empty());
    CHECK(emb.crg.vertices.size() == 6);   // 5 blocks
    CHECK(emb.crg.edges.size() == 10);     // top + bypass per block
    REQUIRE(emb.crg.commodities.size() == 1);
    CHECK(emb.crg.commodities[0].paths.size() == 3);
    for (const auto& path : emb.crg.commodities[0].paths)
        CHECK(path.size() == 5);  // one edge per block
    CHECK(is_series_parallel(emb.crg, "v0", "v5"));

    CongestionGame single({{"r", CostFunction::affine(1, 0)}}, {{"h", {{{"r"}}}}});
    const SpEmbedding one = embed_sp(single);
    CHECK(one.crg.edges.size() == 2);
    REQUIRE(one.crg.commodities[0].paths.size() == 1);
    CHECK(one.crg.commodities[0].paths[0] == std::vector<std::string>{"r"});
}

TEST_CASE("embedding preserves equilibrium costs on the wheatstone rows") {
    const CongestionGame braess = braess_game();
    const SpEmbedding emb = embed_sp(braess);
    const EquivalenceCheck check = check_equivalence(
        braess, emb.crg, emb.witness, {{0.5}, {1.5}, {3.0}});
    CHECK(check.pass);
    CHECK(check.max_cost_mismatch <= 1e-9);
    CHECK(check.max_lambda_mismatch <= 1e-5);

    const CongestionGame image = crg_to_game(emb.crg);
    CHECK(solve_beckmann(image, {0.5}).commodity_costs[0] ==
          doctest::Approx(1.0).epsilon(1e-6));
    CHECK(solve_beckmann(image, {1.5}).commodity_costs[0] ==
          doctest::Approx(2.0).epsilon(1e-6));
    CHECK(solve_beckmann(image, {3.0}).commodity_costs[0] ==
          doctest::Approx(2.5).epsilon(1e-6));
}

TEST_CASE("witness-mapped equilibrium flows satisfy wardrop in the source game") {
    const CongestionGame braess = braess_game();
    const SpEmbedding emb = embed_sp(braess);
    const CongestionGame image = crg_to_game(emb.crg);
    const DemandVector mu{1.5};
    const EquilibriumReport img = solve_beckmann(image, mu);

    EquilibriumReport mapped;
    mapped.flow.resize(1);
    mapped.flow[0].resize(braess.num_strategies(0));
    for (std::size_t s = 0; s < braess.num_strategies(0); ++s)
        mapped.flow[0][s] = img.flow[emb.witness.commodity_map[0]]
                                    [emb.witness.strategy_map[0][s]];
    mapped.loads = load_from_flow(braess, mapped.flow);
    mapped.resource_costs.resize(braess.num_resources());
    for (std::size_t r = 0; r < braess.num_resources(); ++r)
        mapped.resource_costs[r] = braess.cost_at(r, mapped.loads[r]);
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t s = 0; s < braess.num_strategies(0); ++s)
        best = std::min(best, strategy_cost(braess, mapped.loads, 0, s));
    mapped.commodity_costs = {best};
    CHECK(verify_wardrop(braess, mu, mapped, 1e-6).pass);
}

TEST_CASE("identity witness on a game viewed as its own routing game") {
    const ConstrainedRoutingGame crg = load_crg(fixture_path("braess_crg.json"));
    const CongestionGame game = crg_to_game(crg);
    EquivalenceWitness id;
    id.commodity_map = {0};
    id.strategy_map = {{0, 1, 2}};
    CHECK(check_equivalence(game, crg, id, {{1.0}, {2.5}}).pass);
}

TEST_CASE("a swapped witness is caught by the cost-preservation probe") {
    const CongestionGame ex41 = ex41_game();
    SpEmbedding emb = embed_sp(ex41);
    std::swap(emb.witness.strategy_map[0][0], emb.witness.strategy_map[0][1]);
    const EquivalenceCheck check = check_equivalence(ex41, emb.crg, emb.witness, {{2, 0}});
    CHECK_FALSE(check.pass);
    CHECK(check.detail.find("alpha") != std::string::npos);
}

TEST_CASE("common-OD embedding of the three-pair network adds two bypasses") {
    const ConstrainedRoutingGame fisk = load_crg(fixture_path("fisk_crg.json"));
    const CommonOdEmbedding emb = embed_common_od(fisk);
    CHECK(emb.origin == "a");
    CHECK(emb.destination == "c");
    CHECK(emb.crg.vertices.size() == 3);        // no new vertices
    REQUIRE(emb.crg.edges.size() == 5);         // e1,e2,e3 + two bypasses
    std::set<std::pair<std::string, std::string>> bypasses;
    for (std::size_t e = 3; e < 5; ++e) {
        CHECK(emb.crg.edges[e].cost == CostFunction::constant(0));
        bypasses.insert({emb.crg.edges[e].tail, emb.crg.edges[e].head});
    }
    CHECK(bypasses.count({"a", "b"}) == 1);
    CHECK(bypasses.count({"b", "c"}) == 1);
    CHECK(validate_crg(emb.crg).empty());
    // the two-path commodity keeps its original routes
    const auto& h3 = emb.crg.commodities[1];
    CHECK(h3.paths[0] == std::vector<std::string>{"e1", "e2"});
    CHECK(h3.paths[1] == std::vector<std::string>{"e3"});

    // equilibrium cost of (b,c) is preserved through the embedding
    const CongestionGame image = crg_to_game(emb.crg);
    const EquilibriumReport rep = solve_beckmann(image, {60, 30, 6});
    CHECK(std::abs(rep.commodity_costs[2] - 24.0) <= 1e-4);

    // already common-OD: nothing to do
    const ConstrainedRoutingGame braess = load_crg(fixture_path("braess_crg.json"));
    const CommonOdEmbedding same = embed_common_od(braess);
    CHECK(same.crg.edges.size() == braess.edges.size());
    CHECK(crg_to_json(same.crg) == crg_to_json(braess));
}

TEST_CASE("series-parallel recognizer") {
    const ConstrainedRoutingGame wheatstone = load_crg(fixture_path("braess_crg.json"));
    CHECK_FALSE(is_series_parallel(wheatstone, "O", "D"));

    std::mt19937 rng(31337);
    std::function<SPNetwork(int)> build = [&](int depth) -> SPNetwork {
        static int counter = 0;
        if (depth == 0 || rng() % 3 == 0)
            return SPNetwork::edge("e" + std::to_string(counter++),
                                   CostFunction::affine(1, 0));
        SPNetwork a = build(depth - 1);
        SPNetwork b = build(depth - 1);
        return rng() % 2 ? SPNetwork::series(std::move(a), std::move(b))
                         : SPNetwork::parallel(std::move(a), std::move(b));
    };
    for (int trial = 0; trial < 20; ++trial) {
        const ConstrainedRoutingGame flat = flatten_sp(build(4));
        CHECK(is_series_parallel(flat, "O", "D"));
    }
}

TEST_CASE("structural triple: wheatstone, embedded three-pair network, embedded wheatstone") {
    const StructureCheck wheatstone =
        check_thm56_conditions(load_crg(fixture_path("braess_crg.json")));
    CHECK_FALSE(wheatstone.series_parallel);
    CHECK(wheatstone.same_vertex_sequence);
    CHECK(wheatstone.exchange_closed);

    const StructureCheck fisk = check_thm56_conditions(
        embed_common_od(load_crg(fixture_path("fisk_crg.json"))).crg);
    CHECK(fisk.series_parallel);
    CHECK_FALSE(fisk.same_vertex_sequence);
    CHECK(fisk.exchange_closed);

    const StructureCheck braess =
        check_thm56_conditions(embed_sp(braess_game()).crg);
    CHECK(braess.series_parallel);
    CHECK(braess.same_vertex_sequence);
    CHECK_FALSE(braess.exchange_closed);
}

TEST_CASE("negative fixtures: load monotonicity genuinely fails") {
    // wheatstone: the zigzag-only edge empties out between demand 1 and 2
    const CongestionGame braess = braess_game();
    const std::size_t zig = braess.resource_index("v1_v2");
    const double x1 = solve_mes(braess, {1.0}).loads[zig];
    const double x2 = solve_mes(braess, {2.0}).loads[zig];
    CHECK(x1 == doctest::Approx(1.0).epsilon(1e-5));
    CHECK(x2 == doctest::Approx(0.0).epsilon(0).scale(1e-5));

    // embedded three-pair network: e2 sheds load as d_ab grows
    const CongestionGame fisk =
        crg_to_game(embed_common_od(load_crg(fixture_path("fisk_crg.json"))).crg);
    const std::size_t e2 = fisk.resource_index("e2");
    const double y1 = solve_beckmann(fisk, {60, 30, 6}).loads[e2];
    const double y2 = solve_beckmann(fisk, {80, 30, 6}).loads[e2];
    CHECK(y1 > y2 + 1.0);
}

TEST_CASE("sp expression JSON round trip") {
    SPNetwork net = SPNetwork::parallel(
        SPNetwork::series(SPNetwork::edge("a", CostFunction::affine(1, 0)),
                          SPNetwork::edge("b", CostFunction::constant(2))),
        SPNetwork::edge("c", CostFunction::monomial(1, 2, 0)));
    const std::string text = sp_to_json(net);
    CHECK(sp_to_json(parse_sp(text)) == text);
    const ConstrainedRoutingGame flat = flatten_sp(parse_sp(text));
    CHECK(flat.edges.size() == 3);
    CHECK(is_series_parallel(flat, "O", "D"));
}

}  // TEST_SUITE
