#pragma once

#include <cstddef>
#include <memory>
#include <string>
#include <vector>

#include "wardrop/game.hpp"
#include "wardrop/solver.hpp"

namespace wardrop {

/// Two-terminal series-parallel network given as an expression tree over
/// cost-carrying edges. Flattening produces a directed multigraph whose
/// source/sink are the tree's terminals.
struct SPNetwork {
    struct Node {
        enum class Kind { Edge, Series, Parallel } kind;
        // Edge payload
        std::string edge_id;
        std::unique_ptr<CostFunction> cost;
        // Series/Parallel payload
        std::unique_ptr<Node> left, right;
    };
    std::unique_ptr<Node> root;

    static SPNetwork edge(std::string id, CostFunction cost);
    static SPNetwork series(SPNetwork a, SPNetwork b);
    static SPNetwork parallel(SPNetwork a, SPNetwork b);
};

struct CrgEdge {
    std::string id;
    std::string tail;
    std::string head;
    CostFunction cost;
};

struct CrgCommodity {
    std::string id;
    std::string origin;
    std::string destination;
    std::vector<std::vector<std::string>> paths;  // ordered edge ids
};

/// Constrained routing game: a directed multigraph plus explicit path lists
/// per commodity. As a congestion game, resources are the edges and
/// strategies the paths.
struct ConstrainedRoutingGame {
    std::vector<std::string> vertices;
    std::vector<CrgEdge> edges;
    std::vector<CrgCommodity> commodities;
};

/// Paths must connect their commodity's endpoints through existing edges.
std::vector<Violation> validate_crg(const ConstrainedRoutingGame& crg);

/// View a CRG as a congestion game (edges become resources, paths strategies).
CongestionGame crg_to_game(const ConstrainedRoutingGame& crg);

/// Flatten an SP expression tree into a CRG skeleton without commodities.
ConstrainedRoutingGame flatten_sp(const SPNetwork& net, std::string source = "O",
                                  std::string sink = "D");

/// Strategy-level correspondence between a congestion game and a CRG:
/// commodity h of the game maps to commodity[h] of the CRG and its s-th
/// strategy to path strategy_map[h][s].
struct EquivalenceWitness {
    std::vector<std::size_t> commodity_map;
    std::vector<std::vector<std::size_t>> strategy_map;
};

/// Series-style composition: commodities are pairs i⊗j with strategies
/// s1 ∪ s2. Resource ids must be disjoint. Product commodities are laid out
/// i-major, matching split_demand.
CongestionGame product(const CongestionGame& g1, const CongestionGame& g2);

/// Parallel-style composition: concatenates resources and commodities.
/// Resource and commodity ids must be disjoint.
CongestionGame union_game(const CongestionGame& g1, const CongestionGame& g2);

/// Marginal demands of a product game demand vector (i-major layout):
/// mu1_i = sum_j mu[i⊗j], mu2_j = sum_i mu[i⊗j].
std::pair<DemandVector, DemandVector> split_demand(std::size_t n1, std::size_t n2,
                                                   const DemandVector& demand);

struct SpEmbedding {
    ConstrainedRoutingGame crg;
    EquivalenceWitness witness;
};

/// Equivalent common-OD routing game on a chain of two-edge parallel blocks:
/// block r carries the resource cost on top and a zero-cost bypass below; a
/// strategy maps to the path taking top edges exactly on its resources.
SpEmbedding embed_sp(const CongestionGame& game);

struct CommonOdEmbedding {
    ConstrainedRoutingGame crg;
    EquivalenceWitness witness;
    std::string origin;
    std::string destination;
};

/// Reroutes every commodity through one shared OD pair by prepending and
/// appending zero-cost bypass edges. The shared pair is chosen among existing
/// vertices (most frequent origin/destination, earliest commodity on ties),
/// so no bypass is added for commodities already anchored there.
CommonOdEmbedding embed_common_od(const ConstrainedRoutingGame& crg);

/// True iff the multigraph reduces to a single source->sink edge under
/// series and parallel reductions.
bool is_series_parallel(const ConstrainedRoutingGame& crg, const std::string& source,
                        const std::string& sink);

struct StructureCheck {
    bool series_parallel = false;
    bool same_vertex_sequence = false;
    bool exchange_closed = false;
    std::string detail;
    bool all() const { return series_parallel && same_vertex_sequence && exchange_closed; }
};

/// The three structural conditions a common-OD CRG must satisfy to be a
/// product-union game: (i) series-parallel graph; (ii) per commodity, all
/// paths visit the same vertex sequence (checked only when (i) holds, since
/// the segment structure needs the SP scaffolding); (iii) path sets are
/// closed under switching between two paths at any shared vertex, which for
/// segment-aligned paths is exactly closure under per-segment edge exchange.
StructureCheck check_thm56_conditions(const ConstrainedRoutingGame& crg);

struct EquivalenceCheck {
    bool pass = true;
    double max_cost_mismatch = 0.0;
    double max_lambda_mismatch = 0.0;
    std::string detail;  // first violating pair, if any
};

/// For each demand fixture: random feasible flows pushed through the witness
/// must preserve strategy costs (1e-9), and the equilibrium cost vectors of
/// both sides must agree (1e-5).
EquivalenceCheck check_equivalence(const CongestionGame& game,
                                   const ConstrainedRoutingGame& crg,
                                   const EquivalenceWitness& witness,
                                   const std::vector<DemandVector>& fixtures,
                                   unsigned seed = 20240601);

}  // namespace wardrop
