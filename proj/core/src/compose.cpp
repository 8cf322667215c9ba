#include "wardrop/compose.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <unordered_map>
#include <unordered_set>

#include "wardrop/errors.hpp"

namespace wardrop {

namespace {
constexpr std::size_t kMaxProductStrategies = 100000;
}

SPNetwork SPNetwork::edge(std::string id, CostFunction cost) {
    SPNetwork net;
    net.root = std::make_unique<Node>();
    net.root->kind = Node::Kind::Edge;
    net.root->edge_id = std::move(id);
    net.root->cost = std::make_unique<CostFunction>(std::move(cost));
    return net;
}

SPNetwork SPNetwork::series(SPNetwork a, SPNetwork b) {
    SPNetwork net;
    net.root = std::make_unique<Node>();
    net.root->kind = Node::Kind::Series;
    net.root->left = std::move(a.root);
    net.root->right = std::move(b.root);
    return net;
}

SPNetwork SPNetwork::parallel(SPNetwork a, SPNetwork b) {
    SPNetwork net;
    net.root = std::make_unique<Node>();
    net.root->kind = Node::Kind::Parallel;
    net.root->left = std::move(a.root);
    net.root->right = std::move(b.root);
    return net;
}

namespace {

void flatten_node(const SPNetwork::Node& node, const std::string& src,
                  const std::string& snk, std::size_t& next_vertex,
                  ConstrainedRoutingGame& out) {
    switch (node.kind) {
        case SPNetwork::Node::Kind::Edge:
            out.edges.push_back({node.edge_id, src, snk, *node.cost});
            break;
        case SPNetwork::Node::Kind::Series: {
            const std::string mid = "v" + std::to_string(next_vertex++);
            out.vertices.push_back(mid);
            flatten_node(*node.left, src, mid, next_vertex, out);
            flatten_node(*node.right, mid, snk, next_vertex, out);
            break;
        }
        case SPNetwork::Node::Kind::Parallel:
            flatten_node(*node.left, src, snk, next_vertex, out);
            flatten_node(*node.right, src, snk, next_vertex, out);
            break;
    }
}

}  // namespace

ConstrainedRoutingGame flatten_sp(const SPNetwork& net, std::string source,
                                  std::string sink) {
    if (!net.root) throw StructuralError("empty SP expression");
    ConstrainedRoutingGame crg;
    crg.vertices.push_back(source);
    crg.vertices.push_back(sink);
    std::size_t next_vertex = 1;
    flatten_node(*net.root, source, sink, next_vertex, crg);
    return crg;
}

std::vector<Violation> validate_crg(const ConstrainedRoutingGame& crg) {
    std::vector<Violation> out;
    std::unordered_set<std::string> vertices(crg.vertices.begin(), crg.vertices.end());
    if (vertices.size() != crg.vertices.size())
        out.push_back({"<vertices>", "duplicate vertex id"});
    std::unordered_map<std::string, const CrgEdge*> edges;
    for (const auto& e : crg.edges) {
        if (!edges.emplace(e.id, &e).second)
            out.push_back({e.id, "duplicate edge id"});
        if (!vertices.count(e.tail)) out.push_back({e.id, "unknown tail vertex"});
        if (!vertices.count(e.head)) out.push_back({e.id, "unknown head vertex"});
        for (const auto& msg : e.cost.validate()) out.push_back({e.id, msg});
    }
    std::unordered_set<std::string> commodity_ids;
    for (const auto& c : crg.commodities) {
        if (!commodity_ids.insert(c.id).second)
            out.push_back({c.id, "duplicate commodity id"});
        if (c.paths.empty()) out.push_back({c.id, "commodity has no paths"});
        for (std::size_t p = 0; p < c.paths.size(); ++p) {
            const std::string name = c.id + "/path[" + std::to_string(p) + "]";
            const auto& path = c.paths[p];
            if (path.empty()) {
                out.push_back({name, "empty path"});
                continue;
            }
            std::string at = c.origin;
            bool ok = true;
            for (const auto& eid : path) {
                auto it = edges.find(eid);
                if (it == edges.end()) {
                    out.push_back({name, "unknown edge '" + eid + "'"});
                    ok = false;
                    break;
                }
                if (it->second->tail != at) {
                    out.push_back({name, "edge '" + eid + "' does not continue the path"});
                    ok = false;
                    break;
                }
                at = it->second->head;
            }
            if (ok && at != c.destination)
                out.push_back({name, "path does not end at the destination"});
        }
    }
    return out;
}

CongestionGame crg_to_game(const ConstrainedRoutingGame& crg) {
    auto violations = validate_crg(crg);
    if (!violations.empty()) {
        std::string msg = "invalid routing game:";
        for (const auto& v : violations) msg += "\n  " + v.entity + ": " + v.message;
        throw StructuralError(msg);
    }
    std::vector<Resource> resources;
    resources.reserve(crg.edges.size());
    for (const auto& e : crg.edges) resources.push_back({e.id, e.cost});
    std::vector<Commodity> commodities;
    for (const auto& c : crg.commodities) {
        Commodity g{c.id, {}};
        for (const auto& path : c.paths) g.strategies.push_back({path});
        commodities.push_back(std::move(g));
    }
    return CongestionGame(std::move(resources), std::move(commodities));
}

CongestionGame product(const CongestionGame& g1, const CongestionGame& g2) {
    std::unordered_set<std::string> ids;
    for (const auto& r : g1.resources()) ids.insert(r.id);
    for (const auto& r : g2.resources())
        if (ids.count(r.id))
            throw StructuralError("product requires disjoint resource ids; '" + r.id +
                                  "' appears in both games");
    std::vector<Resource> resources = g1.resources();
    resources.insert(resources.end(), g2.resources().begin(), g2.resources().end());

    std::vector<Commodity> commodities;
    for (const auto& ci : g1.commodities()) {
        for (const auto& cj : g2.commodities()) {
            const std::size_t count = ci.strategies.size() * cj.strategies.size();
            if (count > kMaxProductStrategies)
                throw StructuralError("product commodity '" + ci.id + "⊗" + cj.id +
                                      "' would have " + std::to_string(count) +
                                      " strategies (cap " +
                                      std::to_string(kMaxProductStrategies) + ")");
            Commodity c{ci.id + "⊗" + cj.id, {}};
            c.strategies.reserve(count);
            for (const auto& s1 : ci.strategies) {
                for (const auto& s2 : cj.strategies) {
                    Strategy s;
                    s.resources = s1.resources;
                    s.resources.insert(s.resources.end(), s2.resources.begin(),
                                       s2.resources.end());
                    c.strategies.push_back(std::move(s));
                }
            }
            commodities.push_back(std::move(c));
        }
    }
    return CongestionGame(std::move(resources), std::move(commodities));
}

CongestionGame union_game(const CongestionGame& g1, const CongestionGame& g2) {
    std::unordered_set<std::string> ids;
    for (const auto& r : g1.resources()) ids.insert(r.id);
    for (const auto& r : g2.resources())
        if (ids.count(r.id))
            throw StructuralError("union requires disjoint resource ids; '" + r.id +
                                  "' appears in both games");
    ids.clear();
    for (const auto& c : g1.commodities()) ids.insert(c.id);
    for (const auto& c : g2.commodities())
        if (ids.count(c.id))
            throw StructuralError("union requires disjoint commodity ids; '" + c.id +
                                  "' appears in both games");
    std::vector<Resource> resources = g1.resources();
    resources.insert(resources.end(), g2.resources().begin(), g2.resources().end());
    std::vector<Commodity> commodities = g1.commodities();
    commodities.insert(commodities.end(), g2.commodities().begin(),
                       g2.commodities().end());
    return CongestionGame(std::move(resources), std::move(commodities));
}

std::pair<DemandVector, DemandVector> split_demand(std::size_t n1, std::size_t n2,
                                                   const DemandVector& demand) {
    if (demand.size() != n1 * n2)
        throw StructuralError("product demand must have n1*n2 entries");
    DemandVector mu1(n1, 0.0), mu2(n2, 0.0);
    for (std::size_t i = 0; i < n1; ++i) {
        for (std::size_t j = 0; j < n2; ++j) {
            const double d = demand[i * n2 + j];
            mu1[i] += d;
            mu2[j] += d;
        }
    }
    return {std::move(mu1), std::move(mu2)};
}

SpEmbedding embed_sp(const CongestionGame& game) {
    require_valid(game);
    SpEmbedding out;
    auto& crg = out.crg;
    const std::size_t m = game.num_resources();
    for (std::size_t i = 0; i <= m; ++i) crg.vertices.push_back("v" + std::to_string(i));
    for (std::size_t i = 0; i < m; ++i) {
        const auto& r = game.resources()[i];
        const std::string tail = "v" + std::to_string(i);
        const std::string head = "v" + std::to_string(i + 1);
        crg.edges.push_back({r.id, tail, head, r.cost});
        crg.edges.push_back({"skip:" + r.id, tail, head, CostFunction::constant(0.0)});
    }
    const std::string origin = "v0";
    const std::string destination = "v" + std::to_string(m);
    for (std::size_t h = 0; h < game.num_commodities(); ++h) {
        const auto& c = game.commodities()[h];
        CrgCommodity cc{c.id, origin, destination, {}};
        for (std::size_t s = 0; s < game.num_strategies(h); ++s) {
            const auto& members = game.strategy(h, s);
            std::vector<std::string> path;
            path.reserve(m);
            for (std::size_t i = 0; i < m; ++i) {
                const bool used =
                    std::binary_search(members.begin(), members.end(), i);
                path.push_back(used ? game.resources()[i].id
                                    : "skip:" + game.resources()[i].id);
            }
            cc.paths.push_back(std::move(path));
        }
        crg.commodities.push_back(std::move(cc));
        out.witness.commodity_map.push_back(h);
        std::vector<std::size_t> smap(game.num_strategies(h));
        for (std::size_t s = 0; s < smap.size(); ++s) smap[s] = s;
        out.witness.strategy_map.push_back(std::move(smap));
    }
    return out;
}

CommonOdEmbedding embed_common_od(const ConstrainedRoutingGame& crg) {
    auto violations = validate_crg(crg);
    if (!violations.empty())
        throw StructuralError("embed_common_od: input CRG is invalid: " +
                              violations.front().entity + ": " +
                              violations.front().message);
    if (crg.commodities.empty()) throw StructuralError("CRG has no commodities");

    auto mode = [&](auto project) {
        std::map<std::string, std::size_t> counts;
        for (const auto& c : crg.commodities) ++counts[project(c)];
        std::string best = project(crg.commodities.front());
        for (const auto& c : crg.commodities) {
            const auto& v = project(c);
            if (counts[v] > counts[best]) best = v;
        }
        return best;
    };
    const std::string origin = mode([](const CrgCommodity& c) { return c.origin; });
    const std::string destination =
        mode([](const CrgCommodity& c) { return c.destination; });

    CommonOdEmbedding out;
    out.crg = crg;
    out.origin = origin;
    out.destination = destination;

    std::unordered_set<std::string> edge_ids;
    for (const auto& e : crg.edges) edge_ids.insert(e.id);
    std::map<std::pair<std::string, std::string>, std::string> added;
    auto connector = [&](const std::string& tail,
                         const std::string& head) -> std::string {
        auto it = added.find({tail, head});
        if (it != added.end()) return it->second;
        std::string id = "bypass_" + tail + "_" + head;
        while (edge_ids.count(id)) id += "'";
        edge_ids.insert(id);
        added.emplace(std::make_pair(tail, head), id);
        out.crg.edges.push_back({id, tail, head, CostFunction::constant(0.0)});
        return id;
    };

    for (std::size_t h = 0; h < out.crg.commodities.size(); ++h) {
        auto& c = out.crg.commodities[h];
        if (c.origin != origin) {
            const std::string eid = connector(origin, c.origin);
            for (auto& path : c.paths) path.insert(path.begin(), eid);
            c.origin = origin;
        }
        if (c.destination != destination) {
            const std::string eid = connector(c.destination, destination);
            for (auto& path : c.paths) path.push_back(eid);
            c.destination = destination;
        }
        out.witness.commodity_map.push_back(h);
        std::vector<std::size_t> smap(c.paths.size());
        for (std::size_t s = 0; s < smap.size(); ++s) smap[s] = s;
        out.witness.strategy_map.push_back(std::move(smap));
    }
    return out;
}

bool is_series_parallel(const ConstrainedRoutingGame& crg, const std::string& source,
                        const std::string& sink) {
    struct E {
        std::string tail, head;
    };
    std::vector<E> edges;
    for (const auto& e : crg.edges) edges.push_back({e.tail, e.head});

    bool changed = true;
    while (changed) {
        changed = false;
        // parallel reduction: drop one of two edges sharing endpoints
        for (std::size_t i = 0; i < edges.size() && !changed; ++i) {
            for (std::size_t j = i + 1; j < edges.size(); ++j) {
                if (edges[i].tail == edges[j].tail && edges[i].head == edges[j].head) {
                    edges.erase(edges.begin() + static_cast<std::ptrdiff_t>(j));
                    changed = true;
                    break;
                }
            }
        }
        if (changed) continue;
        // series reduction: splice out an internal vertex of in/out degree 1
        std::map<std::string, std::pair<std::vector<std::size_t>, std::vector<std::size_t>>>
            incidence;  // vertex -> (in edges, out edges)
        for (std::size_t i = 0; i < edges.size(); ++i) {
            incidence[edges[i].head].first.push_back(i);
            incidence[edges[i].tail].second.push_back(i);
        }
        for (const auto& [v, inout] : incidence) {
            if (v == source || v == sink) continue;
            if (inout.first.size() != 1 || inout.second.size() != 1) continue;
            const std::size_t ein = inout.first.front();
            const std::size_t eout = inout.second.front();
            if (ein == eout) continue;  // self loop
            edges[ein].head = edges[eout].head;
            edges.erase(edges.begin() + static_cast<std::ptrdiff_t>(eout));
            changed = true;
            break;
        }
    }
    return edges.size() == 1 && edges.front().tail == source &&
           edges.front().head == sink;
}

namespace {

std::vector<std::string> path_vertices(const ConstrainedRoutingGame& crg,
                                       const std::string& origin,
                                       const std::vector<std::string>& path) {
    std::unordered_map<std::string, const CrgEdge*> edges;
    for (const auto& e : crg.edges) edges.emplace(e.id, &e);
    std::vector<std::string> seq{origin};
    for (const auto& eid : path) seq.push_back(edges.at(eid)->head);
    return seq;
}

}  // namespace

StructureCheck check_thm56_conditions(const ConstrainedRoutingGame& crg) {
    auto violations = validate_crg(crg);
    if (!violations.empty())
        throw StructuralError("check_thm56_conditions: invalid CRG: " +
                              violations.front().entity + ": " +
                              violations.front().message);
    if (crg.commodities.empty())
        throw StructuralError("check_thm56_conditions: CRG has no commodities");
    const std::string origin = crg.commodities.front().origin;
    const std::string destination = crg.commodities.front().destination;
    for (const auto& c : crg.commodities)
        if (c.origin != origin || c.destination != destination)
            throw StructuralError("check_thm56_conditions requires a common-OD CRG");

    StructureCheck out;
    out.series_parallel = is_series_parallel(crg, origin, destination);

    // (ii) identical vertex sequences per commodity; without the SP segment
    // structure the condition is vacuous.
    out.same_vertex_sequence = true;
    if (out.series_parallel) {
        for (const auto& c : crg.commodities) {
            const auto ref = path_vertices(crg, c.origin, c.paths.front());
            for (std::size_t p = 1; p < c.paths.size(); ++p) {
                if (path_vertices(crg, c.origin, c.paths[p]) != ref) {
                    out.same_vertex_sequence = false;
                    if (out.detail.empty())
                        out.detail = "commodity '" + c.id +
                                     "' has paths with different vertex sequences";
                    break;
                }
            }
            if (!out.same_vertex_sequence) break;
        }
    }

    // (iii) closure under switching at shared vertices.
    out.exchange_closed = true;
    for (const auto& c : crg.commodities) {
        std::set<std::vector<std::string>> paths(c.paths.begin(), c.paths.end());
        for (const auto& p1 : c.paths) {
            const auto v1 = path_vertices(crg, c.origin, p1);
            for (const auto& p2 : c.paths) {
                if (&p1 == &p2) continue;
                const auto v2 = path_vertices(crg, c.origin, p2);
                for (std::size_t i = 1; i + 1 < v1.size(); ++i) {
                    const auto it = std::find(v2.begin(), v2.end(), v1[i]);
                    if (it == v2.end()) continue;
                    const std::size_t j = static_cast<std::size_t>(it - v2.begin());
                    std::vector<std::string> mixed(p1.begin(),
                                                   p1.begin() + static_cast<std::ptrdiff_t>(i));
                    mixed.insert(mixed.end(), p2.begin() + static_cast<std::ptrdiff_t>(j),
                                 p2.end());
                    if (!paths.count(mixed)) {
                        out.exchange_closed = false;
                        if (out.detail.empty())
                            out.detail = "commodity '" + c.id +
                                         "' is not closed under switching at vertex '" +
                                         v1[i] + "'";
                        break;
                    }
                }
                if (!out.exchange_closed) break;
            }
            if (!out.exchange_closed) break;
        }
        if (!out.exchange_closed) break;
    }
    return out;
}

EquivalenceCheck check_equivalence(const CongestionGame& game,
                                   const ConstrainedRoutingGame& crg,
                                   const EquivalenceWitness& witness,
                                   const std::vector<DemandVector>& fixtures,
                                   unsigned seed) {
    EquivalenceCheck out;
    const CongestionGame image = crg_to_game(crg);
    if (witness.commodity_map.size() != game.num_commodities() ||
        witness.strategy_map.size() != game.num_commodities())
        throw StructuralError("witness does not cover every commodity");
    for (std::size_t h = 0; h < game.num_commodities(); ++h) {
        if (witness.commodity_map[h] >= image.num_commodities())
            throw StructuralError("witness maps to an unknown commodity");
        if (witness.strategy_map[h].size() != game.num_strategies(h))
            throw StructuralError("witness does not cover every strategy");
    }

    unsigned run = 0;
    for (const auto& mu : fixtures) {
        // cost preservation under a random feasible flow
        const FlowProfile f = random_feasible_flow(game, mu, seed + 7919 * run++);
        DemandVector mu2(image.num_commodities(), 0.0);
        FlowProfile f2(image.num_commodities());
        for (std::size_t h = 0; h < image.num_commodities(); ++h)
            f2[h].assign(image.num_strategies(h), 0.0);
        for (std::size_t h = 0; h < game.num_commodities(); ++h) {
            const std::size_t h2 = witness.commodity_map[h];
            mu2[h2] += mu[h];
            for (std::size_t s = 0; s < game.num_strategies(h); ++s)
                f2[h2][witness.strategy_map[h][s]] += f[h][s];
        }
        const LoadProfile x1 = load_from_flow(game, f);
        const LoadProfile x2 = load_from_flow(image, f2);
        for (std::size_t h = 0; h < game.num_commodities(); ++h) {
            for (std::size_t s = 0; s < game.num_strategies(h); ++s) {
                const double c1 = strategy_cost(game, x1, h, s);
                const double c2 = strategy_cost(image, x2, witness.commodity_map[h],
                                                witness.strategy_map[h][s]);
                const double diff = std::abs(c1 - c2);
                out.max_cost_mismatch = std::max(out.max_cost_mismatch, diff);
                if (diff > 1e-9 && out.pass) {
                    out.pass = false;
                    out.detail = "strategy cost mismatch for commodity '" +
                                 game.commodities()[h].id + "' strategy " +
                                 std::to_string(s);
                }
            }
        }

        // equilibrium cost agreement
        const EquilibriumReport r1 = solve_beckmann(game, mu);
        const EquilibriumReport r2 = solve_beckmann(image, mu2);
        for (std::size_t h = 0; h < game.num_commodities(); ++h) {
            const double diff = std::abs(r1.commodity_costs[h] -
                                         r2.commodity_costs[witness.commodity_map[h]]);
            out.max_lambda_mismatch = std::max(out.max_lambda_mismatch, diff);
            if (diff > 1e-5 && out.pass) {
                out.pass = false;
                out.detail = "equilibrium cost mismatch for commodity '" +
                             game.commodities()[h].id + "'";
            }
        }
    }
    if (!out.pass && out.detail.empty()) out.detail = "equivalence check failed";
    return out;
}

}  // namespace wardrop
