#include "wardrop/io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "wardrop/errors.hpp"

namespace wardrop {

using nlohmann::json;

std::string format_double(double value) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", value);
    return buf;
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParseError("cannot open '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ParseError("cannot write '" + path + "'");
    out << content;
}

namespace {

json parse_json(const std::string& text) {
    try {
        return json::parse(text);
    } catch (const json::parse_error& e) {
        throw ParseError(std::string("JSON parse error: ") + e.what());
    }
}

double number_field(const json& obj, const char* key, const std::string& where) {
    if (!obj.contains(key) || !obj[key].is_number())
        throw ParseError(where + ": missing numeric field '" + key + "'");
    return obj[key].get<double>();
}

std::string string_field(const json& obj, const char* key, const std::string& where) {
    if (!obj.contains(key) || !obj[key].is_string())
        throw ParseError(where + ": missing string field '" + key + "'");
    return obj[key].get<std::string>();
}

CostFunction parse_cost(const json& obj, const std::string& where) {
    if (!obj.is_object()) throw ParseError(where + ": cost must be an object");
    const std::string kind = string_field(obj, "kind", where);
    if (kind == "affine")
        return CostFunction::affine(number_field(obj, "a", where),
                                    number_field(obj, "b", where));
    if (kind == "monomial")
        return CostFunction::monomial(number_field(obj, "coeff", where),
                                      number_field(obj, "exponent", where),
                                      number_field(obj, "constant", where));
    if (kind == "bpr")
        return CostFunction::bpr(number_field(obj, "t0", where),
                                 number_field(obj, "alpha", where),
                                 number_field(obj, "beta", where),
                                 number_field(obj, "capacity", where));
    if (kind == "piecewise-linear") {
        if (!obj.contains("knots") || !obj["knots"].is_array())
            throw ParseError(where + ": piecewise-linear cost needs a 'knots' array");
        std::vector<std::pair<double, double>> knots;
        for (const auto& k : obj["knots"]) {
            if (!k.is_array() || k.size() != 2 || !k[0].is_number() || !k[1].is_number())
                throw ParseError(where + ": each knot must be a [x, y] pair");
            knots.emplace_back(k[0].get<double>(), k[1].get<double>());
        }
        return CostFunction::piecewise_linear(std::move(knots));
    }
    if (kind == "constant")
        return CostFunction::constant(number_field(obj, "b", where));
    throw ParseError(where + ": unknown cost kind '" + kind + "'");
}

void write_cost(std::ostringstream& out, const CostFunction& cost) {
    const auto& p = cost.params();
    switch (cost.kind()) {
        case CostFunction::Kind::Affine:
            out << R"({"kind":"affine","a":)" << format_double(p[0]) << R"(,"b":)"
                << format_double(p[1]) << "}";
            break;
        case CostFunction::Kind::Monomial:
            out << R"({"kind":"monomial","coeff":)" << format_double(p[0])
                << R"(,"exponent":)" << format_double(p[1]) << R"(,"constant":)"
                << format_double(p[2]) << "}";
            break;
        case CostFunction::Kind::Bpr:
            out << R"({"kind":"bpr","t0":)" << format_double(p[0]) << R"(,"alpha":)"
                << format_double(p[1]) << R"(,"beta":)" << format_double(p[2])
                << R"(,"capacity":)" << format_double(p[3]) << "}";
            break;
        case CostFunction::Kind::PiecewiseLinear: {
            out << R"({"kind":"piecewise-linear","knots":[)";
            for (std::size_t i = 0; i < cost.knots().size(); ++i) {
                if (i) out << ",";
                out << "[" << format_double(cost.knots()[i].first) << ","
                    << format_double(cost.knots()[i].second) << "]";
            }
            out << "]}";
            break;
        }
        case CostFunction::Kind::Constant:
            out << R"({"kind":"constant","b":)" << format_double(p[0]) << "}";
            break;
    }
}

std::string escape(const std::string& s) {
    std::string out;
    for (char c : s) {
        if (c == '"' || c == '\\') out.push_back('\\');
        out.push_back(c);
    }
    return out;
}

}  // namespace

CongestionGame parse_game(const std::string& json_text) {
    const json doc = parse_json(json_text);
    if (!doc.is_object() || !doc.contains("resources") || !doc.contains("commodities"))
        throw ParseError("game document needs 'resources' and 'commodities'");
    std::vector<Resource> resources;
    for (const auto& r : doc["resources"]) {
        const std::string id = string_field(r, "id", "resource");
        if (!r.contains("cost")) throw ParseError("resource '" + id + "' has no cost");
        resources.push_back({id, parse_cost(r["cost"], "resource '" + id + "'")});
    }
    std::vector<Commodity> commodities;
    for (const auto& c : doc["commodities"]) {
        Commodity com{string_field(c, "id", "commodity"), {}};
        if (!c.contains("strategies") || !c["strategies"].is_array())
            throw ParseError("commodity '" + com.id + "' needs a 'strategies' array");
        for (const auto& s : c["strategies"]) {
            if (!s.is_array())
                throw ParseError("commodity '" + com.id +
                                 "': each strategy must be an array of resource ids");
            Strategy strat;
            for (const auto& rid : s) {
                if (!rid.is_string())
                    throw ParseError("commodity '" + com.id +
                                     "': strategy entries must be resource id strings");
                strat.resources.push_back(rid.get<std::string>());
            }
            com.strategies.push_back(std::move(strat));
        }
        commodities.push_back(std::move(com));
    }
    return CongestionGame(std::move(resources), std::move(commodities));
}

CongestionGame load_game(const std::string& path) { return parse_game(read_file(path)); }

std::string game_to_json(const CongestionGame& game) {
    std::ostringstream out;
    out << "{\"resources\":[";
    for (std::size_t r = 0; r < game.num_resources(); ++r) {
        if (r) out << ",";
        out << "{\"id\":\"" << escape(game.resources()[r].id) << "\",\"cost\":";
        write_cost(out, game.resources()[r].cost);
        out << "}";
    }
    out << "],\"commodities\":[";
    for (std::size_t h = 0; h < game.num_commodities(); ++h) {
        if (h) out << ",";
        const auto& c = game.commodities()[h];
        out << "{\"id\":\"" << escape(c.id) << "\",\"strategies\":[";
        for (std::size_t s = 0; s < c.strategies.size(); ++s) {
            if (s) out << ",";
            out << "[";
            for (std::size_t i = 0; i < c.strategies[s].resources.size(); ++i) {
                if (i) out << ",";
                out << "\"" << escape(c.strategies[s].resources[i]) << "\"";
            }
            out << "]";
        }
        out << "]}";
    }
    out << "]}";
    return out.str();
}

ConstrainedRoutingGame parse_crg(const std::string& json_text) {
    const json doc = parse_json(json_text);
    if (!doc.is_object() || !doc.contains("vertices") || !doc.contains("edges") ||
        !doc.contains("commodities"))
        throw ParseError("CRG document needs 'vertices', 'edges' and 'commodities'");
    ConstrainedRoutingGame crg;
    for (const auto& v : doc["vertices"]) {
        if (!v.is_string()) throw ParseError("vertices must be strings");
        crg.vertices.push_back(v.get<std::string>());
    }
    for (const auto& e : doc["edges"]) {
        const std::string id = string_field(e, "id", "edge");
        if (!e.contains("cost")) throw ParseError("edge '" + id + "' has no cost");
        crg.edges.push_back({id, string_field(e, "tail", "edge '" + id + "'"),
                             string_field(e, "head", "edge '" + id + "'"),
                             parse_cost(e["cost"], "edge '" + id + "'")});
    }
    for (const auto& c : doc["commodities"]) {
        CrgCommodity com;
        com.id = string_field(c, "id", "commodity");
        com.origin = string_field(c, "origin", "commodity '" + com.id + "'");
        com.destination = string_field(c, "destination", "commodity '" + com.id + "'");
        if (!c.contains("paths") || !c["paths"].is_array())
            throw ParseError("commodity '" + com.id + "' needs a 'paths' array");
        for (const auto& p : c["paths"]) {
            if (!p.is_array())
                throw ParseError("commodity '" + com.id + "': each path is an edge array");
            std::vector<std::string> path;
            for (const auto& eid : p) {
                if (!eid.is_string())
                    throw ParseError("commodity '" + com.id + "': path entries are edge ids");
                path.push_back(eid.get<std::string>());
            }
            com.paths.push_back(std::move(path));
        }
        crg.commodities.push_back(std::move(com));
    }
    return crg;
}

ConstrainedRoutingGame load_crg(const std::string& path) { return parse_crg(read_file(path)); }

std::string crg_to_json(const ConstrainedRoutingGame& crg) {
    std::ostringstream out;
    out << "{\"vertices\":[";
    for (std::size_t i = 0; i < crg.vertices.size(); ++i) {
        if (i) out << ",";
        out << "\"" << escape(crg.vertices[i]) << "\"";
    }
    out << "],\"edges\":[";
    for (std::size_t i = 0; i < crg.edges.size(); ++i) {
        if (i) out << ",";
        const auto& e = crg.edges[i];
        out << "{\"id\":\"" << escape(e.id) << "\",\"tail\":\"" << escape(e.tail)
            << "\",\"head\":\"" << escape(e.head) << "\",\"cost\":";
        write_cost(out, e.cost);
        out << "}";
    }
    out << "],\"commodities\":[";
    for (std::size_t i = 0; i < crg.commodities.size(); ++i) {
        if (i) out << ",";
        const auto& c = crg.commodities[i];
        out << "{\"id\":\"" << escape(c.id) << "\",\"origin\":\"" << escape(c.origin)
            << "\",\"destination\":\"" << escape(c.destination) << "\",\"paths\":[";
        for (std::size_t p = 0; p < c.paths.size(); ++p) {
            if (p) out << ",";
            out << "[";
            for (std::size_t j = 0; j < c.paths[p].size(); ++j) {
                if (j) out << ",";
                out << "\"" << escape(c.paths[p][j]) << "\"";
            }
            out << "]";
        }
        out << "]}";
    }
    out << "]}";
    return out.str();
}

namespace {

SPNetwork parse_sp_node(const json& node) {
    if (!node.is_object()) throw ParseError("SP node must be an object");
    if (node.contains("edge")) {
        const auto& e = node["edge"];
        const std::string id = string_field(e, "id", "sp edge");
        if (!e.contains("cost")) throw ParseError("sp edge '" + id + "' has no cost");
        return SPNetwork::edge(id, parse_cost(e["cost"], "sp edge '" + id + "'"));
    }
    const bool series = node.contains("series");
    const bool parallel = node.contains("parallel");
    if (!series && !parallel)
        throw ParseError("SP node must be one of 'edge', 'series', 'parallel'");
    const auto& kids = node[series ? "series" : "parallel"];
    if (!kids.is_array() || kids.size() < 2)
        throw ParseError("series/parallel needs at least two children");
    SPNetwork acc = parse_sp_node(kids[0]);
    for (std::size_t i = 1; i < kids.size(); ++i) {
        SPNetwork next = parse_sp_node(kids[i]);
        acc = series ? SPNetwork::series(std::move(acc), std::move(next))
                     : SPNetwork::parallel(std::move(acc), std::move(next));
    }
    return acc;
}

void write_sp_node(std::ostringstream& out, const SPNetwork::Node& node) {
    switch (node.kind) {
        case SPNetwork::Node::Kind::Edge:
            out << "{\"edge\":{\"id\":\"" << escape(node.edge_id) << "\",\"cost\":";
            write_cost(out, *node.cost);
            out << "}}";
            break;
        case SPNetwork::Node::Kind::Series:
        case SPNetwork::Node::Kind::Parallel:
            out << (node.kind == SPNetwork::Node::Kind::Series ? "{\"series\":["
                                                               : "{\"parallel\":[");
            write_sp_node(out, *node.left);
            out << ",";
            write_sp_node(out, *node.right);
            out << "]}";
            break;
    }
}

}  // namespace

SPNetwork parse_sp(const std::string& json_text) {
    return parse_sp_node(parse_json(json_text));
}

std::string sp_to_json(const SPNetwork& net) {
    if (!net.root) throw StructuralError("empty SP expression");
    std::ostringstream out;
    write_sp_node(out, *net.root);
    return out.str();
}

std::string report_to_json(const CongestionGame& game, const EquilibriumReport& report) {
    std::ostringstream out;
    out << "{\"loads\":{";
    for (std::size_t r = 0; r < game.num_resources(); ++r) {
        if (r) out << ",";
        out << "\"" << escape(game.resources()[r].id)
            << "\":" << format_double(report.loads[r]);
    }
    out << "},\"flows\":{";
    for (std::size_t h = 0; h < game.num_commodities(); ++h) {
        if (h) out << ",";
        out << "\"" << escape(game.commodities()[h].id) << "\":[";
        for (std::size_t s = 0; s < report.flow[h].size(); ++s) {
            if (s) out << ",";
            out << format_double(report.flow[h][s]);
        }
        out << "]";
    }
    out << "},\"tau\":{";
    for (std::size_t r = 0; r < game.num_resources(); ++r) {
        if (r) out << ",";
        out << "\"" << escape(game.resources()[r].id)
            << "\":" << format_double(report.resource_costs[r]);
    }
    out << "},\"lambda\":{";
    for (std::size_t h = 0; h < game.num_commodities(); ++h) {
        if (h) out << ",";
        out << "\"" << escape(game.commodities()[h].id)
            << "\":" << format_double(report.commodity_costs[h]);
    }
    out << "},\"active_regime\":{";
    for (std::size_t h = 0; h < game.num_commodities(); ++h) {
        if (h) out << ",";
        out << "\"" << escape(game.commodities()[h].id) << "\":[";
        for (std::size_t i = 0; i < report.active_regime[h].size(); ++i) {
            if (i) out << ",";
            out << "\"" << escape(game.resources()[report.active_regime[h][i]].id) << "\"";
        }
        out << "]";
    }
    out << "},\"beckmann_value\":" << format_double(report.beckmann_value);
    out << ",\"gap\":" << format_double(report.gap);
    out << ",\"iterations\":" << report.iterations << "}";
    return out.str();
}

std::string verdict_to_json(const CongestionGame& game,
                            const MonotonicityVerdict& verdict) {
    std::ostringstream out;
    out << "{\"pass\":" << (verdict.pass ? "true" : "false") << ",\"violations\":[";
    for (std::size_t i = 0; i < verdict.violations.size(); ++i) {
        if (i) out << ",";
        const auto& v = verdict.violations[i];
        auto write_mu = [&](const DemandVector& mu) {
            out << "[";
            for (std::size_t j = 0; j < mu.size(); ++j) {
                if (j) out << ",";
                out << format_double(mu[j]);
            }
            out << "]";
        };
        out << "{\"mu_from\":";
        write_mu(v.mu_from);
        out << ",\"mu_to\":";
        write_mu(v.mu_to);
        out << ",\"resource\":\"" << escape(game.resources()[v.resource].id) << "\"";
        out << ",\"x_from\":" << format_double(v.x_from);
        out << ",\"x_to\":" << format_double(v.x_to) << "}";
    }
    out << "]}";
    return out.str();
}

std::string region_sweep_to_csv(const CongestionGame& game,
                                const RegionSweepResult& sweep) {
    std::ostringstream out;
    for (std::size_t h = 0; h < game.num_commodities(); ++h)
        out << "mu_" << game.commodities()[h].id << ",";
    for (std::size_t h = 0; h < game.num_commodities(); ++h)
        out << "lambda_" << game.commodities()[h].id << ",";
    out << "order_label,regime_label";
    for (std::size_t r = 0; r < game.num_resources(); ++r)
        out << ",x_" << game.resources()[r].id;
    out << "\n";
    for (const auto& row : sweep.rows) {
        if (!row.ok) continue;
        for (double mu : row.demand) out << format_double(mu) << ",";
        for (double l : row.lambda) out << format_double(l) << ",";
        out << row.order_label << "," << row.regime_label;
        for (double x : row.loads) out << "," << format_double(x);
        out << "\n";
    }
    return out.str();
}

std::string region_sweep_legend_to_json(const RegionSweepResult& sweep) {
    std::ostringstream out;
    out << "{\"order_labels\":{";
    for (std::size_t i = 0; i < sweep.order_legend.size(); ++i) {
        if (i) out << ",";
        out << "\"" << i << "\":\"" << escape(sweep.order_legend[i]) << "\"";
    }
    out << "},\"regime_labels\":{";
    for (std::size_t i = 0; i < sweep.regime_legend.size(); ++i) {
        if (i) out << ",";
        out << "\"" << i << "\":\"" << escape(sweep.regime_legend[i]) << "\"";
    }
    out << "},\"failures\":" << sweep.failures << "}";
    return out.str();
}

}  // namespace wardrop
