// Command-line front end: solve games, sweep demand space, compose and embed
// games, and run the theorem verifiers. Exit codes: 0 success / verifier
// pass, 2 verifier fail, 1 structural or convergence error.

#include <cstdio>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "wardrop/compose.hpp"
#include "wardrop/diagnostics.hpp"
#include "wardrop/errors.hpp"
#include "wardrop/game.hpp"
#include "wardrop/io.hpp"
#include "wardrop/singleton.hpp"
#include "wardrop/solver.hpp"

namespace {

using namespace wardrop;

constexpr int kExitOk = 0;
constexpr int kExitError = 1;
constexpr int kExitVerifierFail = 2;

std::vector<std::string> split(const std::string& text, char sep) {
    std::vector<std::string> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, sep)) out.push_back(item);
    return out;
}

double parse_number(const std::string& text, const std::string& what) {
    try {
        std::size_t pos = 0;
        const double v = std::stod(text, &pos);
        if (pos != text.size()) throw std::invalid_argument(text);
        return v;
    } catch (const std::exception&) {
        throw ParseError("cannot parse " + what + " '" + text + "'");
    }
}

DemandVector parse_demand(const std::string& text, const CongestionGame& game) {
    DemandVector mu;
    for (const auto& part : split(text, ','))
        mu.push_back(parse_number(part, "demand entry"));
    if (mu.size() != game.num_commodities())
        throw ParseError("demand has " + std::to_string(mu.size()) + " entries, game has " +
                         std::to_string(game.num_commodities()) + " commodities");
    return mu;
}

std::size_t commodity_of(const std::string& id, const CongestionGame& game) {
    const std::size_t h = game.commodity_index(id);
    if (h == CongestionGame::npos) throw ParseError("unknown commodity '" + id + "'");
    return h;
}

// --box alpha:0:4,beta:0:4 — every commodity must get an interval
std::vector<std::pair<double, double>> parse_box(const std::string& text,
                                                 const CongestionGame& game) {
    std::vector<std::pair<double, double>> box(game.num_commodities(), {-1.0, -1.0});
    for (const auto& part : split(text, ',')) {
        const auto fields = split(part, ':');
        if (fields.size() != 3) throw ParseError("box entry '" + part + "' is not id:lo:hi");
        box[commodity_of(fields[0], game)] = {parse_number(fields[1], "box bound"),
                                              parse_number(fields[2], "box bound")};
    }
    for (std::size_t h = 0; h < box.size(); ++h)
        if (box[h].first < 0.0)
            throw ParseError("box is missing commodity '" + game.commodities()[h].id + "'");
    return box;
}

struct ChainSpec {
    std::size_t axis;
    double lo, hi;
    std::size_t steps;
};

ChainSpec parse_chain(const std::string& text, const CongestionGame& game) {
    const auto fields = split(text, ':');
    if (fields.size() != 4) throw ParseError("chain '" + text + "' is not id:lo:hi:steps");
    ChainSpec spec;
    spec.axis = commodity_of(fields[0], game);
    spec.lo = parse_number(fields[1], "chain bound");
    spec.hi = parse_number(fields[2], "chain bound");
    const double steps = parse_number(fields[3], "chain steps");
    spec.steps = static_cast<std::size_t>(steps);
    if (spec.steps < 2) throw ParseError("chain needs at least 2 steps");
    return spec;
}

void emit(const std::string& text, const std::string& out_path) {
    if (out_path.empty())
        std::cout << text << "\n";
    else
        write_file(out_path, text + "\n");
}

std::string witness_to_json(const CongestionGame& game,
                            const ConstrainedRoutingGame& crg,
                            const EquivalenceWitness& witness) {
    std::ostringstream out;
    out << "{\"commodities\":{";
    for (std::size_t h = 0; h < witness.commodity_map.size(); ++h) {
        if (h) out << ",";
        out << "\"" << game.commodities()[h].id << "\":\""
            << crg.commodities[witness.commodity_map[h]].id << "\"";
    }
    out << "},\"strategies\":{";
    for (std::size_t h = 0; h < witness.strategy_map.size(); ++h) {
        if (h) out << ",";
        out << "\"" << game.commodities()[h].id << "\":[";
        for (std::size_t s = 0; s < witness.strategy_map[h].size(); ++s) {
            if (s) out << ",";
            out << witness.strategy_map[h][s];
        }
        out << "]";
    }
    out << "}}";
    return out.str();
}

int run(int argc, char** argv) {
    CLI::App app{"Wardrop equilibria, monotone selections and demand-region analysis "
                 "for nonatomic congestion games"};
    app.require_subcommand(1);

    std::string game_path, game2_path, crg_path, out_path, legend_path;
    std::string demand_text, box_text, chain_text, class_text, subset_text, kind;
    std::size_t grid = 9;
    double gap_tol = 1e-8;
    double tol = 1e-6;
    double step = 1e-3;
    double slack = 1e-6;
    unsigned seed = 1;

    auto add_solver_opts = [&](CLI::App* cmd) {
        cmd->add_option("--gap-tol", gap_tol, "relative duality gap tolerance");
        cmd->add_option("--seed", seed, "random seed");
    };

    auto* solve_cmd = app.add_subcommand("solve", "Wardrop equilibrium of a game");
    solve_cmd->add_option("--game", game_path, "game definition JSON")->required();
    solve_cmd->add_option("--demand", demand_text, "comma separated demands")->required();
    solve_cmd->add_option("--out", out_path, "output path (default stdout)");
    add_solver_opts(solve_cmd);

    auto* mes_cmd = app.add_subcommand("mes", "minimal-norm (monotone) equilibrium selection");
    mes_cmd->add_option("--game", game_path)->required();
    mes_cmd->add_option("--demand", demand_text)->required();
    mes_cmd->add_option("--out", out_path);
    add_solver_opts(mes_cmd);

    auto* regions_cmd = app.add_subcommand("regions", "cost-order/regime sweep over a demand box");
    regions_cmd->add_option("--game", game_path)->required();
    regions_cmd->add_option("--box", box_text, "id:lo:hi per commodity")->required();
    regions_cmd->add_option("--grid", grid, "grid points per axis");
    regions_cmd->add_option("--out", out_path, "CSV path; legend lands next to it");
    regions_cmd->add_option("--legend", legend_path, "legend JSON path");
    regions_cmd->add_option("--tol", tol, "cost-class tie tolerance");
    add_solver_opts(regions_cmd);

    auto* bp_cmd = app.add_subcommand("breakpoints", "break points of a cost class");
    bp_cmd->add_option("--game", game_path)->required();
    bp_cmd->add_option("--class", class_text,
                       "commodities forming the top cost class (comma list)")
        ->required();
    bp_cmd->add_option("--out", out_path);

    auto* vmes_cmd = app.add_subcommand("verify-mes", "monotone-loads check along demand chains");
    vmes_cmd->add_option("--game", game_path)->required();
    vmes_cmd->add_option("--chain", chain_text, "id:lo:hi:steps single chain");
    vmes_cmd->add_option("--box", box_text, "full axis-chain grid");
    vmes_cmd->add_option("--grid", grid);
    vmes_cmd->add_option("--demand", demand_text, "base demand for chain mode");
    vmes_cmd->add_option("--slack", slack);
    vmes_cmd->add_option("--out", out_path);
    add_solver_opts(vmes_cmd);

    auto* vcom_cmd = app.add_subcommand("verify-comonotone",
                                        "pairwise comonotonicity of loads over a demand box");
    vcom_cmd->add_option("--game", game_path)->required();
    vcom_cmd->add_option("--box", box_text)->required();
    vcom_cmd->add_option("--grid", grid);
    vcom_cmd->add_option("--subset", subset_text, "resource ids (comma list)")->required();
    vcom_cmd->add_option("--slack", slack);
    add_solver_opts(vcom_cmd);

    auto* combine_cmd = app.add_subcommand("combine", "product or union of two games");
    combine_cmd->add_option("--kind", kind, "product|union")->required();
    combine_cmd->add_option("--game", game_path)->required();
    combine_cmd->add_option("--game2", game2_path)->required();
    combine_cmd->add_option("--out", out_path);

    auto* embed_cmd = app.add_subcommand("embed", "series-parallel or common-OD embedding");
    embed_cmd->add_option("--kind", kind, "sp|common-od")->required();
    embed_cmd->add_option("--game", game_path, "game (for --kind sp)");
    embed_cmd->add_option("--crg", crg_path, "routing game (for --kind common-od)");
    embed_cmd->add_option("--out", out_path);

    auto* check_cmd = app.add_subcommand("check-crg",
                                         "structural conditions for product-union form");
    check_cmd->add_option("--crg", crg_path)->required();
    check_cmd->add_option("--out", out_path);

    auto* grad_cmd = app.add_subcommand("gradient-check",
                                        "finite-difference certificate grad V = lambda");
    grad_cmd->add_option("--game", game_path)->required();
    grad_cmd->add_option("--demand", demand_text)->required();
    grad_cmd->add_option("--step", step);
    grad_cmd->add_option("--tol", tol, "max acceptable residual");
    grad_cmd->add_option("--out", out_path);

    CLI11_PARSE(app, argc, argv);

    SolverConfig config;
    config.gap_tol = gap_tol;

    if (solve_cmd->parsed() || mes_cmd->parsed()) {
        const CongestionGame game = load_game(game_path);
        const DemandVector mu = parse_demand(demand_text, game);
        EquilibriumReport rep;
        if (mes_cmd->parsed()) {
            rep = solve_mes(game, mu, config);
            if (rep.ladder_warning)
                std::cerr << "warning: regularization ladder did not stabilize; "
                             "reporting the last rung\n";
        } else {
            rep = solve_beckmann(game, mu, config);
        }
        emit(report_to_json(game, rep), out_path);
        return kExitOk;
    }

    if (regions_cmd->parsed()) {
        const CongestionGame game = load_game(game_path);
        SweepPlan plan;
        plan.box = parse_box(box_text, game);
        plan.resolution = grid;
        const RegionSweepResult sweep = region_sweep(game, plan, config, tol);
        emit(region_sweep_to_csv(game, sweep), out_path);
        if (legend_path.empty() && !out_path.empty())
            legend_path = out_path + ".legend.json";
        if (!legend_path.empty())
            write_file(legend_path, region_sweep_legend_to_json(sweep) + "\n");
        std::cerr << sweep.order_legend.size() << " order labels, "
                  << sweep.regime_legend.size() << " regimes, " << sweep.failures
                  << " failures\n";
        return kExitOk;
    }

    if (bp_cmd->parsed()) {
        const CongestionGame game = load_game(game_path);
        if (!game.singleton()) throw StructuralError("breakpoints needs a singleton game");
        std::vector<Resource> members;
        std::vector<bool> in_class(game.num_resources(), false);
        for (const auto& id : split(class_text, ',')) {
            const std::size_t h = commodity_of(id, game);
            for (std::size_t r : game.feasible_resources(h)) {
                if (!in_class[r]) {
                    in_class[r] = true;
                    members.push_back(game.resources()[r]);
                }
            }
        }
        const BreakPointList bps = break_points(members);
        std::ostringstream out;
        out << "{\"class\":[";
        const auto ids = split(class_text, ',');
        for (std::size_t i = 0; i < ids.size(); ++i)
            out << (i ? "," : "") << "\"" << ids[i] << "\"";
        out << "],\"resources\":[";
        bool first = true;
        for (const auto& r : members) {
            if (!first) out << ",";
            first = false;
            out << "\"" << r.id << "\"";
        }
        out << "],\"break_points\":[";
        for (std::size_t i = 0; i < bps.size(); ++i)
            out << (i ? "," : "") << format_double(bps[i]);
        out << "]}";
        emit(out.str(), out_path);
        return kExitOk;
    }

    if (vmes_cmd->parsed()) {
        const CongestionGame game = load_game(game_path);
        SweepPlan plan;
        if (!chain_text.empty()) {
            const ChainSpec spec = parse_chain(chain_text, game);
            plan.box.assign(game.num_commodities(), {0.0, 0.0});
            plan.box[spec.axis] = {spec.lo, spec.hi};
            plan.resolution = spec.steps;
            plan.chain_axis = spec.axis;
            plan.base = demand_text.empty() ? DemandVector(game.num_commodities(), 0.0)
                                            : parse_demand(demand_text, game);
        } else if (!box_text.empty()) {
            plan.box = parse_box(box_text, game);
            plan.resolution = grid;
        } else {
            throw ParseError("verify-mes needs --chain or --box");
        }
        plan.seed = seed;
        const MonotonicityVerdict verdict = verify_mes(game, plan, slack, config);
        emit(verdict_to_json(game, verdict), out_path);
        return verdict.pass ? kExitOk : kExitVerifierFail;
    }

    if (vcom_cmd->parsed()) {
        const CongestionGame game = load_game(game_path);
        SweepPlan plan;
        plan.box = parse_box(box_text, game);
        plan.resolution = grid;
        std::vector<std::size_t> subset;
        for (const auto& id : split(subset_text, ',')) {
            const std::size_t r = game.resource_index(id);
            if (r == CongestionGame::npos) throw ParseError("unknown resource '" + id + "'");
            subset.push_back(r);
        }
        std::vector<LoadSample> samples;
        for (const DemandVector& mu : grid_demands(plan.box, plan.resolution))
            samples.emplace_back(mu, solve_mes(game, mu, config).loads);
        const ComonotoneVerdict verdict = verify_comonotone(samples, subset, slack);
        std::ostringstream out;
        out << "{\"pass\":" << (verdict.pass ? "true" : "false");
        if (verdict.violation) {
            const auto& v = *verdict.violation;
            out << ",\"violation\":{\"resource_a\":\""
                << game.resources()[v.resource_a].id << "\",\"resource_b\":\""
                << game.resources()[v.resource_b].id
                << "\",\"product\":" << format_double(v.product) << "}";
        }
        out << "}";
        emit(out.str(), out_path);
        return verdict.pass ? kExitOk : kExitVerifierFail;
    }

    if (combine_cmd->parsed()) {
        const CongestionGame g1 = load_game(game_path);
        const CongestionGame g2 = load_game(game2_path);
        if (kind == "product")
            emit(game_to_json(product(g1, g2)), out_path);
        else if (kind == "union")
            emit(game_to_json(union_game(g1, g2)), out_path);
        else
            throw ParseError("--kind must be product or union");
        return kExitOk;
    }

    if (embed_cmd->parsed()) {
        if (kind == "sp") {
            if (game_path.empty()) throw ParseError("--kind sp needs --game");
            const CongestionGame game = load_game(game_path);
            const SpEmbedding emb = embed_sp(game);
            emit("{\"crg\":" + crg_to_json(emb.crg) +
                     ",\"witness\":" + witness_to_json(game, emb.crg, emb.witness) + "}",
                 out_path);
        } else if (kind == "common-od") {
            if (crg_path.empty()) throw ParseError("--kind common-od needs --crg");
            const ConstrainedRoutingGame crg = load_crg(crg_path);
            const CommonOdEmbedding emb = embed_common_od(crg);
            emit("{\"crg\":" + crg_to_json(emb.crg) + "}", out_path);
        } else {
            throw ParseError("--kind must be sp or common-od");
        }
        return kExitOk;
    }

    if (check_cmd->parsed()) {
        const ConstrainedRoutingGame crg = load_crg(crg_path);
        const StructureCheck check = check_thm56_conditions(crg);
        std::ostringstream out;
        auto b = [](bool v) { return v ? "true" : "false"; };
        out << "{\"series_parallel\":" << b(check.series_parallel)
            << ",\"same_vertex_sequence\":" << b(check.same_vertex_sequence)
            << ",\"exchange_closed\":" << b(check.exchange_closed)
            << ",\"product_union\":" << b(check.all());
        if (!check.detail.empty()) out << ",\"detail\":\"" << check.detail << "\"";
        out << "}";
        emit(out.str(), out_path);
        return check.all() ? kExitOk : kExitVerifierFail;
    }

    if (grad_cmd->parsed()) {
        const CongestionGame game = load_game(game_path);
        const DemandVector mu = parse_demand(demand_text, game);
        const std::vector<double> residuals = beckmann_gradient_check(game, mu, step);
        std::ostringstream out;
        out << "{\"residuals\":{";
        bool ok = true;
        for (std::size_t h = 0; h < residuals.size(); ++h) {
            if (h) out << ",";
            out << "\"" << game.commodities()[h].id
                << "\":" << format_double(residuals[h]);
            ok = ok && residuals[h] <= tol;
        }
        out << "},\"tol\":" << format_double(tol) << ",\"pass\":" << (ok ? "true" : "false")
            << "}";
        emit(out.str(), out_path);
        return ok ? kExitOk : kExitVerifierFail;
    }

    return kExitError;
}

}  // namespace

int main(int argc, char** argv) {
    try {
        return run(argc, argv);
    } catch (const wardrop::ConvergenceError& e) {
        std::cerr << "convergence error: " << e.what() << "\n";
        return kExitError;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitError;
    }
}
