#pragma once

#include <string>

#include "wardrop/compose.hpp"
#include "wardrop/diagnostics.hpp"
#include "wardrop/game.hpp"
#include "wardrop/solver.hpp"

namespace wardrop {

// Game definition schema:
//   {"resources": [{"id", "cost": {"kind", ...params}}],
//    "commodities": [{"id", "strategies": [[resource ids]]}]}
CongestionGame parse_game(const std::string& json_text);
CongestionGame load_game(const std::string& path);
std::string game_to_json(const CongestionGame& game);

// CRG schema:
//   {"vertices": [...],
//    "edges": [{"id", "tail", "head", "cost"}],
//    "commodities": [{"id", "origin", "destination", "paths": [[edge ids]]}]}
ConstrainedRoutingGame parse_crg(const std::string& json_text);
ConstrainedRoutingGame load_crg(const std::string& path);
std::string crg_to_json(const ConstrainedRoutingGame& crg);

// SP expression: nested {"series":[...]} / {"parallel":[...]} / {"edge":{...}}.
SPNetwork parse_sp(const std::string& json_text);
std::string sp_to_json(const SPNetwork& net);

// Report schema (fixed key order):
//   {loads, flows, tau, lambda, active_regime, beckmann_value, gap, iterations}
std::string report_to_json(const CongestionGame& game, const EquilibriumReport& report);

// Verdict schema: {pass, violations: [{mu_from, mu_to, resource, x_from, x_to}]}
std::string verdict_to_json(const CongestionGame& game, const MonotonicityVerdict& verdict);

// One row per grid point: mu_*, lambda_*, order_label, regime_label, x_*.
std::string region_sweep_to_csv(const CongestionGame& game, const RegionSweepResult& sweep);
// Legend: {"order_labels": {...}, "regime_labels": {...}}
std::string region_sweep_legend_to_json(const RegionSweepResult& sweep);

std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& content);

/// Doubles rendered with 17 significant digits (round-trip exact).
std::string format_double(double value);

}  // namespace wardrop
