#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "wardrop/game.hpp"
#include "wardrop/solver.hpp"

namespace wardrop {

struct WaterFillResult {
    std::vector<double> loads;  // aligned with the resource list passed in
    double lambda = 0.0;
};

/// Single-commodity equilibrium on a list of strictly increasing resources:
/// finds the level lambda with sum_r inv_r(lambda) = demand by bisection
/// (absolute lambda tolerance 1e-12*(1+lambda)) and sets loads to the
/// generalized inverses. Rejects non-strictly-increasing costs.
WaterFillResult water_fill(const std::vector<Resource>& resources, double demand);

/// Demands at which the active resource set of the single-commodity game
/// changes: one candidate per distinct entry cost c_r(0) above the minimum,
/// deduplicated within 1e-12. Strictly increasing, first entry > 0.
using BreakPointList = std::vector<double>;
BreakPointList break_points(const std::vector<Resource>& resources);

struct CostClass {
    std::vector<std::size_t> commodities;  // members, ascending index
    std::vector<std::size_t> resources;    // R_C, ascending index
    double aggregate_demand = 0.0;         // mu_C
    double lambda = 0.0;                   // shared equilibrium cost
};

/// Weak order over commodities induced by equilibrium costs: classes sorted
/// by ascending cost; each resource lands in the class of the highest ranked
/// commodity that can use it.
struct WeakOrderLabel {
    std::vector<CostClass> classes;  // ascending lambda
    std::string key(const CongestionGame& game) const;
};

/// Per-commodity active resource sets.
struct RegimeLabel {
    std::vector<std::vector<std::size_t>> active;  // rho_h, sorted
    std::string key(const CongestionGame& game) const;
    bool operator==(const RegimeLabel& other) const { return active == other.active; }
};

/// Groups commodities into cost classes by sorting lambda and merging values
/// within tie_tol (relative), then assigns per-class resource sets and
/// aggregate demands.
WeakOrderLabel classify_region(const CongestionGame& game, const DemandVector& demand,
                               const EquilibriumReport& report, double tie_tol = 1e-6);

struct RestrictedCheck {
    bool pass = true;
    struct PerClass {
        std::size_t class_index;
        double mass_error;        // |sum of loads on R_C - mu_C|
        double water_fill_error;  // max load deviation vs the class water fill
        bool checked_water_fill;
    };
    std::vector<PerClass> classes;
};

/// Within each cost class, the report loads restricted to R_C must carry the
/// aggregate demand and (for strictly increasing costs) match the
/// single-commodity water fill.
RestrictedCheck restricted_equilibrium_check(const CongestionGame& game,
                                             const DemandVector& demand,
                                             const WeakOrderLabel& label,
                                             const EquilibriumReport& report, double tol);

struct SubRegionBoundary {
    std::size_t class_index;
    double break_point;  // hyperplane sum_{h in C} mu_h = break_point
};

/// Hyperplanes separating active-regime sub-regions inside the region of
/// `label`: one per break point of each class' restricted game.
std::vector<SubRegionBoundary> subregion_boundaries(const CongestionGame& game,
                                                    const WeakOrderLabel& label);

struct RegimeCensus {
    struct Entry {
        RegimeLabel regime;
        std::size_t count = 0;
        DemandVector witness;  // first demand that produced the regime
    };
    std::vector<Entry> entries;       // first-seen order
    std::vector<DemandVector> failed;  // solver failures, recorded not fatal
};

/// Solves at each demand and tallies the distinct active regimes.
RegimeCensus regime_census(const CongestionGame& game,
                           const std::vector<DemandVector>& demands,
                           const SolverConfig& config = {});

/// Grid version over a per-commodity demand box with `grid` points per axis.
RegimeCensus regime_census(const CongestionGame& game,
                           const std::vector<std::pair<double, double>>& box,
                           std::size_t grid, const SolverConfig& config = {});

}  // namespace wardrop
