#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "wardrop/cost.hpp"

namespace wardrop {

struct Resource {
    std::string id;
    CostFunction cost;
};

/// A strategy is a set of resources, stored as ids in declaration order.
struct Strategy {
    std::vector<std::string> resources;
};

struct Commodity {
    std::string id;
    std::vector<Strategy> strategies;
};

/// Demand per commodity, indexed like CongestionGame::commodities().
using DemandVector = std::vector<double>;

/// Load per resource, indexed like CongestionGame::resources().
using LoadProfile = std::vector<double>;

/// flow[h][s] = flow of commodity h on its s-th strategy.
using FlowProfile = std::vector<std::vector<double>>;

struct Violation {
    std::string entity;   // offending resource/commodity/strategy
    std::string message;
};

/// Immutable congestion game structure: resources with costs plus
/// per-commodity strategy sets. Safe to share across threads once built.
class CongestionGame {
public:
    CongestionGame(std::vector<Resource> resources, std::vector<Commodity> commodities);

    const std::vector<Resource>& resources() const { return resources_; }
    const std::vector<Commodity>& commodities() const { return commodities_; }
    std::size_t num_resources() const { return resources_.size(); }
    std::size_t num_commodities() const { return commodities_.size(); }

    /// True iff every strategy of every commodity has exactly one resource.
    bool singleton() const { return singleton_; }

    /// Index of a resource id, or npos if unknown.
    std::size_t resource_index(const std::string& id) const;
    std::size_t commodity_index(const std::string& id) const;

    /// Strategy s of commodity h as sorted resource indices. Only valid for
    /// games that passed validation.
    const std::vector<std::size_t>& strategy(std::size_t h, std::size_t s) const {
        return strategy_indices_[h][s];
    }
    std::size_t num_strategies(std::size_t h) const { return strategy_indices_[h].size(); }

    /// Resources feasible for commodity h (union over its strategies), sorted.
    const std::vector<std::size_t>& feasible_resources(std::size_t h) const {
        return feasible_[h];
    }

    double cost_at(std::size_t r, double load) const { return resources_[r].cost.eval(load); }

    static constexpr std::size_t npos = static_cast<std::size_t>(-1);

private:
    std::vector<Resource> resources_;
    std::vector<Commodity> commodities_;
    std::vector<std::vector<std::vector<std::size_t>>> strategy_indices_;
    std::vector<std::vector<std::size_t>> feasible_;
    bool singleton_ = false;

    friend std::vector<Violation> validate_game(const CongestionGame&);
};

/// Diagnostic validation; empty result means all structural invariants hold.
std::vector<Violation> validate_game(const CongestionGame& game);

/// Throws StructuralError when validate_game reports anything.
void require_valid(const CongestionGame& game);

/// Aggregate per-resource loads induced by a flow profile (exact finite sum).
LoadProfile load_from_flow(const CongestionGame& game, const FlowProfile& flow);

/// Sum of resource costs of `strategy` at the given loads.
double strategy_cost(const CongestionGame& game, const LoadProfile& loads,
                     const Strategy& strategy);
double strategy_cost(const CongestionGame& game, const LoadProfile& loads,
                     std::size_t h, std::size_t s);

/// Scale-free feasibility tolerance for a commodity demand.
inline double feasibility_tol(double demand) { return 1e-9 * (1.0 + demand); }

/// Checks flow dimensions and per-commodity mass balance against `demand`.
bool flow_feasible(const CongestionGame& game, const DemandVector& demand,
                   const FlowProfile& flow);

}  // namespace wardrop
