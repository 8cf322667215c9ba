#include "wardrop/game.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <unordered_map>
#include <unordered_set>

#include "wardrop/errors.hpp"

namespace wardrop {

CongestionGame::CongestionGame(std::vector<Resource> resources,
                               std::vector<Commodity> commodities)
    : resources_(std::move(resources)), commodities_(std::move(commodities)) {
    std::unordered_map<std::string, std::size_t> rindex;
    for (std::size_t r = 0; r < resources_.size(); ++r) rindex.emplace(resources_[r].id, r);

    strategy_indices_.resize(commodities_.size());
    feasible_.resize(commodities_.size());
    singleton_ = !commodities_.empty();
    for (std::size_t h = 0; h < commodities_.size(); ++h) {
        auto& per_strategy = strategy_indices_[h];
        per_strategy.reserve(commodities_[h].strategies.size());
        std::set<std::size_t> feas;
        for (const auto& s : commodities_[h].strategies) {
            std::vector<std::size_t> idx;
            idx.reserve(s.resources.size());
            for (const auto& rid : s.resources) {
                auto it = rindex.find(rid);
                idx.push_back(it == rindex.end() ? npos : it->second);
            }
            std::sort(idx.begin(), idx.end());
            for (std::size_t r : idx)
                if (r != npos) feas.insert(r);
            if (idx.size() != 1) singleton_ = false;
            per_strategy.push_back(std::move(idx));
        }
        feasible_[h].assign(feas.begin(), feas.end());
    }
}

std::size_t CongestionGame::resource_index(const std::string& id) const {
    for (std::size_t r = 0; r < resources_.size(); ++r)
        if (resources_[r].id == id) return r;
    return npos;
}

std::size_t CongestionGame::commodity_index(const std::string& id) const {
    for (std::size_t h = 0; h < commodities_.size(); ++h)
        if (commodities_[h].id == id) return h;
    return npos;
}

std::vector<Violation> validate_game(const CongestionGame& game) {
    std::vector<Violation> out;
    std::unordered_set<std::string> seen;
    for (const auto& r : game.resources_) {
        if (!seen.insert(r.id).second)
            out.push_back({r.id, "duplicate resource id"});
        for (const auto& msg : r.cost.validate()) out.push_back({r.id, msg});
    }
    seen.clear();
    if (game.commodities_.empty())
        out.push_back({"<game>", "game has no commodities"});
    for (std::size_t h = 0; h < game.commodities_.size(); ++h) {
        const auto& c = game.commodities_[h];
        if (!seen.insert(c.id).second)
            out.push_back({c.id, "duplicate commodity id"});
        if (c.strategies.empty())
            out.push_back({c.id, "commodity has no strategies"});
        std::set<std::vector<std::size_t>> strategy_sets;
        for (std::size_t s = 0; s < c.strategies.size(); ++s) {
            const auto& strat = c.strategies[s];
            const std::string name = c.id + "/strategy[" + std::to_string(s) + "]";
            if (strat.resources.empty())
                out.push_back({name, "strategy is empty"});
            std::unordered_set<std::string> inside;
            for (const auto& rid : strat.resources) {
                if (!inside.insert(rid).second)
                    out.push_back({name, "duplicate resource '" + rid + "' in strategy"});
            }
            const auto& idx = game.strategy_indices_[h][s];
            for (std::size_t i = 0; i < idx.size(); ++i) {
                if (idx[i] == CongestionGame::npos) {
                    out.push_back({name, "references unknown resource"});
                    break;
                }
            }
            if (std::find(idx.begin(), idx.end(), CongestionGame::npos) == idx.end() &&
                !strategy_sets.insert(idx).second)
                out.push_back({name, "duplicate strategy set within commodity"});
        }
    }
    return out;
}

void require_valid(const CongestionGame& game) {
    auto violations = validate_game(game);
    if (violations.empty()) return;
    std::string msg = "invalid game:";
    for (const auto& v : violations) msg += "\n  " + v.entity + ": " + v.message;
    throw StructuralError(msg);
}

LoadProfile load_from_flow(const CongestionGame& game, const FlowProfile& flow) {
    if (flow.size() != game.num_commodities())
        throw StructuralError("flow has " + std::to_string(flow.size()) +
                              " commodities, game has " +
                              std::to_string(game.num_commodities()));
    LoadProfile loads(game.num_resources(), 0.0);
    for (std::size_t h = 0; h < flow.size(); ++h) {
        if (flow[h].size() != game.num_strategies(h))
            throw StructuralError("flow of commodity '" + game.commodities()[h].id +
                                  "' does not match its strategy count");
        for (std::size_t s = 0; s < flow[h].size(); ++s) {
            const double f = flow[h][s];
            if (f == 0.0) continue;
            for (std::size_t r : game.strategy(h, s)) {
                if (r == CongestionGame::npos)
                    throw StructuralError("strategy references unknown resource");
                loads[r] += f;
            }
        }
    }
    return loads;
}

double strategy_cost(const CongestionGame& game, const LoadProfile& loads,
                     const Strategy& strategy) {
    if (loads.size() != game.num_resources())
        throw StructuralError("load profile does not match resource count");
    double total = 0.0;
    for (const auto& rid : strategy.resources) {
        const std::size_t r = game.resource_index(rid);
        if (r == CongestionGame::npos)
            throw StructuralError("unknown resource '" + rid + "' in strategy");
        total += game.cost_at(r, loads[r]);
    }
    return total;
}

double strategy_cost(const CongestionGame& game, const LoadProfile& loads,
                     std::size_t h, std::size_t s) {
    double total = 0.0;
    for (std::size_t r : game.strategy(h, s)) {
        if (r == CongestionGame::npos)
            throw StructuralError("strategy references unknown resource");
        total += game.cost_at(r, loads[r]);
    }
    return total;
}

bool flow_feasible(const CongestionGame& game, const DemandVector& demand,
                   const FlowProfile& flow) {
    if (demand.size() != game.num_commodities() || flow.size() != game.num_commodities())
        return false;
    for (std::size_t h = 0; h < flow.size(); ++h) {
        if (flow[h].size() != game.num_strategies(h)) return false;
        double sum = 0.0;
        for (double f : flow[h]) {
            if (f < 0.0) return false;
            sum += f;
        }
        if (std::abs(sum - demand[h]) > feasibility_tol(demand[h])) return false;
    }
    return true;
}

}  // namespace wardrop
