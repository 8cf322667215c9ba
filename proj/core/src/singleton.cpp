#include "wardrop/singleton.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <set>

#include "wardrop/errors.hpp"

namespace wardrop {

namespace {

void require_strictly_increasing(const std::vector<Resource>& resources) {
    for (const auto& r : resources)
        if (!r.cost.strictly_increasing())
            throw StructuralError("resource '" + r.id +
                                  "' is not strictly increasing; use the regularized "
                                  "solver for such games");
}

double total_inverse(const std::vector<Resource>& resources, double lambda) {
    double sum = 0.0;
    for (const auto& r : resources) sum += r.cost.inverse(lambda);
    return sum;
}

}  // namespace

WaterFillResult water_fill(const std::vector<Resource>& resources, double demand) {
    if (resources.empty()) throw StructuralError("water_fill needs at least one resource");
    if (!(demand >= 0.0)) throw StructuralError("demand must be nonnegative");
    require_strictly_increasing(resources);

    double lo = std::numeric_limits<double>::infinity();
    for (const auto& r : resources) lo = std::min(lo, r.cost.eval(0.0));

    WaterFillResult out;
    out.loads.assign(resources.size(), 0.0);
    if (demand == 0.0) {
        out.lambda = lo;
        return out;
    }

    double hi = lo + 1.0;
    while (total_inverse(resources, hi) < demand) {
        hi = lo + 2.0 * (hi - lo);
        if (!std::isfinite(hi))
            throw StructuralError("water_fill level diverged; costs may be bounded");
    }
    while (hi - lo > 1e-12 * (1.0 + std::abs(0.5 * (hi + lo)))) {
        const double mid = 0.5 * (lo + hi);
        (total_inverse(resources, mid) < demand ? lo : hi) = mid;
    }
    out.lambda = 0.5 * (lo + hi);
    for (std::size_t r = 0; r < resources.size(); ++r)
        out.loads[r] = resources[r].cost.inverse(out.lambda);
    return out;
}

BreakPointList break_points(const std::vector<Resource>& resources) {
    require_strictly_increasing(resources);
    double min_entry = std::numeric_limits<double>::infinity();
    std::vector<double> thresholds;
    for (const auto& r : resources) {
        const double c0 = r.cost.eval(0.0);
        min_entry = std::min(min_entry, c0);
        thresholds.push_back(c0);
    }
    std::sort(thresholds.begin(), thresholds.end());
    BreakPointList out;
    for (double theta : thresholds) {
        if (theta <= min_entry) continue;
        const double mu = total_inverse(resources, theta);
        if (!out.empty() && std::abs(mu - out.back()) <= 1e-12) continue;
        out.push_back(mu);
    }
    return out;
}

std::string WeakOrderLabel::key(const CongestionGame& game) const {
    std::string out;
    for (const auto& cls : classes) {
        if (!out.empty()) out += " < ";
        out += "{";
        for (std::size_t i = 0; i < cls.commodities.size(); ++i) {
            if (i) out += ",";
            out += game.commodities()[cls.commodities[i]].id;
        }
        out += "}";
    }
    return out;
}

std::string RegimeLabel::key(const CongestionGame& game) const {
    std::string out;
    for (std::size_t h = 0; h < active.size(); ++h) {
        if (h) out += "|";
        out += game.commodities()[h].id + ":{";
        for (std::size_t i = 0; i < active[h].size(); ++i) {
            if (i) out += ",";
            out += game.resources()[active[h][i]].id;
        }
        out += "}";
    }
    return out;
}

WeakOrderLabel classify_region(const CongestionGame& game, const DemandVector& demand,
                               const EquilibriumReport& report, double tie_tol) {
    if (!game.singleton())
        throw StructuralError("classify_region requires a singleton game");
    const std::size_t k = game.num_commodities();
    if (report.commodity_costs.size() != k || demand.size() != k)
        throw StructuralError("report/demand dimensions do not match game");

    std::vector<std::size_t> order(k);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        const double la = report.commodity_costs[a], lb = report.commodity_costs[b];
        if (la != lb) return la < lb;
        return a < b;
    });

    WeakOrderLabel label;
    for (std::size_t i = 0; i < k;) {
        CostClass cls;
        cls.commodities.push_back(order[i]);
        double hi = report.commodity_costs[order[i]];
        std::size_t j = i + 1;
        for (; j < k; ++j) {
            const double lj = report.commodity_costs[order[j]];
            if (std::abs(lj - hi) <= tie_tol * (1.0 + std::max(std::abs(lj), std::abs(hi)))) {
                cls.commodities.push_back(order[j]);
                hi = std::max(hi, lj);
            } else {
                break;
            }
        }
        std::sort(cls.commodities.begin(), cls.commodities.end());
        for (std::size_t h : cls.commodities) cls.aggregate_demand += demand[h];
        cls.lambda = report.commodity_costs[cls.commodities.front()];
        label.classes.push_back(std::move(cls));
        i = j;
    }

    // R_C: feasible for the class, minus anything a higher class can use.
    std::set<std::size_t> taken;
    for (std::size_t c = label.classes.size(); c-- > 0;) {
        auto& cls = label.classes[c];
        std::set<std::size_t> rc;
        for (std::size_t h : cls.commodities)
            for (std::size_t r : game.feasible_resources(h)) rc.insert(r);
        for (std::size_t r : taken) rc.erase(r);
        cls.resources.assign(rc.begin(), rc.end());
        for (std::size_t h : cls.commodities)
            for (std::size_t r : game.feasible_resources(h)) taken.insert(r);
    }
    return label;
}

RestrictedCheck restricted_equilibrium_check(const CongestionGame& game,
                                             const DemandVector& demand,
                                             const WeakOrderLabel& label,
                                             const EquilibriumReport& report, double tol) {
    RestrictedCheck out;
    for (std::size_t c = 0; c < label.classes.size(); ++c) {
        const auto& cls = label.classes[c];
        RestrictedCheck::PerClass pc{c, 0.0, 0.0, false};
        double mass = 0.0;
        for (std::size_t r : cls.resources) mass += report.loads[r];
        pc.mass_error = std::abs(mass - cls.aggregate_demand);
        if (pc.mass_error > tol) out.pass = false;

        std::vector<Resource> restricted;
        bool all_si = true;
        for (std::size_t r : cls.resources) {
            restricted.push_back(game.resources()[r]);
            all_si = all_si && game.resources()[r].cost.strictly_increasing();
        }
        if (all_si && !restricted.empty()) {
            pc.checked_water_fill = true;
            const auto wf = water_fill(restricted, cls.aggregate_demand);
            for (std::size_t i = 0; i < cls.resources.size(); ++i)
                pc.water_fill_error = std::max(
                    pc.water_fill_error,
                    std::abs(report.loads[cls.resources[i]] - wf.loads[i]));
            if (pc.water_fill_error > tol) out.pass = false;
        }
        out.classes.push_back(pc);
    }
    return out;
}

std::vector<SubRegionBoundary> subregion_boundaries(const CongestionGame& game,
                                                    const WeakOrderLabel& label) {
    std::vector<SubRegionBoundary> out;
    for (std::size_t c = 0; c < label.classes.size(); ++c) {
        std::vector<Resource> restricted;
        for (std::size_t r : label.classes[c].resources)
            restricted.push_back(game.resources()[r]);
        if (restricted.empty()) continue;
        for (double mu : break_points(restricted)) out.push_back({c, mu});
    }
    return out;
}

RegimeCensus regime_census(const CongestionGame& game,
                           const std::vector<DemandVector>& demands,
                           const SolverConfig& config) {
    RegimeCensus census;
    for (const auto& mu : demands) {
        EquilibriumReport rep;
        try {
            rep = solve_beckmann(game, mu, config);
        } catch (const ConvergenceError&) {
            census.failed.push_back(mu);
            continue;
        }
        RegimeLabel regime{rep.active_regime};
        auto it = std::find_if(census.entries.begin(), census.entries.end(),
                               [&](const auto& e) { return e.regime == regime; });
        if (it == census.entries.end())
            census.entries.push_back({std::move(regime), 1, mu});
        else
            ++it->count;
    }
    return census;
}

RegimeCensus regime_census(const CongestionGame& game,
                           const std::vector<std::pair<double, double>>& box,
                           std::size_t grid, const SolverConfig& config) {
    if (box.size() != game.num_commodities())
        throw StructuralError("box does not match commodity count");
    if (grid < 2) throw StructuralError("grid resolution must be >= 2");
    std::vector<std::vector<double>> axes;
    std::size_t total = 1;
    for (const auto& [lo, hi] : box) {
        std::vector<double> v{lo};
        if (hi > lo)
            for (std::size_t i = 1; i < grid; ++i)
                v.push_back(lo + (hi - lo) * static_cast<double>(i) /
                                     static_cast<double>(grid - 1));
        axes.push_back(std::move(v));
        total *= axes.back().size();
    }
    std::vector<DemandVector> points(total, DemandVector(box.size(), 0.0));
    for (std::size_t p = 0; p < total; ++p) {
        std::size_t rem = p;
        for (std::size_t i = 0; i < box.size(); ++i) {
            points[p][i] = axes[i][rem % axes[i].size()];
            rem /= axes[i].size();
        }
    }
    return regime_census(game, points, config);
}

}  // namespace wardrop
