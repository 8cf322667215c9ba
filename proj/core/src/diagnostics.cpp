#include "wardrop/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <functional>
#include <limits>
#include <numeric>
#include <random>
#include <thread>

#include "wardrop/errors.hpp"

namespace wardrop {

void SweepPlan::check(std::size_t num_commodities) const {
    if (box.size() != num_commodities)
        throw StructuralError("sweep box does not match commodity count");
    for (const auto& [lo, hi] : box)
        if (!(lo <= hi) || lo < 0.0)
            throw StructuralError("sweep box interval is empty or negative");
    if (resolution < 2) throw StructuralError("sweep resolution must be >= 2");
    if (chain_axis && *chain_axis >= num_commodities)
        throw StructuralError("chain axis out of range");
    if (chain_axis && base.size() != num_commodities)
        throw StructuralError("chain mode needs a base demand");
    if (jitter < 0.0 || jitter >= 1.0) throw StructuralError("jitter must be in [0,1)");
}

namespace {

std::vector<double> axis_values(const std::pair<double, double>& interval,
                                std::size_t resolution) {
    if (interval.first == interval.second) return {interval.first};
    std::vector<double> v(resolution);
    for (std::size_t i = 0; i < resolution; ++i)
        v[i] = interval.first + (interval.second - interval.first) *
                                    static_cast<double>(i) /
                                    static_cast<double>(resolution - 1);
    return v;
}

// All chains of a plan. Each chain is a list of demands increasing in one
// coordinate with the others fixed.
std::vector<std::vector<DemandVector>> make_chains(const SweepPlan& plan) {
    std::vector<std::vector<DemandVector>> chains;
    const std::size_t k = plan.box.size();
    if (plan.chain_axis) {
        std::vector<DemandVector> chain;
        for (double v : axis_values(plan.box[*plan.chain_axis], plan.resolution)) {
            DemandVector mu = plan.base;
            mu[*plan.chain_axis] = v;
            chain.push_back(std::move(mu));
        }
        chains.push_back(std::move(chain));
        return chains;
    }

    std::mt19937 rng(plan.seed);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    std::vector<std::vector<double>> axes;
    for (const auto& interval : plan.box)
        axes.push_back(axis_values(interval, plan.resolution));
    for (std::size_t axis = 0; axis < k; ++axis) {
        // fixed coordinates run over the grid of the other axes
        std::size_t combos = 1;
        for (std::size_t i = 0; i < k; ++i)
            if (i != axis) combos *= axes[i].size();
        for (std::size_t c = 0; c < combos; ++c) {
            DemandVector fixed(k, 0.0);
            std::size_t rem = c;
            for (std::size_t i = 0; i < k; ++i) {
                if (i == axis) continue;
                double v = axes[i][rem % axes[i].size()];
                rem /= axes[i].size();
                if (plan.jitter > 0.0 && axes[i].size() > 1) {
                    const double cell = (plan.box[i].second - plan.box[i].first) /
                                        static_cast<double>(axes[i].size() - 1);
                    v = std::min(plan.box[i].second,
                                 v + plan.jitter * cell * unif(rng));
                }
                fixed[i] = v;
            }
            std::vector<DemandVector> chain;
            for (double v : axes[axis]) {
                DemandVector mu = fixed;
                mu[axis] = v;
                chain.push_back(std::move(mu));
            }
            chains.push_back(std::move(chain));
        }
    }
    return chains;
}

}  // namespace

std::size_t sweep_threads() {
    std::size_t n = std::thread::hardware_concurrency();
    if (n == 0) n = 1;
    if (const char* cap = std::getenv("WARDROP_KIT_THREADS")) {
        const long v = std::atol(cap);
        if (v >= 1 && static_cast<std::size_t>(v) < n) n = static_cast<std::size_t>(v);
    }
    return n;
}

std::vector<DemandVector> grid_demands(const std::vector<std::pair<double, double>>& box,
                                       std::size_t resolution) {
    std::vector<std::vector<double>> axes;
    std::size_t total = 1;
    for (const auto& interval : box) {
        axes.push_back(axis_values(interval, resolution));
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
    return points;
}

namespace {

// Index-sliced parallel loop; results must land in preallocated slots so the
// outcome is independent of scheduling.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& body) {
    const std::size_t workers = std::min(sweep_threads(), count == 0 ? 1 : count);
    if (workers <= 1) {
        for (std::size_t i = 0; i < count; ++i) body(i);
        return;
    }
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < workers; ++w) {
        pool.emplace_back([&, w] {
            for (std::size_t i = w; i < count; i += workers) body(i);
        });
    }
    for (auto& t : pool) t.join();
}

}  // namespace

MonotonicityVerdict verify_mes(const CongestionGame& game, const SweepPlan& plan,
                               double slack, const SolverConfig& config) {
    plan.check(game.num_commodities());
    const auto chains = make_chains(plan);

    // Distinct demand points across chains, solved once each.
    std::vector<DemandVector> points;
    std::vector<std::vector<std::size_t>> chain_points(chains.size());
    for (std::size_t c = 0; c < chains.size(); ++c) {
        for (const auto& mu : chains[c]) {
            auto it = std::find(points.begin(), points.end(), mu);
            std::size_t idx;
            if (it == points.end()) {
                idx = points.size();
                points.push_back(mu);
            } else {
                idx = static_cast<std::size_t>(it - points.begin());
            }
            chain_points[c].push_back(idx);
        }
    }

    std::vector<std::optional<LoadProfile>> loads(points.size());
    parallel_for(points.size(), [&](std::size_t i) {
        try {
            loads[i] = solve_mes(game, points[i], config).loads;
        } catch (const ConvergenceError&) {
            loads[i] = std::nullopt;
        }
    });

    MonotonicityVerdict verdict;
    for (std::size_t i = 0; i < points.size(); ++i)
        if (!loads[i]) verdict.inconclusive.push_back(points[i]);

    for (std::size_t c = 0; c < chains.size(); ++c) {
        const auto& idx = chain_points[c];
        for (std::size_t i = 0; i + 1 < idx.size(); ++i) {
            const auto& a = loads[idx[i]];
            const auto& b = loads[idx[i + 1]];
            if (!a || !b) continue;
            for (std::size_t r = 0; r < game.num_resources(); ++r) {
                const double tol =
                    slack * (1.0 + std::max(std::abs((*a)[r]), std::abs((*b)[r])));
                if ((*b)[r] < (*a)[r] - tol) {
                    verdict.pass = false;
                    verdict.violations.push_back({points[idx[i]], points[idx[i + 1]], r,
                                                  (*a)[r], (*b)[r]});
                }
            }
        }
    }
    return verdict;
}

ComonotoneVerdict verify_comonotone(const std::vector<LoadSample>& samples,
                                    const std::vector<std::size_t>& subset,
                                    double slack) {
    ComonotoneVerdict verdict;
    for (std::size_t a = 0; a < samples.size(); ++a) {
        for (std::size_t b = a + 1; b < samples.size(); ++b) {
            for (std::size_t i = 0; i < subset.size(); ++i) {
                for (std::size_t j = i + 1; j < subset.size(); ++j) {
                    const double di = samples[a].second[subset[i]] -
                                      samples[b].second[subset[i]];
                    const double dj = samples[a].second[subset[j]] -
                                      samples[b].second[subset[j]];
                    if (di * dj < -slack) {
                        verdict.pass = false;
                        verdict.violation = {a, b, subset[i], subset[j], di * dj};
                        return verdict;
                    }
                }
            }
        }
    }
    return verdict;
}

ComonotoneRepresentation comonotone_representation(const std::vector<LoadSample>& samples,
                                                   const std::vector<std::size_t>& subset,
                                                   double slack) {
    ComonotoneRepresentation rep;
    rep.subset = subset;
    std::vector<std::size_t> order(samples.size());
    std::iota(order.begin(), order.end(), 0);
    std::vector<double> sums(samples.size(), 0.0);
    for (std::size_t a = 0; a < samples.size(); ++a)
        for (std::size_t r : subset) sums[a] += samples[a].second[r];
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return sums[a] < sums[b]; });

    rep.tables.assign(subset.size(), {});
    for (std::size_t k : order) {
        rep.sums.push_back(sums[k]);
        for (std::size_t i = 0; i < subset.size(); ++i)
            rep.tables[i].push_back(samples[k].second[subset[i]]);
    }
    for (std::size_t i = 0; i < subset.size(); ++i) {
        for (std::size_t k = 0; k + 1 < rep.sums.size(); ++k) {
            const double a = rep.tables[i][k], b = rep.tables[i][k + 1];
            const bool tied = std::abs(rep.sums[k + 1] - rep.sums[k]) <= slack;
            if ((tied && std::abs(b - a) > slack) || (!tied && b < a - slack))
                throw StructuralError(
                    "comonotone representation violated at resource index " +
                    std::to_string(subset[i]) + " between samples " +
                    std::to_string(order[k]) + " and " + std::to_string(order[k + 1]) +
                    " (verify_comonotone should have failed)");
        }
    }
    return rep;
}

OperatorVerdict verify_monotone_operator(const CongestionGame& game,
                                         const std::vector<DemandVector>& samples,
                                         double slack, const SolverConfig& config) {
    std::vector<std::vector<double>> lambdas(samples.size());
    parallel_for(samples.size(), [&](std::size_t i) {
        lambdas[i] = solve_beckmann(game, samples[i], config).commodity_costs;
    });
    OperatorVerdict verdict;
    verdict.min_inner_product = std::numeric_limits<double>::infinity();
    auto norm = [](const DemandVector& v) {
        double s = 0.0;
        for (double x : v) s += x * x;
        return std::sqrt(s);
    };
    for (std::size_t a = 0; a < samples.size(); ++a) {
        for (std::size_t b = a + 1; b < samples.size(); ++b) {
            double ip = 0.0;
            for (std::size_t h = 0; h < game.num_commodities(); ++h)
                ip += (lambdas[a][h] - lambdas[b][h]) * (samples[a][h] - samples[b][h]);
            verdict.min_inner_product = std::min(verdict.min_inner_product, ip);
            const double tol = slack * (1.0 + norm(samples[a]) + norm(samples[b]));
            if (ip < -tol && !verdict.violating_pair) {
                verdict.pass = false;
                verdict.violating_pair = {a, b};
            }
        }
    }
    if (samples.size() < 2) verdict.min_inner_product = 0.0;
    return verdict;
}

RegionSweepResult region_sweep(const CongestionGame& game, const SweepPlan& plan,
                               const SolverConfig& config, double tie_tol) {
    if (!game.singleton())
        throw StructuralError("region_sweep requires a singleton game");
    plan.check(game.num_commodities());

    const std::vector<DemandVector> points = grid_demands(plan.box, plan.resolution);
    const std::size_t total = points.size();

    RegionSweepResult result;
    result.rows.resize(total);
    std::vector<std::string> order_keys(total), regime_keys(total);
    parallel_for(total, [&](std::size_t p) {
        RegionSweepRow& row = result.rows[p];
        row.demand = points[p];
        try {
            const EquilibriumReport rep = solve_beckmann(game, points[p], config);
            const WeakOrderLabel label = classify_region(game, points[p], rep, tie_tol);
            row.lambda = rep.commodity_costs;
            row.loads = rep.loads;
            row.ok = true;
            order_keys[p] = label.key(game);
            regime_keys[p] = RegimeLabel{rep.active_regime}.key(game);
        } catch (const ConvergenceError&) {
            row.ok = false;
        }
    });

    for (std::size_t p = 0; p < total; ++p) {
        auto& row = result.rows[p];
        if (!row.ok) {
            ++result.failures;
            continue;
        }
        auto assign = [](std::vector<std::string>& legend, const std::string& key) {
            auto it = std::find(legend.begin(), legend.end(), key);
            if (it == legend.end()) {
                legend.push_back(key);
                return static_cast<int>(legend.size() - 1);
            }
            return static_cast<int>(it - legend.begin());
        };
        row.order_label = assign(result.order_legend, order_keys[p]);
        row.regime_label = assign(result.regime_legend, regime_keys[p]);
    }
    return result;
}

}  // namespace wardrop
