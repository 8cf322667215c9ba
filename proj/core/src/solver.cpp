#include "wardrop/solver.hpp"

#include <algorithm>
#include <cmath>
#include <iterator>
#include <limits>
#include <random>

#include "wardrop/errors.hpp"

namespace wardrop {

namespace {

void check_demand(const CongestionGame& game, const DemandVector& demand) {
    if (demand.size() != game.num_commodities())
        throw StructuralError("demand has " + std::to_string(demand.size()) +
                              " entries, game has " +
                              std::to_string(game.num_commodities()) + " commodities");
    for (std::size_t h = 0; h < demand.size(); ++h)
        if (!(demand[h] >= 0.0))
            throw StructuralError("demand of commodity '" + game.commodities()[h].id +
                                  "' is negative or NaN");
}

// Frank-Wolfe state for one (possibly Tikhonov-shifted) Beckmann problem.
class FwSolver {
public:
    FwSolver(const CongestionGame& game, const DemandVector& demand,
             const SolverConfig& config, double eps)
        : game_(game), demand_(demand), config_(config), eps_(eps) {}

    // Runs until the relative gap drops below config.gap_tol. Returns the
    // iteration count; `flow` is updated in place.
    std::size_t run(FlowProfile& flow) {
        flow_ = &flow;
        loads_ = load_from_flow(game_, flow);
        std::size_t iter = 0;
        for (; iter < config_.max_iterations; ++iter) {
            if (relative_gap() <= config_.gap_tol) break;
            fw_step();
            if (config_.pairwise_refine) pairwise_sweep();
            if ((iter & 127u) == 127u) loads_ = load_from_flow(game_, *flow_);
        }
        loads_ = load_from_flow(game_, *flow_);
        last_gap_ = relative_gap();
        return iter;
    }

    double last_gap() const { return last_gap_; }

private:
    double cost(std::size_t r, double load) const {
        double c = game_.cost_at(r, load);
        if (eps_ > 0.0) c += 2.0 * eps_ * load;
        return c;
    }

    double strategy_cost_at(std::size_t h, std::size_t s) const {
        double total = 0.0;
        for (std::size_t r : game_.strategy(h, s)) total += cost(r, loads_[r]);
        return total;
    }

    // Cheapest strategy per commodity at the current loads; ties break to the
    // lowest index for reproducibility.
    void compute_oracle() {
        const std::size_t k = game_.num_commodities();
        best_.assign(k, 0);
        best_cost_.assign(k, 0.0);
        gap_abs_ = 0.0;
        double aon = 0.0;
        for (std::size_t h = 0; h < k; ++h) {
            double bc = std::numeric_limits<double>::infinity();
            std::size_t bs = 0;
            double used = 0.0;
            for (std::size_t s = 0; s < game_.num_strategies(h); ++s) {
                const double cs = strategy_cost_at(h, s);
                if (cs < bc) {
                    bc = cs;
                    bs = s;
                }
                used += (*flow_)[h][s] * cs;
            }
            best_[h] = bs;
            best_cost_[h] = bc;
            gap_abs_ += used - demand_[h] * bc;
            aon += demand_[h] * bc;
        }
        if (gap_abs_ < 0.0) gap_abs_ = 0.0;  // roundoff
        gap_denom_ = 1.0 + aon;
    }

    double relative_gap() {
        compute_oracle();
        return gap_abs_ / gap_denom_;
    }

    // Exact line search along flow direction v - f, where v routes every
    // commodity on its oracle strategy. The directional derivative is
    // nondecreasing, so bisection applies.
    void fw_step() {
        LoadProfile target(game_.num_resources(), 0.0);
        for (std::size_t h = 0; h < game_.num_commodities(); ++h) {
            if (demand_[h] == 0.0) continue;
            for (std::size_t r : game_.strategy(h, best_[h])) target[r] += demand_[h];
        }
        const std::size_t n = game_.num_resources();
        auto deriv = [&](double t) {
            double d = 0.0;
            for (std::size_t r = 0; r < n; ++r) {
                const double dr = target[r] - loads_[r];
                if (dr == 0.0) continue;
                d += cost(r, loads_[r] + t * dr) * dr;
            }
            return d;
        };
        double t = 1.0;
        if (deriv(0.0) >= 0.0) {
            t = 0.0;
        } else if (deriv(1.0) > 0.0) {
            double lo = 0.0, hi = 1.0;
            for (int i = 0; i < config_.line_search_iters; ++i) {
                const double mid = 0.5 * (lo + hi);
                (deriv(mid) > 0.0 ? hi : lo) = mid;
            }
            t = 0.5 * (lo + hi);
        }
        if (t == 0.0) return;
        for (std::size_t h = 0; h < game_.num_commodities(); ++h) {
            auto& fh = (*flow_)[h];
            for (std::size_t s = 0; s < fh.size(); ++s) {
                fh[s] *= (1.0 - t);
                if (s == best_[h]) fh[s] += t * demand_[h];
            }
        }
        for (std::size_t r = 0; r < n; ++r)
            loads_[r] += t * (target[r] - loads_[r]);
    }

    // One pass of strategy-swap refinement: per commodity, shift flow from
    // each overpriced used strategy onto the cheapest one, with exact line
    // search on the (monotone) swap derivative.
    void pairwise_sweep() {
        for (std::size_t h = 0; h < game_.num_commodities(); ++h) {
            if (demand_[h] == 0.0 || game_.num_strategies(h) < 2) continue;
            double bc = std::numeric_limits<double>::infinity();
            std::size_t bs = 0;
            for (std::size_t s = 0; s < game_.num_strategies(h); ++s) {
                const double cs = strategy_cost_at(h, s);
                if (cs < bc) {
                    bc = cs;
                    bs = s;
                }
            }
            for (std::size_t s = 0; s < game_.num_strategies(h); ++s) {
                if (s == bs) continue;
                double& fs = (*flow_)[h][s];
                if (fs <= 0.0) continue;
                if (strategy_cost_at(h, s) <= strategy_cost_at(h, bs)) continue;
                shift(h, s, bs, fs);
            }
        }
    }

    // Moves up to max_t units of commodity h flow from strategy `from` to
    // strategy `to`, minimizing the potential along the way.
    void shift(std::size_t h, std::size_t from, std::size_t to, double max_t) {
        const auto& sf = game_.strategy(h, from);
        const auto& st = game_.strategy(h, to);
        std::vector<std::size_t> gain, lose;  // resources entered / left
        std::set_difference(st.begin(), st.end(), sf.begin(), sf.end(),
                            std::back_inserter(gain));
        std::set_difference(sf.begin(), sf.end(), st.begin(), st.end(),
                            std::back_inserter(lose));
        if (gain.empty() && lose.empty()) return;
        auto deriv = [&](double t) {
            double d = 0.0;
            for (std::size_t r : gain) d += cost(r, loads_[r] + t);
            for (std::size_t r : lose) d -= cost(r, loads_[r] - t);
            return d;
        };
        double t = max_t;
        if (deriv(0.0) >= 0.0) return;
        if (deriv(max_t) > 0.0) {
            double lo = 0.0, hi = max_t;
            for (int i = 0; i < config_.line_search_iters; ++i) {
                const double mid = 0.5 * (lo + hi);
                (deriv(mid) > 0.0 ? hi : lo) = mid;
            }
            t = 0.5 * (lo + hi);
        }
        auto& fh = (*flow_)[h];
        fh[from] -= t;
        fh[to] += t;
        if (fh[from] < 1e-15 * (1.0 + demand_[h])) {
            fh[to] += fh[from];
            fh[from] = 0.0;
        }
        for (std::size_t r : gain) loads_[r] += t;
        for (std::size_t r : lose) loads_[r] -= t;
    }

    const CongestionGame& game_;
    const DemandVector& demand_;
    const SolverConfig& config_;
    double eps_;
    FlowProfile* flow_ = nullptr;
    LoadProfile loads_;
    std::vector<std::size_t> best_;
    std::vector<double> best_cost_;
    double gap_abs_ = 0.0;
    double gap_denom_ = 1.0;
    double last_gap_ = 0.0;
};

FlowProfile default_start(const CongestionGame& game, const DemandVector& demand) {
    FlowProfile f(game.num_commodities());
    for (std::size_t h = 0; h < f.size(); ++h) {
        f[h].assign(game.num_strategies(h), 0.0);
        f[h][0] = demand[h];
    }
    return f;
}

// Final report quantities are always taken against the unregularized costs.
EquilibriumReport build_report(const CongestionGame& game, const DemandVector& demand,
                               FlowProfile flow, const SolverConfig& config,
                               std::size_t iterations) {
    EquilibriumReport rep;
    rep.flow = std::move(flow);
    rep.loads = load_from_flow(game, rep.flow);
    rep.iterations = iterations;

    const std::size_t n = game.num_resources();
    rep.resource_costs.resize(n);
    for (std::size_t r = 0; r < n; ++r)
        rep.resource_costs[r] = game.cost_at(r, rep.loads[r]);

    rep.beckmann_value = 0.0;
    for (std::size_t r = 0; r < n; ++r)
        rep.beckmann_value += game.resources()[r].cost.antiderivative(rep.loads[r]);

    const std::size_t k = game.num_commodities();
    rep.commodity_costs.resize(k);
    rep.active_regime.resize(k);
    double gap_abs = 0.0, aon = 0.0;
    for (std::size_t h = 0; h < k; ++h) {
        double best = std::numeric_limits<double>::infinity();
        double used = 0.0;
        for (std::size_t s = 0; s < game.num_strategies(h); ++s) {
            double cs = 0.0;
            for (std::size_t r : game.strategy(h, s)) cs += rep.resource_costs[r];
            best = std::min(best, cs);
            used += rep.flow[h][s] * cs;
        }
        rep.commodity_costs[h] = best;
        gap_abs += used - demand[h] * best;
        aon += demand[h] * best;

        const double atol = config.active_tol * (1.0 + std::abs(best));
        std::vector<std::size_t> active;
        for (std::size_t s = 0; s < game.num_strategies(h); ++s) {
            double cs = 0.0;
            for (std::size_t r : game.strategy(h, s)) cs += rep.resource_costs[r];
            if (cs <= best + atol)
                active.insert(active.end(), game.strategy(h, s).begin(),
                              game.strategy(h, s).end());
        }
        std::sort(active.begin(), active.end());
        active.erase(std::unique(active.begin(), active.end()), active.end());
        rep.active_regime[h] = std::move(active);
    }
    rep.gap = std::max(gap_abs, 0.0) / (1.0 + aon);
    return rep;
}

}  // namespace

EquilibriumReport solve_beckmann(const CongestionGame& game, const DemandVector& demand,
                                 const SolverConfig& config) {
    return solve_beckmann(game, demand, config, default_start(game, demand));
}

EquilibriumReport solve_beckmann(const CongestionGame& game, const DemandVector& demand,
                                 const SolverConfig& config, const FlowProfile& start) {
    config.check();
    require_valid(game);
    check_demand(game, demand);
    if (!flow_feasible(game, demand, start))
        throw StructuralError("starting flow is not feasible for the demand");

    FlowProfile flow = start;
    FwSolver solver(game, demand, config, 0.0);
    const std::size_t iters = solver.run(flow);
    EquilibriumReport rep = build_report(game, demand, std::move(flow), config, iters);
    if (solver.last_gap() > config.gap_tol)
        throw ConvergenceError("Frank-Wolfe gap " + std::to_string(solver.last_gap()) +
                                   " above tolerance after " + std::to_string(iters) +
                                   " iterations",
                               std::move(rep));
    return rep;
}

EquilibriumReport solve_mes(const CongestionGame& game, const DemandVector& demand,
                            const SolverConfig& config) {
    config.check();
    require_valid(game);
    check_demand(game, demand);

    FlowProfile flow = default_start(game, demand);
    LoadProfile prev;
    std::size_t total_iters = 0;
    double eps = config.ladder_eps0;
    bool stabilized = false;
    double worst_gap = 0.0;
    for (std::size_t rung = 0; rung < config.ladder_max_rungs; ++rung) {
        FwSolver solver(game, demand, config, eps);
        total_iters += solver.run(flow);
        worst_gap = std::max(worst_gap, solver.last_gap());
        LoadProfile loads = load_from_flow(game, flow);
        if (!prev.empty()) {
            double diff = 0.0;
            for (std::size_t r = 0; r < loads.size(); ++r)
                diff = std::max(diff, std::abs(loads[r] - prev[r]));
            if (diff < config.ladder_load_tol) {
                stabilized = true;
                break;
            }
        }
        prev = std::move(loads);
        eps *= config.ladder_decay;
    }
    if (worst_gap > config.gap_tol)
        throw ConvergenceError("regularized rung failed to reach gap tolerance",
                               build_report(game, demand, std::move(flow), config,
                                            total_iters));

    EquilibriumReport rep =
        build_report(game, demand, std::move(flow), config, total_iters);
    rep.mes_selected = true;
    rep.ladder_warning = !stabilized;
    return rep;
}

double dual_value(const CongestionGame& game, const DemandVector& demand,
                  const std::vector<double>& tau) {
    if (tau.size() != game.num_resources())
        throw StructuralError("tau does not match resource count");
    check_demand(game, demand);
    double conj = 0.0;
    for (std::size_t r = 0; r < tau.size(); ++r)
        conj += game.resources()[r].cost.conjugate(tau[r]);
    double routed = 0.0;
    for (std::size_t h = 0; h < game.num_commodities(); ++h) {
        double best = std::numeric_limits<double>::infinity();
        for (std::size_t s = 0; s < game.num_strategies(h); ++s) {
            double cs = 0.0;
            for (std::size_t r : game.strategy(h, s)) cs += tau[r];
            best = std::min(best, cs);
        }
        routed += demand[h] * best;
    }
    return conj - routed;
}

WardropCheck verify_wardrop(const CongestionGame& game, const DemandVector& demand,
                            const EquilibriumReport& report, double tol) {
    if (report.loads.size() != game.num_resources() ||
        report.flow.size() != game.num_commodities())
        throw StructuralError("report dimensions do not match game");
    WardropCheck out;
    for (std::size_t h = 0; h < game.num_commodities(); ++h) {
        const double lambda = report.commodity_costs[h];
        const double scale = tol * (1.0 + std::abs(lambda));
        const double flow_tol = tol * (1.0 + demand[h]);
        for (std::size_t s = 0; s < game.num_strategies(h); ++s) {
            const double cs = strategy_cost(game, report.loads, h, s);
            const double f = report.flow[h][s];
            double residual = 0.0;
            if (f > flow_tol)
                residual = std::abs(cs - lambda);
            else
                residual = std::max(0.0, lambda - cs);
            out.max_residual = std::max(out.max_residual, residual);
            if (residual > scale) {
                out.pass = false;
                out.violations.push_back({h, s, cs, lambda, f});
            }
        }
    }
    return out;
}

std::vector<double> beckmann_gradient_check(const CongestionGame& game,
                                            const DemandVector& demand, double step) {
    if (!(step > 0.0)) throw std::invalid_argument("step must be > 0");
    for (double mu : demand)
        if (!(mu > step))
            throw std::invalid_argument(
                "beckmann_gradient_check needs strictly positive demand larger than step");
    SolverConfig tight;
    tight.gap_tol = 1e-12;
    const EquilibriumReport base = solve_beckmann(game, demand, tight);
    std::vector<double> residuals(game.num_commodities());
    for (std::size_t h = 0; h < game.num_commodities(); ++h) {
        DemandVector up = demand, down = demand;
        up[h] += step;
        down[h] -= step;
        const double vu = solve_beckmann(game, up, tight).beckmann_value;
        const double vd = solve_beckmann(game, down, tight).beckmann_value;
        residuals[h] = std::abs((vu - vd) / (2.0 * step) - base.commodity_costs[h]);
    }
    return residuals;
}

FlowProfile random_feasible_flow(const CongestionGame& game, const DemandVector& demand,
                                 unsigned seed) {
    check_demand(game, demand);
    std::mt19937 rng(seed);
    std::uniform_real_distribution<double> unif(0.01, 1.0);
    FlowProfile f(game.num_commodities());
    for (std::size_t h = 0; h < f.size(); ++h) {
        const std::size_t m = game.num_strategies(h);
        f[h].assign(m, 0.0);
        double total = 0.0;
        std::vector<double> w(m);
        for (auto& v : w) {
            v = unif(rng);
            total += v;
        }
        for (std::size_t s = 0; s < m; ++s) f[h][s] = demand[h] * w[s] / total;
    }
    return f;
}

}  // namespace wardrop
