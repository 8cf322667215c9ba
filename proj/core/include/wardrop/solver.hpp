#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

#include "wardrop/game.hpp"

namespace wardrop {

struct SolverConfig {
    double gap_tol = 1e-8;             // relative Frank-Wolfe duality gap
    std::size_t max_iterations = 200000;
    double ladder_eps0 = 1e-2;         // first Tikhonov rung
    double ladder_decay = 0.25;
    double ladder_load_tol = 1e-7;     // max-norm load change that stops the ladder
    std::size_t ladder_max_rungs = 12;
    double active_tol = 1e-6;          // relative, for active strategies/resources
    int line_search_iters = 60;
    bool pairwise_refine = true;       // strategy-swap refinement between FW steps

    void check() const {
        if (gap_tol <= 0 || ladder_eps0 <= 0 || ladder_load_tol <= 0 || active_tol <= 0)
            throw std::invalid_argument("solver tolerances must be > 0");
        if (ladder_decay <= 0 || ladder_decay >= 1)
            throw std::invalid_argument("ladder decay must be in (0,1)");
    }
};

struct EquilibriumReport {
    LoadProfile loads;
    FlowProfile flow;
    std::vector<double> resource_costs;                    // tau_r = c_r(x_r)
    std::vector<double> commodity_costs;                   // lambda_h
    std::vector<std::vector<std::size_t>> active_regime;   // rho_h, sorted resource indices
    double beckmann_value = 0.0;
    double gap = 0.0;                                      // achieved relative gap
    std::size_t iterations = 0;
    bool mes_selected = false;
    bool ladder_warning = false;
};

/// Iteration budget exhausted before the gap tolerance; carries the best iterate.
class ConvergenceError : public std::runtime_error {
public:
    ConvergenceError(const std::string& what, EquilibriumReport best)
        : std::runtime_error(what), best_iterate(std::move(best)) {}
    EquilibriumReport best_iterate;
};

/// Wardrop equilibrium via Beckmann-potential minimization with Frank-Wolfe.
/// The linear oracle picks, per commodity, the cheapest strategy at the
/// current loads (lowest index on ties); steps use exact bisection line
/// search, interleaved with strategy-swap refinement sweeps that drive the
/// gap to tolerance at a linear rate.
EquilibriumReport solve_beckmann(const CongestionGame& game, const DemandVector& demand,
                                 const SolverConfig& config = {});
EquilibriumReport solve_beckmann(const CongestionGame& game, const DemandVector& demand,
                                 const SolverConfig& config, const FlowProfile& start);

/// Minimal-norm equilibrium selection: solves a geometric ladder of Tikhonov
/// regularized problems (resource cost c_r(x) + 2*eps*x), warm-starting each
/// rung, until successive loads stabilize. The limit is the monotone
/// equilibrium selection for singleton and product-union games.
EquilibriumReport solve_mes(const CongestionGame& game, const DemandVector& demand,
                            const SolverConfig& config = {});

/// Objective of the dual program: sum_r C*_r(tau_r) - sum_h mu_h min_s sum_{r in s} tau_r.
/// Minimized exactly at the equilibrium resource costs, where it equals -V.
double dual_value(const CongestionGame& game, const DemandVector& demand,
                  const std::vector<double>& tau);

struct WardropViolation {
    std::size_t commodity;
    std::size_t strategy;
    double cost;
    double lambda;
    double flow;
};

struct WardropCheck {
    bool pass = true;
    double max_residual = 0.0;
    std::vector<WardropViolation> violations;
};

/// Used strategies must cost lambda_h (within tol, relative) and every
/// strategy must cost at least lambda_h - tol.
WardropCheck verify_wardrop(const CongestionGame& game, const DemandVector& demand,
                            const EquilibriumReport& report, double tol);

/// |central difference of the Beckmann value V along e_h minus lambda_h|,
/// per commodity. Numerical certificate that grad V = lambda.
std::vector<double> beckmann_gradient_check(const CongestionGame& game,
                                            const DemandVector& demand, double step);

/// Random feasible flow (per-commodity random simplex split), for
/// uniqueness experiments and equivalence checks.
FlowProfile random_feasible_flow(const CongestionGame& game, const DemandVector& demand,
                                 unsigned seed);

}  // namespace wardrop
