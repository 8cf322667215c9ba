#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "wardrop/game.hpp"
#include "wardrop/singleton.hpp"
#include "wardrop/solver.hpp"

namespace wardrop {

/// Demand-space sampling plan. Without `chain_axis`, axis chains are laid
/// over the full grid (every commodity in turn varies along its box edge
/// while the others sit on grid values). With `chain_axis`, a single chain
/// varies that commodity over its interval with the rest pinned at `base`.
struct SweepPlan {
    std::vector<std::pair<double, double>> box;  // per-commodity closed interval
    std::size_t resolution = 2;                  // grid points per axis
    std::optional<std::size_t> chain_axis;
    DemandVector base;                           // fixed coordinates in chain mode
    unsigned seed = 0;                           // jitter seed
    double jitter = 0.0;                         // fraction of a cell, [0, 1)

    void check(std::size_t num_commodities) const;
};

struct MonotonicityViolation {
    DemandVector mu_from;
    DemandVector mu_to;
    std::size_t resource;
    double x_from;
    double x_to;
};

struct MonotonicityVerdict {
    bool pass = true;
    std::vector<MonotonicityViolation> violations;
    std::vector<DemandVector> inconclusive;  // solver failures, not violations
};

/// Checks that the minimal-norm selection has nondecreasing loads along every
/// demand chain of the plan, with slack scaled by the load magnitude.
MonotonicityVerdict verify_mes(const CongestionGame& game, const SweepPlan& plan,
                               double slack, const SolverConfig& config = {});

struct ComonotoneViolation {
    std::size_t sample_a, sample_b;
    std::size_t resource_a, resource_b;
    double product;
};

struct ComonotoneVerdict {
    bool pass = true;
    std::optional<ComonotoneViolation> violation;  // first found
};

using LoadSample = std::pair<DemandVector, LoadProfile>;

/// Pairwise product test: loads in `subset` must never move in opposite
/// directions between two samples (within -slack).
ComonotoneVerdict verify_comonotone(const std::vector<LoadSample>& samples,
                                    const std::vector<std::size_t>& subset, double slack);

/// Per-resource value tables over s = sum of subset loads; exists and is
/// nondecreasing exactly for comonotone families.
struct ComonotoneRepresentation {
    std::vector<double> sums;                     // sorted s values
    std::vector<std::size_t> subset;              // resource indices
    std::vector<std::vector<double>> tables;      // tables[i][k] = x_{subset[i]}(sums[k])
};

/// Throws StructuralError naming the resource and sample pair when the
/// representation does not exist (callers should verify_comonotone first).
ComonotoneRepresentation comonotone_representation(const std::vector<LoadSample>& samples,
                                                   const std::vector<std::size_t>& subset,
                                                   double slack);

struct OperatorVerdict {
    bool pass = true;
    double min_inner_product = 0.0;
    std::optional<std::pair<std::size_t, std::size_t>> violating_pair;
};

/// <lambda(mu1) - lambda(mu2), mu1 - mu2> >= -slack*(1+|mu1|+|mu2|) for all
/// sample pairs.
OperatorVerdict verify_monotone_operator(const CongestionGame& game,
                                         const std::vector<DemandVector>& samples,
                                         double slack, const SolverConfig& config = {});

struct RegionSweepRow {
    DemandVector demand;
    std::vector<double> lambda;
    LoadProfile loads;
    int order_label = -1;
    int regime_label = -1;
    bool ok = false;
};

struct RegionSweepResult {
    std::vector<RegionSweepRow> rows;        // row-major over the grid
    std::vector<std::string> order_legend;   // label id -> description
    std::vector<std::string> regime_legend;
    std::size_t failures = 0;
};

/// Solves on the grid of the plan's box, classifies each point into its cost
/// order and active regime, and enumerates the distinct labels in first-seen
/// order. Singleton games only.
RegionSweepResult region_sweep(const CongestionGame& game, const SweepPlan& plan,
                               const SolverConfig& config = {}, double tie_tol = 1e-6);

/// Worker count for grid sweeps; honors the WARDROP_KIT_THREADS cap.
std::size_t sweep_threads();

/// Row-major grid over a demand box (axis 0 fastest). Degenerate intervals
/// collapse to a single value.
std::vector<DemandVector> grid_demands(const std::vector<std::pair<double, double>>& box,
                                       std::size_t resolution);

}  // namespace wardrop
