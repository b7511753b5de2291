#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "hypreg/forward.hpp"
#include "hypreg/geometry.hpp"

namespace hypreg {

/// Min-convolution with a quadratic kernel,
///   out[k] = min_j costs[j] + weight * (positions[k] - positions[j])^2,
/// via the lower envelope of parabolas in O(m). `positions` must be strictly
/// increasing. Non-finite costs are treated as absent sources; if every cost
/// is absent the output is +inf. When `argmin` is non-null it receives the
/// minimizing source index (lowest index on ties).
void envelope_min(std::span<const double> costs, std::span<const double> positions,
                  double weight, std::span<double> out, std::span<std::size_t> argmin = {});

std::vector<double> envelope_min(std::span<const double> costs,
                                 std::span<const double> positions, double weight);

/// Heights 0 = y_0 < ... < y_{m-1} = x_max, uniformly spaced.
std::vector<double> uniform_levels(double x_max, std::size_t count);

/// Discrete Tikhonov functional
///   T(gamma) = sum_i g_i(gamma_i) + alpha * sum_i (gamma_{i+1} - gamma_i)^2 / h_t
/// over gamma_i in a uniform set of admissible heights.
class TikhonovProblem {
public:
    /// level_count == 0 selects n_x + 1 (the radial cell boundaries).
    TikhonovProblem(CylinderField data, double alpha, std::size_t level_count = 0);

    const CylinderField& data() const { return data_; }
    const PeriodicGrid& grid() const { return data_.grid(); }
    double alpha() const { return alpha_; }
    std::size_t level_count() const { return level_count_; }
    std::vector<double> levels() const { return uniform_levels(grid().x_max(), level_count_); }

private:
    CylinderField data_;
    double alpha_;
    std::size_t level_count_;
};

struct ObjectiveParts {
    double objective;
    double misfit;
    double regularizer;  // squared H^1_0 seminorm
};

/// Canonical evaluation used for every reported objective.
ObjectiveParts evaluate_objective(const DataCostTable& table, double alpha,
                                  std::span<const double> values);

struct SolveReport {
    Curve minimizer;
    double objective = 0.0;
    double misfit_part = 0.0;
    double regularizer_part = 0.0;
    std::size_t restarts_used = 0;
    bool refined = false;
};

struct SolveOptions {
    /// Two open-chain passes instead of one restart per level of node 0.
    /// Approximate: the result is feasible but not guaranteed optimal.
    bool fast_cycle = false;
    /// Worker threads for the conditioning restarts; 0 picks the hardware count.
    unsigned threads = 0;
};

/// Solver bound to one data field; the cost table is built once and shared
/// across regularization parameters.
class TikhonovSolver {
public:
    TikhonovSolver(const CylinderField& data, std::size_t level_count = 0, SolveOptions options = {});

    const DataCostTable& table() const { return table_; }
    const std::vector<double>& levels() const { return levels_; }

    /// Exact global minimizer over the level set (unless fast_cycle).
    SolveReport solve(double alpha) const;

    /// Cyclic coordinate descent on the continuous heights; every node update
    /// is the exact minimizer of its one-dimensional slice.
    SolveReport refine(const SolveReport& start, double alpha, std::size_t max_sweeps) const;

private:
    // Best cyclic objective with node 0 pinned to level `first`; fills
    // `assignment` when non-null.
    double conditioned_pass(std::size_t first, double weight,
                            std::vector<std::size_t>* assignment) const;
    double open_chain_pass(double weight, std::vector<std::size_t>& assignment) const;
    SolveReport make_report(std::vector<double> values, double alpha, std::size_t restarts,
                            bool refined) const;

    PeriodicGrid grid_;
    DataCostTable table_;
    std::vector<double> levels_;
    std::vector<double> level_costs_;  // n_t x m, g_i(y_k)
    SolveOptions options_;
};

SolveReport solve(const TikhonovProblem& problem, SolveOptions options = {});
SolveReport refine(const SolveReport& report, const TikhonovProblem& problem,
                   std::size_t max_sweeps);

/// One solve per alpha (strictly positive, strictly descending), sharing the
/// cost table. Reports are returned in input order.
std::vector<SolveReport> continuation_solve(const TikhonovProblem& problem,
                                            std::span<const double> alphas,
                                            SolveOptions options = {});

}  // namespace hypreg
