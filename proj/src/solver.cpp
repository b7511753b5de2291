#include "hypreg/solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <thread>

namespace hypreg {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

void envelope_min(std::span<const double> costs, std::span<const double> positions,
                  double weight, std::span<double> out, std::span<std::size_t> argmin) {
    const std::size_t m = costs.size();
    if (positions.size() != m || out.size() != m || (!argmin.empty() && argmin.size() != m))
        throw std::invalid_argument("envelope_min: size mismatch");
    if (!(weight > 0.0)) throw std::invalid_argument("envelope_min: weight must be positive");

    auto value = [&](std::size_t j, std::size_t k) {
        const double d = positions[k] - positions[j];
        return costs[j] + weight * (d * d);
    };

    // v: parabola sources on the envelope; z: boundaries between them.
    std::vector<std::size_t> v;
    std::vector<double> z;
    v.reserve(m);
    z.reserve(m + 1);
    for (std::size_t q = 0; q < m; ++q) {
        if (!std::isfinite(costs[q])) continue;
        if (v.empty()) {
            v.push_back(q);
            z.assign({-kInf, kInf});
            continue;
        }
        const double fq = costs[q] + weight * positions[q] * positions[q];
        double s = 0.0;
        for (;;) {
            const std::size_t p = v.back();
            const double fp = costs[p] + weight * positions[p] * positions[p];
            s = (fq - fp) / (2.0 * weight * (positions[q] - positions[p]));
            if (v.size() > 1 && s <= z[v.size() - 1]) {
                v.pop_back();
                z.pop_back();
            } else {
                break;
            }
        }
        z.back() = s;
        v.push_back(q);
        z.push_back(kInf);
    }

    if (v.empty()) {
        std::fill(out.begin(), out.end(), kInf);
        if (!argmin.empty()) std::fill(argmin.begin(), argmin.end(), m);
        return;
    }

    std::size_t e = 0;
    for (std::size_t k = 0; k < m; ++k) {
        while (z[e + 1] < positions[k]) ++e;
        // Intersections are rounded; settle near-ties against the neighbours
        // with the exact kernel expression.
        std::size_t best = v[e];
        double best_value = value(best, k);
        if (e > 0) {
            const double left = value(v[e - 1], k);
            if (left <= best_value) {
                best = v[e - 1];
                best_value = left;
            }
        }
        if (e + 1 < v.size()) {
            const double right = value(v[e + 1], k);
            if (right < best_value) {
                best = v[e + 1];
                best_value = right;
            }
        }
        out[k] = best_value;
        if (!argmin.empty()) argmin[k] = best;
    }
}

std::vector<double> envelope_min(std::span<const double> costs,
                                 std::span<const double> positions, double weight) {
    std::vector<double> out(costs.size());
    envelope_min(costs, positions, weight, out);
    return out;
}

std::vector<double> uniform_levels(double x_max, std::size_t count) {
    if (count < 2) throw std::invalid_argument("level count must be at least 2");
    std::vector<double> levels(count);
    const auto denom = static_cast<double>(count - 1);
    for (std::size_t k = 0; k < count; ++k) levels[k] = x_max * static_cast<double>(k) / denom;
    return levels;
}

TikhonovProblem::TikhonovProblem(CylinderField data, double alpha, std::size_t level_count)
    : data_(std::move(data)),
      alpha_(alpha),
      level_count_(level_count == 0 ? data_.grid().n_x() + 1 : level_count) {
    if (!(alpha > 0.0) || !std::isfinite(alpha))
        throw std::invalid_argument("TikhonovProblem invariant violated: alpha > 0");
    if (level_count_ < 2)
        throw std::invalid_argument("TikhonovProblem invariant violated: level count m >= 2");
}

ObjectiveParts evaluate_objective(const DataCostTable& table, double alpha,
                                  std::span<const double> values) {
    double fit = 0.0;
    for (std::size_t i = 0; i < values.size(); ++i) fit += table.evaluate(i, values[i]);
    const double reg = periodic_h1_squared(values, table.grid().h_t());
    return {fit + alpha * reg, fit, reg};
}

TikhonovSolver::TikhonovSolver(const CylinderField& data, std::size_t level_count,
                               SolveOptions options)
    : grid_(data.grid()),
      table_(data),
      levels_(uniform_levels(data.grid().x_max(),
                             level_count == 0 ? data.grid().n_x() + 1 : level_count)),
      options_(options) {
    const std::size_t m = levels_.size();
    level_costs_.resize(grid_.n_t() * m);
    for (std::size_t i = 0; i < grid_.n_t(); ++i)
        for (std::size_t k = 0; k < m; ++k) level_costs_[i * m + k] = table_.evaluate(i, levels_[k]);
}

double TikhonovSolver::conditioned_pass(std::size_t first, double weight,
                                        std::vector<std::size_t>* assignment) const {
    const std::size_t n = grid_.n_t();
    const std::size_t m = levels_.size();
    const double* cost = level_costs_.data();
    const double anchor = levels_[first];

    std::vector<double> cur(m), next(m);
    std::vector<std::size_t> back;
    if (assignment) back.resize(n * m);

    const double base = cost[first];
    for (std::size_t k = 0; k < m; ++k) {
        const double d = levels_[k] - anchor;
        cur[k] = base + weight * (d * d) + cost[m + k];
    }
    for (std::size_t i = 2; i < n; ++i) {
        std::span<std::size_t> arg;
        if (assignment) arg = std::span<std::size_t>(back).subspan(i * m, m);
        envelope_min(cur, levels_, weight, next, arg);
        const double* row = cost + i * m;
        for (std::size_t k = 0; k < m; ++k) next[k] += row[k];
        std::swap(cur, next);
    }

    double best = kInf;
    std::size_t last = 0;
    for (std::size_t k = 0; k < m; ++k) {
        const double d = anchor - levels_[k];
        const double total = cur[k] + weight * (d * d);
        if (total < best) {
            best = total;
            last = k;
        }
    }

    if (assignment) {
        assignment->assign(n, 0);
        (*assignment)[n - 1] = last;
        for (std::size_t i = n - 1; i >= 2; --i) (*assignment)[i - 1] = back[i * m + (*assignment)[i]];
        (*assignment)[0] = first;
    }
    return best;
}

double TikhonovSolver::open_chain_pass(double weight, std::vector<std::size_t>& assignment) const {
    const std::size_t n = grid_.n_t();
    const std::size_t m = levels_.size();
    const double* cost = level_costs_.data();

    std::vector<double> cur(cost, cost + m), next(m);
    std::vector<std::size_t> back(n * m);
    for (std::size_t i = 1; i < n; ++i) {
        envelope_min(cur, levels_, weight, next, std::span<std::size_t>(back).subspan(i * m, m));
        const double* row = cost + i * m;
        for (std::size_t k = 0; k < m; ++k) next[k] += row[k];
        std::swap(cur, next);
    }
    const auto last = static_cast<std::size_t>(std::min_element(cur.begin(), cur.end()) - cur.begin());
    assignment.assign(n, 0);
    assignment[n - 1] = last;
    for (std::size_t i = n - 1; i >= 1; --i) assignment[i - 1] = back[i * m + assignment[i]];
    return cur[last];
}

SolveReport TikhonovSolver::make_report(std::vector<double> values, double alpha,
                                        std::size_t restarts, bool refined) const {
    const auto parts = evaluate_objective(table_, alpha, values);
    SolveReport report{Curve(grid_, std::move(values)), parts.objective, parts.misfit,
                       parts.regularizer, restarts, refined};
    return report;
}

SolveReport TikhonovSolver::solve(double alpha) const {
    if (!(alpha > 0.0) || !std::isfinite(alpha))
        throw std::invalid_argument("solve: alpha must be positive");
    const double weight = alpha / grid_.h_t();
    const std::size_t m = levels_.size();
    std::vector<std::size_t> assignment;
    std::size_t restarts = 0;

    if (options_.fast_cycle) {
        open_chain_pass(weight, assignment);
        const std::size_t first = assignment[0];
        conditioned_pass(first, weight, &assignment);
        restarts = 1;
    } else {
        std::vector<double> by_first(m);
        unsigned workers = options_.threads != 0 ? options_.threads
                                                 : std::max(1u, std::thread::hardware_concurrency());
        workers = static_cast<unsigned>(std::min<std::size_t>(workers, m));
        if (workers <= 1) {
            for (std::size_t a = 0; a < m; ++a) by_first[a] = conditioned_pass(a, weight, nullptr);
        } else {
            std::vector<std::thread> pool;
            pool.reserve(workers);
            for (unsigned w = 0; w < workers; ++w)
                pool.emplace_back([&, w] {
                    for (std::size_t a = w; a < m; a += workers)
                        by_first[a] = conditioned_pass(a, weight, nullptr);
                });
            for (auto& t : pool) t.join();
        }
        const auto first = static_cast<std::size_t>(
            std::min_element(by_first.begin(), by_first.end()) - by_first.begin());
        conditioned_pass(first, weight, &assignment);
        restarts = m;
    }

    std::vector<double> values(assignment.size());
    for (std::size_t i = 0; i < values.size(); ++i) values[i] = levels_[assignment[i]];
    return make_report(std::move(values), alpha, restarts, false);
}

SolveReport TikhonovSolver::refine(const SolveReport& start, double alpha,
                                   std::size_t max_sweeps) const {
    require_same_grid(start.minimizer.grid(), grid_);
    if (!(alpha > 0.0)) throw std::invalid_argument("refine: alpha must be positive");
    const std::size_t n = grid_.n_t();
    const double x_max = grid_.x_max();
    const double weight = alpha / grid_.h_t();
    std::vector<double> y(start.minimizer.values().begin(), start.minimizer.values().end());

    auto slice = [&](std::size_t i, std::size_t prev, std::size_t next, double v) {
        const double a = v - y[prev];
        const double b = y[next] - v;
        return table_.evaluate(i, v) + weight * (a * a + b * b);
    };

    double total = evaluate_objective(table_, alpha, y).objective;
    for (std::size_t sweep = 0; sweep < max_sweeps; ++sweep) {
        double gain = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const std::size_t prev = grid_.wrap(static_cast<std::ptrdiff_t>(i) - 1);
            const std::size_t next = grid_.wrap(static_cast<std::ptrdiff_t>(i) + 1);
            const double current = slice(i, prev, next, y[i]);
            const double mu = 0.5 * (y[prev] + y[next]);
            // Outside |v - mu| <= S / (2W) the quadratic dominates any linear descent.
            const double reach = table_.max_abs_slope(i) / (2.0 * weight);
            const double lo = std::clamp(mu - reach, 0.0, x_max);
            const double hi = std::clamp(mu + reach, 0.0, x_max);
            const std::size_t j_lo = table_.cell_below(lo);
            const std::size_t j_hi = std::min(table_.cell_below(hi) + 1, grid_.n_x() - 1);

            double best = y[i];
            double best_value = current;
            for (std::size_t j = j_lo; j <= j_hi; ++j) {
                const double stationary = mu - table_.slope(i, j) / (4.0 * weight);
                const double v = std::clamp(stationary, grid_.boundary(j), grid_.boundary(j + 1));
                const double f = slice(i, prev, next, v);
                if (f < best_value) {
                    best_value = f;
                    best = v;
                }
            }
            if (best_value < current) {
                gain += current - best_value;
                y[i] = best;
            }
        }
        total -= gain;
        if (gain <= 1e-12 * std::max(std::abs(total), std::numeric_limits<double>::min())) break;
    }
    return make_report(std::move(y), alpha, start.restarts_used, true);
}

SolveReport solve(const TikhonovProblem& problem, SolveOptions options) {
    return TikhonovSolver(problem.data(), problem.level_count(), options).solve(problem.alpha());
}

SolveReport refine(const SolveReport& report, const TikhonovProblem& problem,
                   std::size_t max_sweeps) {
    return TikhonovSolver(problem.data(), problem.level_count())
        .refine(report, problem.alpha(), max_sweeps);
}

std::vector<SolveReport> continuation_solve(const TikhonovProblem& problem,
                                            std::span<const double> alphas, SolveOptions options) {
    if (alphas.empty()) throw std::invalid_argument("continuation_solve: empty alpha path");
    for (std::size_t k = 0; k < alphas.size(); ++k) {
        if (!(alphas[k] > 0.0) || !std::isfinite(alphas[k]))
            throw std::invalid_argument("continuation_solve: alphas must be positive");
        if (k > 0 && !(alphas[k] < alphas[k - 1]))
            throw std::invalid_argument("continuation_solve: alphas must be strictly descending");
    }
    const TikhonovSolver solver(problem.data(), problem.level_count(), options);
    std::vector<SolveReport> reports;
    reports.reserve(alphas.size());
    for (double a : alphas) reports.push_back(solver.solve(a));
    return reports;
}

}  // namespace hypreg
