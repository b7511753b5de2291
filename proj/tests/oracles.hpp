#pragma once

// Independent reference computations used by the tests. None of these call
// into the library's numerical kernels.

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numbers>
#include <random>
#include <vector>

#include "hypreg/forward.hpp"
#include "hypreg/geometry.hpp"
#include "hypreg/solver.hpp"

namespace oracle {

inline constexpr double kPi = std::numbers::pi;

// Piecewise-linear interpolant of periodic node values at angle t.
inline double interpolate(const std::vector<double>& v, double t) {
    const double h = 2.0 * kPi / static_cast<double>(v.size());
    const double pos = t / h;
    const auto i = static_cast<std::size_t>(std::floor(pos)) % v.size();
    const double frac = pos - std::floor(pos);
    return v[i] + frac * (v[(i + 1) % v.size()] - v[i]);
}

// Composite Gauss-Legendre (3 points) on `pieces` equal subintervals of each
// node interval; f is smooth inside each subinterval except at sign changes.
inline double integrate_circle(const std::function<double(double)>& f, std::size_t n_t, std::size_t pieces) {
    static const double x[3] = {-std::sqrt(0.6), 0.0, std::sqrt(0.6)};
    static const double w[3] = {5.0 / 9.0, 8.0 / 9.0, 5.0 / 9.0};
    const double h = 2.0 * kPi / static_cast<double>(n_t * pieces);
    double sum = 0.0;
    for (std::size_t k = 0; k < n_t * pieces; ++k) {
        const double mid = (static_cast<double>(k) + 0.5) * h;
        for (int q = 0; q < 3; ++q) sum += w[q] * f(mid + 0.5 * h * x[q]);
    }
    return 0.5 * h * sum;
}

inline double l1_quadrature(const std::vector<double>& v, std::size_t pieces = 64) {
    return integrate_circle([&](double t) { return std::abs(interpolate(v, t)); }, v.size(), pieces);
}

// g_i(y) by direct integration over the radial cells of row i.
inline double cost_profile(const hypreg::CylinderField& u, std::size_t i, double y) {
    const auto& g = u.grid();
    double total = 0.0;
    for (std::size_t j = 0; j < g.n_x(); ++j) {
        const double b0 = g.x_max() * static_cast<double>(j) / static_cast<double>(g.n_x());
        const double b1 = g.x_max() * static_cast<double>(j + 1) / static_cast<double>(g.n_x());
        const double below = std::clamp(y, b0, b1) - b0;
        const double above = b1 - std::clamp(y, b0, b1);
        const double v = u.at(i, j);
        total += below * (1.0 - v) * (1.0 - v) + above * v * v;
    }
    return g.h_t() * total;
}

inline std::vector<double> naive_min_convolution(const std::vector<double>& costs,
                                                 const std::vector<double>& positions, double weight) {
    std::vector<double> out(costs.size(), std::numeric_limits<double>::infinity());
    for (std::size_t k = 0; k < costs.size(); ++k)
        for (std::size_t j = 0; j < costs.size(); ++j) {
            if (!std::isfinite(costs[j])) continue;
            const double d = positions[k] - positions[j];
            out[k] = std::min(out[k], costs[j] + weight * (d * d));
        }
    return out;
}

struct Enumerated {
    double objective;
    std::vector<double> values;
};

// Exhaustive search over all level assignments, each scored with the
// library's canonical objective so optimal values compare bit-for-bit.
inline Enumerated enumerate_minimum(const hypreg::DataCostTable& table, double alpha,
                                    const std::vector<double>& levels, std::size_t n_t) {
    const std::size_t m = levels.size();
    std::vector<std::size_t> idx(n_t, 0);
    std::vector<double> values(n_t);
    Enumerated best{std::numeric_limits<double>::infinity(), {}};
    while (true) {
        for (std::size_t i = 0; i < n_t; ++i) values[i] = levels[idx[i]];
        const double obj = hypreg::evaluate_objective(table, alpha, values).objective;
        if (obj < best.objective) best = {obj, values};
        std::size_t pos = 0;
        while (pos < n_t && ++idx[pos] == m) idx[pos++] = 0;
        if (pos == n_t) break;
    }
    return best;
}

// Same search, but scored with the direct-integration profile: independent
// of both the table and the canonical evaluation.
inline double enumerate_minimum_direct(const hypreg::CylinderField& u, double alpha,
                                       const std::vector<double>& levels) {
    const std::size_t n_t = u.grid().n_t();
    const std::size_t m = levels.size();
    const double h = u.grid().h_t();
    std::vector<std::size_t> idx(n_t, 0);
    double best = std::numeric_limits<double>::infinity();
    while (true) {
        double obj = 0.0;
        for (std::size_t i = 0; i < n_t; ++i) {
            const double a = levels[idx[i]];
            const double b = levels[idx[(i + 1) % n_t]];
            obj += cost_profile(u, i, a) + alpha * (b - a) * (b - a) / h;
        }
        best = std::min(best, obj);
        std::size_t pos = 0;
        while (pos < n_t && ++idx[pos] == m) idx[pos++] = 0;
        if (pos == n_t) break;
    }
    return best;
}

inline std::vector<double> random_values(std::mt19937_64& rng, std::size_t n, double lo, double hi) {
    std::uniform_real_distribution<double> d(lo, hi);
    std::vector<double> v(n);
    for (auto& x : v) x = d(rng);
    return v;
}

inline hypreg::CylinderField random_field(std::mt19937_64& rng, const hypreg::PeriodicGrid& g, double lo = -0.2,
                                          double hi = 1.2) {
    return hypreg::CylinderField(g, random_values(rng, g.n_t() * g.n_x(), lo, hi));
}

// Smooth field: a blurred hypograph with a sinusoidal interface.
inline hypreg::CylinderField smooth_field(const hypreg::PeriodicGrid& g, double phase) {
    std::vector<double> cells(g.n_t() * g.n_x());
    for (std::size_t i = 0; i < g.n_t(); ++i)
        for (std::size_t j = 0; j < g.n_x(); ++j) {
            const double t = g.angle(i);
            const double x = g.cell_center(j);
            const double edge = 0.5 * g.x_max() + 0.2 * g.x_max() * std::sin(t + phase);
            cells[i * g.n_x() + j] = 0.5 * (1.0 - std::tanh((x - edge) / (0.1 * g.x_max())));
        }
    return hypreg::CylinderField(g, std::move(cells));
}

}  // namespace oracle
