#include "hypreg/forward.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace hypreg {

CylinderField::CylinderField(PeriodicGrid grid, std::vector<double> cells)
    : grid_(grid), cells_(std::move(cells)) {
    if (cells_.size() != grid_.n_t() * grid_.n_x())
        throw std::invalid_argument("CylinderField invariant violated: expected n_t * n_x cells");
    for (double v : cells_)
        if (!std::isfinite(v))
            throw std::invalid_argument("CylinderField invariant violated: non-finite entry");
}

CylinderField CylinderField::filled(const PeriodicGrid& grid, double value) {
    return CylinderField(grid, std::vector<double>(grid.n_t() * grid.n_x(), value));
}

double field_distance_squared(const CylinderField& a, const CylinderField& b) {
    require_same_grid(a.grid(), b.grid());
    double sum = 0.0;
    const auto ca = a.cells();
    const auto cb = b.cells();
    for (std::size_t k = 0; k < ca.size(); ++k) {
        const double d = ca[k] - cb[k];
        sum += d * d;
    }
    return a.grid().h_t() * a.grid().h_x() * sum;
}

namespace {

// Mean over y uniform in [lo, hi] of clamp((y - b0) / (b1 - b0), 0, 1).
double mean_coverage(double lo, double hi, double b0, double b1) {
    const double width = b1 - b0;
    auto ramp = [&](double y) { return std::clamp((y - b0) / width, 0.0, 1.0); };
    if (!(hi > lo)) return ramp(lo);
    const double p1 = std::clamp(b0, lo, hi);
    const double p2 = std::clamp(b1, lo, hi);
    const double linear = (p2 - p1) * ramp(0.5 * (p1 + p2));
    const double full = hi - p2;
    return (linear + full) / (hi - lo);
}

}  // namespace

CylinderField apply_forward(const Curve& c) {
    const PeriodicGrid& g = c.grid();
    const std::size_t n_t = g.n_t();
    const std::size_t n_x = g.n_x();
    std::vector<double> cells(n_t * n_x, 0.0);

    for (std::size_t i = 0; i < n_t; ++i) {
        const double y = c[i];
        const double left = 0.5 * (c[g.wrap(static_cast<std::ptrdiff_t>(i) - 1)] + y);
        const double right = 0.5 * (y + c[g.wrap(static_cast<std::ptrdiff_t>(i) + 1)]);
        const double lo = std::min({left, y, right});
        const double hi = std::max({left, y, right});

        double* row = cells.data() + i * n_x;
        for (std::size_t j = 0; j < n_x; ++j) {
            const double b0 = g.boundary(j);
            const double b1 = g.boundary(j + 1);
            if (b1 <= lo) {
                row[j] = 1.0;
            } else if (b0 >= hi) {
                break;
            } else {
                row[j] = 0.5 * (mean_coverage(std::min(left, y), std::max(left, y), b0, b1) +
                                mean_coverage(std::min(y, right), std::max(y, right), b0, b1));
            }
        }
    }
    return CylinderField(g, std::move(cells));
}

namespace {

double trapezoid_area(std::span<const double> v, double h) {
    double sum = 0.0;
    for (std::size_t i = 0; i < v.size(); ++i) sum += 0.5 * (v[i] + v[(i + 1) % v.size()]);
    return h * sum;
}

// Integral of min(a, b) for piecewise-linear periodic a, b.
double area_of_minimum(std::span<const double> a, std::span<const double> b, double h) {
    const std::size_t n = a.size();
    double sum = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t k = (i + 1) % n;
        const double d0 = a[i] - b[i];
        const double d1 = a[k] - b[k];
        const double m0 = std::min(a[i], b[i]);
        const double m1 = std::min(a[k], b[k]);
        if ((d0 > 0.0 && d1 < 0.0) || (d0 < 0.0 && d1 > 0.0)) {
            const double tau = d0 / (d0 - d1);
            const double cross = a[i] + tau * (a[k] - a[i]);
            sum += 0.5 * (tau * (m0 + cross) + (1.0 - tau) * (cross + m1));
        } else {
            sum += 0.5 * (m0 + m1);
        }
    }
    return h * sum;
}

}  // namespace

double fidelity_exact(const Curve& a, const Curve& b) {
    require_same_grid(a.grid(), b.grid());
    const double h = a.grid().h_t();
    const double sym = trapezoid_area(a.values(), h) + trapezoid_area(b.values(), h) -
                       2.0 * area_of_minimum(a.values(), b.values(), h);
    return std::max(sym, 0.0);
}

double lp_distance(const Curve& a, const Curve& b, double p) {
    if (!(p >= 1.0) || !std::isfinite(p))
        throw std::invalid_argument("lp_distance requires finite p >= 1");
    // |chi_a - chi_b|^p = |chi_a - chi_b|, so the p-th power is the symmetric
    // difference measure for every p.
    return std::pow(fidelity_exact(a, b), 1.0 / p);
}

DataCostTable::DataCostTable(const CylinderField& u)
    : grid_(u.grid()),
      n_x_(u.grid().n_x()),
      values_(u.grid().n_t() * (u.grid().n_x() + 1)),
      slopes_(u.grid().n_t() * u.grid().n_x()),
      max_slope_(u.grid().n_t()) {
    const double h_t = grid_.h_t();
    const double h_x = grid_.h_x();
    std::vector<double> suffix(n_x_ + 1);
    for (std::size_t i = 0; i < grid_.n_t(); ++i) {
        const auto row = u.row(i);
        suffix[n_x_] = 0.0;
        for (std::size_t j = n_x_; j-- > 0;) suffix[j] = suffix[j + 1] + row[j] * row[j] * h_x;

        double prefix = 0.0;
        double* out = values_.data() + i * (n_x_ + 1);
        double* slope = slopes_.data() + i * n_x_;
        double steepest = 0.0;
        for (std::size_t j = 0; j <= n_x_; ++j) {
            out[j] = h_t * (prefix + suffix[j]);
            if (j < n_x_) {
                const double miss = 1.0 - row[j];
                prefix += miss * miss * h_x;
                slope[j] = h_t * (1.0 - 2.0 * row[j]);
                steepest = std::max(steepest, std::abs(slope[j]));
            }
        }
        max_slope_[i] = steepest;
    }
}

std::size_t DataCostTable::locate(double y) const {
    const double h_x = grid_.h_x();
    auto j = static_cast<std::ptrdiff_t>(std::floor(y / h_x));
    j = std::clamp<std::ptrdiff_t>(j, 0, static_cast<std::ptrdiff_t>(n_x_) - 1);
    auto cell = static_cast<std::size_t>(j);
    if (cell > 0 && y < grid_.boundary(cell)) --cell;
    if (cell + 1 < n_x_ && y >= grid_.boundary(cell + 1)) ++cell;
    return cell;
}

double DataCostTable::evaluate(std::size_t i, double y) const {
    if (y <= 0.0) return breakpoint(i, 0);
    if (y >= grid_.x_max()) return breakpoint(i, n_x_);
    const std::size_t j = locate(y);
    const double b = grid_.boundary(j);
    if (y == b) return breakpoint(i, j);
    return breakpoint(i, j) + slope(i, j) * (y - b);
}

std::size_t DataCostTable::cell_below(double y) const {
    if (y <= 0.0) return 0;
    if (y >= grid_.x_max()) return n_x_ - 1;
    std::size_t j = locate(y);
    if (j > 0 && y == grid_.boundary(j)) --j;
    return j;
}

DataCostTable build_cost_table(const CylinderField& u) { return DataCostTable(u); }

double misfit(const Curve& c, const DataCostTable& table) {
    require_same_grid(c.grid(), table.grid());
    double sum = 0.0;
    for (std::size_t i = 0; i < c.size(); ++i) sum += table.evaluate(i, c[i]);
    return sum;
}

double misfit(const Curve& c, const CylinderField& u) {
    require_same_grid(c.grid(), u.grid());
    return misfit(c, DataCostTable(u));
}

std::vector<double> misfit_gradient(const Curve& c, const CylinderField& u) {
    require_same_grid(c.grid(), u.grid());
    const DataCostTable table(u);
    std::vector<double> grad(c.size());
    for (std::size_t i = 0; i < c.size(); ++i) grad[i] = table.slope(i, table.cell_below(c[i]));
    return grad;
}

}  // namespace hypreg
