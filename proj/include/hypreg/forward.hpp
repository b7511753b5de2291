#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "hypreg/geometry.hpp"

namespace hypreg {

/// Scalar data on the half-cylinder: one row per angle node, one column per
/// radial cell. Entries are cell averages; above x_max the data are zero.
class CylinderField {
public:
    CylinderField(PeriodicGrid grid, std::vector<double> cells);

    static CylinderField filled(const PeriodicGrid& grid, double value);

    const PeriodicGrid& grid() const { return grid_; }
    std::span<const double> cells() const { return cells_; }
    std::span<const double> row(std::size_t i) const {
        return std::span<const double>(cells_).subspan(i * grid_.n_x(), grid_.n_x());
    }
    double at(std::size_t i, std::size_t j) const { return cells_[i * grid_.n_x() + j]; }

    bool operator==(const CylinderField&) const = default;

private:
    PeriodicGrid grid_;
    std::vector<double> cells_;
};

/// Rasterized ||a - b||^2_{L^2}: h_t * h_x * sum of squared cell differences.
double field_distance_squared(const CylinderField& a, const CylinderField& b);

/// F(gamma) rasterized: exact area fraction of hyp(gamma) inside each cell
/// [t_i - h_t/2, t_i + h_t/2] x [b_j, b_{j+1}] for the piecewise-linear curve.
CylinderField apply_forward(const Curve& c);

/// ||F(a) - F(b)||^2_{L^2}, computed as the measure of the symmetric
/// difference |hyp a| + |hyp b| - 2 |hyp min(a, b)|. Exact for the
/// piecewise-linear curves; equals norm_l1(a - b).
double fidelity_exact(const Curve& a, const Curve& b);

/// ||F(a) - F(b)||_{L^p} = ||a - b||_{L^1}^{1/p}. Throws for p < 1.
double lp_distance(const Curve& a, const Curve& b, double p);

/// Per-node misfit profiles
///   g_i(y) = h_t * ( int_0^y (1 - u_i)^2 dx + int_y^{x_max} u_i^2 dx )
/// with u_i piecewise constant on the radial cells. Each g_i is continuous
/// and piecewise linear with slope h_t * (1 - 2 u[i][j]) in cell j.
class DataCostTable {
public:
    explicit DataCostTable(const CylinderField& u);

    const PeriodicGrid& grid() const { return grid_; }

    /// g_i at height y; heights outside [0, x_max] are clamped.
    double evaluate(std::size_t i, double y) const;
    double breakpoint(std::size_t i, std::size_t j) const { return values_[i * (n_x_ + 1) + j]; }
    double slope(std::size_t i, std::size_t j) const { return slopes_[i * n_x_ + j]; }
    /// max_j |slope(i, j)|
    double max_abs_slope(std::size_t i) const { return max_slope_[i]; }

    /// Index of the cell containing y; a height on a boundary b_j (j > 0)
    /// belongs to the cell below it.
    std::size_t cell_below(double y) const;

private:
    std::size_t locate(double y) const;

    PeriodicGrid grid_;
    std::size_t n_x_;
    std::vector<double> values_;
    std::vector<double> slopes_;
    std::vector<double> max_slope_;
};

DataCostTable build_cost_table(const CylinderField& u);

/// sum_i g_i(c_i) for the table built from u.
double misfit(const Curve& c, const CylinderField& u);
double misfit(const Curve& c, const DataCostTable& table);

/// d misfit / d c_i = h_t * (1 - 2 u(t_i, c_i)), taking the cell below a
/// boundary height.
std::vector<double> misfit_gradient(const Curve& c, const CylinderField& u);

}  // namespace hypreg
