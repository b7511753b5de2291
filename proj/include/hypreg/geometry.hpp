#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace hypreg {

/// Uniform discretization of the half-cylinder S^1 x [0, x_max].
///
/// Angle node i sits at t_i = i * h_t with h_t = 2*pi / n_t; indices wrap
/// modulo n_t. The radial axis is split into n_x cells of width h_x.
class PeriodicGrid {
public:
    PeriodicGrid(std::size_t n_t, std::size_t n_x, double x_max);

    std::size_t n_t() const { return n_t_; }
    std::size_t n_x() const { return n_x_; }
    double x_max() const { return x_max_; }
    double h_t() const { return h_t_; }
    double h_x() const { return h_x_; }

    double angle(std::size_t i) const { return h_t_ * static_cast<double>(i); }
    std::size_t wrap(std::ptrdiff_t i) const;

    // Radial cell boundaries b_0 = 0 < ... < b_{n_x} = x_max.
    double boundary(std::size_t j) const;
    double cell_center(std::size_t j) const;

    bool operator==(const PeriodicGrid&) const = default;

private:
    std::size_t n_t_;
    std::size_t n_x_;
    double x_max_;
    double h_t_;
    double h_x_;
};

void require_same_grid(const PeriodicGrid& a, const PeriodicGrid& b);

/// Nonnegative periodic curve sampled at the angle nodes, interpreted as
/// the piecewise-linear interpolant of its samples.
class Curve {
public:
    /// Throws std::invalid_argument naming the violated invariant if a value
    /// is negative, exceeds x_max, or is not finite.
    Curve(PeriodicGrid grid, std::vector<double> values);

    static Curve constant(const PeriodicGrid& grid, double level);

    const PeriodicGrid& grid() const { return grid_; }
    std::span<const double> values() const { return values_; }
    std::size_t size() const { return values_.size(); }
    double operator[](std::size_t i) const { return values_[i]; }

    bool operator==(const Curve&) const = default;

private:
    PeriodicGrid grid_;
    std::vector<double> values_;
};

// Quantities of periodic piecewise-linear functions with node spacing h.
// Values may be signed; all integrals are exact for the interpolant.
double periodic_l1(std::span<const double> values, double h);
double periodic_l2_squared(std::span<const double> values, double h);
double periodic_h1_squared(std::span<const double> values, double h);

std::vector<double> difference(const Curve& a, const Curve& b);

double norm_l1(const Curve& c);
double norm_l1(std::span<const double> values, const PeriodicGrid& grid);

/// Squared H^1_0 seminorm: sum_i (v_{i+1} - v_i)^2 / h_t.
double seminorm_h1(const Curve& c);

/// ||a - b||_{H^1_0} (not squared).
double norm_h1_error(const Curve& a, const Curve& b);

/// ||a - b||_{L^2} (not squared).
double norm_l2_error(const Curve& a, const Curve& b);

enum class FamilyKind { constant, sinusoid, fourier_decay, kink };

std::string to_string(FamilyKind kind);
FamilyKind parse_family(const std::string& name);

/// Parametric source of test curves.
///
/// constant:       gamma = offset
/// sinusoid:       gamma = offset + amplitude * sin(t)
/// fourier_decay:  gamma = c0 + sum_{k=1..K} k^-beta (a_k cos kt + b_k sin kt),
///                 a_k, b_k ~ N(0,1) from `seed`, then scaled so the oscillating
///                 part has sup-norm `amplitude`; c0 puts the minimum at `margin`.
/// kink:           gamma = offset + amplitude * tri(t), a triangle wave in [-1, 1].
struct CurveFamily {
    FamilyKind kind = FamilyKind::sinusoid;
    double offset = 1.0;
    double amplitude = 0.5;
    double beta = 3.0;
    std::size_t modes = 64;
    double margin = 0.5;
    std::uint64_t seed = 42;

    /// Nominal Sobolev smoothness (s, q) claimed for the family; q = +inf is
    /// represented by std::numeric_limits<double>::infinity().
    struct Smoothness {
        double s;
        double q;
    };
    Smoothness nominal_smoothness() const;

    /// sup |gamma''| in closed form where available (constant, sinusoid).
    double sup_second_derivative() const;
};

Curve generate_curve(const CurveFamily& family, const PeriodicGrid& grid);

}  // namespace hypreg
