#include "hypreg/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <sstream>
#include <stdexcept>

namespace hypreg {

PeriodicGrid::PeriodicGrid(std::size_t n_t, std::size_t n_x, double x_max)
    : n_t_(n_t), n_x_(n_x), x_max_(x_max) {
    if (n_t < 3)
        throw std::invalid_argument("PeriodicGrid invariant violated: n_t >= 3 (got " +
                                    std::to_string(n_t) + ")");
    if (n_x < 2)
        throw std::invalid_argument("PeriodicGrid invariant violated: n_x >= 2 (got " +
                                    std::to_string(n_x) + ")");
    if (!(x_max > 0.0) || !std::isfinite(x_max))
        throw std::invalid_argument("PeriodicGrid invariant violated: x_max > 0");
    h_t_ = 2.0 * std::numbers::pi / static_cast<double>(n_t);
    h_x_ = x_max / static_cast<double>(n_x);
}

std::size_t PeriodicGrid::wrap(std::ptrdiff_t i) const {
    const auto n = static_cast<std::ptrdiff_t>(n_t_);
    auto r = i % n;
    if (r < 0) r += n;
    return static_cast<std::size_t>(r);
}

double PeriodicGrid::boundary(std::size_t j) const {
    return x_max_ * static_cast<double>(j) / static_cast<double>(n_x_);
}

double PeriodicGrid::cell_center(std::size_t j) const {
    return x_max_ * (static_cast<double>(j) + 0.5) / static_cast<double>(n_x_);
}

void require_same_grid(const PeriodicGrid& a, const PeriodicGrid& b) {
    if (!(a == b))
        throw std::invalid_argument("grid mismatch: operands live on different grids");
}

Curve::Curve(PeriodicGrid grid, std::vector<double> values)
    : grid_(grid), values_(std::move(values)) {
    if (values_.size() != grid_.n_t()) {
        std::ostringstream msg;
        msg << "Curve invariant violated: expected " << grid_.n_t() << " samples, got "
            << values_.size();
        throw std::invalid_argument(msg.str());
    }
    for (std::size_t i = 0; i < values_.size(); ++i) {
        const double v = values_[i];
        if (!std::isfinite(v) || v < 0.0 || v > grid_.x_max()) {
            std::ostringstream msg;
            msg.precision(12);
            msg << "Curve invariant violated: value " << v << " at node " << i;
            if (!std::isfinite(v))
                msg << " is not finite";
            else if (v < 0.0)
                msg << " is negative";
            else
                msg << " exceeds x_max = " << grid_.x_max();
            throw std::invalid_argument(msg.str());
        }
    }
}

Curve Curve::constant(const PeriodicGrid& grid, double level) {
    return Curve(grid, std::vector<double>(grid.n_t(), level));
}

double periodic_l1(std::span<const double> values, double h) {
    const std::size_t n = values.size();
    double sum = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double a = values[i];
        const double b = values[(i + 1) % n];
        if ((a >= 0.0 && b >= 0.0) || (a <= 0.0 && b <= 0.0)) {
            sum += 0.5 * (std::abs(a) + std::abs(b));
        } else {
            // Zero crossing inside the interval: two triangles.
            sum += 0.5 * (a * a + b * b) / (std::abs(a) + std::abs(b));
        }
    }
    return h * sum;
}

double periodic_l2_squared(std::span<const double> values, double h) {
    const std::size_t n = values.size();
    double sum = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double a = values[i];
        const double b = values[(i + 1) % n];
        sum += a * a + a * b + b * b;
    }
    return h * sum / 3.0;
}

double periodic_h1_squared(std::span<const double> values, double h) {
    const std::size_t n = values.size();
    double sum = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double d = values[(i + 1) % n] - values[i];
        sum += d * d;
    }
    return sum / h;
}

std::vector<double> difference(const Curve& a, const Curve& b) {
    require_same_grid(a.grid(), b.grid());
    std::vector<double> d(a.size());
    for (std::size_t i = 0; i < d.size(); ++i) d[i] = a[i] - b[i];
    return d;
}

double norm_l1(const Curve& c) { return periodic_l1(c.values(), c.grid().h_t()); }

double norm_l1(std::span<const double> values, const PeriodicGrid& grid) {
    if (values.size() != grid.n_t())
        throw std::invalid_argument("grid mismatch: sample count differs from n_t");
    return periodic_l1(values, grid.h_t());
}

double seminorm_h1(const Curve& c) { return periodic_h1_squared(c.values(), c.grid().h_t()); }

double norm_h1_error(const Curve& a, const Curve& b) {
    const auto d = difference(a, b);
    return std::sqrt(periodic_h1_squared(d, a.grid().h_t()));
}

double norm_l2_error(const Curve& a, const Curve& b) {
    const auto d = difference(a, b);
    return std::sqrt(periodic_l2_squared(d, a.grid().h_t()));
}

std::string to_string(FamilyKind kind) {
    switch (kind) {
        case FamilyKind::constant: return "constant";
        case FamilyKind::sinusoid: return "sinusoid";
        case FamilyKind::fourier_decay: return "fourier-decay";
        case FamilyKind::kink: return "kink";
    }
    return "unknown";
}

FamilyKind parse_family(const std::string& name) {
    if (name == "constant") return FamilyKind::constant;
    if (name == "sinusoid") return FamilyKind::sinusoid;
    if (name == "fourier-decay" || name == "fourier_decay") return FamilyKind::fourier_decay;
    if (name == "kink") return FamilyKind::kink;
    throw std::invalid_argument("unknown curve family '" + name + "'");
}

CurveFamily::Smoothness CurveFamily::nominal_smoothness() const {
    constexpr double inf = std::numeric_limits<double>::infinity();
    switch (kind) {
        case FamilyKind::constant:
        case FamilyKind::sinusoid: return {2.0, inf};
        // Fourier coefficients decaying like k^-beta give H^{beta - 1/2 - eps}.
        case FamilyKind::fourier_decay: return {std::min(beta - 0.51, 2.0), 2.0};
        // The derivative of a triangle wave is a square wave, in H^{1/2 - eps}.
        case FamilyKind::kink: return {1.49, 2.0};
    }
    return {0.0, 0.0};
}

double CurveFamily::sup_second_derivative() const {
    switch (kind) {
        case FamilyKind::constant: return 0.0;
        case FamilyKind::sinusoid: return std::abs(amplitude);
        default:
            throw std::domain_error("no closed-form sup|gamma''| for family " + to_string(kind));
    }
}

namespace {

struct FourierCoefficients {
    std::vector<double> cos_part;
    std::vector<double> sin_part;
    double scale = 1.0;
    double shift = 0.0;
};

double eval_oscillation(const FourierCoefficients& fc, double t) {
    double v = 0.0;
    for (std::size_t k = 1; k <= fc.cos_part.size(); ++k) {
        const double kt = static_cast<double>(k) * t;
        v += fc.cos_part[k - 1] * std::cos(kt) + fc.sin_part[k - 1] * std::sin(kt);
    }
    return v;
}

FourierCoefficients fourier_coefficients(const CurveFamily& f) {
    if (f.modes == 0) throw std::invalid_argument("fourier-decay family needs modes >= 1");
    if (!(f.margin > 0.0)) throw std::invalid_argument("fourier-decay family needs margin > 0");
    FourierCoefficients fc;
    std::mt19937_64 rng(f.seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    for (std::size_t k = 1; k <= f.modes; ++k) {
        const double decay = std::pow(static_cast<double>(k), -f.beta);
        fc.cos_part.push_back(decay * normal(rng));
        fc.sin_part.push_back(decay * normal(rng));
    }
    // Grid-independent normalization on a fixed fine sampling.
    constexpr std::size_t fine = 8192;
    double lo = std::numeric_limits<double>::infinity();
    double hi = -lo;
    for (std::size_t s = 0; s < fine; ++s) {
        const double t = 2.0 * std::numbers::pi * static_cast<double>(s) / fine;
        const double v = eval_oscillation(fc, t);
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    if (f.amplitude > 0.0) {
        const double sup = std::max(std::abs(lo), std::abs(hi));
        fc.scale = f.amplitude / sup;
    }
    fc.shift = f.margin - fc.scale * lo;
    return fc;
}

}  // namespace

Curve generate_curve(const CurveFamily& f, const PeriodicGrid& grid) {
    std::vector<double> v(grid.n_t());
    switch (f.kind) {
        case FamilyKind::constant:
            std::fill(v.begin(), v.end(), f.offset);
            break;
        case FamilyKind::sinusoid:
            for (std::size_t i = 0; i < v.size(); ++i)
                v[i] = f.offset + f.amplitude * std::sin(grid.angle(i));
            break;
        case FamilyKind::kink:
            for (std::size_t i = 0; i < v.size(); ++i) {
                const double t = grid.angle(i);
                v[i] = f.offset + f.amplitude * (1.0 - 2.0 * std::abs(t - std::numbers::pi) /
                                                           std::numbers::pi);
            }
            break;
        case FamilyKind::fourier_decay: {
            const auto fc = fourier_coefficients(f);
            for (std::size_t i = 0; i < v.size(); ++i)
                v[i] = fc.shift + fc.scale * eval_oscillation(fc, grid.angle(i));
            break;
        }
    }
    return Curve(grid, std::move(v));
}

}  // namespace hypreg
