#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "hypreg/forward.hpp"
#include "hypreg/geometry.hpp"
#include "hypreg/solver.hpp"

namespace hypreg {

// ---------------------------------------------------------------------------
// Noise

enum class NoiseKind { gaussian, band };

std::string to_string(NoiseKind kind);
NoiseKind parse_noise_kind(const std::string& name);

struct NoiseSpec {
    double delta = 0.0;
    NoiseKind kind = NoiseKind::gaussian;
    std::uint64_t seed = 0;
};

/// Returns u^delta with discrete ||u^delta - u||_{L^2} = delta.
///
/// gaussian: seeded N(0,1) per cell, rescaled to hit delta exactly.
/// band:     u must be F(1); returns the cell average of
///               1    for 0 <= x < 1 - delta^2/pi
///               1/2  for |x - 1| <= delta^2/pi
///               0    for x > 1 + delta^2/pi
///           whose continuum distance to F(1) is delta. Needs delta^2 < pi.
CylinderField add_noise(const CylinderField& u, const NoiseSpec& spec);

/// Cell average of the three-zone band field above.
CylinderField band_field(const PeriodicGrid& grid, double delta);

/// How far the misfit of a constant curve inside the band falls below
/// delta^2 because the band edges cut through cells (zero if both edges sit
/// on cell boundaries).
double band_quantization_deficit(const PeriodicGrid& grid, double delta);

/// Radial extent x_max = n_x / K (integer K, so height 1 is a cell boundary)
/// no larger than `upper`, chosen to minimize band_quantization_deficit.
double band_aligned_xmax(double delta, std::size_t n_x, double upper);

/// Stream for one (delta index, repetition) cell of an experiment.
std::uint64_t derive_seed(std::uint64_t master, std::size_t delta_index, std::size_t rep);

// ---------------------------------------------------------------------------
// Fitting helpers

struct LineFit {
    double slope = 0.0;
    double intercept = 0.0;
    double residual = 0.0;  // root mean square
    std::size_t points = 0;
};

LineFit fit_line(std::span<const double> x, std::span<const double> y);
/// Least-squares fit of log(y) against log(x).
LineFit fit_loglog(std::span<const double> x, std::span<const double> y);

/// Hoelder conjugate q/(q-1); q = inf gives 1.
double conjugate_exponent(double q);

// ---------------------------------------------------------------------------
// Convergence-rate experiment

enum class ChoiceRule { power, constant };

std::string to_string(ChoiceRule rule);
ChoiceRule parse_choice_rule(const std::string& name);

struct RateExperimentConfig {
    CurveFamily truth;
    double s = 2.0;
    double q = 2.0;  // +inf allowed
    PeriodicGrid grid{256, 256, 3.0};
    std::vector<double> deltas;
    ChoiceRule rule = ChoiceRule::constant;
    double alpha0 = 0.05;
    /// Power-rule exponent; defaults to 2 (q* - s + 1) / q*.
    std::optional<double> exponent;
    std::size_t repetitions = 5;
    std::uint64_t seed = 1;
    NoiseKind noise = NoiseKind::gaussian;
    std::size_t refine_sweeps = 2000;
    unsigned threads = 0;

    double power_exponent() const;
    double alpha_for(double delta) const;
    /// (s - 1) / q*, which is 1 for s = 2, q = inf.
    double predicted_exponent() const;
    void validate() const;
};

struct RateRow {
    double delta;
    double alpha;
    std::size_t rep;
    double h1_error;
    double l2_error;
    double objective;
    double misfit;
    double regularizer;
};

struct RateSummaryRow {
    double delta;
    double alpha;
    double mean_h1;
    double max_h1;
    double mean_l2;
    double floor_h1;  // clean-data error at the same alpha
    bool in_window;   // mean_h1 > 5 * floor_h1
};

struct RateReport {
    std::vector<RateRow> rows;
    std::vector<RateSummaryRow> summary;
    LineFit fit;
    double predicted_exponent = 0.0;
    /// Fewer than two deltas above the floor: the slope is not meaningful.
    bool floor_dominated = false;
    /// Mean error non-increasing as delta decreases, up to a 20% slack.
    bool monotone = false;
};

inline constexpr double kFloorFactor = 5.0;
inline constexpr double kMonotoneSlack = 1.2;

RateReport run_rate_experiment(const RateExperimentConfig& config);

// ---------------------------------------------------------------------------
// Variational inequality
//
//   c1 ||g - g+||^2_{H1_0} <= ||g||^2_{H1_0} - ||g+||^2_{H1_0}
//                             + c2 ||F(g) - F(g+)||^{4 - 4/s}
//                             + c3 ||F(g) - F(g+)||^{2 - 2q/(qs - s + 1)}
// with the c3 term absent for q = inf.

struct VariationalConstants {
    double c1 = 1.0;
    double c2 = 0.0;
    double c3 = 0.0;
};

double vi_exponent_c2(double s);
double vi_exponent_c3(double s, double q);
/// c1 = (2q - 1)(s - 1) / (2q), the value produced by the interpolation argument.
double vi_theorem_c1(double s, double q);
/// (c2, c3) as functions of the single interpolation constant C2.
VariationalConstants vi_constants_from_scale(double s, double q, double c1, double scale);

enum class PerturbationKind { smooth, rough, bump, mixed };
std::string to_string(PerturbationKind kind);

struct VerifyConfig {
    double s = 2.0;
    double q = 2.0;
    std::optional<VariationalConstants> constants;  // empty: fit them
    std::size_t trials = 2000;
    std::uint64_t seed = 7;
    double min_magnitude = 1e-3;
    double max_magnitude = 1.0;
};

struct VerifyTrial {
    PerturbationKind kind;
    double magnitude;
    double error_h1_sq;    // ||g - g+||^2_{H1_0}
    double regularizer_gap;  // ||g||^2 - ||g+||^2
    double fidelity;       // ||F(g) - F(g+)||^2 = ||g - g+||_{L^1}
    double lhs;
    double rhs;
    double margin;
};

struct VerifyReport {
    VariationalConstants constants;
    bool fitted = false;
    double worst_margin = 0.0;
    std::size_t violations = 0;  // margin < -1e-8
    double max_feasible_c1 = 0.0;
    std::vector<VerifyTrial> trials;
};

inline constexpr double kMarginTolerance = 1e-8;

VerifyReport verify_variational_inequality(const Curve& truth, const VerifyConfig& config);

// ---------------------------------------------------------------------------
// Structural probes

struct ProbeReport {
    std::vector<double> s_values;
    std::vector<double> ratios;     // sqrt(fidelity(g + s sigma, g)) / s
    std::vector<double> predicted;  // sqrt(||sigma||_{L^1} / s)
    LineFit fit;
};

/// Difference quotients of F along sigma. sigma may be signed.
ProbeReport probe_nondifferentiability(const Curve& gamma, std::span<const double> sigma,
                                       std::span<const double> s_values);

struct NonuniquenessRun {
    double alpha;
    double objective;
    double level;   // mean minimizer value
    double spread;  // max - min over nodes
    bool constant;
    bool in_band;
    bool objective_ok;
};

struct NonuniquenessReport {
    double delta = 0.0;
    double half_width = 0.0;  // delta^2 / pi
    double deficit = 0.0;     // band_quantization_deficit
    double tolerance = 0.0;   // relative, on the objective
    std::vector<NonuniquenessRun> runs;
    bool all_ok = false;
};

/// Solves with the band data for each alpha and checks that every minimizer
/// is a constant inside the band with objective delta^2.
NonuniquenessReport demo_nonuniqueness(double delta, const PeriodicGrid& grid,
                                       std::span<const double> alphas,
                                       double tolerance = 1e-3, SolveOptions options = {});

struct ScheduleStep {
    double delta;
    double alpha;
};

struct ConvergenceStep {
    double delta;
    double alpha;
    double h1_error;
    double l2_error;
};

struct ConvergenceReport {
    std::vector<ConvergenceStep> steps;
    bool final_below_initial = false;  // final <= kConvergenceFactor * initial
    bool monotone_within_slack = false;
};

inline constexpr double kConvergenceFactor = 0.5;

/// Runs the regularization pipeline along (delta_k, alpha_k) with
/// delta_k -> 0, alpha_k -> 0 and delta_k^2 / alpha_k -> 0 (each ratio
/// strictly smaller than the previous one, or zero).
ConvergenceReport check_tikreg_convergence(const CurveFamily& truth, const PeriodicGrid& grid,
                                           std::span<const ScheduleStep> schedule,
                                           std::uint64_t seed, std::size_t refine_sweeps = 2000);

}  // namespace hypreg
