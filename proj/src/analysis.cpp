#include "hypreg/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numbers>
#include <random>
#include <sstream>
#include <stdexcept>

namespace hypreg {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kPi = std::numbers::pi;

std::string fmt(double v) {
    std::ostringstream os;
    os.precision(12);
    os << v;
    return os.str();
}
}  // namespace

// ---------------------------------------------------------------------------
// Noise

std::string to_string(NoiseKind kind) { return kind == NoiseKind::band ? "band" : "gaussian"; }

NoiseKind parse_noise_kind(const std::string& name) {
    if (name == "gaussian") return NoiseKind::gaussian;
    if (name == "band") return NoiseKind::band;
    throw std::invalid_argument("unknown noise kind '" + name + "'");
}

std::uint64_t derive_seed(std::uint64_t master, std::size_t delta_index, std::size_t rep) {
    std::seed_seq seq{static_cast<std::uint32_t>(master), static_cast<std::uint32_t>(master >> 32),
                      static_cast<std::uint32_t>(delta_index), static_cast<std::uint32_t>(rep)};
    std::uint32_t words[2];
    seq.generate(words, words + 2);
    return (static_cast<std::uint64_t>(words[0]) << 32) | words[1];
}

CylinderField band_field(const PeriodicGrid& grid, double delta) {
    if (!(delta > 0.0) || !(delta * delta < kPi))
        throw std::invalid_argument("band noise requires 0 < delta and delta^2 < pi");
    const double w = delta * delta / kPi;
    const double lower = 1.0 - w;
    const double upper = 1.0 + w;
    if (upper > grid.x_max())
        throw std::invalid_argument("band noise requires 1 + delta^2/pi <= x_max");

    auto overlap = [](double a0, double a1, double b0, double b1) {
        return std::max(0.0, std::min(a1, b1) - std::max(a0, b0));
    };
    std::vector<double> profile(grid.n_x());
    for (std::size_t j = 0; j < grid.n_x(); ++j) {
        const double b0 = grid.boundary(j);
        const double b1 = grid.boundary(j + 1);
        profile[j] = (overlap(b0, b1, 0.0, lower) + 0.5 * overlap(b0, b1, lower, upper)) / (b1 - b0);
    }
    std::vector<double> cells(grid.n_t() * grid.n_x());
    for (std::size_t i = 0; i < grid.n_t(); ++i)
        std::copy(profile.begin(), profile.end(), cells.begin() + static_cast<std::ptrdiff_t>(i * grid.n_x()));
    return CylinderField(grid, std::move(cells));
}

CylinderField add_noise(const CylinderField& u, const NoiseSpec& spec) {
    if (!(spec.delta >= 0.0) || !std::isfinite(spec.delta))
        throw std::invalid_argument("NoiseSpec invariant violated: delta >= 0");
    if (spec.delta == 0.0) return u;
    const PeriodicGrid& g = u.grid();

    if (spec.kind == NoiseKind::band) {
        const auto clean = apply_forward(Curve::constant(g, 1.0));
        const auto a = u.cells();
        const auto b = clean.cells();
        for (std::size_t k = 0; k < a.size(); ++k)
            if (std::abs(a[k] - b[k]) > 1e-9)
                throw std::invalid_argument(
                    "band noise requires data equal to the forward image of the constant curve 1");
        return band_field(g, spec.delta);
    }

    std::mt19937_64 rng(spec.seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    std::vector<double> noise(u.cells().size());
    double energy = 0.0;
    for (auto& n : noise) {
        n = normal(rng);
        energy += n * n;
    }
    const double scale = spec.delta / std::sqrt(g.h_t() * g.h_x() * energy);
    std::vector<double> cells(u.cells().begin(), u.cells().end());
    for (std::size_t k = 0; k < cells.size(); ++k) cells[k] += scale * noise[k];
    return CylinderField(g, std::move(cells));
}

double band_quantization_deficit(const PeriodicGrid& grid, double delta) {
    const double w = delta * delta / kPi;
    const double h = grid.h_x();
    const double lower = 1.0 - w;
    const double upper = 1.0 + w;
    const auto j_lo = static_cast<std::size_t>(std::floor(lower / h));
    const auto j_hi = static_cast<std::size_t>(std::floor(upper / h));
    const double theta_lo = std::clamp((grid.boundary(j_lo + 1) - lower) / h, 0.0, 1.0);
    const double theta_hi = std::clamp((upper - grid.boundary(j_hi)) / h, 0.0, 1.0);
    return 2.0 * kPi * h * (theta_lo * (1.0 - theta_lo) + theta_hi * (1.0 - theta_hi)) / 4.0;
}

double band_aligned_xmax(double delta, std::size_t n_x, double upper) {
    const double w = delta * delta / kPi;
    const auto n = static_cast<double>(n_x);
    const auto k_min = static_cast<std::size_t>(std::ceil(n / upper));
    double best_x = 0.0;
    double best_deficit = kInf;
    for (std::size_t k = std::max<std::size_t>(k_min, 1); k < n_x; ++k) {
        const double x_max = n / static_cast<double>(k);
        // Keep a few cells of headroom above the band.
        if (x_max < 1.0 + w + 4.0 / static_cast<double>(k)) break;
        const double deficit = band_quantization_deficit(PeriodicGrid(3, n_x, x_max), delta);
        if (deficit < best_deficit) {
            best_deficit = deficit;
            best_x = x_max;
        }
    }
    if (best_x == 0.0)
        throw std::invalid_argument("no radial extent <= " + fmt(upper) +
                                    " contains height 1 and the band for delta = " + fmt(delta));
    return best_x;
}

// ---------------------------------------------------------------------------
// Fitting

LineFit fit_line(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size()) throw std::invalid_argument("fit_line: size mismatch");
    LineFit fit;
    fit.points = x.size();
    if (x.size() < 2) {
        fit.slope = fit.intercept = fit.residual = std::numeric_limits<double>::quiet_NaN();
        return fit;
    }
    const auto n = static_cast<double>(x.size());
    double mx = 0.0, my = 0.0;
    for (std::size_t k = 0; k < x.size(); ++k) {
        mx += x[k];
        my += y[k];
    }
    mx /= n;
    my /= n;
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t k = 0; k < x.size(); ++k) {
        sxx += (x[k] - mx) * (x[k] - mx);
        sxy += (x[k] - mx) * (y[k] - my);
    }
    fit.slope = sxy / sxx;
    fit.intercept = my - fit.slope * mx;
    double ss = 0.0;
    for (std::size_t k = 0; k < x.size(); ++k) {
        const double r = y[k] - (fit.intercept + fit.slope * x[k]);
        ss += r * r;
    }
    fit.residual = std::sqrt(ss / n);
    return fit;
}

LineFit fit_loglog(std::span<const double> x, std::span<const double> y) {
    std::vector<double> lx(x.size()), ly(y.size());
    for (std::size_t k = 0; k < x.size(); ++k) lx[k] = std::log(x[k]);
    for (std::size_t k = 0; k < y.size(); ++k) ly[k] = std::log(y[k]);
    return fit_line(lx, ly);
}

double conjugate_exponent(double q) {
    if (std::isinf(q)) return 1.0;
    return q / (q - 1.0);
}

// ---------------------------------------------------------------------------
// Rate experiment

std::string to_string(ChoiceRule rule) { return rule == ChoiceRule::power ? "power" : "constant"; }

ChoiceRule parse_choice_rule(const std::string& name) {
    if (name == "power") return ChoiceRule::power;
    if (name == "constant") return ChoiceRule::constant;
    throw std::invalid_argument("unknown parameter choice rule '" + name + "'");
}

double RateExperimentConfig::power_exponent() const {
    if (exponent) return *exponent;
    const double qs = conjugate_exponent(q);
    return 2.0 * (qs - s + 1.0) / qs;
}

double RateExperimentConfig::alpha_for(double delta) const {
    if (rule == ChoiceRule::constant) return alpha0;
    return alpha0 * std::pow(delta, power_exponent());
}

double RateExperimentConfig::predicted_exponent() const { return (s - 1.0) / conjugate_exponent(q); }

void RateExperimentConfig::validate() const {
    if (deltas.empty()) throw std::invalid_argument("RateExperimentConfig: deltas must not be empty");
    for (std::size_t k = 0; k < deltas.size(); ++k) {
        if (!(deltas[k] > 0.0))
            throw std::invalid_argument("RateExperimentConfig invariant violated: deltas > 0");
        if (k > 0 && !(deltas[k] < deltas[k - 1]))
            throw std::invalid_argument(
                "RateExperimentConfig invariant violated: deltas strictly descending");
    }
    if (!(s > 1.0 && s <= 2.0))
        throw std::invalid_argument("RateExperimentConfig invariant violated: 1 < s <= 2");
    if (!(q >= 2.0)) throw std::invalid_argument("RateExperimentConfig invariant violated: q >= 2");
    if (!(alpha0 > 0.0)) throw std::invalid_argument("RateExperimentConfig invariant violated: alpha0 > 0");
    if (repetitions == 0)
        throw std::invalid_argument("RateExperimentConfig invariant violated: repetitions >= 1");
}

RateReport run_rate_experiment(const RateExperimentConfig& cfg) {
    cfg.validate();
    const Curve truth = generate_curve(cfg.truth, cfg.grid);
    const CylinderField clean = apply_forward(truth);
    const SolveOptions options{false, cfg.threads};
    const TikhonovSolver clean_solver(clean, 0, options);

    std::map<double, double> floor_by_alpha;
    auto floor_for = [&](double alpha) {
        auto it = floor_by_alpha.find(alpha);
        if (it != floor_by_alpha.end()) return it->second;
        const auto r = clean_solver.refine(clean_solver.solve(alpha), alpha, cfg.refine_sweeps);
        const double e = norm_h1_error(r.minimizer, truth);
        floor_by_alpha.emplace(alpha, e);
        return e;
    };

    RateReport report;
    report.predicted_exponent = cfg.predicted_exponent();
    for (std::size_t d = 0; d < cfg.deltas.size(); ++d) {
        const double delta = cfg.deltas[d];
        const double alpha = cfg.alpha_for(delta);
        RateSummaryRow summary{delta, alpha, 0.0, 0.0, 0.0, 0.0, false};
        for (std::size_t rep = 0; rep < cfg.repetitions; ++rep) {
            try {
                const auto noisy = add_noise(clean, {delta, cfg.noise, derive_seed(cfg.seed, d, rep)});
                const TikhonovSolver solver(noisy, 0, options);
                const auto r = solver.refine(solver.solve(alpha), alpha, cfg.refine_sweeps);
                RateRow row{delta,
                            alpha,
                            rep,
                            norm_h1_error(r.minimizer, truth),
                            norm_l2_error(r.minimizer, truth),
                            r.objective,
                            r.misfit_part,
                            r.regularizer_part};
                summary.mean_h1 += row.h1_error;
                summary.max_h1 = std::max(summary.max_h1, row.h1_error);
                summary.mean_l2 += row.l2_error;
                report.rows.push_back(row);
            } catch (const std::exception& e) {
                throw std::runtime_error("rate experiment failed at delta = " + fmt(delta) +
                                         ", rep = " + std::to_string(rep) + ": " + e.what());
            }
        }
        const auto reps = static_cast<double>(cfg.repetitions);
        summary.mean_h1 /= reps;
        summary.mean_l2 /= reps;
        summary.floor_h1 = floor_for(alpha);
        summary.in_window = summary.mean_h1 > kFloorFactor * summary.floor_h1;
        report.summary.push_back(summary);
    }

    std::vector<double> xs, ys;
    for (const auto& s : report.summary)
        if (s.in_window) {
            xs.push_back(s.delta);
            ys.push_back(s.mean_h1);
        }
    report.fit = fit_loglog(xs, ys);
    report.floor_dominated = xs.size() < 2;

    report.monotone = true;
    for (std::size_t k = 1; k < report.summary.size(); ++k)
        if (report.summary[k].mean_h1 > kMonotoneSlack * report.summary[k - 1].mean_h1)
            report.monotone = false;
    return report;
}

// ---------------------------------------------------------------------------
// Variational inequality

namespace {

void check_vi_domain(double s, double q) {
    if (!(s > 1.0 && s <= 2.0))
        throw std::invalid_argument("variational inequality requires 1 < s <= 2 (got s = " + fmt(s) + ")");
    if (!(q >= 2.0))
        throw std::invalid_argument("variational inequality requires 2 <= q <= inf (got q = " + fmt(q) + ")");
}

}  // namespace

double vi_exponent_c2(double s) { return 4.0 - 4.0 / s; }

double vi_exponent_c3(double s, double q) { return 2.0 - 2.0 * q / (q * s - s + 1.0); }

double vi_theorem_c1(double s, double q) {
    if (std::isinf(q)) return s - 1.0;
    return (2.0 * q - 1.0) * (s - 1.0) / (2.0 * q);
}

VariationalConstants vi_constants_from_scale(double s, double q, double c1, double scale) {
    VariationalConstants c;
    c.c1 = c1;
    c.c2 = 0.5 * s * std::pow(scale, 2.0 / s);
    if (!std::isinf(q)) {
        const double p = 2.0 * q / (q * s - s + 1.0);
        c.c3 = std::pow(scale, p) / p;
    }
    return c;
}

std::string to_string(PerturbationKind kind) {
    switch (kind) {
        case PerturbationKind::smooth: return "smooth";
        case PerturbationKind::rough: return "rough";
        case PerturbationKind::bump: return "bump";
        case PerturbationKind::mixed: return "mixed";
    }
    return "unknown";
}

namespace {

std::vector<double> draw_perturbation(PerturbationKind kind, const PeriodicGrid& grid,
                                      std::mt19937_64& rng) {
    const std::size_t n = grid.n_t();
    std::normal_distribution<double> normal(0.0, 1.0);
    std::uniform_real_distribution<double> unit(-1.0, 1.0);
    std::vector<double> sigma(n, 0.0);

    auto add_smooth = [&] {
        constexpr int modes = 8;
        double a[modes], b[modes];
        for (int k = 0; k < modes; ++k) {
            a[k] = normal(rng) / (k + 1);
            b[k] = normal(rng) / (k + 1);
        }
        for (std::size_t i = 0; i < n; ++i)
            for (int k = 0; k < modes; ++k) {
                const double kt = (k + 1) * grid.angle(i);
                sigma[i] += a[k] * std::cos(kt) + b[k] * std::sin(kt);
            }
    };
    auto add_rough = [&] {
        for (auto& v : sigma) v += unit(rng);
    };

    switch (kind) {
        case PerturbationKind::smooth: add_smooth(); break;
        case PerturbationKind::rough: add_rough(); break;
        case PerturbationKind::mixed:
            add_smooth();
            add_rough();
            break;
        case PerturbationKind::bump: {
            std::uniform_real_distribution<double> where(0.0, 2.0 * kPi);
            std::uniform_real_distribution<double> width(0.05, 1.0);
            const double c = where(rng);
            const double w = width(rng);
            const double sign = unit(rng) < 0.0 ? -1.0 : 1.0;
            for (std::size_t i = 0; i < n; ++i) {
                double d = std::abs(grid.angle(i) - c);
                d = std::min(d, 2.0 * kPi - d);
                sigma[i] = sign * std::exp(-(d / w) * (d / w));
            }
            break;
        }
    }
    double peak = 0.0;
    for (double v : sigma) peak = std::max(peak, std::abs(v));
    if (peak > 0.0)
        for (auto& v : sigma) v /= peak;
    return sigma;
}

double vi_rhs_without_c1(const VerifyTrial& t, const VariationalConstants& c, double s, double q) {
    const double f = std::sqrt(t.fidelity);
    double rhs = t.regularizer_gap + c.c2 * std::pow(f, vi_exponent_c2(s));
    if (!std::isinf(q)) rhs += c.c3 * std::pow(f, vi_exponent_c3(s, q));
    return rhs;
}

}  // namespace

VerifyReport verify_variational_inequality(const Curve& truth, const VerifyConfig& cfg) {
    check_vi_domain(cfg.s, cfg.q);
    if (!(cfg.min_magnitude > 0.0 && cfg.max_magnitude >= cfg.min_magnitude))
        throw std::invalid_argument("verify: magnitudes must satisfy 0 < min <= max");
    const PeriodicGrid& grid = truth.grid();
    const double h = grid.h_t();
    const double truth_h1 = seminorm_h1(truth);

    std::mt19937_64 rng(cfg.seed);
    std::uniform_real_distribution<double> log_mag(std::log(cfg.min_magnitude),
                                                   std::log(cfg.max_magnitude));
    constexpr PerturbationKind kinds[] = {PerturbationKind::smooth, PerturbationKind::rough,
                                          PerturbationKind::bump, PerturbationKind::mixed};

    VerifyReport report;
    report.trials.reserve(cfg.trials);
    for (std::size_t t = 0; t < cfg.trials; ++t) {
        const PerturbationKind kind = kinds[t % 4];
        const double magnitude = std::exp(log_mag(rng));
        auto sigma = draw_perturbation(kind, grid, rng);
        std::vector<double> values(grid.n_t());
        for (std::size_t i = 0; i < values.size(); ++i)
            values[i] = std::clamp(truth[i] + magnitude * sigma[i], 0.0, grid.x_max());
        const Curve gamma(grid, std::move(values));

        VerifyTrial trial{};
        trial.kind = kind;
        trial.magnitude = magnitude;
        trial.error_h1_sq = periodic_h1_squared(difference(gamma, truth), h);
        trial.regularizer_gap = seminorm_h1(gamma) - truth_h1;
        trial.fidelity = fidelity_exact(gamma, truth);
        report.trials.push_back(trial);
    }

    if (cfg.constants) {
        report.constants = *cfg.constants;
    } else {
        // Smallest interpolation scale C2 making every margin nonnegative,
        // with c1 fixed at the value the interpolation argument yields.
        const double c1 = vi_theorem_c1(cfg.s, cfg.q);
        auto feasible = [&](double scale) {
            const auto c = vi_constants_from_scale(cfg.s, cfg.q, c1, scale);
            return std::all_of(report.trials.begin(), report.trials.end(), [&](const VerifyTrial& t) {
                return vi_rhs_without_c1(t, c, cfg.s, cfg.q) - c.c1 * t.error_h1_sq >= 0.0;
            });
        };
        double lo = 0.0;
        double hi = 1.0;
        if (feasible(0.0)) {
            hi = 0.0;
        } else {
            while (!feasible(hi)) {
                lo = hi;
                hi *= 2.0;
                if (hi > 1e15) throw std::runtime_error("verify: no feasible constant found");
            }
            for (int it = 0; it < 200 && hi - lo > 1e-14 * hi; ++it) {
                const double mid = 0.5 * (lo + hi);
                (feasible(mid) ? hi : lo) = mid;
            }
        }
        report.constants = vi_constants_from_scale(cfg.s, cfg.q, c1, hi);
        report.fitted = true;
    }

    report.worst_margin = kInf;
    report.max_feasible_c1 = kInf;
    for (auto& t : report.trials) {
        const double rhs = vi_rhs_without_c1(t, report.constants, cfg.s, cfg.q);
        t.lhs = report.constants.c1 * t.error_h1_sq;
        t.rhs = rhs;
        t.margin = rhs - t.lhs;
        report.worst_margin = std::min(report.worst_margin, t.margin);
        if (t.margin < -kMarginTolerance) ++report.violations;
        if (t.error_h1_sq > 0.0) report.max_feasible_c1 = std::min(report.max_feasible_c1, rhs / t.error_h1_sq);
    }
    if (report.trials.empty()) report.worst_margin = 0.0;
    return report;
}

// ---------------------------------------------------------------------------
// Probes

ProbeReport probe_nondifferentiability(const Curve& gamma, std::span<const double> sigma,
                                       std::span<const double> s_values) {
    const PeriodicGrid& grid = gamma.grid();
    if (sigma.size() != grid.n_t()) throw std::invalid_argument("probe: sigma has wrong length");
    if (std::all_of(sigma.begin(), sigma.end(), [](double v) { return v == 0.0; }))
        throw std::invalid_argument("probe: sigma must not vanish identically");
    for (double v : gamma.values())
        if (!(v > 0.0))
            throw std::invalid_argument("probe: gamma must be strictly positive (interior of the domain)");
    if (s_values.empty()) throw std::invalid_argument("probe: need at least one step");
    for (std::size_t k = 0; k < s_values.size(); ++k) {
        if (!(s_values[k] > 0.0)) throw std::invalid_argument("probe: steps must be positive");
        if (k > 0 && !(s_values[k] < s_values[k - 1]))
            throw std::invalid_argument("probe: steps must be strictly descending");
    }

    ProbeReport report;
    const double mass = norm_l1(sigma, grid);
    for (double s : s_values) {
        std::vector<double> moved(grid.n_t());
        for (std::size_t i = 0; i < moved.size(); ++i) {
            moved[i] = gamma[i] + s * sigma[i];
            if (moved[i] < 0.0 || moved[i] > grid.x_max())
                throw std::invalid_argument("probe: gamma + s*sigma leaves [0, x_max] at s = " + fmt(s) +
                                            ", node " + std::to_string(i));
        }
        const Curve shifted(grid, std::move(moved));
        report.s_values.push_back(s);
        report.ratios.push_back(std::sqrt(fidelity_exact(shifted, gamma)) / s);
        report.predicted.push_back(std::sqrt(mass / s));
    }
    report.fit = fit_loglog(report.s_values, report.ratios);
    return report;
}

NonuniquenessReport demo_nonuniqueness(double delta, const PeriodicGrid& grid,
                                       std::span<const double> alphas, double tolerance,
                                       SolveOptions options) {
    if (!(delta > 0.0) || !(delta * delta < kPi))
        throw std::invalid_argument("demo: requires 0 < delta and delta^2 < pi");
    if (alphas.empty()) throw std::invalid_argument("demo: need at least one alpha");
    const double w = delta * delta / kPi;
    const auto unit = static_cast<std::size_t>(std::llround(1.0 / grid.h_x()));
    if (unit == 0 || unit >= grid.n_x() || std::abs(grid.boundary(unit) - 1.0) > 1e-12)
        throw std::invalid_argument("demo: height 1 must be a radial cell boundary");
    if (1.0 + w + grid.h_x() > grid.x_max())
        throw std::invalid_argument("demo: band must fit below x_max");
    if (w < grid.h_x())
        throw std::invalid_argument("demo: band under-resolved (delta^2/pi = " + fmt(w) +
                                    " < h_x = " + fmt(grid.h_x()) + ")");
    const double deficit = band_quantization_deficit(grid, delta);
    if (deficit > 0.5 * tolerance * delta * delta)
        throw std::invalid_argument("demo: band edges cut cells too coarsely (objective deficit " +
                                    fmt(deficit) + "); choose x_max with band_aligned_xmax");

    NonuniquenessReport report;
    report.delta = delta;
    report.half_width = w;
    report.deficit = deficit;
    report.tolerance = tolerance;

    const auto u = apply_forward(Curve::constant(grid, 1.0));
    const auto data = add_noise(u, {delta, NoiseKind::band, 0});
    const TikhonovSolver solver(data, 0, options);
    report.all_ok = true;
    for (double alpha : alphas) {
        const auto r = solver.solve(alpha);
        const auto v = r.minimizer.values();
        const auto [lo, hi] = std::minmax_element(v.begin(), v.end());
        double mean = 0.0;
        for (double x : v) mean += x;
        mean /= static_cast<double>(v.size());
        NonuniquenessRun run{};
        run.alpha = alpha;
        run.objective = r.objective;
        run.level = mean;
        run.spread = *hi - *lo;
        run.constant = run.spread < 1e-10;
        run.in_band = *lo >= 1.0 - w - 1e-12 && *hi <= 1.0 + w + 1e-12;
        run.objective_ok = std::abs(r.objective - delta * delta) <= tolerance * delta * delta;
        report.all_ok = report.all_ok && run.constant && run.in_band && run.objective_ok;
        report.runs.push_back(run);
    }
    return report;
}

ConvergenceReport check_tikreg_convergence(const CurveFamily& family, const PeriodicGrid& grid,
                                           std::span<const ScheduleStep> schedule,
                                           std::uint64_t seed, std::size_t refine_sweeps) {
    if (schedule.empty()) throw std::invalid_argument("convergence: empty schedule");
    for (std::size_t k = 0; k < schedule.size(); ++k) {
        const auto& st = schedule[k];
        if (!(st.delta >= 0.0) || !(st.alpha > 0.0))
            throw std::invalid_argument("convergence: need delta >= 0 and alpha > 0");
        if (k == 0) continue;
        const auto& prev = schedule[k - 1];
        if (!(st.alpha < prev.alpha))
            throw std::invalid_argument("convergence: alpha_k must decrease strictly");
        if (st.delta > prev.delta) throw std::invalid_argument("convergence: delta_k must not increase");
        const double ratio = st.delta * st.delta / st.alpha;
        const double prev_ratio = prev.delta * prev.delta / prev.alpha;
        if (!(ratio < prev_ratio || ratio == 0.0))
            throw std::invalid_argument("convergence: delta_k^2 / alpha_k must decrease strictly");
    }

    const Curve truth = generate_curve(family, grid);
    const auto clean = apply_forward(truth);
    ConvergenceReport report;
    for (std::size_t k = 0; k < schedule.size(); ++k) {
        const auto& st = schedule[k];
        const auto data = add_noise(clean, {st.delta, NoiseKind::gaussian, derive_seed(seed, k, 0)});
        const TikhonovSolver solver(data);
        const auto r = solver.refine(solver.solve(st.alpha), st.alpha, refine_sweeps);
        report.steps.push_back({st.delta, st.alpha, norm_h1_error(r.minimizer, truth),
                                norm_l2_error(r.minimizer, truth)});
    }
    const double first = report.steps.front().h1_error;
    const double last = report.steps.back().h1_error;
    report.final_below_initial = last <= kConvergenceFactor * first;
    report.monotone_within_slack = true;
    for (std::size_t k = 1; k < report.steps.size(); ++k)
        if (report.steps[k].h1_error > kMonotoneSlack * report.steps[k - 1].h1_error)
            report.monotone_within_slack = false;
    return report;
}

}  // namespace hypreg
