#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "hypreg/analysis.hpp"
#include "oracles.hpp"

using namespace hypreg;
using doctest::Approx;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

}  // namespace

TEST_CASE("noise: zero level returns the data") {
    const PeriodicGrid g(16, 8, 2.0);
    const auto u = apply_forward(generate_curve(CurveFamily{}, g));
    CHECK(add_noise(u, {0.0, NoiseKind::gaussian, 3}) == u);
    CHECK_THROWS_AS(add_noise(u, {-0.1, NoiseKind::gaussian, 3}), std::invalid_argument);
}

TEST_CASE("noise: gaussian level is exact and reproducible") {
    const PeriodicGrid g(64, 32, 3.0);
    const auto u = apply_forward(generate_curve(CurveFamily{}, g));
    for (double delta : {1.0, 0.25, 1e-3}) {
        const auto a = add_noise(u, {delta, NoiseKind::gaussian, 99});
        CHECK(std::sqrt(field_distance_squared(a, u)) == Approx(delta).epsilon(1e-12));
        CHECK(add_noise(u, {delta, NoiseKind::gaussian, 99}) == a);
        CHECK_FALSE(add_noise(u, {delta, NoiseKind::gaussian, 100}) == a);
    }
}

TEST_CASE("noise: band field") {
    // Band edges on cell boundaries: w = delta^2 / pi = 0.25 = h_x.
    const double delta = std::sqrt(oracle::kPi * 0.25);
    const PeriodicGrid g(32, 8, 2.0);
    CHECK(band_quantization_deficit(g, delta) == Approx(0.0).scale(1.0).epsilon(1e-15));
    const auto u = apply_forward(Curve::constant(g, 1.0));
    const auto band = add_noise(u, {delta, NoiseKind::band, 0});
    for (std::size_t i = 0; i < g.n_t(); ++i) {
        CHECK(band.at(i, 2) == 1.0);
        CHECK(band.at(i, 3) == 0.5);
        CHECK(band.at(i, 4) == 0.5);
        CHECK(band.at(i, 5) == 0.0);
    }
    CHECK(std::sqrt(field_distance_squared(band, u)) == Approx(delta).epsilon(1e-13));
    CHECK(misfit(Curve::constant(g, 1.0), band) == Approx(delta * delta).epsilon(1e-13));
    CHECK(misfit(Curve::constant(g, 0.8), band) == Approx(delta * delta).epsilon(1e-13));

    CHECK_THROWS_AS(add_noise(u, {1.8, NoiseKind::band, 0}), std::invalid_argument);
    const auto other = apply_forward(Curve::constant(g, 0.5));
    CHECK_THROWS_AS(add_noise(other, {0.5, NoiseKind::band, 0}), std::invalid_argument);
}

TEST_CASE("noise: band level on a resolving grid") {
    const double delta = 0.1;
    const std::size_t n_x = 2048;
    const double x_max = band_aligned_xmax(delta, n_x, 2.0);
    const PeriodicGrid g(16, n_x, x_max);
    CHECK(std::abs(g.boundary(static_cast<std::size_t>(std::llround(1.0 / g.h_x()))) - 1.0) < 1e-12);
    const auto u = apply_forward(Curve::constant(g, 1.0));
    const auto band = add_noise(u, {delta, NoiseKind::band, 0});
    CHECK(std::sqrt(field_distance_squared(band, u)) == Approx(delta).epsilon(1e-3));
    CHECK(misfit(Curve::constant(g, 1.0), band) == Approx(delta * delta).epsilon(1e-3));
}

TEST_CASE("band deficit matches the partial-cell closed form") {
    // w = 0.1 / pi, h_x = 0.25: both edges cut a cell.
    const PeriodicGrid g(8, 8, 2.0);
    const double delta = std::sqrt(0.1);
    const double w = 0.1 / oracle::kPi;
    const double ta = (1.0 - (1.0 - w)) / 0.25;
    const double tb = w / 0.25;
    CHECK(band_quantization_deficit(g, delta) ==
          Approx(2 * oracle::kPi * 0.25 * (ta * (1 - ta) + tb * (1 - tb)) / 4).epsilon(1e-13));
    // The misfit of the constant 1 against the band data falls short of
    // delta^2 by exactly this deficit.
    const auto band = band_field(g, delta);
    CHECK(delta * delta - misfit(Curve::constant(g, 1.0), band) ==
          Approx(band_quantization_deficit(g, delta)).epsilon(1e-10));
}

TEST_CASE("derive_seed") {
    CHECK(derive_seed(1, 2, 3) == derive_seed(1, 2, 3));
    CHECK(derive_seed(1, 2, 3) != derive_seed(1, 3, 2));
    CHECK(derive_seed(1, 2, 3) != derive_seed(2, 2, 3));
}

TEST_CASE("line fits") {
    const std::vector<double> x{0, 1, 2, 3};
    const std::vector<double> y{1, 3, 5, 7};
    const auto f = fit_line(x, y);
    CHECK(f.slope == Approx(2.0));
    CHECK(f.intercept == Approx(1.0));
    CHECK(f.residual == Approx(0.0).scale(1.0));
    CHECK(f.points == 4);

    const std::vector<double> d{0.5, 0.25, 0.125};
    const std::vector<double> e{3 * std::pow(0.5, 0.7), 3 * std::pow(0.25, 0.7), 3 * std::pow(0.125, 0.7)};
    CHECK(fit_loglog(d, e).slope == Approx(0.7).epsilon(1e-12));
    CHECK(std::isnan(fit_line(std::vector<double>{1}, std::vector<double>{1}).slope));
}

TEST_CASE("exponent bookkeeping") {
    CHECK(conjugate_exponent(2.0) == 2.0);
    CHECK(conjugate_exponent(4.0) == Approx(4.0 / 3.0));
    CHECK(conjugate_exponent(kInf) == 1.0);

    RateExperimentConfig c;
    c.deltas = {0.5, 0.25};
    c.s = 2.0;
    c.q = kInf;
    CHECK(c.predicted_exponent() == 1.0);
    CHECK(c.power_exponent() == 0.0);
    c.q = 2.0;
    CHECK(c.power_exponent() == Approx(1.0));
    c.s = 1.5;
    CHECK(c.predicted_exponent() == Approx(0.25));
    CHECK(c.power_exponent() == Approx(1.5));
    c.rule = ChoiceRule::power;
    c.alpha0 = 0.1;
    CHECK(c.alpha_for(0.25) == Approx(0.1 * std::pow(0.25, 1.5)));
    c.exponent = 2.0;
    CHECK(c.alpha_for(0.5) == Approx(0.025));
    c.rule = ChoiceRule::constant;
    CHECK(c.alpha_for(0.5) == 0.1);
}

TEST_CASE("rate config validation") {
    RateExperimentConfig c;
    c.deltas = {0.5, 0.25};
    CHECK_NOTHROW(c.validate());
    auto bad = c;
    bad.deltas = {};
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
    bad.deltas = {0.25, 0.5};
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
    bad.deltas = {0.5, 0.5};
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
    bad = c;
    bad.s = 1.0;
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
    bad = c;
    bad.q = 1.5;
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
    bad = c;
    bad.repetitions = 0;
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
    CHECK(parse_choice_rule("power") == ChoiceRule::power);
    CHECK_THROWS_AS(parse_choice_rule("morozov"), std::invalid_argument);
}

TEST_CASE("rate experiment on a constant truth is floor-dominated") {
    RateExperimentConfig c;
    c.truth.kind = FamilyKind::constant;
    c.grid = PeriodicGrid(32, 32, 3.0);
    c.deltas = {0.25, 0.125, 0.0625};
    c.repetitions = 2;
    c.refine_sweeps = 200;
    const auto r = run_rate_experiment(c);
    CHECK(r.rows.size() == 6);
    CHECK(r.summary.size() == 3);
    CHECK(r.floor_dominated);
    CHECK(std::isnan(r.fit.slope));
    for (const auto& row : r.rows) {
        CHECK(row.objective == Approx(row.misfit + row.alpha * row.regularizer).epsilon(1e-10));
        CHECK(row.h1_error < 0.05);
    }
    // Determinism.
    const auto again = run_rate_experiment(c);
    for (std::size_t k = 0; k < r.rows.size(); ++k) CHECK(again.rows[k].h1_error == r.rows[k].h1_error);
}

TEST_CASE("rate experiment summary aggregates the rows") {
    RateExperimentConfig c;
    c.grid = PeriodicGrid(32, 32, 3.0);
    c.deltas = {0.5, 0.25};
    c.repetitions = 3;
    c.refine_sweeps = 100;
    const auto r = run_rate_experiment(c);
    for (std::size_t d = 0; d < 2; ++d) {
        double mean = 0.0, worst = 0.0;
        for (std::size_t rep = 0; rep < 3; ++rep) {
            const auto& row = r.rows[d * 3 + rep];
            CHECK(row.delta == c.deltas[d]);
            CHECK(row.rep == rep);
            mean += row.h1_error / 3;
            worst = std::max(worst, row.h1_error);
        }
        CHECK(r.summary[d].mean_h1 == Approx(mean).epsilon(1e-14));
        CHECK(r.summary[d].max_h1 == worst);
        CHECK(r.summary[d].in_window == (r.summary[d].mean_h1 > kFloorFactor * r.summary[d].floor_h1));
    }
    CHECK(r.predicted_exponent == 0.5);
}

TEST_CASE("variational inequality exponents and constants") {
    CHECK(vi_exponent_c2(2.0) == 2.0);
    CHECK(vi_exponent_c2(1.5) == Approx(4.0 - 4.0 / 1.5));
    CHECK(vi_exponent_c3(2.0, 2.0) == Approx(2.0 / 3.0));
    CHECK(vi_theorem_c1(2.0, 2.0) == Approx(0.75));
    CHECK(vi_theorem_c1(2.0, kInf) == 1.0);
    CHECK(vi_theorem_c1(1.5, 1e12) == Approx(0.5).epsilon(1e-9));
    const auto c = vi_constants_from_scale(2.0, 2.0, 0.75, 4.0);
    CHECK(c.c2 == Approx(4.0));
    CHECK(c.c3 == Approx((3.0 / 4.0) * std::pow(4.0, 4.0 / 3.0)));
    CHECK(vi_constants_from_scale(2.0, kInf, 1.0, 4.0).c3 == 0.0);
}

TEST_CASE("variational inequality: explicit constants for s = 2, q = inf") {
    const PeriodicGrid g(128, 16, 3.0);
    CurveFamily f;
    const auto truth = generate_curve(f, g);
    VerifyConfig cfg;
    cfg.s = 2.0;
    cfg.q = kInf;
    cfg.trials = 400;
    cfg.constants = VariationalConstants{1.0, 2.0 * f.sup_second_derivative(), 0.0};
    const auto r = verify_variational_inequality(truth, cfg);
    CHECK(r.violations == 0);
    CHECK(r.worst_margin >= -kMarginTolerance);
    CHECK_FALSE(r.fitted);
    for (const auto& t : r.trials) {
        CHECK(t.lhs == Approx(t.error_h1_sq));
        CHECK(t.margin == Approx(t.rhs - t.lhs).scale(1.0));
        CHECK(t.fidelity >= 0.0);
        CHECK(t.magnitude >= cfg.min_magnitude);
        CHECK(t.magnitude <= cfg.max_magnitude);
    }
    CHECK(r.max_feasible_c1 >= 1.0);
}

TEST_CASE("variational inequality: identity perturbations have zero margin") {
    const PeriodicGrid g(32, 8, 3.0);
    const auto truth = generate_curve(CurveFamily{}, g);
    VerifyConfig cfg;
    cfg.s = 2.0;
    cfg.q = kInf;
    cfg.trials = 8;
    cfg.min_magnitude = cfg.max_magnitude = 1e-300;
    cfg.constants = VariationalConstants{1.0, 1.0, 0.0};
    const auto r = verify_variational_inequality(truth, cfg);
    for (const auto& t : r.trials) {
        CHECK(t.error_h1_sq == Approx(0.0).scale(1.0).epsilon(1e-20));
        CHECK(t.margin == Approx(0.0).scale(1.0).epsilon(1e-12));
    }
}

TEST_CASE("variational inequality: fitted constants leave no violations") {
    const PeriodicGrid g(128, 16, 3.0);
    CurveFamily f;
    f.kind = FamilyKind::fourier_decay;
    f.beta = 3.0;
    const auto truth = generate_curve(f, g);
    VerifyConfig cfg;
    cfg.s = 2.0;
    cfg.q = 2.0;
    cfg.trials = 300;
    const auto r = verify_variational_inequality(truth, cfg);
    CHECK(r.fitted);
    CHECK(r.violations == 0);
    CHECK(r.worst_margin >= -kMarginTolerance);
    CHECK(r.constants.c1 == Approx(0.75));
    CHECK(r.constants.c2 > 0.0);
}

TEST_CASE("variational inequality domain") {
    const PeriodicGrid g(16, 8, 3.0);
    const auto truth = generate_curve(CurveFamily{}, g);
    VerifyConfig cfg;
    cfg.trials = 2;
    cfg.s = 1.0;
    CHECK_THROWS_AS(verify_variational_inequality(truth, cfg), std::invalid_argument);
    cfg.s = 2.5;
    CHECK_THROWS_AS(verify_variational_inequality(truth, cfg), std::invalid_argument);
    cfg.s = 2.0;
    cfg.q = 1.5;
    CHECK_THROWS_AS(verify_variational_inequality(truth, cfg), std::invalid_argument);
}

TEST_CASE("probe: closed-form difference quotients") {
    const PeriodicGrid g(256, 16, 3.0);
    const auto gamma = generate_curve(CurveFamily{}, g);
    const std::vector<double> one(g.n_t(), 1.0);
    const std::vector<double> s{1.0, 0.1, 0.01, 0.001};
    const auto r = probe_nondifferentiability(gamma, one, s);
    CHECK(r.fit.slope == Approx(-0.5).epsilon(1e-6));
    CHECK(r.ratios[2] == Approx(std::sqrt(2 * oracle::kPi / 0.01)).epsilon(1e-9));
    for (std::size_t k = 0; k < s.size(); ++k) CHECK(r.ratios[k] == Approx(r.predicted[k]).epsilon(1e-9));

    std::vector<double> sigma(g.n_t()), doubled(g.n_t());
    for (std::size_t i = 0; i < sigma.size(); ++i) {
        sigma[i] = 0.3 * std::sin(2 * g.angle(i));
        doubled[i] = 2 * sigma[i];
    }
    const std::vector<double> step{0.05};
    CHECK(probe_nondifferentiability(gamma, doubled, step).ratios[0] ==
          Approx(std::sqrt(2.0) * probe_nondifferentiability(gamma, sigma, step).ratios[0]).epsilon(1e-12));
}

TEST_CASE("probe preconditions") {
    const PeriodicGrid g(16, 8, 3.0);
    const auto gamma = generate_curve(CurveFamily{}, g);
    const std::vector<double> one(16, 1.0);
    const std::vector<double> zero(16, 0.0);
    CHECK_THROWS_AS(probe_nondifferentiability(gamma, zero, std::vector<double>{0.1}), std::invalid_argument);
    CHECK_THROWS_AS(probe_nondifferentiability(Curve::constant(g, 0.0), one, std::vector<double>{0.1}),
                    std::invalid_argument);
    CHECK_THROWS_AS(probe_nondifferentiability(gamma, one, std::vector<double>{0.1, 0.2}), std::invalid_argument);
    const std::vector<double> down(16, -1.0);
    CHECK_THROWS_WITH_AS(probe_nondifferentiability(gamma, down, std::vector<double>{1.0}),
                         doctest::Contains("leaves [0, x_max]"), std::invalid_argument);
}

TEST_CASE("non-uniqueness demo") {
    const double delta = 0.5;
    const double x_max = band_aligned_xmax(delta, 128, 3.0);
    const PeriodicGrid g(64, 128, x_max);
    const std::vector<double> alphas{1e-3, 1e-1, 10.0};
    const auto r = demo_nonuniqueness(delta, g, alphas);
    CHECK(r.all_ok);
    REQUIRE(r.runs.size() == 3);
    for (const auto& run : r.runs) {
        CHECK(run.spread < 1e-10);
        CHECK(std::abs(run.level - 1.0) <= delta * delta / oracle::kPi + 1e-12);
        CHECK(run.objective == Approx(delta * delta).epsilon(1e-3));
    }
    CHECK(r.runs[0].objective == r.runs[2].objective);

    // Under-resolved band and misplaced height 1.
    CHECK_THROWS_AS(demo_nonuniqueness(0.05, PeriodicGrid(16, 64, 2.0), alphas), std::invalid_argument);
    CHECK_THROWS_AS(demo_nonuniqueness(0.5, PeriodicGrid(16, 256, 3.0), alphas), std::invalid_argument);
    CHECK_THROWS_AS(demo_nonuniqueness(1.8, g, alphas), std::invalid_argument);
}

TEST_CASE("convergence schedule validation") {
    const PeriodicGrid g(16, 16, 3.0);
    const std::vector<ScheduleStep> constant_ratio{{0.5, 0.25}, {0.25, 0.0625}};
    CHECK_THROWS_AS(check_tikreg_convergence(CurveFamily{}, g, constant_ratio, 1), std::invalid_argument);
    const std::vector<ScheduleStep> rising{{0.25, 0.5}, {0.5, 0.25}};
    CHECK_THROWS_AS(check_tikreg_convergence(CurveFamily{}, g, rising, 1), std::invalid_argument);
    const std::vector<ScheduleStep> flat_alpha{{0.5, 0.5}, {0.25, 0.5}};
    CHECK_THROWS_AS(check_tikreg_convergence(CurveFamily{}, g, flat_alpha, 1), std::invalid_argument);
}

TEST_CASE("convergence report") {
    const PeriodicGrid g(64, 64, 3.0);
    std::vector<ScheduleStep> schedule;
    for (int k = 1; k <= 5; ++k) {
        const double d = std::ldexp(1.0, -k);
        schedule.push_back({d, d});
    }
    const auto r = check_tikreg_convergence(CurveFamily{}, g, schedule, 5, 200);
    REQUIRE(r.steps.size() == 5);
    CHECK(r.final_below_initial == (r.steps.back().h1_error <= kConvergenceFactor * r.steps.front().h1_error));
    for (const auto& s : r.steps) CHECK(std::isfinite(s.h1_error));

    const std::vector<ScheduleStep> clean{{0.0, 1.0}, {0.0, 0.1}, {0.0, 0.01}};
    const auto c = check_tikreg_convergence(CurveFamily{}, g, clean, 5, 200);
    for (const auto& s : c.steps) CHECK(s.delta == 0.0);
}
