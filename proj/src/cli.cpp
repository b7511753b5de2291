#include "hypreg/cli.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <set>
#include <sstream>
#include <vector>

#include "hypreg/analysis.hpp"
#include "hypreg/io.hpp"
#include "hypreg/svg.hpp"

namespace hypreg::cli {

namespace fs = std::filesystem;

namespace {

class ConfigError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

std::string trim(const std::string& s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string::npos) return {};
    return s.substr(first, s.find_last_not_of(" \t\r") - first + 1);
}

// Round-trip precision for values recorded in a manifest.
std::string exact(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

struct Key {
    std::string name;
    std::string fallback;  // empty: no default
    std::string help;
    bool flag = false;
};

const std::vector<Key>& shared_keys() {
    static const std::vector<Key> keys{
        {"seed", "1", "master seed"},
        {"grid-nt", "256", "angle nodes n_t"},
        {"grid-nx", "256", "radial cells n_x"},
        {"xmax", "3", "radial extent x_max"},
    };
    return keys;
}

const std::vector<Key>& family_keys() {
    static const std::vector<Key> keys{
        {"family", "sinusoid", "constant | sinusoid | fourier-decay | kink"},
        {"offset", "1", "family offset"},
        {"amplitude", "0.5", "family amplitude"},
        {"beta", "3", "fourier-decay exponent"},
        {"modes", "64", "fourier-decay mode count"},
        {"margin", "0.5", "fourier-decay minimum height"},
    };
    return keys;
}

std::vector<Key> keys_for(const std::string& command) {
    std::vector<Key> keys = shared_keys();
    auto append = [&](const std::vector<Key>& more) { keys.insert(keys.end(), more.begin(), more.end()); };
    if (command == "forward") {
        append(family_keys());
        append({{"curve", "", "curve CSV (overrides the family)"}});
    } else if (command == "solve") {
        append({{"data", "", "field CSV"},
                {"alpha", "", "regularization parameter"},
                {"refine-sweeps", "200", "coordinate-descent sweeps after the exact solve"},
                {"levels", "0", "admissible heights (0: n_x + 1)"},
                {"fast-cycle", "false", "approximate two-pass cycle handling", true},
                {"threads", "0", "worker threads (0: hardware)"}});
    } else if (command == "rates") {
        append(family_keys());
        append({{"s", "", "smoothness s (default: family tag)"},
                {"q", "", "integrability q, number or inf (default: family tag)"},
                {"deltas", "0.25,0.125,0.0625,0.03125,0.015625,0.0078125", "noise levels"},
                {"rule", "constant", "power | constant"},
                {"alpha0", "0.05", "alpha scale"},
                {"exponent", "", "power-rule exponent (default from s, q)"},
                {"reps", "5", "repetitions per delta"},
                {"noise", "gaussian", "gaussian | band"},
                {"refine-sweeps", "2000", "coordinate-descent sweeps"},
                {"threads", "0", "worker threads (0: hardware)"}});
    } else if (command == "verify") {
        append(family_keys());
        append({{"s", "2", "smoothness s"},
                {"q", "inf", "integrability q"},
                {"c1", "", "explicit c1"},
                {"c2", "", "explicit c2"},
                {"c3", "", "explicit c3"},
                {"fit-constants", "false", "fit c2, c3 empirically", true},
                {"trials", "2000", "random perturbations"},
                {"min-mag", "0.001", "smallest perturbation magnitude"},
                {"max-mag", "1", "largest perturbation magnitude"}});
    } else if (command == "probe") {
        append(family_keys());
        append({{"svalues", "1,0.1,0.01,0.001,0.0001", "step sizes, descending"},
                {"sigma", "one", "direction: one | sine"}});
    } else if (command == "demo-nonunique") {
        append({{"delta", "0.5", "noise level"},
                {"alphas", "0.001,0.1,10", "regularization parameters"},
                {"tolerance", "0.001", "relative objective tolerance"},
                {"threads", "0", "worker threads (0: hardware)"}});
        // The band demo needs height 1 on a cell boundary; by default x_max
        // is chosen for that.
        for (auto& k : keys)
            if (k.name == "xmax") k.fallback = "";
    }
    return keys;
}

// Resolved settings for one invocation, with typed accessors.
class Resolved {
public:
    Resolved(std::string command, Settings values) : command_(std::move(command)), values_(std::move(values)) {}

    const std::string& command() const { return command_; }
    bool has(const std::string& key) const {
        auto it = values_.find(key);
        return it != values_.end() && !it->second.empty();
    }
    std::string text(const std::string& key) const {
        if (!has(key)) throw ConfigError("missing required setting --" + key);
        return values_.at(key);
    }
    double number(const std::string& key) const {
        const std::string t = text(key);
        try {
            std::size_t used = 0;
            const double v = std::stod(t, &used);
            if (used == t.size() && !std::isnan(v)) return v;
        } catch (const std::exception&) {
        }
        throw ConfigError("invalid number for --" + key + ": '" + t + "'");
    }
    std::size_t count(const std::string& key) const {
        const std::string t = text(key);
        try {
            std::size_t used = 0;
            const long long v = std::stoll(t, &used);
            if (used == t.size() && v >= 0) return static_cast<std::size_t>(v);
        } catch (const std::exception&) {
        }
        throw ConfigError("invalid non-negative integer for --" + key + ": '" + t + "'");
    }
    std::uint64_t seed() const {
        const std::string t = text("seed");
        try {
            std::size_t used = 0;
            const unsigned long long v = std::stoull(t, &used);
            if (used == t.size() && t.find('-') == std::string::npos) return v;
        } catch (const std::exception&) {
        }
        throw ConfigError("invalid seed: '" + t + "'");
    }
    bool boolean(const std::string& key) const {
        const std::string t = text(key);
        if (t == "true" || t == "1") return true;
        if (t == "false" || t == "0") return false;
        throw ConfigError("invalid boolean for --" + key + ": '" + t + "'");
    }
    std::vector<double> list(const std::string& key) const {
        std::vector<double> out;
        std::stringstream ss(text(key));
        std::string item;
        while (std::getline(ss, item, ',')) {
            item = trim(item);
            try {
                std::size_t used = 0;
                const double v = std::stod(item, &used);
                if (used == item.size() && !std::isnan(v)) {
                    out.push_back(v);
                    continue;
                }
            } catch (const std::exception&) {
            }
            throw ConfigError("invalid entry in --" + key + ": '" + item + "'");
        }
        if (out.empty()) throw ConfigError("--" + key + " must list at least one value");
        return out;
    }
    void set(const std::string& key, std::string value) { values_[key] = std::move(value); }

    std::string manifest() const {
        std::string out = "# resolved configuration; rerun with --config <this file>\nsubcommand=" + command_ + "\n";
        for (const auto& [k, v] : values_)
            if (!v.empty()) out += k + "=" + v + "\n";
        return out;
    }

private:
    std::string command_;
    Settings values_;
};

PeriodicGrid grid_of(const Resolved& r) {
    return PeriodicGrid(r.count("grid-nt"), r.count("grid-nx"), r.number("xmax"));
}

CurveFamily family_of(const Resolved& r) {
    CurveFamily f;
    f.kind = parse_family(r.text("family"));
    f.offset = r.number("offset");
    f.amplitude = r.number("amplitude");
    f.beta = r.number("beta");
    f.modes = r.count("modes");
    f.margin = r.number("margin");
    f.seed = r.seed();
    return f;
}

void write(const fs::path& dir, const std::string& name, const std::string& content) {
    io::write_file_atomic(dir / name, content);
}

int cmd_forward(Resolved& r, const fs::path& out_dir, std::ostream& out) {
    const PeriodicGrid grid = grid_of(r);
    std::optional<Curve> curve;
    if (r.has("curve")) {
        const fs::path path = fs::absolute(r.text("curve"));
        r.set("curve", path.string());
        curve = io::read_curve_csv(path, grid.n_x(), grid.x_max());
        r.set("grid-nt", std::to_string(curve->size()));
    } else {
        curve = generate_curve(family_of(r), grid);
    }
    const auto field = apply_forward(*curve);
    write(out_dir, "curve.csv", io::curve_csv(*curve));
    write(out_dir, "field.csv", io::field_csv(field));
    write(out_dir, "field.svg", svg::heatmap(field, curve));
    out << "forward: " << field.grid().n_t() << " x " << field.grid().n_x() << " field written to "
        << (out_dir / "field.csv").string() << "\n";
    return kOk;
}

int cmd_solve(Resolved& r, const fs::path& out_dir, std::ostream& out, const std::set<std::string>& given) {
    const fs::path path = fs::absolute(r.text("data"));
    r.set("data", path.string());
    const auto data = io::read_field_csv(path);
    const PeriodicGrid& g = data.grid();
    if ((given.count("grid-nt") && r.count("grid-nt") != g.n_t()) ||
        (given.count("grid-nx") && r.count("grid-nx") != g.n_x()) ||
        (given.count("xmax") && std::abs(r.number("xmax") - g.x_max()) > 1e-9 * g.x_max()))
        throw ConfigError("grid settings disagree with the data file " + path.string());
    r.set("grid-nt", std::to_string(g.n_t()));
    r.set("grid-nx", std::to_string(g.n_x()));
    r.set("xmax", exact(g.x_max()));

    const double alpha = r.number("alpha");
    const TikhonovProblem problem(data, alpha, r.count("levels"));
    SolveOptions options;
    options.fast_cycle = r.boolean("fast-cycle");
    options.threads = static_cast<unsigned>(r.count("threads"));
    const TikhonovSolver solver(data, problem.level_count(), options);
    auto report = solver.solve(alpha);
    const std::size_t sweeps = r.count("refine-sweeps");
    if (sweeps > 0) report = solver.refine(report, alpha, sweeps);

    write(out_dir, "solve_report.csv", io::solve_report_csv(report, alpha));
    write(out_dir, "minimizer.csv", io::curve_csv(report.minimizer));
    write(out_dir, "solve.svg", svg::heatmap(data, report.minimizer));
    out << "solve: objective " << io::format_number(report.objective) << " (misfit "
        << io::format_number(report.misfit_part) << ", regularizer " << io::format_number(report.regularizer_part)
        << ")\n";
    return kOk;
}

int cmd_rates(Resolved& r, const fs::path& out_dir, std::ostream& out) {
    RateExperimentConfig cfg;
    cfg.truth = family_of(r);
    const auto tag = cfg.truth.nominal_smoothness();
    if (!r.has("s")) r.set("s", exact(tag.s));
    if (!r.has("q")) r.set("q", std::isinf(tag.q) ? "inf" : exact(tag.q));
    cfg.s = r.number("s");
    cfg.q = r.number("q");
    cfg.grid = grid_of(r);
    cfg.deltas = r.list("deltas");
    cfg.rule = parse_choice_rule(r.text("rule"));
    cfg.alpha0 = r.number("alpha0");
    if (r.has("exponent")) cfg.exponent = r.number("exponent");
    cfg.repetitions = r.count("reps");
    cfg.seed = r.seed();
    cfg.noise = parse_noise_kind(r.text("noise"));
    cfg.refine_sweeps = r.count("refine-sweeps");
    cfg.threads = static_cast<unsigned>(r.count("threads"));
    cfg.validate();

    const auto report = run_rate_experiment(cfg);
    write(out_dir, "rates.csv", io::rate_rows_csv(report));
    write(out_dir, "rates_summary.csv", io::rate_summary_csv(report));
    write(out_dir, "rates.svg", svg::rate_plot(report));
    out << "rates: fitted slope " << io::format_number(report.fit.slope) << " over " << report.fit.points
        << " points, predicted " << io::format_number(report.predicted_exponent) << "\n";
    if (report.floor_dominated) out << "rates: fewer than two noise levels above the discretization floor\n";
    return kOk;
}

int cmd_verify(Resolved& r, const fs::path& out_dir, std::ostream& out) {
    const PeriodicGrid grid = grid_of(r);
    const CurveFamily family = family_of(r);
    const Curve truth = generate_curve(family, grid);
    VerifyConfig cfg;
    cfg.s = r.number("s");
    cfg.q = r.number("q");
    cfg.trials = r.count("trials");
    cfg.seed = r.seed();
    cfg.min_magnitude = r.number("min-mag");
    cfg.max_magnitude = r.number("max-mag");

    const bool fit = r.boolean("fit-constants");
    const bool explicit_given = r.has("c1") || r.has("c2") || r.has("c3");
    if (fit && explicit_given) throw ConfigError("--fit-constants excludes --c1/--c2/--c3");
    if (explicit_given) {
        if (!r.has("c1") || !r.has("c2")) throw ConfigError("explicit constants need both --c1 and --c2");
        const double c3 = r.has("c3") ? r.number("c3") : 0.0;
        if (!std::isinf(cfg.q) && !r.has("c3")) throw ConfigError("finite q needs --c3");
        cfg.constants = VariationalConstants{r.number("c1"), r.number("c2"), c3};
    } else if (!fit && cfg.s == 2.0 && std::isinf(cfg.q) &&
               (family.kind == FamilyKind::sinusoid || family.kind == FamilyKind::constant)) {
        // Closed-form constants for s = 2, q = inf.
        cfg.constants = VariationalConstants{1.0, 2.0 * family.sup_second_derivative(), 0.0};
        r.set("c1", exact(cfg.constants->c1));
        r.set("c2", exact(cfg.constants->c2));
    } else {
        r.set("fit-constants", "true");
    }

    const auto report = verify_variational_inequality(truth, cfg);
    write(out_dir, "verify_trials.csv", io::verify_trials_csv(report));
    write(out_dir, "verify_summary.csv", io::verify_summary_csv(report));
    out << "verify: c1 " << io::format_number(report.constants.c1) << ", c2 "
        << io::format_number(report.constants.c2) << ", c3 " << io::format_number(report.constants.c3)
        << (report.fitted ? " (fitted)" : "") << "; worst margin " << io::format_number(report.worst_margin)
        << ", violations " << report.violations << " of " << report.trials.size() << "\n";
    return kOk;
}

int cmd_probe(Resolved& r, const fs::path& out_dir, std::ostream& out) {
    const PeriodicGrid grid = grid_of(r);
    const Curve gamma = generate_curve(family_of(r), grid);
    std::vector<double> sigma(grid.n_t(), 1.0);
    const std::string direction = r.text("sigma");
    if (direction == "sine") {
        for (std::size_t i = 0; i < sigma.size(); ++i) sigma[i] = std::sin(grid.angle(i));
    } else if (direction != "one") {
        throw ConfigError("unknown --sigma '" + direction + "' (expected one | sine)");
    }
    const auto svalues = r.list("svalues");
    const auto report = probe_nondifferentiability(gamma, sigma, svalues);
    write(out_dir, "probe.csv", io::probe_csv(report));
    out << "probe: slope " << io::format_number(report.fit.slope) << "\n";
    return kOk;
}

int cmd_demo(Resolved& r, const fs::path& out_dir, std::ostream& out) {
    const double delta = r.number("delta");
    if (!r.has("xmax")) r.set("xmax", exact(band_aligned_xmax(delta, r.count("grid-nx"), 3.0)));
    const PeriodicGrid grid = grid_of(r);
    SolveOptions options;
    options.threads = static_cast<unsigned>(r.count("threads"));
    const auto alphas = r.list("alphas");
    const auto report = demo_nonuniqueness(delta, grid, alphas, r.number("tolerance"), options);
    write(out_dir, "nonunique.csv", io::nonuniqueness_csv(report));
    for (const auto& run : report.runs)
        out << "demo-nonunique: alpha " << io::format_number(run.alpha) << " -> constant "
            << io::format_number(run.level) << ", objective " << io::format_number(run.objective) << "\n";
    out << "demo-nonunique: " << (report.all_ok ? "all minimizers constant in the band" : "check failed") << "\n";
    return report.all_ok ? kOk : kNumericalFailure;
}

}  // namespace

Settings parse_config(const std::string& text, const std::string& source) {
    Settings out;
    std::istringstream in(text);
    std::string line;
    std::size_t number = 0;
    while (std::getline(in, line)) {
        ++number;
        if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) throw io::ParseError(source, number, "expected 'key = value'");
        const std::string key = trim(line.substr(0, eq));
        if (key.empty()) throw io::ParseError(source, number, "empty key");
        out[key] = trim(line.substr(eq + 1));
    }
    return out;
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Tikhonov regularization of the hypograph-indicator operator on the cylinder", "hypreg"};
    app.require_subcommand(1);

    const std::vector<std::string> commands{"forward", "solve", "rates", "verify", "probe", "demo-nonunique"};
    const std::map<std::string, std::string> descriptions{
        {"forward", "rasterize a curve into its hypograph indicator"},
        {"solve", "minimize the Tikhonov functional for a data field"},
        {"rates", "error against noise level, with a log-log fit"},
        {"verify", "check the variational inequality on random perturbations"},
        {"probe", "difference quotients of the forward operator"},
        {"demo-nonunique", "minimizers for data with a flat band of value 1/2"},
    };
    std::map<std::string, Settings> cli_values;
    std::map<std::string, std::map<std::string, bool>> cli_flags;
    std::map<std::string, std::string> config_path, out_path;
    std::map<std::string, CLI::App*> subs;
    for (const auto& name : commands) {
        auto* sub = app.add_subcommand(name, descriptions.at(name));
        subs[name] = sub;
        sub->add_option("--config", config_path[name], "key = value file; flags override it");
        sub->add_option("--out", out_path[name], "output directory")->default_val(".");
        for (const auto& key : keys_for(name)) {
            if (key.flag)
                sub->add_flag("--" + key.name, cli_flags[name][key.name], key.help);
            else
                sub->add_option("--" + key.name, cli_values[name][key.name], key.help);
        }
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kOk : kInputError;
    }

    std::string command;
    for (const auto& name : commands)
        if (subs[name]->parsed()) command = name;

    try {
        const auto keys = keys_for(command);
        Settings resolved;
        std::set<std::string> known, given;
        for (const auto& key : keys) {
            known.insert(key.name);
            resolved[key.name] = key.fallback;
        }
        if (!config_path[command].empty()) {
            const auto file = parse_config(io::read_file(config_path[command]), config_path[command]);
            for (const auto& [k, v] : file) {
                if (k == "subcommand") {
                    if (v != command)
                        throw ConfigError("config " + config_path[command] + " is for '" + v + "', not '" +
                                          command + "'");
                    continue;
                }
                if (!known.count(k)) throw ConfigError("unknown setting '" + k + "' in " + config_path[command]);
                resolved[k] = v;
                given.insert(k);
            }
        }
        auto* sub = subs[command];
        for (const auto& key : keys) {
            if (sub->count("--" + key.name) == 0) continue;
            resolved[key.name] = key.flag ? (cli_flags[command][key.name] ? "true" : "false")
                                          : cli_values[command][key.name];
            given.insert(key.name);
        }

        Resolved r(command, std::move(resolved));
        const fs::path out_dir = out_path[command];
        fs::create_directories(out_dir);

        int code = kOk;
        if (command == "forward") code = cmd_forward(r, out_dir, out);
        else if (command == "solve") code = cmd_solve(r, out_dir, out, given);
        else if (command == "rates") code = cmd_rates(r, out_dir, out);
        else if (command == "verify") code = cmd_verify(r, out_dir, out);
        else if (command == "probe") code = cmd_probe(r, out_dir, out);
        else code = cmd_demo(r, out_dir, out);

        io::write_file_atomic(out_dir / "manifest.cfg", r.manifest());
        return code;
    } catch (const fs::filesystem_error& e) {
        err << "error: " << e.what() << "\n";
        return kInputError;
    } catch (const std::logic_error& e) {
        err << "error: " << e.what() << "\n";
        return kInputError;
    } catch (const std::exception& e) {
        err << "numerical failure: " << e.what() << "\n";
        return kNumericalFailure;
    }
}

}  // namespace hypreg::cli
