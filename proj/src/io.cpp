#include "hypreg/io.hpp"

#include <cerrno>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <unistd.h>

namespace hypreg::io {

namespace fs = std::filesystem;

ParseError::ParseError(const std::string& source, std::size_t line, const std::string& what)
    : std::invalid_argument(source + ":" + std::to_string(line) + ": " + what), line_(line) {}

std::string format_number(double v) {
    std::ostringstream os;
    os.precision(12);
    os << v;
    return os.str();
}

void write_file_atomic(const fs::path& path, const std::string& content) {
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    fs::path tmp = path;
    tmp += ".tmp." + std::to_string(::getpid());
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw fs::filesystem_error("cannot open for writing", tmp, std::make_error_code(std::errc::io_error));
        out << content;
        out.flush();
        if (!out) throw fs::filesystem_error("write failed", tmp, std::make_error_code(std::errc::io_error));
    }
    fs::rename(tmp, path);
}

std::string read_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw fs::filesystem_error("cannot read", path, std::make_error_code(std::errc::no_such_file_or_directory));
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

namespace {

std::string trim(std::string s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

std::vector<std::string> split(const std::string& line) {
    std::vector<std::string> out;
    std::string cell;
    std::istringstream ss(line);
    while (std::getline(ss, cell, ',')) out.push_back(trim(cell));
    if (!line.empty() && line.back() == ',') out.emplace_back();
    return out;
}

double parse_number(const std::string& text, const std::string& source, std::size_t line) {
    if (text.empty()) throw ParseError(source, line, "empty field");
    char* end = nullptr;
    errno = 0;
    const double v = std::strtod(text.c_str(), &end);
    if (end != text.c_str() + text.size() || errno == ERANGE)
        throw ParseError(source, line, "not a number: '" + text + "'");
    return v;
}

// Reads non-empty lines with their 1-based line numbers.
std::vector<std::pair<std::size_t, std::string>> read_lines(std::istream& in) {
    std::vector<std::pair<std::size_t, std::string>> lines;
    std::string line;
    std::size_t number = 0;
    while (std::getline(in, line)) {
        ++number;
        line = trim(line);
        if (!line.empty()) lines.emplace_back(number, line);
    }
    return lines;
}

}  // namespace

std::string curve_csv(const Curve& c) {
    std::string out = "t,value\n";
    for (std::size_t i = 0; i < c.size(); ++i)
        out += format_number(c.grid().angle(i)) + "," + format_number(c[i]) + "\n";
    return out;
}

Curve parse_curve_csv(std::istream& in, std::size_t n_x, double x_max, const std::string& source) {
    const auto lines = read_lines(in);
    if (lines.empty()) throw ParseError(source, 1, "empty file");
    if (split(lines[0].second) != std::vector<std::string>{"t", "value"})
        throw ParseError(source, lines[0].first, "expected header 't,value'");
    std::vector<double> t, values;
    for (std::size_t k = 1; k < lines.size(); ++k) {
        const auto [number, text] = lines[k];
        const auto cells = split(text);
        if (cells.size() != 2) throw ParseError(source, number, "expected 2 fields, got " + std::to_string(cells.size()));
        t.push_back(parse_number(cells[0], source, number));
        values.push_back(parse_number(cells[1], source, number));
    }
    if (values.size() < 3) throw ParseError(source, lines.back().first, "need at least 3 nodes");
    const PeriodicGrid grid(values.size(), n_x, x_max);
    for (std::size_t i = 0; i < t.size(); ++i)
        if (std::abs(t[i] - grid.angle(i)) > 1e-9)
            throw ParseError(source, lines[i + 1].first,
                             "angle " + format_number(t[i]) + " is not the uniform node " +
                                 format_number(grid.angle(i)));
    return Curve(grid, std::move(values));
}

Curve read_curve_csv(const fs::path& path, std::size_t n_x, double x_max) {
    std::istringstream in(read_file(path));
    return parse_curve_csv(in, n_x, x_max, path.string());
}

std::string field_csv(const CylinderField& u) {
    const PeriodicGrid& g = u.grid();
    std::string out = "t\\x";
    for (std::size_t j = 0; j < g.n_x(); ++j) out += "," + format_number(g.cell_center(j));
    out += "\n";
    for (std::size_t i = 0; i < g.n_t(); ++i) {
        out += format_number(g.angle(i));
        for (double v : u.row(i)) out += "," + format_number(v);
        out += "\n";
    }
    return out;
}

CylinderField parse_field_csv(std::istream& in, const std::string& source) {
    const auto lines = read_lines(in);
    if (lines.empty()) throw ParseError(source, 1, "empty file");
    const auto header = split(lines[0].second);
    if (header.empty() || header[0] != "t\\x")
        throw ParseError(source, lines[0].first, "expected header starting with 't\\x'");
    const std::size_t n_x = header.size() - 1;
    if (n_x < 2) throw ParseError(source, lines[0].first, "need at least 2 radial cells");
    std::vector<double> centers(n_x);
    for (std::size_t j = 0; j < n_x; ++j) centers[j] = parse_number(header[j + 1], source, lines[0].first);
    const double x_max = 2.0 * static_cast<double>(n_x) * centers[0];
    for (std::size_t j = 0; j < n_x; ++j) {
        const double expected = x_max * (static_cast<double>(j) + 0.5) / static_cast<double>(n_x);
        if (std::abs(centers[j] - expected) > 1e-9 * x_max)
            throw ParseError(source, lines[0].first, "radial cell centers are not uniform");
    }

    const std::size_t n_t = lines.size() - 1;
    if (n_t < 3) throw ParseError(source, lines.back().first, "need at least 3 angle rows");
    const PeriodicGrid grid(n_t, n_x, x_max);
    std::vector<double> cells;
    cells.reserve(n_t * n_x);
    for (std::size_t i = 0; i < n_t; ++i) {
        const auto [number, text] = lines[i + 1];
        const auto row = split(text);
        if (row.size() != n_x + 1)
            throw ParseError(source, number, "expected " + std::to_string(n_x + 1) + " fields, got " +
                                                 std::to_string(row.size()));
        const double t = parse_number(row[0], source, number);
        if (std::abs(t - grid.angle(i)) > 1e-9)
            throw ParseError(source, number, "angle " + row[0] + " is not the uniform node " +
                                                 format_number(grid.angle(i)));
        for (std::size_t j = 0; j < n_x; ++j) {
            const double v = parse_number(row[j + 1], source, number);
            if (!std::isfinite(v)) throw ParseError(source, number, "non-finite cell value");
            cells.push_back(v);
        }
    }
    return CylinderField(grid, std::move(cells));
}

CylinderField read_field_csv(const fs::path& path) {
    std::istringstream in(read_file(path));
    return parse_field_csv(in, path.string());
}

std::string solve_report_csv(const SolveReport& r, double alpha) {
    return "alpha,objective,misfit,regularizer,restarts,refined\n" + format_number(alpha) + "," +
           format_number(r.objective) + "," + format_number(r.misfit_part) + "," +
           format_number(r.regularizer_part) + "," + std::to_string(r.restarts_used) + "," +
           (r.refined ? "1" : "0") + "\n";
}

std::string rate_rows_csv(const RateReport& r) {
    std::string out = "delta,alpha,rep,h1_error,l2_error,objective,misfit,regularizer\n";
    for (const auto& row : r.rows)
        out += format_number(row.delta) + "," + format_number(row.alpha) + "," + std::to_string(row.rep) +
               "," + format_number(row.h1_error) + "," + format_number(row.l2_error) + "," +
               format_number(row.objective) + "," + format_number(row.misfit) + "," +
               format_number(row.regularizer) + "\n";
    return out;
}

std::string rate_summary_csv(const RateReport& r) {
    std::string out = "delta,mean_h1,max_h1,mean_l2\n";
    for (const auto& s : r.summary)
        out += format_number(s.delta) + "," + format_number(s.mean_h1) + "," + format_number(s.max_h1) +
               "," + format_number(s.mean_l2) + "\n";
    out += "slope,intercept,residual,predicted_exponent\n";
    out += format_number(r.fit.slope) + "," + format_number(r.fit.intercept) + "," +
           format_number(r.fit.residual) + "," + format_number(r.predicted_exponent) + "\n";
    return out;
}

std::string verify_trials_csv(const VerifyReport& r) {
    std::string out = "kind,magnitude,error_h1_sq,regularizer_gap,fidelity,lhs,rhs,margin\n";
    for (const auto& t : r.trials)
        out += to_string(t.kind) + "," + format_number(t.magnitude) + "," + format_number(t.error_h1_sq) +
               "," + format_number(t.regularizer_gap) + "," + format_number(t.fidelity) + "," +
               format_number(t.lhs) + "," + format_number(t.rhs) + "," + format_number(t.margin) + "\n";
    return out;
}

std::string verify_summary_csv(const VerifyReport& r) {
    return "c1,c2,c3,fitted,worst_margin,violations,max_feasible_c1,trials\n" + format_number(r.constants.c1) +
           "," + format_number(r.constants.c2) + "," + format_number(r.constants.c3) + "," +
           (r.fitted ? "1" : "0") + "," + format_number(r.worst_margin) + "," +
           std::to_string(r.violations) + "," + format_number(r.max_feasible_c1) + "," +
           std::to_string(r.trials.size()) + "\n";
}

std::string probe_csv(const ProbeReport& r) {
    std::string out = "s,ratio,predicted\n";
    for (std::size_t k = 0; k < r.s_values.size(); ++k)
        out += format_number(r.s_values[k]) + "," + format_number(r.ratios[k]) + "," +
               format_number(r.predicted[k]) + "\n";
    out += "slope,intercept,residual\n";
    out += format_number(r.fit.slope) + "," + format_number(r.fit.intercept) + "," +
           format_number(r.fit.residual) + "\n";
    return out;
}

std::string nonuniqueness_csv(const NonuniquenessReport& r) {
    std::string out = "alpha,objective,level,spread,constant,in_band,objective_ok\n";
    for (const auto& run : r.runs)
        out += format_number(run.alpha) + "," + format_number(run.objective) + "," + format_number(run.level) +
               "," + format_number(run.spread) + "," + (run.constant ? "1" : "0") + "," +
               (run.in_band ? "1" : "0") + "," + (run.objective_ok ? "1" : "0") + "\n";
    return out;
}

}  // namespace hypreg::io
