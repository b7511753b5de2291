#pragma once

#include <filesystem>
#include <iosfwd>
#include <stdexcept>
#include <string>

#include "hypreg/analysis.hpp"
#include "hypreg/forward.hpp"
#include "hypreg/geometry.hpp"
#include "hypreg/solver.hpp"

namespace hypreg::io {

/// Malformed input; the message carries the offending line number.
class ParseError : public std::invalid_argument {
public:
    ParseError(const std::string& source, std::size_t line, const std::string& what);
    std::size_t line() const { return line_; }

private:
    std::size_t line_;
};

/// 12 significant digits, the precision of every CSV value.
std::string format_number(double v);

/// Writes `content` next to `path` and renames it into place.
void write_file_atomic(const std::filesystem::path& path, const std::string& content);
std::string read_file(const std::filesystem::path& path);

// Curve CSV: header `t,value`, one row per angle node.
std::string curve_csv(const Curve& c);
Curve parse_curve_csv(std::istream& in, std::size_t n_x, double x_max,
                      const std::string& source = "<curve>");
Curve read_curve_csv(const std::filesystem::path& path, std::size_t n_x, double x_max);

// Field CSV: header `t\x,<cell centers>`, one row per angle node.
std::string field_csv(const CylinderField& u);
CylinderField parse_field_csv(std::istream& in, const std::string& source = "<field>");
CylinderField read_field_csv(const std::filesystem::path& path);

std::string solve_report_csv(const SolveReport& r, double alpha);
std::string rate_rows_csv(const RateReport& r);
std::string rate_summary_csv(const RateReport& r);
std::string verify_trials_csv(const VerifyReport& r);
std::string verify_summary_csv(const VerifyReport& r);
std::string probe_csv(const ProbeReport& r);
std::string nonuniqueness_csv(const NonuniquenessReport& r);

}  // namespace hypreg::io
