#pragma once

#include <optional>
#include <string>

#include "hypreg/analysis.hpp"
#include "hypreg/forward.hpp"
#include "hypreg/geometry.hpp"

namespace hypreg::svg {

/// Grayscale field over (t, x), block-averaged to at most 128 x 128 tiles,
/// with an optional curve drawn on top.
std::string heatmap(const CylinderField& u, const std::optional<Curve>& overlay = std::nullopt);

/// Mean H1 error against delta on log-log axes with the fitted line (when
/// there is one) and a reference line of the predicted slope.
std::string rate_plot(const RateReport& report);

}  // namespace hypreg::svg
