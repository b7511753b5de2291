#include "hypreg/svg.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace hypreg::svg {

namespace {

constexpr double kWidth = 640.0;
constexpr double kHeight = 480.0;
constexpr double kPad = 60.0;
constexpr std::size_t kMaxTiles = 128;

std::ostringstream open_document() {
    std::ostringstream os;
    os.precision(6);
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\"" << kHeight
       << "\" viewBox=\"0 0 " << kWidth << " " << kHeight << "\">\n"
       << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    return os;
}

void axis_frame(std::ostringstream& os, const std::string& xlabel, const std::string& ylabel) {
    os << "<rect x=\"" << kPad << "\" y=\"" << kPad << "\" width=\"" << kWidth - 2 * kPad << "\" height=\""
       << kHeight - 2 * kPad << "\" fill=\"none\" stroke=\"black\"/>\n";
    os << "<text x=\"" << kWidth / 2 << "\" y=\"" << kHeight - 20 << "\" text-anchor=\"middle\" "
       << "font-family=\"sans-serif\" font-size=\"14\">" << xlabel << "</text>\n";
    os << "<text x=\"20\" y=\"" << kHeight / 2 << "\" text-anchor=\"middle\" font-family=\"sans-serif\" "
       << "font-size=\"14\" transform=\"rotate(-90 20 " << kHeight / 2 << ")\">" << ylabel << "</text>\n";
}

}  // namespace

std::string heatmap(const CylinderField& u, const std::optional<Curve>& overlay) {
    const PeriodicGrid& g = u.grid();
    const std::size_t bt = (g.n_t() + kMaxTiles - 1) / kMaxTiles;
    const std::size_t bx = (g.n_x() + kMaxTiles - 1) / kMaxTiles;
    const std::size_t tiles_t = (g.n_t() + bt - 1) / bt;
    const std::size_t tiles_x = (g.n_x() + bx - 1) / bx;
    const double plot_w = kWidth - 2 * kPad;
    const double plot_h = kHeight - 2 * kPad;
    const double two_pi = 2.0 * std::acos(-1.0);

    auto os = open_document();
    for (std::size_t a = 0; a < tiles_t; ++a) {
        for (std::size_t b = 0; b < tiles_x; ++b) {
            double sum = 0.0;
            std::size_t count = 0;
            for (std::size_t i = a * bt; i < std::min(g.n_t(), (a + 1) * bt); ++i)
                for (std::size_t j = b * bx; j < std::min(g.n_x(), (b + 1) * bx); ++j) {
                    sum += u.at(i, j);
                    ++count;
                }
            const double v = std::clamp(sum / static_cast<double>(count), 0.0, 1.0);
            const int shade = static_cast<int>(std::lround(255.0 * (1.0 - v)));
            const double x0 = kPad + plot_w * static_cast<double>(a) / static_cast<double>(tiles_t);
            const double w = plot_w / static_cast<double>(tiles_t);
            const double h = plot_h / static_cast<double>(tiles_x);
            const double y0 = kHeight - kPad - h * static_cast<double>(b + 1);
            os << "<rect x=\"" << x0 << "\" y=\"" << y0 << "\" width=\"" << w + 0.5 << "\" height=\"" << h + 0.5
               << "\" fill=\"rgb(" << shade << "," << shade << "," << shade << ")\"/>\n";
        }
    }
    if (overlay) {
        os << "<polyline fill=\"none\" stroke=\"red\" stroke-width=\"1.5\" points=\"";
        for (std::size_t i = 0; i <= overlay->size(); ++i) {
            const double t = static_cast<double>(i) * g.h_t();
            const double y = (*overlay)[i % overlay->size()];
            os << kPad + plot_w * t / two_pi << "," << kHeight - kPad - plot_h * y / g.x_max() << " ";
        }
        os << "\"/>\n";
    }
    axis_frame(os, "t in [0, 2pi)", "x in [0, " + std::to_string(g.x_max()) + "]");
    os << "</svg>\n";
    return os.str();
}

std::string rate_plot(const RateReport& report) {
    std::vector<double> lx, ly;
    for (const auto& s : report.summary)
        if (s.delta > 0.0 && s.mean_h1 > 0.0) {
            lx.push_back(std::log10(s.delta));
            ly.push_back(std::log10(s.mean_h1));
        }
    auto os = open_document();
    axis_frame(os, "log10 delta", "log10 mean H1 error");
    if (lx.empty()) {
        os << "</svg>\n";
        return os.str();
    }
    const auto [xmin_it, xmax_it] = std::minmax_element(lx.begin(), lx.end());
    const double xmin = *xmin_it - 0.1;
    const double xmax = *xmax_it + 0.1;
    const double mx = (*xmin_it + *xmax_it) / 2.0;
    double my = 0.0;
    for (double v : ly) my += v;
    my /= static_cast<double>(ly.size());

    // y-range wide enough for the points and both lines across the x-range.
    double ymin = *std::min_element(ly.begin(), ly.end());
    double ymax = *std::max_element(ly.begin(), ly.end());
    auto reference = [&](double x) { return my + report.predicted_exponent * (x - mx); };
    const bool has_fit = std::isfinite(report.fit.slope);
    auto fitted = [&](double x) {
        // log10 y = (intercept + slope ln x) / ln 10
        return (report.fit.intercept + report.fit.slope * x * std::log(10.0)) / std::log(10.0);
    };
    for (double x : {xmin, xmax}) {
        ymin = std::min(ymin, reference(x));
        ymax = std::max(ymax, reference(x));
        if (has_fit) {
            ymin = std::min(ymin, fitted(x));
            ymax = std::max(ymax, fitted(x));
        }
    }
    ymin -= 0.1;
    ymax += 0.1;
    const double plot_w = kWidth - 2 * kPad;
    const double plot_h = kHeight - 2 * kPad;
    auto px = [&](double x) { return kPad + plot_w * (x - xmin) / (xmax - xmin); };
    auto py = [&](double y) { return kHeight - kPad - plot_h * (y - ymin) / (ymax - ymin); };

    os << "<line x1=\"" << px(xmin) << "\" y1=\"" << py(reference(xmin)) << "\" x2=\"" << px(xmax)
       << "\" y2=\"" << py(reference(xmax)) << "\" stroke=\"gray\" stroke-dasharray=\"6,4\"/>\n";
    if (has_fit)
        os << "<line x1=\"" << px(xmin) << "\" y1=\"" << py(fitted(xmin)) << "\" x2=\"" << px(xmax)
           << "\" y2=\"" << py(fitted(xmax)) << "\" stroke=\"blue\"/>\n";
    for (std::size_t k = 0; k < lx.size(); ++k)
        os << "<circle cx=\"" << px(lx[k]) << "\" cy=\"" << py(ly[k]) << "\" r=\"4\" fill=\"black\"/>\n";

    std::ostringstream legend;
    legend.precision(4);
    legend << "predicted slope " << report.predicted_exponent;
    if (has_fit) legend << ", fitted " << report.fit.slope;
    else legend << ", no fit (floor-dominated)";
    os << "<text x=\"" << kPad + 10 << "\" y=\"" << kPad - 15 << "\" font-family=\"sans-serif\" font-size=\"13\">"
       << legend.str() << "</text>\n</svg>\n";
    return os.str();
}

}  // namespace hypreg::svg
