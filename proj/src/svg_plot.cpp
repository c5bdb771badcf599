#include "lpinit/svg_plot.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace lpinit {
namespace {

constexpr double kWidth = 800.0;
constexpr double kHeight = 400.0;
constexpr double kMargin = 50.0;

constexpr std::array<const char*, 4> kDash = {"6,4", "2,3", "8,3,2,3", "1,6"};
constexpr std::array<const char*, 5> kColor = {"#d62728", "#1f77b4", "#2ca02c", "#9467bd", "#ff7f0e"};

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

}  // namespace

std::string plot_forecast(const TimeSeries& series, const std::vector<ForecastTrace>& forecasts, double t_begin,
                          double t_end) {
  if (!(t_end > t_begin)) throw std::invalid_argument("plot_forecast: empty time window");
  for (const auto& f : forecasts) {
    if (f.values.size() != series.size()) throw std::invalid_argument("plot_forecast: forecast '" + f.label + "' is not aligned");
  }
  std::vector<std::size_t> idx;
  for (std::size_t k = 0; k < series.size(); ++k) {
    const double t = series.time_at(k);
    if (t >= t_begin && t <= t_end) idx.push_back(k);
  }
  if (idx.empty()) throw std::invalid_argument("plot_forecast: no samples inside the window");

  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  auto widen = [&](double v) {
    if (std::isfinite(v)) {
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
  };
  for (std::size_t k : idx) {
    widen(series.values[k]);
    for (const auto& f : forecasts) widen(f.values[k]);
  }
  if (hi - lo < 1e-12) {
    // Flat data: centre it in a unit band.
    lo -= 0.5;
    hi += 0.5;
  }
  const double t0 = series.time_at(idx.front());
  const double t1 = std::max(series.time_at(idx.back()), t0 + 1e-12);
  auto px = [&](double t) { return kMargin + (t - t0) / (t1 - t0) * (kWidth - 2 * kMargin); };
  auto py = [&](double v) { return kHeight - kMargin - (v - lo) / (hi - lo) * (kHeight - 2 * kMargin); };

  std::ostringstream os;
  os.precision(6);
  auto polyline = [&](const std::vector<double>& values, const char* color, const char* dash) {
    os << "  <polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\"";
    if (dash) os << " stroke-dasharray=\"" << dash << '"';
    os << " points=\"";
    bool first = true;
    for (std::size_t k : idx) {
      if (!std::isfinite(values[k])) continue;
      os << (first ? "" : " ") << px(series.time_at(k)) << ',' << py(values[k]);
      first = false;
    }
    os << "\"/>\n";
  };

  os << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
     << "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"" << kWidth << "\" height=\"" << kHeight
     << "\" viewBox=\"0 0 " << kWidth << ' ' << kHeight << "\">\n"
     << "  <rect x=\"0\" y=\"0\" width=\"" << kWidth << "\" height=\"" << kHeight << "\" fill=\"white\"/>\n"
     << "  <rect x=\"" << kMargin << "\" y=\"" << kMargin << "\" width=\"" << kWidth - 2 * kMargin << "\" height=\""
     << kHeight - 2 * kMargin << "\" fill=\"none\" stroke=\"#888\"/>\n"
     << "  <text x=\"" << kMargin << "\" y=\"" << kHeight - 15 << "\" font-size=\"12\">t = " << t0 << " s</text>\n"
     << "  <text x=\"" << kWidth - kMargin << "\" y=\"" << kHeight - 15 << "\" font-size=\"12\" text-anchor=\"end\">t = "
     << t1 << " s</text>\n"
     << "  <text x=\"5\" y=\"" << kMargin << "\" font-size=\"12\">" << hi << "</text>\n"
     << "  <text x=\"5\" y=\"" << kHeight - kMargin << "\" font-size=\"12\">" << lo << "</text>\n";

  polyline(series.values, "black", nullptr);
  for (std::size_t i = 0; i < forecasts.size(); ++i) {
    polyline(forecasts[i].values, kColor[i % kColor.size()], kDash[i % kDash.size()]);
  }

  // Legend
  double ly = kMargin + 15;
  auto legend_entry = [&](const std::string& label, const char* color, const char* dash) {
    os << "  <line x1=\"" << kMargin + 10 << "\" y1=\"" << ly << "\" x2=\"" << kMargin + 40 << "\" y2=\"" << ly
       << "\" stroke=\"" << color << "\" stroke-width=\"1.5\"";
    if (dash) os << " stroke-dasharray=\"" << dash << '"';
    os << "/>\n  <text x=\"" << kMargin + 45 << "\" y=\"" << ly + 4 << "\" font-size=\"12\">" << escape(label)
       << "</text>\n";
    ly += 16;
  };
  legend_entry("series", "black", nullptr);
  for (std::size_t i = 0; i < forecasts.size(); ++i) {
    legend_entry(forecasts[i].label, kColor[i % kColor.size()], kDash[i % kDash.size()]);
  }
  os << "</svg>\n";
  return os.str();
}

}  // namespace lpinit
