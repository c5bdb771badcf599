#pragma once

#include <string>
#include <vector>

#include "lpinit/series.hpp"

namespace lpinit {

/// A forecast aligned sample-for-sample with the base series. NaN entries
/// (e.g. the first p + h samples, which have no forecast) are skipped.
struct ForecastTrace {
  std::string label;
  std::vector<double> values;
};

/// Standalone SVG 1.1 document: the series as a solid line, then one
/// polyline per forecast (dashed, dotted, dash-dot, ...) and a legend. Only
/// samples with t_begin <= t <= t_end are drawn, so a narrow window gives
/// the zoomed view.
std::string plot_forecast(const TimeSeries& series, const std::vector<ForecastTrace>& forecasts, double t_begin,
                          double t_end);

}  // namespace lpinit
