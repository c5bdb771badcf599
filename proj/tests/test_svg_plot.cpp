#include <cmath>
#include <regex>
#include <set>
#include <string>
#include <vector>

#include <gtest/gtest.h>

#include "lpinit/svg_plot.hpp"

using namespace lpinit;

namespace {

// Minimal XML check: balanced tags, quoted attributes, no stray '<' or '&'.
bool well_formed(const std::string& doc, std::string* why) {
  std::vector<std::string> stack;
  std::size_t i = 0;
  if (doc.rfind("<?xml", 0) == 0) i = doc.find("?>") + 2;
  while (i < doc.size()) {
    const std::size_t lt = doc.find('<', i);
    const std::string text = doc.substr(i, lt == std::string::npos ? std::string::npos : lt - i);
    for (std::size_t a = text.find('&'); a != std::string::npos; a = text.find('&', a + 1)) {
      if (text.find(';', a) == std::string::npos) return *why = "bare ampersand", false;
    }
    if (lt == std::string::npos) break;
    const std::size_t gt = doc.find('>', lt);
    if (gt == std::string::npos) return *why = "unterminated tag", false;
    std::string tag = doc.substr(lt + 1, gt - lt - 1);
    if (tag.find('<') != std::string::npos) return *why = "'<' inside tag", false;
    if (tag.front() == '/') {
      if (stack.empty() || stack.back() != tag.substr(1)) return *why = "mismatched </" + tag.substr(1) + ">", false;
      stack.pop_back();
    } else {
      const bool self_closing = tag.back() == '/';
      if (self_closing) tag.pop_back();
      const std::string name = tag.substr(0, tag.find_first_of(" \n\t"));
      static const std::regex attrs(R"(^[A-Za-z:][\w:.-]*(\s+[A-Za-z:][\w:.-]*="[^"<]*")*\s*$)");
      if (!std::regex_match(tag, attrs)) return *why = "malformed attributes in <" + name + ">", false;
      if (!self_closing) stack.push_back(name);
    }
    i = gt + 1;
  }
  if (!stack.empty()) return *why = "unclosed <" + stack.back() + ">", false;
  return true;
}

std::size_t count(const std::string& s, const std::string& needle) {
  std::size_t n = 0;
  for (std::size_t p = s.find(needle); p != std::string::npos; p = s.find(needle, p + 1)) ++n;
  return n;
}

TimeSeries sine(std::size_t n) {
  TimeSeries ts;
  for (std::size_t k = 0; k < n; ++k) ts.values.push_back(std::sin(0.1 * static_cast<double>(k)));
  return ts;
}

}  // namespace

TEST(PlotForecast, BaseSeriesOnly) {
  const std::string svg = plot_forecast(sine(100), {}, 0.0, 1.0);
  std::string why;
  EXPECT_TRUE(well_formed(svg, &why)) << why;
  EXPECT_EQ(count(svg, "<polyline"), 1u);
  EXPECT_NE(svg.find("viewBox=\"0 0 800 400\""), std::string::npos);
}

TEST(PlotForecast, ConstantSeriesIsHorizontal) {
  TimeSeries ts;
  ts.values.assign(20, 4.0);
  const std::string svg = plot_forecast(ts, {}, 0.0, 1.0);
  const std::regex point(R"(([-\d.e+]+),([-\d.e+]+))");
  const std::size_t a = svg.find("points=\"");
  const std::string pts = svg.substr(a + 8, svg.find('"', a + 8) - a - 8);
  std::set<std::string> ys;
  std::size_t n = 0;
  for (std::sregex_iterator it(pts.begin(), pts.end(), point), end; it != end; ++it, ++n) ys.insert((*it)[2]);
  EXPECT_EQ(n, 20u);
  EXPECT_EQ(ys.size(), 1u);
  std::string why;
  EXPECT_TRUE(well_formed(svg, &why)) << why;
}

TEST(PlotForecast, OnePolylinePerTraceWithDistinctStyles) {
  const TimeSeries ts = sine(300);
  std::vector<ForecastTrace> f;
  for (const char* label : {"linear", "nn-lpc", "a<b & c"}) {
    ForecastTrace t{label, ts.values};
    for (std::size_t k = 0; k < 10; ++k) t.values[k] = NAN;
    for (double& v : t.values) v *= 1.1;
    f.push_back(t);
  }
  const std::string svg = plot_forecast(ts, f, 0.5, 2.5);
  std::string why;
  EXPECT_TRUE(well_formed(svg, &why)) << why;
  EXPECT_EQ(count(svg, "<polyline"), 4u);
  EXPECT_NE(svg.find("stroke-dasharray=\"6,4\""), std::string::npos);
  EXPECT_NE(svg.find("stroke-dasharray=\"2,3\""), std::string::npos);
  EXPECT_NE(svg.find("a&lt;b &amp; c"), std::string::npos);
  EXPECT_NE(svg.find(">nn-lpc<"), std::string::npos);
}

TEST(PlotForecast, Errors) {
  const TimeSeries ts = sine(50);
  EXPECT_THROW(plot_forecast(ts, {}, 1.0, 1.0), std::invalid_argument);
  EXPECT_THROW(plot_forecast(ts, {}, 10.0, 20.0), std::invalid_argument);
  EXPECT_THROW(plot_forecast(ts, {{"short", std::vector<double>(3, 0.0)}}, 0.0, 0.3), std::invalid_argument);
}

TEST(WellFormedCheck, CatchesBrokenDocuments) {
  std::string why;
  EXPECT_FALSE(well_formed("<svg><polyline></svg>", &why));
  EXPECT_FALSE(well_formed("<svg a=b/>", &why));
  EXPECT_FALSE(well_formed("<svg>x & y</svg>", &why));
  EXPECT_TRUE(well_formed("<svg a=\"1\"><g/></svg>", &why));
}
