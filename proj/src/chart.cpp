#include "strainmix/chart.hpp"

#include <algorithm>
#include <cstdio>
#include <set>

#include "strainmix/error.hpp"

namespace strainmix {

namespace {

constexpr double kPlotTop = 60.0;
constexpr double kPlotHeight = 240.0;
constexpr double kPlotLeft = 60.0;
constexpr double kBarWidth = 48.0;
constexpr double kBarGap = 24.0;
constexpr double kLegendWidth = 140.0;

constexpr const char* kPalette[] = {"#4e79a7", "#f28e2b", "#e15759", "#76b7b2", "#59a14f",
                                    "#edc948", "#b07aa1", "#ff9da7", "#9c755f", "#bab0ac"};

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

std::string label_number(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

std::string xml_escape(std::string_view s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      case '\'': out += "&apos;"; break;
      default: out += c;
    }
  }
  return out;
}

struct Bar {
  std::string label;
  std::vector<MixtureEntry> segments;  // bottom to top
  std::string annotation;              // above the bar; may be empty
};

std::string render(const std::string& title, const std::vector<Bar>& bars) {
  std::set<std::string> strains;
  for (const auto& b : bars)
    for (const auto& s : b.segments) strains.insert(s.label);
  const std::vector<std::string> legend(strains.begin(), strains.end());
  auto color = [&](const std::string& strain) {
    const auto i = static_cast<std::size_t>(std::lower_bound(legend.begin(), legend.end(), strain) - legend.begin());
    return kPalette[i % std::size(kPalette)];
  };

  const double plot_width = static_cast<double>(bars.size()) * (kBarWidth + kBarGap) + kBarGap;
  const double width = kPlotLeft + plot_width + kLegendWidth;
  const double legend_height = 30.0 + 20.0 * static_cast<double>(legend.size());
  const double height = std::max(kPlotTop + kPlotHeight + 50.0, kPlotTop + legend_height);
  const double base = kPlotTop + kPlotHeight;

  std::string svg;
  svg += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + num(width) + "\" height=\"" + num(height) +
         "\" viewBox=\"0 0 " + num(width) + " " + num(height) + "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  svg += "<rect x=\"0\" y=\"0\" width=\"" + num(width) + "\" height=\"" + num(height) + "\" fill=\"#ffffff\"/>\n";
  svg += "<text class=\"title\" x=\"" + num(kPlotLeft) + "\" y=\"24\" font-size=\"14\">" + xml_escape(title) +
         "</text>\n";

  // Axis with ticks at 0, 0.5, 1 of the infected population.
  svg += "<line x1=\"" + num(kPlotLeft) + "\" y1=\"" + num(kPlotTop) + "\" x2=\"" + num(kPlotLeft) + "\" y2=\"" +
         num(base) + "\" stroke=\"#333333\"/>\n";
  for (double tick : {0.0, 0.5, 1.0}) {
    const double y = base - tick * kPlotHeight;
    svg += "<text x=\"" + num(kPlotLeft - 6) + "\" y=\"" + num(y + 4) + "\" text-anchor=\"end\">" +
           label_number(tick) + "</text>\n";
  }

  for (std::size_t i = 0; i < bars.size(); ++i) {
    const auto& bar = bars[i];
    const double x = kPlotLeft + kBarGap + static_cast<double>(i) * (kBarWidth + kBarGap);
    double y = base;
    for (const auto& seg : bar.segments) {
      const double h = seg.prob * kPlotHeight;
      y -= h;
      svg += "<rect class=\"segment\" x=\"" + num(x) + "\" y=\"" + num(y) + "\" width=\"" + num(kBarWidth) +
             "\" height=\"" + num(h) + "\" fill=\"" + color(seg.label) + "\"><title>" + xml_escape(seg.label) +
             " " + label_number(seg.prob) + "</title></rect>\n";
    }
    svg += "<text x=\"" + num(x + kBarWidth / 2) + "\" y=\"" + num(base + 16) + "\" text-anchor=\"middle\">" +
           xml_escape(bar.label) + "</text>\n";
    if (!bar.annotation.empty())
      svg += "<text class=\"annotation\" x=\"" + num(x + kBarWidth / 2) + "\" y=\"" + num(kPlotTop - 8) +
             "\" text-anchor=\"middle\">" + xml_escape(bar.annotation) + "</text>\n";
  }

  const double lx = kPlotLeft + plot_width + 16;
  svg += "<text x=\"" + num(lx) + "\" y=\"" + num(kPlotTop) + "\">strain</text>\n";
  for (std::size_t i = 0; i < legend.size(); ++i) {
    const double ly = kPlotTop + 12 + 20.0 * static_cast<double>(i);
    svg += "<rect x=\"" + num(lx) + "\" y=\"" + num(ly) + "\" width=\"12\" height=\"12\" fill=\"" +
           color(legend[i]) + "\"/>\n";
    svg += "<text x=\"" + num(lx + 18) + "\" y=\"" + num(ly + 10) + "\">" + xml_escape(legend[i]) + "</text>\n";
  }
  svg += "</svg>\n";
  return svg;
}

}  // namespace

std::string render_chart(const ContrastReport& report) {
  if (report.terms.empty()) throw Error(ErrorKind::EmptyReport, "contrast report has no terms to chart");
  std::vector<Bar> bars;
  for (const auto& t : report.terms) {
    if (bars.empty() || bars.back().label != t.stratum) bars.push_back({t.stratum, {}, {}});
    bars.back().segments.push_back({t.version, t.mixture});
  }
  return render("contrast = " + label_number(report.contrast) + " (" + report.outcome + ")", bars);
}

std::string render_chart(std::span<const TimePoint> series) {
  if (series.empty()) throw Error(ErrorKind::EmptyReport, "timeseries is empty");
  std::vector<Bar> bars;
  for (const auto& point : series) {
    bool first = true;
    for (const auto& m : point.mixtures) {
      const std::string label = point.mixtures.size() == 1 ? point.time : point.time + "/" + m.stratum;
      bars.push_back({label, m.strains, first ? "contrast = " + label_number(point.contrast) : ""});
      first = false;
    }
  }
  return render("strain composition over time", bars);
}

}  // namespace strainmix
