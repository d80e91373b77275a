#include "gradlens/chart.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <sstream>

#include <nlohmann/json.hpp>

#include "gradlens/error.hpp"
#include "gradlens/report_io.hpp"

namespace gradlens {
namespace {

using nlohmann::json;

std::string escape_xml(std::string_view text) {
  std::string out;
  out.reserve(text.size());
  for (char c : text) {
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

std::string fixed(double value, int decimals) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.*f", decimals, value);
  return buf;
}

constexpr const char* kPalette[] = {"#1b5e8c", "#c0392b", "#2e8b57", "#8e44ad", "#d35400",
                                    "#16a085", "#7f8c8d", "#b7950b", "#2c3e50", "#e84393",
                                    "#6c5ce7", "#00838f"};

class SvgDocument {
 public:
  SvgDocument(double width, double height) : width_(width), height_(height) {}

  void text(double x, double y, std::string_view content, std::string_view cls,
            std::string_view anchor = "start", double rotate = 0.0) {
    body_ << "<text class=\"" << cls << "\" x=\"" << fixed(x, 1) << "\" y=\"" << fixed(y, 1)
          << "\" text-anchor=\"" << anchor << "\"";
    if (rotate != 0.0)
      body_ << " transform=\"rotate(" << fixed(rotate, 0) << ' ' << fixed(x, 1) << ' '
            << fixed(y, 1) << ")\"";
    body_ << '>' << escape_xml(content) << "</text>\n";
  }
  void line(double x1, double y1, double x2, double y2, std::string_view stroke,
            double width = 1.0, std::string_view cls = "") {
    body_ << "<line";
    if (!cls.empty()) body_ << " class=\"" << cls << '"';
    body_ << " x1=\"" << fixed(x1, 1) << "\" y1=\"" << fixed(y1, 1) << "\" x2=\"" << fixed(x2, 1)
          << "\" y2=\"" << fixed(y2, 1) << "\" stroke=\"" << stroke << "\" stroke-width=\""
          << fixed(width, 1) << "\"/>\n";
  }
  void rect(double x, double y, double w, double h, std::string_view fill, std::string_view cls) {
    body_ << "<rect class=\"" << cls << "\" x=\"" << fixed(x, 1) << "\" y=\"" << fixed(y, 1)
          << "\" width=\"" << fixed(std::max(w, 0.0), 1) << "\" height=\""
          << fixed(std::max(h, 0.0), 1) << "\" fill=\"" << fill << "\"/>\n";
  }
  void circle(double cx, double cy, double r, std::string_view fill, std::string_view cls) {
    body_ << "<circle class=\"" << cls << "\" cx=\"" << fixed(cx, 1) << "\" cy=\"" << fixed(cy, 1)
          << "\" r=\"" << fixed(r, 1) << "\" fill=\"" << fill << "\"/>\n";
  }
  void polygon(const std::vector<std::pair<double, double>>& points, std::string_view fill,
               std::string_view cls) {
    body_ << "<polygon class=\"" << cls << "\" points=\"";
    for (std::size_t i = 0; i < points.size(); ++i)
      body_ << (i ? " " : "") << fixed(points[i].first, 1) << ',' << fixed(points[i].second, 1);
    body_ << "\" fill=\"" << fill << "\"/>\n";
  }
  void polyline(const std::vector<std::pair<double, double>>& points, std::string_view stroke,
                std::string_view cls) {
    body_ << "<polyline class=\"" << cls << "\" fill=\"none\" stroke=\"" << stroke
          << "\" stroke-width=\"2\" points=\"";
    for (std::size_t i = 0; i < points.size(); ++i)
      body_ << (i ? " " : "") << fixed(points[i].first, 1) << ',' << fixed(points[i].second, 1);
    body_ << "\"/>\n";
  }
  void open_group(std::string_view cls, std::string_view data_label) {
    body_ << "<g class=\"" << cls << "\" data-label=\"" << escape_xml(data_label) << "\">\n";
  }
  void close_group() { body_ << "</g>\n"; }

  std::string finish(std::string_view title) const {
    std::ostringstream out;
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << fixed(width_, 0)
        << "\" height=\"" << fixed(height_, 0) << "\" viewBox=\"0 0 " << fixed(width_, 0) << ' '
        << fixed(height_, 0) << "\" font-family=\"Helvetica, Arial, sans-serif\" font-size=\"11\">\n"
        << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
        << "<text class=\"title\" x=\"" << fixed(width_ / 2, 1)
        << "\" y=\"22\" text-anchor=\"middle\" font-size=\"15\">" << escape_xml(title)
        << "</text>\n"
        << body_.str() << "</svg>\n";
    return out.str();
  }

 private:
  double width_;
  double height_;
  std::ostringstream body_;
};

double nice_ceiling(double value) {
  if (value <= 0.0) return 1.0;
  double magnitude = std::pow(10.0, std::floor(std::log10(value)));
  for (double step : {1.0, 2.0, 2.5, 5.0, 10.0})
    if (step * magnitude >= value) return step * magnitude;
  return 10.0 * magnitude;
}

std::string render_line(const std::string& title, const std::vector<SeriesPoint>& points) {
  const bool distance = std::all_of(points.begin(), points.end(), [](const SeriesPoint& p) {
    return p.metric == Metric::JSDistance;
  });
  const int decimals = distance ? 3 : 1;
  const double left = 64, right = 200, top = 44, bottom = 56, width = 760, height = 440;
  const double plot_w = width - left - right, plot_h = height - top - bottom;

  auto [min_it, max_it] = std::minmax_element(
      points.begin(), points.end(), [](const auto& a, const auto& b) { return a.year < b.year; });
  const int first_year = min_it->year, last_year = max_it->year;
  double y_max = 0.0;
  for (const auto& p : points) y_max = std::max(y_max, p.value);
  y_max = distance ? nice_ceiling(std::max(y_max * 1.1, 0.05)) : nice_ceiling(std::max(y_max * 1.1, 1.0));
  if (!distance) y_max = std::min(y_max, 100.0);

  auto x_of = [&](int year) {
    if (first_year == last_year) return left + plot_w / 2;
    return left + plot_w * (year - first_year) / double(last_year - first_year);
  };
  auto y_of = [&](double v) { return top + plot_h * (1.0 - v / y_max); };

  SvgDocument svg(width, height);
  svg.line(left, top, left, top + plot_h, "#333", 1, "axis");
  svg.line(left, top + plot_h, left + plot_w, top + plot_h, "#333", 1, "axis");
  for (int i = 0; i <= 5; ++i) {
    double v = y_max * i / 5.0;
    svg.line(left - 4, y_of(v), left + plot_w, y_of(v), i ? "#e5e5e5" : "#333");
    svg.text(left - 8, y_of(v) + 4, fixed(v, distance ? 2 : 0), "tick", "end");
  }
  const int span = last_year - first_year;
  const int step = span > 20 ? (span + 19) / 20 : 1;
  for (int year = first_year; year <= last_year; year += step) {
    svg.line(x_of(year), top + plot_h, x_of(year), top + plot_h + 4, "#333");
    svg.text(x_of(year), top + plot_h + 18, std::to_string(year), "tick year", "middle");
  }
  svg.text(left + plot_w / 2, height - 12, "Year", "axis-label", "middle");
  svg.text(18, top + plot_h / 2, distance ? "Jensen-Shannon distance" : "Percent", "axis-label",
           "middle", -90);

  // One line per (institution, group, metric), in order of first appearance.
  std::vector<std::string> keys;
  std::map<std::string, std::vector<const SeriesPoint*>> lines;
  for (const auto& p : points) {
    std::string key = (p.institution.empty() ? "" : p.institution + " ") + p.group +
                      " (" + std::string(to_string(p.metric)) + ")";
    if (!lines.contains(key)) keys.push_back(key);
    lines[key].push_back(&p);
  }
  for (std::size_t s = 0; s < keys.size(); ++s) {
    const char* color = kPalette[s % std::size(kPalette)];
    auto& series = lines[keys[s]];
    std::sort(series.begin(), series.end(), [](auto* a, auto* b) { return a->year < b->year; });
    svg.open_group("series", keys[s]);
    std::vector<std::pair<double, double>> xy;
    for (auto* p : series) xy.emplace_back(x_of(p->year), y_of(p->value));
    svg.polyline(xy, color, "line");
    for (auto* p : series) {
      svg.circle(x_of(p->year), y_of(p->value), 3, color, "point");
      svg.text(x_of(p->year), y_of(p->value) - 7, fixed(p->value, decimals), "value", "middle");
    }
    svg.close_group();
    double ly = top + 10 + 18.0 * s;
    svg.rect(left + plot_w + 16, ly - 9, 12, 12, color, "legend-swatch");
    svg.text(left + plot_w + 32, ly + 1, keys[s], "legend");
  }
  return svg.finish(title);
}

std::string render_dumbbell(const std::string& title, const std::vector<EvennessTriple>& rows) {
  const double left = 150, right = 40, top = 60, row_h = 30;
  const double width = 760, height = top + row_h * rows.size() + 70;
  const double plot_w = width - left - right;
  auto x_of = [&](double percent) { return left + plot_w * std::clamp(percent, 0.0, 100.0) / 100.0; };
  const double plot_bottom = top + row_h * rows.size();

  SvgDocument svg(width, height);
  for (int v = 0; v <= 100; v += 20) {
    svg.line(x_of(v), top - 6, x_of(v), plot_bottom, v ? "#e5e5e5" : "#333");
    svg.text(x_of(v), plot_bottom + 16, std::to_string(v) + "%", "tick", "middle");
  }
  svg.text(left + plot_w / 2, plot_bottom + 36, "Shannon equitability (E_H, percent)",
           "axis-label", "middle");

  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto& r = rows[i];
    const double y = top + row_h * (i + 0.5);
    svg.open_group("row", r.institution);
    svg.text(left - 10, y + 4, r.institution, "row-label", "end");
    double lo = std::min({r.gender, r.race, r.intersectional});
    double hi = std::max({r.gender, r.race, r.intersectional});
    svg.line(x_of(lo), y, x_of(hi), y, "#999", 3, "bar");
    svg.circle(x_of(r.gender), y, 5.5, "#1b5e8c", "marker gender");
    double xr = x_of(r.race);
    svg.polygon({{xr, y - 6.5}, {xr - 6, y + 5}, {xr + 6, y + 5}}, "#c0392b", "marker race");
    double xi = x_of(r.intersectional);
    svg.polygon({{xi, y - 7}, {xi + 6, y}, {xi, y + 7}, {xi - 6, y}}, "#2e8b57",
                "marker intersectional");
    svg.text(x_of(r.gender), y - 9, fixed(r.gender, 1), "value gender", "middle");
    svg.text(xr, y + 17, fixed(r.race, 1), "value race", "middle");
    svg.text(xi, y - 9, fixed(r.intersectional, 1), "value intersectional", "middle");
    svg.close_group();
  }
  // legend
  const double ly = 40;
  svg.circle(left, ly, 5, "#1b5e8c", "legend-marker");
  svg.text(left + 10, ly + 4, "gender (circle)", "legend");
  svg.polygon({{left + 130, ly - 6}, {left + 124, ly + 5}, {left + 136, ly + 5}}, "#c0392b",
              "legend-marker");
  svg.text(left + 142, ly + 4, "race (triangle)", "legend");
  svg.polygon({{left + 260, ly - 6}, {left + 266, ly}, {left + 260, ly + 6}, {left + 254, ly}},
              "#2e8b57", "legend-marker");
  svg.text(left + 272, ly + 4, "intersectional (diamond)", "legend");
  return svg.finish(title);
}

std::string render_grouped_bar(const std::string& title, const std::vector<GapRow>& rows) {
  const double left = 64, right = 30, top = 60, bottom = 190, slot = 48;
  const double width = left + right + slot * rows.size(), height = 560;
  const double plot_h = height - top - bottom;
  double y_max = 0.0;
  for (const auto& r : rows) y_max = std::max({y_max, r.program_share, r.university_share});
  y_max = std::min(100.0, nice_ceiling(std::max(y_max * 1.1, 1.0)));
  auto y_of = [&](double v) { return top + plot_h * (1.0 - v / y_max); };

  SvgDocument svg(std::max(width, 420.0), height);
  for (int i = 0; i <= 5; ++i) {
    double v = y_max * i / 5.0;
    svg.line(left - 4, y_of(v), left + slot * rows.size(), y_of(v), i ? "#e5e5e5" : "#333");
    svg.text(left - 8, y_of(v) + 4, fixed(v, 0), "tick", "end");
  }
  svg.text(18, top + plot_h / 2, "Percent of degrees", "axis-label", "middle", -90);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto& r = rows[i];
    const double x = left + slot * i;
    svg.open_group("cell", cell_label(r.cell));
    // Reference share as a wide gray bar, program share as a narrow black bar in front.
    svg.rect(x + 6, y_of(r.university_share), slot - 12, y_of(0) - y_of(r.university_share),
             "#bdbdbd", "bar reference");
    svg.rect(x + 15, y_of(r.program_share), slot - 30, y_of(0) - y_of(r.program_share), "#111",
             "bar program");
    svg.text(x + slot / 2, std::min(y_of(r.program_share), y_of(r.university_share)) - 16,
             fixed(r.program_share, 1), "value program", "middle");
    svg.text(x + slot / 2, std::min(y_of(r.program_share), y_of(r.university_share)) - 5,
             fixed(r.university_share, 1), "value reference", "middle");
    svg.text(x + slot / 2, y_of(0) + 12, cell_label(r.cell), "tick cell", "end", -55);
    svg.close_group();
  }
  svg.rect(left, 34, 12, 12, "#111", "legend-swatch");
  svg.text(left + 16, 44, "program degrees", "legend");
  svg.rect(left + 140, 34, 12, 12, "#bdbdbd", "legend-swatch");
  svg.text(left + 156, 44, "all degrees", "legend");
  return svg.finish(title);
}

std::string render_pair(const std::string& title, const gradlens::DistributionPair& pair) {
  const std::size_t n = std::max(pair.program.size(), pair.reference.size());
  const double label_w = 250, panel_w = 220, gap = 40, top = 70, row_h = 20;
  const double width = label_w + 2 * panel_w + gap + 60, height = top + row_h * n + 40;
  double max_p = 0.0;
  for (double p : pair.program.probabilities()) max_p = std::max(max_p, p);
  for (double p : pair.reference.probabilities()) max_p = std::max(max_p, p);
  const double scale = nice_ceiling(std::max(max_p * 100.0, 1.0));

  SvgDocument svg(width, height);
  auto panel = [&](const Distribution& dist, double x0, std::string_view heading,
                   std::string_view cls, std::string_view fill) {
    svg.text(x0 + panel_w / 2, top - 16, heading, "panel-title", "middle");
    svg.open_group(cls, heading);
    for (std::size_t i = 0; i < dist.size(); ++i) {
      double y = top + row_h * i;
      double pct = 100.0 * dist[i];
      svg.rect(x0, y + 3, panel_w * pct / scale, row_h - 6, fill, "bar");
      svg.text(x0 + panel_w * pct / scale + 4, y + row_h / 2 + 4, fixed(pct, 1) + "%", "value");
    }
    svg.close_group();
  };
  for (std::size_t i = 0; i < pair.program.size(); ++i)
    svg.text(label_w - 8, top + row_h * i + row_h / 2 + 4, pair.program.labels()[i], "row-label",
             "end");
  panel(pair.program, label_w, "program: " + pair.program_label, "panel program", "#111");
  panel(pair.reference, label_w + panel_w + gap, "reference: " + pair.reference_label,
        "panel reference", "#9e9e9e");
  return svg.finish(title);
}

bool payload_empty(const ChartPayload& payload) {
  return std::visit(
      [](const auto& p) {
        using T = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<T, gradlens::DistributionPair>)
          return p.program.size() == 0 || p.reference.size() == 0;
        else
          return p.empty();
      },
      payload);
}

std::size_t expected_index(ChartKind kind) {
  switch (kind) {
    case ChartKind::Line: return 0;
    case ChartKind::Dumbbell: return 1;
    case ChartKind::GroupedBar: return 2;
    case ChartKind::DistributionPair: return 3;
  }
  return 0;
}

json payload_json(const ChartPayload& payload) {
  return std::visit([](const auto& p) { return json(p); }, payload);
}

}  // namespace

std::string_view to_string(ChartKind kind) noexcept {
  switch (kind) {
    case ChartKind::Line: return "line";
    case ChartKind::Dumbbell: return "dumbbell";
    case ChartKind::GroupedBar: return "bar";
    case ChartKind::DistributionPair: return "pair";
  }
  return "?";
}

std::optional<ChartKind> parse_chart_kind(std::string_view text) noexcept {
  for (auto k : {ChartKind::Line, ChartKind::Dumbbell, ChartKind::GroupedBar,
                 ChartKind::DistributionPair})
    if (text == to_string(k)) return k;
  if (text == "grouped-bar") return ChartKind::GroupedBar;
  if (text == "distribution-pair") return ChartKind::DistributionPair;
  return std::nullopt;
}

std::string_view to_string(ChartFormat format) noexcept {
  switch (format) {
    case ChartFormat::Csv: return "csv";
    case ChartFormat::Json: return "json";
    case ChartFormat::Svg: return "svg";
  }
  return "?";
}

std::optional<ChartFormat> parse_chart_format(std::string_view text) noexcept {
  for (auto f : {ChartFormat::Csv, ChartFormat::Json, ChartFormat::Svg})
    if (text == to_string(f)) return f;
  return std::nullopt;
}

std::string emit_chart(const ChartSpec& spec) {
  if (spec.payload.index() != expected_index(spec.kind))
    throw Error(ErrorKind::InvalidFilter, "chart kind does not match its payload",
                std::string(to_string(spec.kind)));
  if (payload_empty(spec.payload))
    throw Error(ErrorKind::EmptyPayload, "nothing to chart", spec.title);

  switch (spec.format) {
    case ChartFormat::Json:
      return json{{"kind", to_string(spec.kind)},
                  {"title", spec.title},
                  {"payload", payload_json(spec.payload)}}
                 .dump(2) +
             "\n";
    case ChartFormat::Csv:
      switch (spec.kind) {
        case ChartKind::Line: return series_csv(std::get<0>(spec.payload));
        case ChartKind::Dumbbell: return evenness_csv(std::get<1>(spec.payload));
        case ChartKind::GroupedBar: return gap_csv(std::get<2>(spec.payload));
        case ChartKind::DistributionPair: return distribution_pair_csv(std::get<3>(spec.payload));
      }
      break;
    case ChartFormat::Svg:
      switch (spec.kind) {
        case ChartKind::Line: return render_line(spec.title, std::get<0>(spec.payload));
        case ChartKind::Dumbbell: return render_dumbbell(spec.title, std::get<1>(spec.payload));
        case ChartKind::GroupedBar: return render_grouped_bar(spec.title, std::get<2>(spec.payload));
        case ChartKind::DistributionPair: return render_pair(spec.title, std::get<3>(spec.payload));
      }
      break;
  }
  return {};
}

ChartPayload parse_chart_payload(ChartKind kind, ChartFormat format, std::string_view text) {
  if (format == ChartFormat::Svg)
    throw Error(ErrorKind::InvalidFilter, "SVG output is not a data format");
  if (format == ChartFormat::Csv) {
    switch (kind) {
      case ChartKind::Line: return series_from_csv(text);
      case ChartKind::Dumbbell: return evenness_from_csv(text);
      case ChartKind::GroupedBar: return gap_from_csv(text);
      case ChartKind::DistributionPair: return distribution_pair_from_csv(text);
    }
  }
  auto j = json::parse(text);
  const auto& payload = j.at("payload");
  switch (kind) {
    case ChartKind::Line: return payload.get<std::vector<SeriesPoint>>();
    case ChartKind::Dumbbell: return payload.get<std::vector<EvennessTriple>>();
    case ChartKind::GroupedBar: return payload.get<std::vector<GapRow>>();
    case ChartKind::DistributionPair: return distribution_pair_from_json(payload);
  }
  return {};
}

}  // namespace gradlens
