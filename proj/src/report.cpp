#include "rentlens/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

#include <json.hpp>

#include "rentlens/error.hpp"

namespace rentlens {

namespace {

using ordered_json = nlohmann::ordered_json;

std::string fmt(double v, const char* spec = "%.6g") {
  char buf[64];
  std::snprintf(buf, sizeof(buf), spec, v);
  return buf;
}

ordered_json fit_json(const RentFit& fit) {
  ordered_json j;
  j["t"] = fit.t;
  j["r"] = fit.r;
  j["rss"] = fit.rss;
  j["n_points"] = fit.n_points;
  return j;
}

ordered_json points_json(const std::vector<RentPoint>& points) {
  ordered_json arr = ordered_json::array();
  for (const RentPoint& p : points) {
    ordered_json j;
    j["depth"] = p.depth;
    j["B"] = p.b;
    j["T"] = p.t;
    j["weight"] = p.weight;
    arr.push_back(std::move(j));
  }
  return arr;
}

ordered_json header_json(const ReportContext& ctx) {
  ordered_json j;
  j["tool"] = kToolName;
  j["version"] = kToolVersion;
  ordered_json design;
  design["name"] = ctx.prepack->name;
  design["blocks"] = static_cast<int>(ctx.prepack->blocks.size());
  design["logic_blocks"] = ctx.prepack->n_logic_blocks();
  design["nets"] = static_cast<int>(ctx.prepack->nets.size());
  design["t_raw"] = block_stats(*ctx.prepack).avg_terminals;
  j["design"] = std::move(design);
  ordered_json cfg;
  cfg["seed"] = ctx.pcfg.seed;
  cfg["balance_epsilon"] = ctx.pcfg.balance_epsilon;
  cfg["restarts"] = ctx.pcfg.restarts;
  cfg["leaf_threshold"] = ctx.pcfg.leaf_threshold;
  cfg["coarsen_ratio"] = ctx.pcfg.coarsen_ratio;
  cfg["drop_top_depths"] = ctx.opts.drop_top_depths;
  cfg["tol"] = ctx.opts.tol;
  cfg["ignore_globals"] = ctx.opts.ignore_globals;
  cfg["include_clock_pins"] = ctx.opts.include_clock_pins;
  cfg["cluster_kind"] = ctx.opts.cluster_kind;
  cfg["weighting"] = "depth-geomean-nodecount";
  j["config"] = std::move(cfg);
  return j;
}

}  // namespace

std::string report_json(const DensityReport& report, const ReportContext& ctx) {
  ordered_json j = header_json(ctx);
  ordered_json pre;
  pre["t"] = report.t;
  pre["fit"] = fit_json(report.prepack_fit);
  j["prepack"] = std::move(pre);

  ordered_json packing;
  packing["n_clusters"] = report.n_clusters;
  packing["b_avg"] = report.b_avg;
  packing["t_avg"] = report.t_avg;
  packing["b_star"] = report.b_star;
  packing["d_r"] = report.d_r;
  packing["d_b"] = report.d_b;
  packing["d_t"] = report.d_t;
  packing["tol"] = report.tol;
  packing["classification"] = to_string(report.classification);
  packing["intra_fit"] =
      report.intra_fit ? fit_json(*report.intra_fit) : ordered_json(nullptr);
  packing["inter_fit"] =
      report.inter_fit ? fit_json(*report.inter_fit) : ordered_json(nullptr);
  if (report.inter_segments) {
    ordered_json seg;
    seg["breakpoint_b"] = report.inter_segments->breakpoint_b;
    seg["breakpoint_t"] = report.inter_segments->breakpoint_t;
    seg["left"] = fit_json(report.inter_segments->left);
    seg["right"] = fit_json(report.inter_segments->right);
    packing["inter_segments"] = std::move(seg);
  } else {
    packing["inter_segments"] = nullptr;
  }
  j["packing"] = std::move(packing);

  ordered_json points;
  points["prepack"] = points_json(report.prepack_points);
  points["intra"] = points_json(report.intra_points);
  points["inter"] = points_json(report.inter_points);
  j["points"] = std::move(points);
  return j.dump(2) + "\n";
}

std::string report_json(const PrepackAnalysis& prepack_only,
                        const ReportContext& ctx) {
  ordered_json j = header_json(ctx);
  ordered_json pre;
  pre["t"] = prepack_only.t;
  pre["fit"] = fit_json(prepack_only.fit);
  j["prepack"] = std::move(pre);
  ordered_json points;
  points["prepack"] = points_json(prepack_only.points);
  j["points"] = std::move(points);
  return j.dump(2) + "\n";
}

std::string points_csv(
    const std::vector<const std::vector<RentPoint>*>& series) {
  std::string out = "region,depth,B,T,weight\n";
  for (const auto* pts : series) {
    if (!pts) {
      continue;
    }
    for (const RentPoint& p : *pts) {
      out += to_string(p.region);
      out += ',';
      out += std::to_string(p.depth);
      out += ',';
      out += fmt(p.b, "%.12g");
      out += ',';
      out += fmt(p.t, "%.12g");
      out += ',';
      out += fmt(p.weight, "%.12g");
      out += '\n';
    }
  }
  return out;
}

namespace {

struct Series {
  const std::vector<RentPoint>* points = nullptr;
  const RentFit* fit = nullptr;
  const char* label = "";
  const char* color = "";
};

constexpr double kW = 720.0;
constexpr double kH = 540.0;
constexpr double kL = 64.0;
constexpr double kR = 20.0;
constexpr double kT = 36.0;
constexpr double kB = 52.0;

std::string svg_scatter(const std::vector<Series>& series,
                        const std::string& title) {
  double min_x = 0.0;
  double max_x = 1.0;
  double min_y = 0.0;
  double max_y = 1.0;
  bool first = true;
  for (const Series& s : series) {
    for (const RentPoint& p : *s.points) {
      const double x = std::log10(p.b);
      const double y = std::log10(p.t);
      if (first) {
        min_x = max_x = x;
        min_y = max_y = y;
        first = false;
      }
      min_x = std::min(min_x, x);
      max_x = std::max(max_x, x);
      min_y = std::min(min_y, y);
      max_y = std::max(max_y, y);
    }
  }
  min_x = std::floor(min_x);
  max_x = std::ceil(max_x + 1e-9);
  min_y = std::floor(min_y);
  max_y = std::ceil(max_y + 1e-9);
  if (max_x - min_x < 1.0) {
    max_x = min_x + 1.0;
  }
  if (max_y - min_y < 1.0) {
    max_y = min_y + 1.0;
  }
  auto px = [&](double x) {
    return kL + (x - min_x) / (max_x - min_x) * (kW - kL - kR);
  };
  auto py = [&](double y) {
    return kH - kB - (y - min_y) / (max_y - min_y) * (kH - kT - kB);
  };

  std::string svg;
  svg += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + fmt(kW, "%.0f") +
         "\" height=\"" + fmt(kH, "%.0f") + "\" viewBox=\"0 0 " +
         fmt(kW, "%.0f") + " " + fmt(kH, "%.0f") + "\">\n";
  svg += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  svg += "<text x=\"" + fmt(kW / 2, "%.1f") +
         "\" y=\"20\" text-anchor=\"middle\" font-family=\"sans-serif\" "
         "font-size=\"14\">" +
         title + "</text>\n";

  // Decade grid and tick labels.
  for (int d = static_cast<int>(min_x); d <= static_cast<int>(max_x); ++d) {
    const double x = px(d);
    svg += "<line x1=\"" + fmt(x, "%.1f") + "\" y1=\"" + fmt(py(min_y), "%.1f") +
           "\" x2=\"" + fmt(x, "%.1f") + "\" y2=\"" + fmt(py(max_y), "%.1f") +
           "\" stroke=\"#dddddd\"/>\n";
    svg += "<text x=\"" + fmt(x, "%.1f") + "\" y=\"" +
           fmt(kH - kB + 18, "%.1f") +
           "\" text-anchor=\"middle\" font-family=\"sans-serif\" "
           "font-size=\"11\">1e" +
           std::to_string(d) + "</text>\n";
  }
  for (int d = static_cast<int>(min_y); d <= static_cast<int>(max_y); ++d) {
    const double y = py(d);
    svg += "<line x1=\"" + fmt(px(min_x), "%.1f") + "\" y1=\"" + fmt(y, "%.1f") +
           "\" x2=\"" + fmt(px(max_x), "%.1f") + "\" y2=\"" + fmt(y, "%.1f") +
           "\" stroke=\"#dddddd\"/>\n";
    svg += "<text x=\"" + fmt(kL - 8, "%.1f") + "\" y=\"" + fmt(y + 4, "%.1f") +
           "\" text-anchor=\"end\" font-family=\"sans-serif\" "
           "font-size=\"11\">1e" +
           std::to_string(d) + "</text>\n";
  }
  svg += "<text x=\"" + fmt((kL + kW - kR) / 2, "%.1f") + "\" y=\"" +
         fmt(kH - 12, "%.1f") +
         "\" text-anchor=\"middle\" font-family=\"sans-serif\" "
         "font-size=\"12\">B (blocks)</text>\n";
  svg += "<text x=\"18\" y=\"" + fmt((kT + kH - kB) / 2, "%.1f") +
         "\" text-anchor=\"middle\" font-family=\"sans-serif\" "
         "font-size=\"12\" transform=\"rotate(-90 18 " +
         fmt((kT + kH - kB) / 2, "%.1f") + ")\">T (terminals)</text>\n";

  double legend_y = kT + 10;
  for (const Series& s : series) {
    // Fit line across the series' B extent.
    if (s.fit) {
      double lo = std::log10((*s.points)[0].b);
      double hi = lo;
      for (const RentPoint& p : *s.points) {
        lo = std::min(lo, std::log10(p.b));
        hi = std::max(hi, std::log10(p.b));
      }
      const double y0 = std::log10(s.fit->t) + s.fit->r * lo;
      const double y1 = std::log10(s.fit->t) + s.fit->r * hi;
      svg += "<line x1=\"" + fmt(px(lo), "%.1f") + "\" y1=\"" +
             fmt(py(y0), "%.1f") + "\" x2=\"" + fmt(px(hi), "%.1f") +
             "\" y2=\"" + fmt(py(y1), "%.1f") + "\" stroke=\"" + s.color +
             "\" stroke-width=\"1.5\"/>\n";
    }
    for (const RentPoint& p : *s.points) {
      svg += "<circle cx=\"" + fmt(px(std::log10(p.b)), "%.1f") + "\" cy=\"" +
             fmt(py(std::log10(p.t)), "%.1f") + "\" r=\"3.5\" fill=\"" +
             s.color + "\" fill-opacity=\"0.85\"/>\n";
    }
    std::string label = s.label;
    if (s.fit) {
      label += " (r=" + fmt(s.fit->r, "%.4f") + ")";
    }
    svg += "<rect x=\"" + fmt(kL + 12, "%.1f") + "\" y=\"" +
           fmt(legend_y, "%.1f") + "\" width=\"10\" height=\"10\" fill=\"" +
           s.color + "\"/>\n";
    svg += "<text x=\"" + fmt(kL + 28, "%.1f") + "\" y=\"" +
           fmt(legend_y + 9, "%.1f") +
           "\" font-family=\"sans-serif\" font-size=\"12\">" + label +
           "</text>\n";
    legend_y += 18;
  }
  svg += "</svg>\n";
  return svg;
}

}  // namespace

std::string plot_svg(const DensityReport& report, const std::string& title) {
  std::vector<Series> series;
  series.push_back(Series{&report.prepack_points, &report.prepack_fit,
                          "pre-pack", "#1f77b4"});
  if (!report.intra_points.empty()) {
    series.push_back(Series{&report.intra_points,
                            report.intra_fit ? &*report.intra_fit : nullptr,
                            "intra-CLB", "#9467bd"});
  }
  if (!report.inter_points.empty()) {
    series.push_back(Series{&report.inter_points,
                            report.inter_fit ? &*report.inter_fit : nullptr,
                            "inter-CLB", "#2ca02c"});
  }
  return svg_scatter(series, title);
}

std::string plot_svg(const PrepackAnalysis& prepack_only,
                     const std::string& title) {
  std::vector<Series> series;
  series.push_back(Series{&prepack_only.points, &prepack_only.fit, "pre-pack",
                          "#1f77b4"});
  return svg_scatter(series, title);
}

namespace {

double num_or_nan(const ordered_json& j, const char* section, const char* key) {
  if (!j.contains(section) || j[section].is_null() ||
      !j[section].contains(key) || j[section][key].is_null()) {
    return std::numeric_limits<double>::quiet_NaN();
  }
  return j[section][key].get<double>();
}

double fit_r_or_nan(const ordered_json& j, const char* fit_key) {
  if (!j.contains("packing") || !j["packing"].contains(fit_key) ||
      j["packing"][fit_key].is_null()) {
    return std::numeric_limits<double>::quiet_NaN();
  }
  return j["packing"][fit_key]["r"].get<double>();
}

std::string cell(double v) { return std::isnan(v) ? "-" : fmt(v, "%.4f"); }

}  // namespace

CompareResult compare_reports(const std::string& json_a,
                              const std::string& json_b,
                              const std::string& label_a,
                              const std::string& label_b) {
  ordered_json ja;
  ordered_json jb;
  try {
    ja = ordered_json::parse(json_a);
    jb = ordered_json::parse(json_b);
  } catch (const std::exception& e) {
    throw ParseError(std::string("bad report JSON: ") + e.what());
  }
  for (const ordered_json* j : {&ja, &jb}) {
    if (!j->contains("design") || !j->contains("prepack")) {
      throw ParseError("not a rentlens report (missing design/prepack keys)");
    }
  }
  const auto& da = ja["design"];
  const auto& db = jb["design"];
  if (da["name"] != db["name"] || da["logic_blocks"] != db["logic_blocks"] ||
      da["nets"] != db["nets"]) {
    throw ParseError("incomparable reports: different pre-packing netlists (" +
                     da["name"].get<std::string>() + " vs " +
                     db["name"].get<std::string>() + ")");
  }

  struct Row {
    const char* name;
    double a;
    double b;
  };
  std::vector<Row> rows = {
      {"B_avg", num_or_nan(ja, "packing", "b_avg"),
       num_or_nan(jb, "packing", "b_avg")},
      {"T_avg", num_or_nan(ja, "packing", "t_avg"),
       num_or_nan(jb, "packing", "t_avg")},
      {"r_inter", fit_r_or_nan(ja, "inter_fit"), fit_r_or_nan(jb, "inter_fit")},
      {"r_intra", fit_r_or_nan(ja, "intra_fit"), fit_r_or_nan(jb, "intra_fit")},
      {"D_R", num_or_nan(ja, "packing", "d_r"),
       num_or_nan(jb, "packing", "d_r")},
      {"D_B", num_or_nan(ja, "packing", "d_b"),
       num_or_nan(jb, "packing", "d_b")},
      {"D_T", num_or_nan(ja, "packing", "d_t"),
       num_or_nan(jb, "packing", "d_t")},
  };

  CompareResult out;
  char line[256];
  std::snprintf(line, sizeof(line), "%-10s %14s %14s %14s\n", "metric",
                label_a.c_str(), label_b.c_str(), "delta");
  out.table += line;
  out.table += std::string(56, '-') + "\n";
  for (const Row& row : rows) {
    const double delta = row.b - row.a;
    std::snprintf(line, sizeof(line), "%-10s %14s %14s %14s\n", row.name,
                  cell(row.a).c_str(), cell(row.b).c_str(),
                  (std::isnan(delta) ? std::string("-") : fmt(delta, "%+.4f"))
                      .c_str());
    out.table += line;
  }

  // Grouped bars, one group per metric, two bars per group.
  const double w = 640.0;
  const double h = 360.0;
  const double left = 56.0;
  const double bottom = 48.0;
  const double top = 40.0;
  double max_v = 0.0;
  for (const Row& r : rows) {
    if (!std::isnan(r.a)) {
      max_v = std::max(max_v, r.a);
    }
    if (!std::isnan(r.b)) {
      max_v = std::max(max_v, r.b);
    }
  }
  if (max_v <= 0.0) {
    max_v = 1.0;
  }
  max_v *= 1.15;
  std::string svg;
  svg += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + fmt(w, "%.0f") +
         "\" height=\"" + fmt(h, "%.0f") + "\" viewBox=\"0 0 " + fmt(w, "%.0f") +
         " " + fmt(h, "%.0f") + "\">\n";
  svg += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  const double group_w = (w - left - 16) / static_cast<double>(rows.size());
  auto bar_y = [&](double v) { return h - bottom - v / max_v * (h - top - bottom); };
  svg += "<line x1=\"" + fmt(left, "%.1f") + "\" y1=\"" + fmt(h - bottom, "%.1f") +
         "\" x2=\"" + fmt(w - 16, "%.1f") + "\" y2=\"" + fmt(h - bottom, "%.1f") +
         "\" stroke=\"black\"/>\n";
  for (size_t i = 0; i < rows.size(); ++i) {
    const Row& r = rows[i];
    const double gx = left + group_w * static_cast<double>(i);
    const double bw = group_w / 3.0;
    struct BarSpec {
      double v;
      const char* color;
      double off;
    };
    const BarSpec bars[2] = {{r.a, "#7793c9", bw * 0.5},
                             {r.b, "#d98a8a", bw * 1.6}};
    for (const BarSpec& bs : bars) {
      if (std::isnan(bs.v)) {
        continue;
      }
      const double y = bar_y(std::max(0.0, bs.v));
      svg += "<rect x=\"" + fmt(gx + bs.off, "%.1f") + "\" y=\"" +
             fmt(y, "%.1f") + "\" width=\"" + fmt(bw, "%.1f") + "\" height=\"" +
             fmt(h - bottom - y, "%.1f") + "\" fill=\"" + bs.color + "\"/>\n";
      svg += "<text x=\"" + fmt(gx + bs.off + bw / 2, "%.1f") + "\" y=\"" +
             fmt(y - 4, "%.1f") +
             "\" text-anchor=\"middle\" font-family=\"sans-serif\" "
             "font-size=\"9\">" +
             fmt(bs.v, "%.3f") + "</text>\n";
    }
    svg += "<text x=\"" + fmt(gx + group_w / 2, "%.1f") + "\" y=\"" +
           fmt(h - bottom + 16, "%.1f") +
           "\" text-anchor=\"middle\" font-family=\"sans-serif\" "
           "font-size=\"11\">" +
           r.name + "</text>\n";
  }
  svg += "<rect x=\"" + fmt(left, "%.1f") + "\" y=\"12\" width=\"10\" "
         "height=\"10\" fill=\"#7793c9\"/>\n";
  svg += "<text x=\"" + fmt(left + 16, "%.1f") +
         "\" y=\"21\" font-family=\"sans-serif\" font-size=\"11\">" + label_a +
         "</text>\n";
  svg += "<rect x=\"" + fmt(left + 140, "%.1f") + "\" y=\"12\" width=\"10\" "
         "height=\"10\" fill=\"#d98a8a\"/>\n";
  svg += "<text x=\"" + fmt(left + 156, "%.1f") +
         "\" y=\"21\" font-family=\"sans-serif\" font-size=\"11\">" + label_b +
         "</text>\n";
  svg += "</svg>\n";
  out.svg = std::move(svg);
  return out;
}

}  // namespace rentlens
