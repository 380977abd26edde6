#include "cfcal/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <sstream>

#include "cfcal/error.hpp"

namespace cfcal::report {

namespace {

constexpr double kWidth = 640.0;
constexpr double kHeight = 400.0;
constexpr double kMarginLeft = 70.0;
constexpr double kMarginRight = 20.0;
constexpr double kMarginTop = 40.0;
constexpr double kMarginBottom = 50.0;

std::string fmt(const char* spec, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, spec, v);
  return buf;
}

std::string num(double v) { return fmt("%.2f", v); }

std::string escape_xml(const std::string& s) {
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

std::string pad(const std::string& s, std::size_t width, bool left = false) {
  if (s.size() >= width) return s;
  const std::string fill(width - s.size(), ' ');
  return left ? s + fill : fill + s;
}

std::string svg_open(const std::string& title) {
  std::ostringstream os;
  os << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
     << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\"" << kHeight
     << "\" viewBox=\"0 0 " << kWidth << ' ' << kHeight << "\">\n"
     << "<rect x=\"0\" y=\"0\" width=\"" << kWidth << "\" height=\"" << kHeight << "\" fill=\"white\"/>\n"
     << "<text x=\"" << kWidth / 2 << "\" y=\"24\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"16\">"
     << escape_xml(title) << "</text>\n";
  return os.str();
}

std::string svg_axes(const std::string& x_label, const std::string& y_label, double x_lo, double x_hi, double y_lo,
                     double y_hi) {
  const double x0 = kMarginLeft, x1 = kWidth - kMarginRight;
  const double y0 = kHeight - kMarginBottom, y1 = kMarginTop;
  std::ostringstream os;
  os << "<line x1=\"" << x0 << "\" y1=\"" << y0 << "\" x2=\"" << x1 << "\" y2=\"" << y0 << "\" stroke=\"black\"/>\n"
     << "<line x1=\"" << x0 << "\" y1=\"" << y0 << "\" x2=\"" << x0 << "\" y2=\"" << y1 << "\" stroke=\"black\"/>\n";
  for (int k = 0; k <= 4; ++k) {
    const double f = k / 4.0;
    const double xv = x_lo + f * (x_hi - x_lo);
    const double yv = y_lo + f * (y_hi - y_lo);
    const double px = x0 + f * (x1 - x0);
    const double py = y0 - f * (y0 - y1);
    os << "<text x=\"" << num(px) << "\" y=\"" << num(y0 + 16) << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"11\">"
       << fmt("%.4g", xv) << "</text>\n"
       << "<text x=\"" << num(x0 - 6) << "\" y=\"" << num(py + 4) << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">"
       << fmt("%.4g", yv) << "</text>\n";
  }
  os << "<text x=\"" << num((x0 + x1) / 2) << "\" y=\"" << num(kHeight - 12)
     << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\">" << escape_xml(x_label) << "</text>\n"
     << "<text x=\"16\" y=\"" << num((y0 + y1) / 2) << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\" transform=\"rotate(-90 16 "
     << num((y0 + y1) / 2) << ")\">" << escape_xml(y_label) << "</text>\n";
  return os.str();
}

std::string polyline(std::span<const double> t, std::span<const double> y, double t_lo, double t_hi, double y_lo,
                     double y_hi, const char* color) {
  const double x0 = kMarginLeft, x1 = kWidth - kMarginRight;
  const double y0 = kHeight - kMarginBottom, y1 = kMarginTop;
  const double tspan = t_hi > t_lo ? t_hi - t_lo : 1.0;
  const double yspan = y_hi > y_lo ? y_hi - y_lo : 1.0;
  std::ostringstream os;
  os << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\"";
  for (std::size_t i = 0; i < t.size() && i < y.size(); ++i) {
    if (i) os << ' ';
    os << num(x0 + (t[i] - t_lo) / tspan * (x1 - x0)) << ',' << num(y0 - (y[i] - y_lo) / yspan * (y0 - y1));
  }
  os << "\"/>\n";
  return os.str();
}

std::vector<double> doubles(const io::Json& j, const char* key) {
  std::vector<double> out;
  if (!j.contains(key)) return out;
  for (const auto& v : j.at(key)) out.push_back(v.is_number() ? v.get<double>() : NAN);
  return out;
}

bool is_stats_report(const io::Json& j) { return j.is_object() && j.value("kind", "") == "stats_report"; }
bool is_calibration(const io::Json& j) { return j.is_object() && j.contains("calibration_result"); }
bool is_simulation(const io::Json& j) { return j.is_object() && j.contains("results"); }

const char* model_label(const std::string& kind) {
  if (kind == "idm") return "IDM";
  if (kind == "blend") return "IIDM";
  if (kind == "linear_acc") return "ACC";
  return "?";
}

}  // namespace

Format parse_format(std::string_view name) {
  if (name == "text") return Format::Text;
  if (name == "svg") return Format::Svg;
  if (name == "all") return Format::All;
  fail(ErrorKind::Domain, "unknown report format '" + std::string(name) + "' (expected text, svg or all)");
}

std::string descriptive_table(const io::Json& rep) {
  const auto& vars = rep.at("descriptive");
  std::ostringstream os;
  os << "Descriptive statistics (follower)\n";
  os << pad("", 8);
  for (const auto& v : vars) os << pad(v.at("name").get<std::string>(), 14);
  os << '\n' << pad("", 8);
  for (const auto& v : vars) os << pad("(" + v.at("unit").get<std::string>() + ")", 14);
  os << '\n';
  const std::pair<const char*, const char*> rows[] = {{"mean", "mean"}, {"std", "std"}, {"min", "min"},
                                                      {"25%", "q25"},   {"50%", "q50"}, {"75%", "q75"},
                                                      {"max", "max"}};
  for (const auto& [label, key] : rows) {
    os << pad(label, 8, true);
    for (const auto& v : vars) os << pad(fmt("%.3f", v.at(key).get<double>()), 14);
    os << '\n';
  }
  os << pad("SW p", 8, true);
  for (const auto& v : vars) {
    const auto& sw = v.at("shapiro_wilk");
    os << pad(sw.is_null() ? std::string("n/a") : fmt("%.3g", sw.at("p").get<double>()), 14);
  }
  os << '\n';

  if (rep.contains("comfort")) {
    const auto& c = rep.at("comfort");
    const auto& th = c.at("thresholds");
    const auto& sh = c.at("shares_above");
    os << "\nJerk comfort (share of samples with |jerk| above threshold)\n";
    const std::pair<const char*, const char*> limits[] = {
        {"excellent", "excellent"}, {"upper excellent", "upper_excellent"}, {"expected", "expected"}};
    for (std::size_t k = 0; k < 3; ++k) {
      os << "  " << pad(limits[k].first, 16, true) << pad(fmt("%.2f ft/s^3", th.at(limits[k].second).get<double>()), 14)
         << pad(fmt("%.2f%%", 100.0 * sh.at(k).get<double>()), 10) << '\n';
    }
    os << "  max |accel| " << fmt("%.3f", c.at("max_abs_accel").get<double>()) << " ft/s^2 (comfort limit "
       << fmt("%.2f", c.at("accel_comfort_limit").get<double>()) << ")\n";
  }

  if (rep.contains("variability")) {
    os << "\nVariability (mean per trip)\n";
    os << pad("cell", 18, true) << pad("CV", 10) << pad("outliers", 10) << '\n';
    for (const auto& c : rep.at("variability")) {
      const std::string name = c.at("vehicle").get<std::string>() + "_" + c.at("variable").get<std::string>() +
                               (c.at("regime") == "all" ? "" : c.at("regime").get<std::string>().substr(3));
      auto cell = [](const io::Json& v, const char* spec, double scale) {
        return v.is_null() ? std::string("n/a") : fmt(spec, scale * v.get<double>());
      };
      os << pad(name, 18, true) << pad(cell(c.at("mean_cv"), "%.3f", 1.0), 10)
         << pad(cell(c.at("mean_outlier_share"), "%.2f%%", 100.0), 10) << '\n';
    }
  }

  if (rep.contains("spearman")) {
    const auto& sp = rep.at("spearman");
    os << "\nSpearman correlation\n" << pad("", 13);
    for (const auto& n : sp.at("variables")) os << pad(n.get<std::string>(), 13);
    os << '\n';
    for (std::size_t i = 0; i < sp.at("matrix").size(); ++i) {
      os << pad(sp.at("variables").at(i).get<std::string>(), 13, true);
      for (const auto& v : sp.at("matrix").at(i)) os << pad(v.is_null() ? std::string("n/a") : fmt("%.3f", v.get<double>()), 13);
      os << '\n';
    }
  }
  return os.str();
}

std::string error_table(std::span<const io::Json> results, const std::string& phase) {
  std::ostringstream os;
  os << "Errors (" << phase << ")\n";
  os << pad("", 8) << pad("Spacing (ft)", 15 * static_cast<int>(results.size()))
     << pad("Speed (ft/s)", 15 * static_cast<int>(results.size())) << '\n';
  os << pad("Error", 8, true);
  for (int group = 0; group < 2; ++group) {
    for (const auto& r : results) {
      os << pad(model_label(r.at("calibration_result").at("model").get<std::string>()), 15);
    }
  }
  os << '\n';
  const std::pair<const char*, const char*> rows[] = {{"NRMSE", "nrmse"}, {"MAE", "mae"}, {"RMSE", "rmse"}};
  for (const auto& [label, key] : rows) {
    os << pad(label, 8, true);
    for (const char* quantity : {"spacing", "speed"}) {
      for (const auto& r : results) {
        const auto& g = r.at("gof").at(phase);
        os << pad(fmt("%.8f", g.at(std::string(key) + "_" + quantity).get<double>()), 15);
      }
    }
    os << '\n';
  }
  return os.str();
}

std::string parameter_table(const io::Json& r) {
  const auto& res = r.at("calibration_result");
  const auto& p = res.at("best_params");
  const std::string kind = res.at("model").get<std::string>();
  std::ostringstream os;
  os << "Parameters calibrated for " << model_label(kind) << " (fitness NRMSE " << fmt("%.8f", res.at("fitness").get<double>())
     << ")\n";
  struct Row {
    const char* key;
    const char* desc;
    const char* spec;
  };
  std::vector<Row> rows;
  if (kind == "linear_acc") {
    rows = {{"t_des", "Desired time gap (s)", "%.2f"}, {"k1", "Gap error gain (1/s^2)", "%.3f"},
            {"k2", "Speed difference gain (1/s)", "%.3f"}, {"d0", "Vehicle length (ft)", "%.2f"}};
  } else {
    rows = {{"a", "Max acceleration (ft/s^2)", "%.3f"}, {"delta", "Acceleration exponent", "%.0f"},
            {"v0", "Desired speed (ft/s)", "%.3f"},     {"s0", "Jam distance (ft)", "%.3f"},
            {"T", "Desired time gap (s)", "%.3f"},      {"b", "Desired deceleration (ft/s^2)", "%.3f"}};
    if (kind == "blend") rows.push_back({"c", "Coolness factor", "%.3f"});
  }
  for (const auto& row : rows) {
    os << "  " << pad(row.key, 7, true) << pad(row.desc, 32, true) << pad(fmt(row.spec, p.at(row.key).get<double>()), 10)
       << '\n';
  }
  return os.str();
}

std::string svg_histogram(const std::string& title, const std::string& x_label, double lo, double hi,
                          std::span<const std::size_t> counts) {
  std::ostringstream os;
  os << svg_open(title);
  const std::size_t peak = counts.empty() ? 1 : std::max<std::size_t>(1, *std::max_element(counts.begin(), counts.end()));
  os << svg_axes(x_label, "count", lo, hi, 0.0, static_cast<double>(peak));
  const double x0 = kMarginLeft, x1 = kWidth - kMarginRight;
  const double y0 = kHeight - kMarginBottom, y1 = kMarginTop;
  const double bw = counts.empty() ? 0.0 : (x1 - x0) / static_cast<double>(counts.size());
  for (std::size_t k = 0; k < counts.size(); ++k) {
    const double h = static_cast<double>(counts[k]) / static_cast<double>(peak) * (y0 - y1);
    os << "<rect x=\"" << num(x0 + k * bw) << "\" y=\"" << num(y0 - h) << "\" width=\"" << num(bw) << "\" height=\""
       << num(h) << "\" fill=\"steelblue\" stroke=\"white\"/>\n";
  }
  os << "</svg>\n";
  return os.str();
}

std::string svg_series(const std::string& title, const std::string& y_label, std::span<const double> t,
                       std::span<const double> observed, std::span<const double> simulated) {
  double t_lo = t.empty() ? 0.0 : t.front();
  double t_hi = t.empty() ? 1.0 : t.back();
  double y_lo = INFINITY, y_hi = -INFINITY;
  for (auto s : {observed, simulated}) {
    for (double v : s) {
      if (!std::isfinite(v)) continue;
      y_lo = std::min(y_lo, v);
      y_hi = std::max(y_hi, v);
    }
  }
  if (!std::isfinite(y_lo)) y_lo = 0.0, y_hi = 1.0;
  if (y_hi <= y_lo) y_hi = y_lo + 1.0;
  std::ostringstream os;
  os << svg_open(title) << svg_axes("time (s)", y_label, t_lo, t_hi, y_lo, y_hi)
     << polyline(t, observed, t_lo, t_hi, y_lo, y_hi, "black") << polyline(t, simulated, t_lo, t_hi, y_lo, y_hi, "crimson")
     << "<text x=\"" << num(kWidth - kMarginRight - 150) << "\" y=\"" << num(kMarginTop + 12)
     << "\" font-family=\"sans-serif\" font-size=\"11\" fill=\"black\">observed</text>\n"
     << "<text x=\"" << num(kWidth - kMarginRight - 80) << "\" y=\"" << num(kMarginTop + 12)
     << "\" font-family=\"sans-serif\" font-size=\"11\" fill=\"crimson\">simulated</text>\n"
     << "</svg>\n";
  return os.str();
}

std::vector<std::string> emit_report(std::span<const io::Json> inputs, Format format, const std::string& out_dir) {
  namespace fs = std::filesystem;
  std::vector<std::string> written;
  auto put = [&](const std::string& name, const std::string& content) {
    const auto path = (fs::path(out_dir) / name).string();
    io::write_file_atomic(path, content);
    written.push_back(path);
  };
  const bool text = format != Format::Svg;
  const bool svg = format != Format::Text;

  std::vector<io::Json> calibrations;
  std::ostringstream body;
  std::size_t stats_n = 0, sim_n = 0;
  for (const auto& in : inputs) {
    if (is_stats_report(in)) {
      const std::string tag = stats_n++ == 0 ? "" : "_" + std::to_string(stats_n);
      if (text) body << descriptive_table(in) << '\n';
      if (svg && in.contains("histograms")) {
        for (const auto& h : in.at("histograms")) {
          std::vector<std::size_t> counts = h.at("counts").get<std::vector<std::size_t>>();
          const auto name = h.at("name").get<std::string>();
          put("hist_" + name + tag + ".svg",
              svg_histogram("Histogram of follower " + name, name, h.at("lo").get<double>(), h.at("hi").get<double>(), counts));
        }
      }
    } else if (is_calibration(in)) {
      calibrations.push_back(in);
    } else if (is_simulation(in)) {
      const std::string tag = sim_n++ == 0 ? "" : "_" + std::to_string(sim_n);
      for (const auto& r : in.at("results")) {
        const auto id = r.value("segment_id", std::string("segment"));
        if (text) {
          body << "Simulation " << id << ": " << r.at("t").size() << " samples, " << r.value("collision_events", 0)
               << " collision events\n";
        }
        if (svg && r.contains("observed_spacing")) {
          const auto t = doubles(r, "t");
          put("sim_" + id + tag + "_spacing.svg",
              svg_series("Spacing " + id, "spacing (ft)", t, doubles(r, "observed_spacing"), doubles(r, "spacing")));
          put("sim_" + id + tag + "_speed.svg",
              svg_series("Speed " + id, "speed (ft/s)", t, doubles(r, "observed_speed"), doubles(r, "follower_speed")));
        }
      }
      if (text) body << '\n';
    } else {
      fail(ErrorKind::Domain, "report input is not a stats, calibration or simulation result");
    }
  }
  if (text && !calibrations.empty()) {
    body << error_table(calibrations, "calibration") << '\n' << error_table(calibrations, "validation") << '\n';
    for (const auto& c : calibrations) body << parameter_table(c) << '\n';
  }
  if (text) {
    const std::string content = body.str();
    put("report.txt", content.empty() ? std::string("no data\n") : content);
  } else if (written.empty()) {
    put("report.txt", "no data\n");
  }
  return written;
}

}  // namespace cfcal::report
