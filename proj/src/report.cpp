#include "valence/report.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "valence/error.hpp"
#include "valence/text.hpp"

namespace valence::report {

using json = nlohmann::ordered_json;

namespace {

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

std::string num(const json& v) {
  if (v.is_null()) return "";
  if (v.is_number_integer() || v.is_number_unsigned()) return v.dump();
  return format_number(v.get<double>(), 6);
}

std::string p_of(const json& test) { return test.is_null() ? "" : num(test.at("p")); }

std::string star(const json& test) {
  return !test.is_null() && test.at("p").get<double>() < 0.05 ? "*" : "";
}

std::string xml_escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '&': out += "&amp;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

const json& populations(const json& bundle) {
  if (!bundle.contains("populations") || !bundle.contains("cells")) {
    fail(ErrorCode::kSchema, "not a classify report: missing 'populations' or 'cells'");
  }
  return bundle.at("populations");
}

double to_double(const std::string& s) { return s.empty() ? 0.0 : *parse_double(s); }

}  // namespace

std::string Table::to_csv() const {
  std::string out;
  auto line = [&out](const std::vector<std::string>& fields) {
    for (size_t i = 0; i < fields.size(); ++i) out += (i ? "," : "") + csv_field(fields[i]);
    out += "\n";
  };
  line(header);
  for (const auto& r : rows) line(r);
  return out;
}

Table temperature_by_video(const json& bundle) {
  Table t{{"population", "trial_id", "label", "mean_c", "sd_c", "n"}, {}};
  for (const auto& pop : populations(bundle)) {
    for (const auto& tr : pop.at("temperature").at("by_trial")) {
      if (tr.at("label") == "Baseline") continue;
      t.rows.push_back({pop.at("population").get<std::string>(), tr.at("trial_id").get<std::string>(),
                        tr.at("label").get<std::string>(), num(tr.at("mean")), num(tr.at("sd")), num(tr.at("n"))});
    }
  }
  return t;
}

Table asymmetry_bars(const json& bundle) {
  Table t{{"population", "pair", "mean_ai_positive", "mean_ai_negative", "p_positive_vs_negative",
           "sig_positive_vs_negative", "p_left_vs_right_positive", "sig_left_vs_right_positive",
           "p_left_vs_right_negative", "sig_left_vs_right_negative"},
          {}};
  for (const auto& pop : populations(bundle)) {
    for (const auto& p : pop.at("asymmetry")) {
      t.rows.push_back({pop.at("population").get<std::string>(), p.at("pair").get<std::string>(),
                        num(p.at("mean_ai_positive")), num(p.at("mean_ai_negative")),
                        p_of(p.at("positive_vs_negative")), star(p.at("positive_vs_negative")),
                        p_of(p.at("left_vs_right_positive")), star(p.at("left_vs_right_positive")),
                        p_of(p.at("left_vs_right_negative")), star(p.at("left_vs_right_negative"))});
    }
  }
  return t;
}

Table f1_bars(const json& bundle, const std::string& scheme) {
  populations(bundle);
  Table t{{"population", "modalities", "classifier", "mean_f1", "sd_f1", "units", "selected_mean_f1"}, {}};
  for (const auto& c : bundle.at("cells")) {
    if (c.at("scheme") != scheme) continue;
    const json& cv = c.at("cv");
    t.rows.push_back({c.at("population").get<std::string>(), c.at("modalities").get<std::string>(),
                      c.at("classifier").get<std::string>(), num(cv.at("mean_f1")), num(cv.at("sd_f1")),
                      std::to_string(cv.at("per_unit").size()),
                      c.contains("selection") ? num(c.at("selection").at("cv").at("mean_f1")) : ""});
  }
  return t;
}

std::string render_svg(const BarChart& chart) {
  constexpr double kBar = 18.0, kGap = 22.0, kLeft = 64.0, kTop = 40.0, kPlotH = 240.0, kBottom = 90.0;
  static const char* kColours[] = {"#4c72b0", "#dd8452", "#55a868", "#c44e52", "#8172b3", "#937860"};
  const size_t ns = std::max<size_t>(chart.series.size(), 1);
  const double group_w = kBar * static_cast<double>(ns) + kGap;
  const double width = kLeft + group_w * static_cast<double>(chart.groups.size()) + 140.0;
  const double height = kTop + kPlotH + kBottom;

  double lo = 0.0, hi = 0.0;
  for (const auto& g : chart.values) {
    for (double v : g) {
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
  }
  if (chart.reference) hi = std::max(hi, *chart.reference);
  if (hi - lo <= 0.0) hi = lo + 1.0;
  const double pad = 0.05 * (hi - lo);
  hi += pad;
  if (lo < 0.0) lo -= pad;
  auto y_of = [&](double v) { return kTop + kPlotH * (hi - v) / (hi - lo); };

  std::string s;
  auto add = [&s](const std::string& x) { s += x + "\n"; };
  add("<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + format_number(width) + "\" height=\"" +
      format_number(height) + "\" font-family=\"sans-serif\" font-size=\"11\">");
  add("<rect width=\"100%\" height=\"100%\" fill=\"white\"/>");
  add("<text x=\"" + format_number(width / 2) + "\" y=\"20\" text-anchor=\"middle\" font-size=\"14\">" +
      xml_escape(chart.title) + "</text>");
  for (int k = 0; k <= 4; ++k) {
    const double v = lo + (hi - lo) * k / 4.0;
    const double y = y_of(v);
    add("<line x1=\"" + format_number(kLeft) + "\" x2=\"" + format_number(width - 140.0) + "\" y1=\"" +
        format_number(y) + "\" y2=\"" + format_number(y) + "\" stroke=\"#ddd\"/>");
    add("<text x=\"" + format_number(kLeft - 6) + "\" y=\"" + format_number(y + 4) + "\" text-anchor=\"end\">" +
        format_number(v, 3) + "</text>");
  }
  add("<text transform=\"translate(14," + format_number(kTop + kPlotH / 2) + ") rotate(-90)\" text-anchor=\"middle\">" +
      xml_escape(chart.y_label) + "</text>");
  const double y0 = y_of(0.0);
  for (size_t g = 0; g < chart.groups.size(); ++g) {
    const double gx = kLeft + kGap / 2 + group_w * static_cast<double>(g);
    for (size_t k = 0; k < chart.series.size() && k < chart.values[g].size(); ++k) {
      const double v = chart.values[g][k];
      const double y = y_of(v);
      add("<rect x=\"" + format_number(gx + kBar * static_cast<double>(k)) + "\" y=\"" + format_number(std::min(y, y0)) +
          "\" width=\"" + format_number(kBar - 2) + "\" height=\"" + format_number(std::abs(y0 - y)) + "\" fill=\"" +
          kColours[k % 6] + "\"><title>" + xml_escape(chart.groups[g] + " " + chart.series[k] + ": " +
                                                      format_number(v, 4)) +
          "</title></rect>");
    }
    const double cx = gx + kBar * static_cast<double>(ns) / 2;
    add("<text transform=\"translate(" + format_number(cx) + "," + format_number(kTop + kPlotH + 12) +
        ") rotate(45)\">" + xml_escape(chart.groups[g]) + "</text>");
  }
  add("<line x1=\"" + format_number(kLeft) + "\" x2=\"" + format_number(width - 140.0) + "\" y1=\"" +
      format_number(y0) + "\" y2=\"" + format_number(y0) + "\" stroke=\"black\"/>");
  if (chart.reference) {
    const double y = y_of(*chart.reference);
    add("<line x1=\"" + format_number(kLeft) + "\" x2=\"" + format_number(width - 140.0) + "\" y1=\"" +
        format_number(y) + "\" y2=\"" + format_number(y) + "\" stroke=\"black\" stroke-dasharray=\"4 3\"/>");
  }
  for (size_t k = 0; k < chart.series.size(); ++k) {
    const double y = kTop + 16.0 * static_cast<double>(k);
    add("<rect x=\"" + format_number(width - 130.0) + "\" y=\"" + format_number(y) +
        "\" width=\"10\" height=\"10\" fill=\"" + kColours[k % 6] + "\"/>");
    add("<text x=\"" + format_number(width - 114.0) + "\" y=\"" + format_number(y + 9) + "\">" +
        xml_escape(chart.series[k]) + "</text>");
  }
  add("</svg>");
  return s;
}

std::vector<std::pair<std::string, std::string>> render_all(const json& bundle, bool svg) {
  const Table fig3 = temperature_by_video(bundle);
  const Table fig4 = asymmetry_bars(bundle);
  const Table fig6 = f1_bars(bundle, "SD");
  const Table fig7 = f1_bars(bundle, "SI");
  std::vector<std::pair<std::string, std::string>> out = {{"fig3_temperature.csv", fig3.to_csv()},
                                                           {"fig4_asymmetry.csv", fig4.to_csv()},
                                                           {"fig6_f1_sd.csv", fig6.to_csv()},
                                                           {"fig7_f1_si.csv", fig7.to_csv()}};
  if (!svg) return out;

  // Charts group rows by their second column and split series by the one given.
  auto chart_from = [](const Table& t, const std::string& filter_pop, size_t group_col, size_t series_col,
                       std::vector<size_t> value_cols, std::vector<std::string> value_names) {
    BarChart c;
    std::map<std::string, size_t> gi, si;
    for (const auto& r : t.rows) {
      if (r[0] != filter_pop) continue;
      if (!gi.count(r[group_col])) {
        gi[r[group_col]] = c.groups.size();
        c.groups.push_back(r[group_col]);
      }
      for (size_t v = 0; v < value_cols.size(); ++v) {
        const std::string key = series_col == SIZE_MAX ? value_names[v] : r[series_col];
        if (!si.count(key)) {
          si[key] = c.series.size();
          c.series.push_back(key);
        }
      }
    }
    c.values.assign(c.groups.size(), std::vector<double>(c.series.size(), 0.0));
    for (const auto& r : t.rows) {
      if (r[0] != filter_pop) continue;
      for (size_t v = 0; v < value_cols.size(); ++v) {
        const std::string key = series_col == SIZE_MAX ? value_names[v] : r[series_col];
        c.values[gi[r[group_col]]][si[key]] = to_double(r[value_cols[v]]);
      }
    }
    return c;
  };

  BarChart c3 = chart_from(fig3, "all", 1, SIZE_MAX, {3}, {"mean temperature"});
  c3.title = "Mean skin temperature per video";
  c3.y_label = "temperature (C)";
  BarChart c4 = chart_from(fig4, "all", 1, SIZE_MAX, {2, 3}, {"Positive", "Negative"});
  c4.title = "Asymmetry index per pair";
  c4.y_label = "AI";
  BarChart c6 = chart_from(fig6, "all", 1, 2, {3}, {});
  c6.title = "F1, subject-dependent";
  c6.y_label = "F1";
  BarChart c7 = chart_from(fig7, "all", 1, 2, {3}, {});
  c7.title = "F1, subject-independent";
  c7.y_label = "F1";
  c7.reference = 0.5;
  out.emplace_back("fig3_temperature.svg", render_svg(c3));
  out.emplace_back("fig4_asymmetry.svg", render_svg(c4));
  out.emplace_back("fig6_f1_sd.svg", render_svg(c6));
  out.emplace_back("fig7_f1_si.svg", render_svg(c7));
  return out;
}

}  // namespace valence::report
