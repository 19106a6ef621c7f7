#pragma once

#include <json.hpp>

#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace valence::report {

struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  std::string to_csv() const;
};

/// Per-video mean temperature for every population in the bundle.
Table temperature_by_video(const nlohmann::ordered_json& bundle);

/// Mean AI per pair and condition with the three Mann-Whitney p-values.
Table asymmetry_bars(const nlohmann::ordered_json& bundle);

/// Mean and SD of F1 per cell for one validation scheme ("SD" or "SI").
Table f1_bars(const nlohmann::ordered_json& bundle, const std::string& scheme);

struct BarChart {
  std::string title;
  std::string y_label;
  std::vector<std::string> groups;
  std::vector<std::string> series;
  std::vector<std::vector<double>> values;  // [group][series]
  std::optional<double> reference;          // dashed horizontal line
};

std::string render_svg(const BarChart& chart);

/// File name and content of every table (and chart when `svg`).
std::vector<std::pair<std::string, std::string>> render_all(const nlohmann::ordered_json& bundle, bool svg);

}  // namespace valence::report
