#pragma once

// CSV tables, JSON run sidecars and small SVG plots.

#include <filesystem>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

namespace lro {

inline constexpr int kSidecarSchemaVersion = 1;

std::string version_string();

/// Shortest round-trip-stable text for a double ("{:.12g}"); NaN as "nan".
std::string fmt_num(double v);

class CsvTable {
 public:
  explicit CsvTable(std::vector<std::string> header);
  CsvTable& add_row(std::vector<std::string> cells);
  std::size_t rows() const { return rows_.size(); }
  void write(const std::filesystem::path& path) const;

 private:
  std::vector<std::string> header_;
  std::vector<std::vector<std::string>> rows_;
};

struct Series {
  std::string label;
  std::vector<double> x;
  std::vector<double> y;
  bool scatter = false;
  std::string color;  // empty: palette
  double marker = 1.6;
};

struct PlotSpec {
  std::string title;
  std::string x_label;
  std::string y_label;
  std::vector<Series> series;
  bool log_y = false;
  bool legend = true;
  double width = 720;
  double height = 480;
};

struct HeatmapSpec {
  std::string title;
  std::string x_label;  // columns
  std::string y_label;  // rows
  std::vector<double> x_values;
  std::vector<double> y_values;
  Eigen::MatrixXd values;  // rows = y, cols = x
  Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic> censored;  // hatched cells
  Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic> failed;    // grey cells
  std::string value_label;
};

void write_svg_plot(const std::filesystem::path& path, const PlotSpec& spec);
void write_svg_heatmap(const std::filesystem::path& path, const HeatmapSpec& spec);

/// Writes `resolved` to config.json, the version string to VERSION and the
/// sidecar run.json in `dir`.
void write_run_metadata(const std::filesystem::path& dir, const std::string& command,
                        const nlohmann::json& resolved, const nlohmann::json& summary,
                        const std::vector<std::string>& outputs);

}  // namespace lro
