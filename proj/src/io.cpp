#include "lro/io.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <stdexcept>

#include <fmt/format.h>

namespace lro {

namespace {

const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd",
                          "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf"};

std::ofstream open_out(const std::filesystem::path& path) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
  return out;
}

std::string escape_xml(const std::string& s) {
  std::string r;
  for (char c : s) {
    switch (c) {
      case '&': r += "&amp;"; break;
      case '<': r += "&lt;"; break;
      case '>': r += "&gt;"; break;
      case '"': r += "&quot;"; break;
      default: r += c;
    }
  }
  return r;
}

std::string csv_cell(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string r = "\"";
  for (char c : s) r += (c == '"') ? std::string("\"\"") : std::string(1, c);
  return r + "\"";
}

// "Nice" tick positions covering [lo, hi].
std::vector<double> ticks(double lo, double hi, int target = 6) {
  std::vector<double> out;
  if (!(hi > lo)) return {lo};
  const double raw = (hi - lo) / target;
  const double mag = std::pow(10.0, std::floor(std::log10(raw)));
  double step = mag;
  for (double m : {1.0, 2.0, 2.5, 5.0, 10.0}) {
    step = m * mag;
    if (raw <= step) break;
  }
  for (double v = std::ceil(lo / step) * step; v <= hi + 1e-9 * step; v += step) out.push_back(std::abs(v) < 1e-12 * step ? 0.0 : v);
  return out;
}

std::string viridis(double u) {
  // Piecewise-linear approximation through five viridis anchors.
  static const double a[5][3] = {{68, 1, 84}, {59, 82, 139}, {33, 145, 140}, {94, 201, 98}, {253, 231, 37}};
  u = std::clamp(u, 0.0, 1.0) * 4.0;
  const int i = std::min(3, static_cast<int>(u));
  const double f = u - i;
  int rgb[3];
  for (int c = 0; c < 3; ++c) rgb[c] = static_cast<int>(std::lround(a[i][c] + f * (a[i + 1][c] - a[i][c])));
  return fmt::format("#{:02x}{:02x}{:02x}", rgb[0], rgb[1], rgb[2]);
}

}  // namespace

std::string version_string() { return std::string("lro ") + LRO_VERSION; }

std::string fmt_num(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  if (v == 0.0) return "0";
  return fmt::format("{:.12g}", v);
}

CsvTable::CsvTable(std::vector<std::string> header) : header_(std::move(header)) {}

CsvTable& CsvTable::add_row(std::vector<std::string> cells) {
  if (cells.size() != header_.size())
    throw std::logic_error(fmt::format("csv row has {} cells, header has {}", cells.size(), header_.size()));
  rows_.push_back(std::move(cells));
  return *this;
}

void CsvTable::write(const std::filesystem::path& path) const {
  auto out = open_out(path);
  auto line = [&](const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) out << (i ? "," : "") << csv_cell(cells[i]);
    out << '\n';
  };
  line(header_);
  for (const auto& r : rows_) line(r);
}

void write_svg_plot(const std::filesystem::path& path, const PlotSpec& spec) {
  const double ml = 70, mr = spec.legend ? 150 : 20, mt = 40, mb = 55;
  const double pw = spec.width - ml - mr, ph = spec.height - mt - mb;
  double x0 = std::numeric_limits<double>::infinity(), x1 = -x0, y0 = x0, y1 = -x0;
  auto ty = [&](double y) { return spec.log_y ? std::log10(y) : y; };
  for (const auto& s : spec.series) {
    for (std::size_t i = 0; i < s.x.size() && i < s.y.size(); ++i) {
      if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i]) || (spec.log_y && s.y[i] <= 0)) continue;
      x0 = std::min(x0, s.x[i]);
      x1 = std::max(x1, s.x[i]);
      y0 = std::min(y0, ty(s.y[i]));
      y1 = std::max(y1, ty(s.y[i]));
    }
  }
  if (!std::isfinite(x0)) x0 = 0, x1 = 1, y0 = 0, y1 = 1;
  if (x1 == x0) x0 -= 0.5, x1 += 0.5;
  if (y1 == y0) y0 -= 0.5, y1 += 0.5;
  const double pad = 0.04 * (y1 - y0);
  y0 -= pad;
  y1 += pad;
  auto px = [&](double x) { return ml + (x - x0) / (x1 - x0) * pw; };
  auto py = [&](double y) { return mt + (1.0 - (ty(y) - y0) / (y1 - y0)) * ph; };

  auto out = open_out(path);
  out << fmt::format(R"~(<svg xmlns="http://www.w3.org/2000/svg" width="{}" height="{}" font-family="sans-serif" font-size="12">)~",
                     spec.width, spec.height)
      << "\n<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  out << fmt::format(R"~(<text x="{}" y="22" text-anchor="middle" font-size="14">{}</text>)~", ml + pw / 2,
                     escape_xml(spec.title))
      << "\n";
  out << fmt::format(R"~(<rect x="{}" y="{}" width="{}" height="{}" fill="none" stroke="black"/>)~", ml, mt, pw, ph)
      << "\n";
  for (double t : ticks(x0, x1)) {
    out << fmt::format(R"~(<line x1="{0:.2f}" y1="{1}" x2="{0:.2f}" y2="{2}" stroke="black"/><text x="{0:.2f}" y="{3}" text-anchor="middle">{4}</text>)~",
                       px(t), mt + ph, mt + ph + 5, mt + ph + 18, fmt::format("{:g}", t))
        << "\n";
  }
  for (double t : ticks(y0, y1)) {
    const double yy = mt + (1.0 - (t - y0) / (y1 - y0)) * ph;
    const std::string label = spec.log_y ? fmt::format("1e{:g}", t) : fmt::format("{:g}", t);
    out << fmt::format(R"~(<line x1="{0}" y1="{1:.2f}" x2="{2}" y2="{1:.2f}" stroke="black"/><text x="{3}" y="{4:.2f}" text-anchor="end">{5}</text>)~",
                       ml - 5, yy, ml, ml - 8, yy + 4, label)
        << "\n";
  }
  out << fmt::format(R"~(<text x="{}" y="{}" text-anchor="middle">{}</text>)~", ml + pw / 2, spec.height - 12,
                     escape_xml(spec.x_label))
      << "\n";
  out << fmt::format(R"~(<text x="16" y="{0}" text-anchor="middle" transform="rotate(-90 16 {0})">{1}</text>)~",
                     mt + ph / 2, escape_xml(spec.y_label))
      << "\n";
  out << fmt::format(R"~(<clipPath id="plot"><rect x="{}" y="{}" width="{}" height="{}"/></clipPath><g clip-path="url(#plot)">)~",
                     ml, mt, pw, ph)
      << "\n";
  for (std::size_t k = 0; k < spec.series.size(); ++k) {
    const auto& s = spec.series[k];
    const std::string color = s.color.empty() ? kPalette[k % 10] : s.color;
    if (s.scatter) {
      for (std::size_t i = 0; i < s.x.size() && i < s.y.size(); ++i) {
        if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i]) || (spec.log_y && s.y[i] <= 0)) continue;
        out << fmt::format(R"~(<circle cx="{:.2f}" cy="{:.2f}" r="{}" fill="{}"/>)~", px(s.x[i]), py(s.y[i]), s.marker, color);
      }
      out << "\n";
    } else {
      std::string d;
      bool pen = false;
      for (std::size_t i = 0; i < s.x.size() && i < s.y.size(); ++i) {
        if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i]) || (spec.log_y && s.y[i] <= 0)) {
          pen = false;
          continue;
        }
        d += fmt::format("{}{:.2f},{:.2f} ", pen ? "L" : "M", px(s.x[i]), py(s.y[i]));
        pen = true;
      }
      out << fmt::format(R"~(<path d="{}" fill="none" stroke="{}" stroke-width="1.5"/>)~", d, color) << "\n";
    }
  }
  out << "</g>\n";
  if (spec.legend) {
    double ly = mt + 10;
    for (std::size_t k = 0; k < spec.series.size(); ++k) {
      if (spec.series[k].label.empty()) continue;
      const std::string color = spec.series[k].color.empty() ? kPalette[k % 10] : spec.series[k].color;
      out << fmt::format(R"~(<rect x="{}" y="{}" width="12" height="12" fill="{}"/><text x="{}" y="{}">{}</text>)~",
                         ml + pw + 10, ly - 10, color, ml + pw + 27, ly, escape_xml(spec.series[k].label))
          << "\n";
      ly += 18;
    }
  }
  out << "</svg>\n";
}

void write_svg_heatmap(const std::filesystem::path& path, const HeatmapSpec& spec) {
  const int ny = static_cast<int>(spec.values.rows());
  const int nx = static_cast<int>(spec.values.cols());
  const double ml = 80, mr = 110, mt = 40, mb = 60;
  const double cell = std::clamp(480.0 / std::max(nx, ny), 8.0, 60.0);
  const double pw = cell * nx, ph = cell * ny;
  const double width = ml + pw + mr, height = mt + ph + mb;
  auto is = [](const Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic>& m, int i, int j) {
    return m.size() > 0 && m(i, j);
  };
  double lo = std::numeric_limits<double>::infinity(), hi = -lo;
  for (int i = 0; i < ny; ++i)
    for (int j = 0; j < nx; ++j)
      if (!is(spec.failed, i, j) && std::isfinite(spec.values(i, j))) {
        lo = std::min(lo, spec.values(i, j));
        hi = std::max(hi, spec.values(i, j));
      }
  if (!std::isfinite(lo)) lo = 0, hi = 1;
  if (hi == lo) hi = lo + 1;

  auto out = open_out(path);
  out << fmt::format(R"~(<svg xmlns="http://www.w3.org/2000/svg" width="{}" height="{}" font-family="sans-serif" font-size="12">)~",
                     width, height)
      << "\n<defs><pattern id=\"hatch\" width=\"6\" height=\"6\" patternUnits=\"userSpaceOnUse\" "
         "patternTransform=\"rotate(45)\"><line x1=\"0\" y1=\"0\" x2=\"0\" y2=\"6\" stroke=\"white\" "
         "stroke-width=\"2\"/></pattern></defs>\n"
      << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  out << fmt::format(R"~(<text x="{}" y="22" text-anchor="middle" font-size="14">{}</text>)~", ml + pw / 2,
                     escape_xml(spec.title))
      << "\n";
  for (int i = 0; i < ny; ++i) {
    for (int j = 0; j < nx; ++j) {
      const double x = ml + j * cell;
      const double y = mt + (ny - 1 - i) * cell;  // first row at the bottom
      if (is(spec.failed, i, j)) {
        out << fmt::format(R"~(<rect x="{}" y="{}" width="{}" height="{}" fill="#bbbbbb"/>)~", x, y, cell, cell);
        continue;
      }
      out << fmt::format(R"~(<rect x="{}" y="{}" width="{}" height="{}" fill="{}"/>)~", x, y, cell, cell,
                         viridis((spec.values(i, j) - lo) / (hi - lo)));
      if (is(spec.censored, i, j))
        out << fmt::format(R"~(<rect x="{}" y="{}" width="{}" height="{}" fill="url(#hatch)"/>)~", x, y, cell, cell);
      if (cell >= 28)
        out << fmt::format(R"~(<text x="{}" y="{}" text-anchor="middle" font-size="10" fill="white">{}{}</text>)~",
                           x + cell / 2, y + cell / 2 + 4, fmt::format("{:g}", spec.values(i, j)),
                           is(spec.censored, i, j) ? "+" : "");
    }
    out << "\n";
  }
  auto label_every = [](int n) { return std::max(1, n / 8); };
  for (int j = 0; j < nx; j += label_every(nx))
    out << fmt::format(R"~(<text x="{}" y="{}" text-anchor="middle">{:.3g}</text>)~", ml + (j + 0.5) * cell,
                       mt + ph + 16, spec.x_values.at(j));
  for (int i = 0; i < ny; i += label_every(ny))
    out << fmt::format(R"~(<text x="{}" y="{}" text-anchor="end">{:.3g}</text>)~", ml - 6,
                       mt + (ny - 1 - i + 0.5) * cell + 4, spec.y_values.at(i));
  out << "\n";
  out << fmt::format(R"~(<text x="{}" y="{}" text-anchor="middle">{}</text>)~", ml + pw / 2, height - 14,
                     escape_xml(spec.x_label))
      << "\n";
  out << fmt::format(R"~(<text x="18" y="{0}" text-anchor="middle" transform="rotate(-90 18 {0})">{1}</text>)~",
                     mt + ph / 2, escape_xml(spec.y_label))
      << "\n";
  const double bx = ml + pw + 20, bh = ph;
  for (int k = 0; k < 50; ++k)
    out << fmt::format(R"~(<rect x="{}" y="{:.2f}" width="16" height="{:.2f}" fill="{}"/>)~", bx,
                       mt + bh * (1.0 - (k + 1) / 50.0), bh / 50.0 + 0.5, viridis((k + 0.5) / 50.0));
  out << fmt::format(R"~(<text x="{}" y="{}">{:g}</text><text x="{}" y="{}">{:g}</text>)~", bx + 20, mt + 10, hi,
                     bx + 20, mt + bh, lo);
  out << fmt::format(R"~(<text x="{}" y="{}" font-size="11">{}</text>)~", bx, mt + bh + 20, escape_xml(spec.value_label));
  out << fmt::format(R"~(<text x="{}" y="{}" font-size="10">hatched: censored</text>)~", bx, mt + bh + 34);
  out << "\n</svg>\n";
}

void write_run_metadata(const std::filesystem::path& dir, const std::string& command,
                        const nlohmann::json& resolved, const nlohmann::json& summary,
                        const std::vector<std::string>& outputs) {
  std::filesystem::create_directories(dir);
  {
    auto out = open_out(dir / "config.json");
    out << resolved.dump(2) << '\n';
  }
  {
    auto out = open_out(dir / "VERSION");
    out << version_string() << '\n';
  }
  nlohmann::json side;
  side["schema_version"] = kSidecarSchemaVersion;
  side["tool"] = "lro";
  side["version"] = LRO_VERSION;
  side["command"] = command;
  side["outputs"] = outputs;
  side["summary"] = summary;
  side["config"] = resolved;
  auto out = open_out(dir / "run.json");
  out << side.dump(2) << '\n';
}

}  // namespace lro
