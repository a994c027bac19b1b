#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>

#include "lro/config.hpp"
#include "lro/errors.hpp"
#include "lro/io.hpp"

using namespace lro;
using nlohmann::json;

namespace {

std::string error_path(const json& user) {
  try {
    auto cfg = parse_config(user);
    cfg.transmon();
    cfg.resonator();
  } catch (const ConfigError& e) {
    return e.path();
  }
  return "";
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST_SUITE("config") {
  TEST_CASE("missing Josephson energy names its key") {
    CHECK(error_path(json::parse(R"({"resonator": {"omega_r": 8.8, "phi_rzpf": 0.09}})")) == "transmon.e_j");
  }

  TEST_CASE("unknown keys are rejected") {
    CHECK(error_path(json::parse(R"({"transmon": {"e_j": 20, "e_jj": 1}})")) == "transmon.e_jj");
    CHECK(error_path(json::parse(R"({"spectrum": {"fold_frequency": "halfway"}})")) == "spectrum.fold_frequency");
  }

  TEST_CASE("type and range errors") {
    CHECK(error_path(json::parse(R"({"transmon": {"e_j": 20, "k_levels": 2.5}})")) == "transmon.k_levels");
    CHECK(error_path(json::parse(R"({"transmon": {"e_j": 20}, "resonator": {"omega_r": 8, "delta": -2, "phi_rzpf": 0.1}})")) ==
          "resonator.delta");
    CHECK(error_path(json::parse(R"({"transmon": {"e_j": 20}, "resonator": {"omega_r": 8, "phi_rzpf": 0.1, "chi_z": -0.01}})")) ==
          "resonator.chi_z");
  }

  TEST_CASE("resonator resolved from detuning and dispersive shift") {
    auto cfg = parse_config(json::parse(
        R"({"transmon": {"e_c": 0.214867, "e_j_over_e_c": 50, "k_levels": 8},
            "resonator": {"delta": -5.23, "chi_z": -0.00866}})"));
    auto t = cfg.transmon();
    auto r = cfg.resonator();
    CHECK(t.e_j == doctest::Approx(50 * 0.214867));
    CHECK(r.phi_rzpf == doctest::Approx(0.0898).epsilon(1e-3));
    CHECK(r.omega_r == doctest::Approx(4.07 + 5.23).epsilon(1e-3));
  }

  TEST_CASE("dotted overrides and ranges") {
    json doc = json::object();
    apply_override(doc, "resonator.omega_r=9.1");
    apply_override(doc, "readout.model=full");
    apply_override(doc, "sweep.axis_1.values={\"start\": 0, \"stop\": 1, \"count\": 5}");
    CHECK(doc["resonator"]["omega_r"] == 9.1);
    CHECK(doc["readout"]["model"] == "full");
    doc["transmon"]["e_j"] = 20.0;
    auto cfg = parse_config(doc);
    CHECK(cfg.sweep.axis_1.values.size() == 5);
    CHECK(cfg.sweep.axis_1.values[1] == doctest::Approx(0.25));
    CHECK(cfg.readout.model.kind == ReadoutModelKind::Full);
    CHECK(cfg.readout.tau_grid.front() == doctest::Approx(2.0));
    CHECK(cfg.readout.tau_grid.back() == doctest::Approx(60.0));
    CHECK_THROWS_AS(apply_override(doc, "=3"), ConfigError);
  }

  TEST_CASE("worker count") {
    auto cfg = parse_config(json::parse(R"({"workers": 3})"));
    CHECK(cfg.workers == 3);
    CHECK(parse_config(json::object()).workers >= 1);
  }
}

TEST_SUITE("io") {
  TEST_CASE("number formatting") {
    CHECK(fmt_num(0.1) == "0.1");
    CHECK(fmt_num(0.0) == "0");
    CHECK(fmt_num(-0.0) == "0");
    CHECK(fmt_num(std::numeric_limits<double>::quiet_NaN()) == "nan");
    CHECK(std::stod(fmt_num(1.0 / 3.0)) == doctest::Approx(1.0 / 3.0).epsilon(1e-12));
  }

  TEST_CASE("csv, svg and sidecar files") {
    auto dir = std::filesystem::temp_directory_path() / "lro_io_test";
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    CsvTable t({"a", "b"});
    t.add_row({"1", "x"}).add_row({"2", "y"});
    CHECK(t.rows() == 2);
    t.write(dir / "t.csv");
    CHECK(slurp(dir / "t.csv") == "a,b\n1,x\n2,y\n");
    CHECK_THROWS(CsvTable({"a"}).add_row({"1", "2"}));

    PlotSpec ps{"title", "x", "y", {Series{"s", {0, 1, 2}, {1, 2, 4}, false, "", 1.6}}};
    write_svg_plot(dir / "p.svg", ps);
    CHECK(slurp(dir / "p.svg").find("<svg") != std::string::npos);

    write_run_metadata(dir, "spectrum", json{{"k", 1}}, json{{"n_crit", 3}}, {"t.csv"});
    auto run = json::parse(slurp(dir / "run.json"));
    CHECK(run["schema_version"] == kSidecarSchemaVersion);
    CHECK(run["command"] == "spectrum");
    CHECK(run["summary"]["n_crit"] == 3);
    CHECK(json::parse(slurp(dir / "config.json"))["k"] == 1);
    CHECK(slurp(dir / "VERSION").find(version_string()) != std::string::npos);
    std::filesystem::remove_all(dir);
  }
}
