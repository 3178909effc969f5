#pragma once

#include "fsl/geometry.hpp"
#include "fsl/surface.hpp"

#include <json.hpp>

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace fsl {

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct RunConfig {
  // construction
  std::string construction = "massopust";  // or "geronimo-hardin"
  int N = 3;
  std::optional<InterpolationData> data;    // massopust only; default plateau of height a
  std::vector<double> s{0.75};              // one value = uniform
  double a = 1.0;

  // experiment
  int depth = 4;
  std::uint64_t samples = 200000;
  std::uint64_t seed = 1;
  int workers = 0;
  int burn_in = 100;
  int streams = 16;
  std::vector<double> scales;  // empty = construction default
  int pgm_width = 512;

  // esc search
  int esc_n = 3;
  double esc_b = 10.0;
  std::uint64_t esc_budget = 531441;

  // markov
  int n_max = 12;
  int brute_max = 5;
  std::vector<ExactMat2> generators;  // empty = GH generators

  // output file names, relative to the output directory
  std::string obj = "surface.obj";
  std::string pgm = "surface.pgm";
  std::string csv = "boxcount.csv";
  std::string report = "report.json";
};

RunConfig parse_config(const nlohmann::json& doc);
RunConfig load_config(const std::string& path);
nlohmann::json config_to_json(const RunConfig& cfg);

SurfaceIFS build_surface(const RunConfig& cfg);
std::vector<double> default_scales(const RunConfig& cfg);

// "0.1,0.05" -> {0.1, 0.05}
std::vector<double> parse_scales(const std::string& text);

}  // namespace fsl
