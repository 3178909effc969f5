#include "commands.hpp"
#include "fsl/report.hpp"

#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <initializer_list>
#include <sstream>
#include <string>
#include <unistd.h>
#include <vector>

using namespace fsl;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  fs::path p = fs::temp_directory_path() / ("fsl_cli_" + std::to_string(::getpid())) / name;
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

int invoke(std::initializer_list<std::string> args, std::string* errout = nullptr) {
  std::vector<std::string> store{"fsl"};
  store.insert(store.end(), args.begin(), args.end());
  std::vector<const char*> argv;
  for (const auto& s : store) argv.push_back(s.c_str());
  std::ostringstream out, err;
  int rc = cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
  if (errout) *errout = err.str();
  return rc;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

json load(const fs::path& p) { return json::parse(slurp(p)); }

fs::path write_config(const fs::path& dir, const std::string& text) {
  fs::path p = dir / "config.json";
  std::ofstream(p) << text;
  return p;
}

}  // namespace

TEST_CASE("report formatting") {
  CHECK(format_double(1.0) == "1.0");
  CHECK(format_double(0.1) == "0.10000000000000001");
  CHECK(format_double(std::nan("")) == "null");
  std::string a = dump_report({{"b", 1}, {"a", {1.5, 2.0}}});
  CHECK(a.find("\"a\"") < a.find("\"b\""));
  CHECK(a.find("[1.5, 2.0]") != std::string::npos);
}

TEST_CASE("config parsing") {
  RunConfig d = parse_config(json::object());
  CHECK(d.construction == "massopust");
  CHECK(d.N == 3);
  RunConfig g = parse_config(json{{"construction", "geronimo-hardin"}, {"s", 0.82}});
  CHECK(g.N == 2);
  CHECK(default_scales(g).front() == doctest::Approx(0.25));
  CHECK_THROWS_AS(parse_config(json{{"bogus", 1}}), ConfigError);
  CHECK_THROWS_AS(parse_config(json{{"esc", {{"depth", 3}}}}), ConfigError);
  CHECK_THROWS_AS(parse_config(json{{"N", 2}}), ConfigError);
  CHECK_THROWS_AS(parse_config(json{{"s", 1.5}}), ConfigError);
  CHECK_THROWS_AS(parse_config(json{{"s", json::array({0.7, 0.8})}}), ConfigError);
  CHECK_THROWS_AS(parse_config(json{{"construction", "geronimo-hardin"}, {"data", json::array()}}), ConfigError);
  CHECK_THROWS_AS(parse_scales("0.1"), ConfigError);
  CHECK_THROWS_AS(parse_scales("0.1,abc"), ConfigError);
  CHECK(parse_scales("0.1,0.05").size() == 2);
  RunConfig data = parse_config(json::parse(R"({"data": [{"r": 1, "c": 1, "value": 2.0}]})"));
  CHECK(build_surface(data).data.value(1, 1) == 2.0);
  CHECK_THROWS_AS(load_config("/nonexistent/fsl/config.json"), IoError);
}

TEST_CASE("exit codes") {
  fs::path dir = scratch("codes");
  std::string err;
  CHECK(invoke({"markov", "--out", dir.string()}) == cli::kOk);
  CHECK(invoke({"nonsense"}) == cli::kConfigError);
  CHECK(invoke({"surface", "--config", "/nonexistent/fsl.json"}) == cli::kIoError);
  fs::path bad = write_config(dir, R"({"construction": "massopust", "colour": 1})");
  CHECK(invoke({"surface", "--config", bad.string(), "--out", dir.string()}, &err) == cli::kConfigError);
  CHECK(err.find("colour") != std::string::npos);
  fs::path broken = write_config(dir, "{ not json");
  CHECK(invoke({"surface", "--config", broken.string(), "--out", dir.string()}) == cli::kConfigError);
  CHECK(invoke({"dimension", "--scales", "0.1", "--out", dir.string()}) == cli::kConfigError);
  fs::path file = dir / "plain_file";
  std::ofstream(file) << "x";
  CHECK(invoke({"markov", "--out", (file / "sub").string()}) == cli::kIoError);
  fs::path inf = write_config(dir, R"({"markov": {"generators": [[[3,0,5],[-4,0,5],[4,0,5],[3,0,5]]]}})");
  CHECK(invoke({"markov", "--config", inf.string(), "--out", dir.string()}, &err) == cli::kConfigError);
  CHECK(err.find("finite") != std::string::npos);
}

TEST_CASE("surface command") {
  fs::path dir = scratch("surface");
  CHECK(invoke({"surface", "--depth", "2", "--out", dir.string()}) == cli::kOk);
  json r = load(dir / "report.json");
  CHECK(r["faces"].get<int>() == 81);
  CHECK(fs::exists(dir / "surface.obj"));
  CHECK(fs::exists(dir / "surface.pgm"));
  CHECK(r["schema"] == kReportSchema);
  fs::path gh = write_config(dir, R"({"construction": "geronimo-hardin", "s": 0.82, "a": 1})");
  CHECK(invoke({"surface", "--config", gh.string(), "--depth", "3", "--out", dir.string()}) == cli::kOk);
  CHECK(load(dir / "report.json")["faces"].get<int>() == 64);
  CHECK(invoke({"surface", "--depth", "0", "--out", dir.string()}) == cli::kOk);
  CHECK(load(dir / "report.json")["faces"].get<int>() == 1);
}

TEST_CASE("dimension command") {
  fs::path dir = scratch("dimension");
  fs::path gh = write_config(dir, R"({"construction": "geronimo-hardin", "s": 0.5})");
  CHECK(invoke({"dimension", "--config", gh.string(), "--samples", "2000", "--out", dir.string()}) == cli::kOk);
  json r = load(dir / "report.json");
  CHECK(r["t0"].get<double>() == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(fs::exists(dir / "boxcount.csv"));
}

TEST_CASE("certify and markov reports") {
  fs::path dir = scratch("certify");
  fs::path gh = write_config(dir, R"({"construction": "geronimo-hardin", "s": 0.82})");
  CHECK(invoke({"certify", "--config", gh.string(), "--samples", "5000", "--out", dir.string()}) == cli::kOk);
  CHECK(load(dir / "report.json")["verdict"] == "Certified");
  fs::path low = write_config(dir, R"({"construction": "geronimo-hardin", "s": 0.6})");
  CHECK(invoke({"certify", "--config", low.string(), "--out", dir.string()}) == cli::kOk);
  CHECK(load(dir / "report.json")["verdict"] == "Hypotheses-unmet");

  fs::path m = scratch("markov");
  fs::path cfg = write_config(m, R"({"markov": {"n_max": 5, "brute_max": 5}})");
  CHECK(invoke({"markov", "--config", cfg.string(), "--out", m.string()}) == cli::kOk);
  json r = load(m / "report.json");
  CHECK(r["order"].get<int>() == 12);
  CHECK(r["period"].get<int>() == 2);
  CHECK(r["limit"] == "1/6");
  CHECK(r["brute_force_check"] == "ok");
  CHECK(r["N"][0].get<int>() == 4);
  CHECK(r["gd_ifs"]["degrees_ok"].get<bool>());
  for (const char* f : {"group_table.csv", "transition_P.csv", "transition_R.csv", "return_counts.csv"})
    CHECK(fs::exists(m / f));
}

TEST_CASE("reports are deterministic") {
  fs::path a = scratch("det_a"), b = scratch("det_b");
  CHECK(invoke({"dimension", "--samples", "20000", "--workers", "1", "--out", a.string()}) == cli::kOk);
  CHECK(invoke({"dimension", "--samples", "20000", "--workers", "3", "--out", b.string()}) == cli::kOk);
  CHECK(slurp(a / "report.json") == slurp(b / "report.json"));
  CHECK(load(a / "report.timing.json")["workers"].get<int>() == 1);
  CHECK(invoke({"esc", "--out", a.string()}) == cli::kOk);
  CHECK(invoke({"esc", "--out", b.string()}) == cli::kOk);
  CHECK(slurp(a / "report.json") == slurp(b / "report.json"));
}

TEST_CASE("worker count from the environment") {
  fs::path dir = scratch("env");
  ::setenv("FSL_WORKERS", "2", 1);
  CHECK(invoke({"markov", "--out", dir.string()}) == cli::kOk);
  CHECK(load(dir / "report.timing.json")["workers"].get<int>() == 2);
  CHECK(invoke({"markov", "--workers", "5", "--out", dir.string()}) == cli::kOk);
  CHECK(load(dir / "report.timing.json")["workers"].get<int>() == 5);
  ::setenv("FSL_WORKERS", "many", 1);
  CHECK(invoke({"markov", "--out", dir.string()}) == cli::kConfigError);
  ::setenv("FSL_WORKERS", "2", 1);
  fs::remove_all(dir.parent_path());
}
