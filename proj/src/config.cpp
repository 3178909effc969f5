#include "fsl/config.hpp"

#include "fsl/attractor.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

namespace fsl {

using nlohmann::json;

namespace {

const std::set<std::string> kTopKeys = {
    "construction", "N",       "data",    "s",   "a",   "depth", "samples", "seed",   "workers",
    "burn_in",      "streams", "scales",  "pgm_width", "esc", "markov", "output"};
const std::set<std::string> kEscKeys = {"n", "b", "budget"};
const std::set<std::string> kMarkovKeys = {"n_max", "brute_max", "generators"};
const std::set<std::string> kOutputKeys = {"obj", "pgm", "csv", "report"};

void check_keys(const json& obj, const std::set<std::string>& allowed, const std::string& where) {
  if (!obj.is_object()) throw ConfigError(where + ": expected an object");
  for (const auto& [k, _] : obj.items())
    if (!allowed.count(k)) throw ConfigError(where + ": unknown field '" + k + "'");
}

double get_number(const json& v, const std::string& name) {
  if (!v.is_number()) throw ConfigError(name + ": expected a number");
  double x = v.get<double>();
  if (!std::isfinite(x)) throw ConfigError(name + ": not finite");
  return x;
}

std::int64_t get_int(const json& v, const std::string& name, std::int64_t lo, std::int64_t hi) {
  if (!v.is_number_integer() && !v.is_number_unsigned()) throw ConfigError(name + ": expected an integer");
  if (v.is_number_unsigned() && v.get<std::uint64_t>() > static_cast<std::uint64_t>(hi))
    throw ConfigError(name + ": out of range");
  std::int64_t x = v.get<std::int64_t>();
  if (x < lo || x > hi) throw ConfigError(name + ": out of range [" + std::to_string(lo) + ", " + std::to_string(hi) + "]");
  return x;
}

std::uint64_t get_u64(const json& v, const std::string& name) {
  if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<std::int64_t>() >= 0))
    throw ConfigError(name + ": expected a non-negative integer");
  return v.get<std::uint64_t>();
}

std::string get_string(const json& v, const std::string& name) {
  if (!v.is_string()) throw ConfigError(name + ": expected a string");
  return v.get<std::string>();
}

DihedralScalar get_scalar(const json& v, const std::string& name) {
  if (v.is_number_integer()) return DihedralScalar::integer(v.get<std::int64_t>());
  if (v.is_array() && v.size() == 3 && v[0].is_number_integer() && v[1].is_number_integer() &&
      v[2].is_number_integer()) {
    std::int64_t d = v[2].get<std::int64_t>();
    if (d == 0) throw ConfigError(name + ": zero denominator");
    return {v[0].get<std::int64_t>(), v[1].get<std::int64_t>(), d};
  }
  throw ConfigError(name + ": expected an integer or [p, r, d] meaning (p + r*sqrt3)/d");
}

json scalar_json(const DihedralScalar& x) { return json::array({x.p(), x.r(), x.d()}); }

}  // namespace

RunConfig parse_config(const json& doc) {
  check_keys(doc, kTopKeys, "config");
  RunConfig cfg;
  if (doc.contains("construction")) {
    cfg.construction = get_string(doc["construction"], "construction");
    if (cfg.construction != "massopust" && cfg.construction != "geronimo-hardin")
      throw ConfigError("construction: expected \"massopust\" or \"geronimo-hardin\"");
  }
  const bool gh = cfg.construction == "geronimo-hardin";
  if (gh) cfg.N = 2;
  if (doc.contains("N")) {
    cfg.N = static_cast<int>(get_int(doc["N"], "N", 2, 1000));
    if (gh && cfg.N != 2) throw ConfigError("N: geronimo-hardin has N = 2");
    if (!gh && cfg.N < 3) throw ConfigError("N: massopust needs N >= 3");
  }
  if (doc.contains("a")) cfg.a = get_number(doc["a"], "a");
  if (doc.contains("s")) {
    const json& s = doc["s"];
    cfg.s.clear();
    if (s.is_array()) {
      if (s.empty()) throw ConfigError("s: empty array");
      for (std::size_t i = 0; i < s.size(); ++i) cfg.s.push_back(get_number(s[i], "s[" + std::to_string(i) + "]"));
    } else {
      cfg.s.push_back(get_number(s, "s"));
    }
  }
  if (doc.contains("data")) {
    if (gh) throw ConfigError("data: not used by geronimo-hardin (set a)");
    const json& d = doc["data"];
    if (!d.is_array()) throw ConfigError("data: expected an array of {r, c, value}");
    InterpolationData data;
    for (std::size_t i = 0; i < d.size(); ++i) {
      std::string at = "data[" + std::to_string(i) + "]";
      check_keys(d[i], {"r", "c", "value"}, at);
      if (!d[i].contains("r") || !d[i].contains("c") || !d[i].contains("value"))
        throw ConfigError(at + ": needs r, c and value");
      int r = static_cast<int>(get_int(d[i]["r"], at + ".r", 0, cfg.N));
      int c = static_cast<int>(get_int(d[i]["c"], at + ".c", 0, cfg.N - r));
      data.set(r, c, get_number(d[i]["value"], at + ".value"));
    }
    cfg.data = data;
  }
  if (doc.contains("depth")) cfg.depth = static_cast<int>(get_int(doc["depth"], "depth", 0, 64));
  if (doc.contains("samples")) cfg.samples = get_u64(doc["samples"], "samples");
  if (doc.contains("seed")) cfg.seed = get_u64(doc["seed"], "seed");
  if (doc.contains("workers")) cfg.workers = static_cast<int>(get_int(doc["workers"], "workers", 0, 4096));
  if (doc.contains("burn_in")) cfg.burn_in = static_cast<int>(get_int(doc["burn_in"], "burn_in", 0, 1000000));
  if (doc.contains("streams")) cfg.streams = static_cast<int>(get_int(doc["streams"], "streams", 1, 4096));
  if (doc.contains("pgm_width")) cfg.pgm_width = static_cast<int>(get_int(doc["pgm_width"], "pgm_width", 2, 16384));
  if (doc.contains("scales")) {
    const json& sc = doc["scales"];
    if (!sc.is_array() || sc.size() < 2) throw ConfigError("scales: expected an array of at least two values");
    for (std::size_t i = 0; i < sc.size(); ++i) {
      double v = get_number(sc[i], "scales[" + std::to_string(i) + "]");
      if (!(v > 0.0)) throw ConfigError("scales: values must be positive");
      cfg.scales.push_back(v);
    }
  }
  if (doc.contains("esc")) {
    const json& e = doc["esc"];
    check_keys(e, kEscKeys, "esc");
    if (e.contains("n")) cfg.esc_n = static_cast<int>(get_int(e["n"], "esc.n", 1, 12));
    if (e.contains("b")) {
      cfg.esc_b = get_number(e["b"], "esc.b");
      if (!(cfg.esc_b > 0.0)) throw ConfigError("esc.b: must be positive");
    }
    if (e.contains("budget")) cfg.esc_budget = get_u64(e["budget"], "esc.budget");
  }
  if (doc.contains("markov")) {
    const json& m = doc["markov"];
    check_keys(m, kMarkovKeys, "markov");
    if (m.contains("n_max")) cfg.n_max = static_cast<int>(get_int(m["n_max"], "markov.n_max", 1, 12));
    if (m.contains("brute_max")) cfg.brute_max = static_cast<int>(get_int(m["brute_max"], "markov.brute_max", 0, 8));
    if (m.contains("generators")) {
      const json& g = m["generators"];
      if (!g.is_array() || g.empty()) throw ConfigError("markov.generators: expected a nonempty array");
      for (std::size_t i = 0; i < g.size(); ++i) {
        std::string at = "markov.generators[" + std::to_string(i) + "]";
        if (!g[i].is_array() || g[i].size() != 4) throw ConfigError(at + ": expected 4 entries, row-major");
        ExactMat2 q;
        for (int k = 0; k < 4; ++k) q.e[static_cast<std::size_t>(k)] = get_scalar(g[i][static_cast<std::size_t>(k)], at);
        cfg.generators.push_back(q);
      }
    }
  }
  if (doc.contains("output")) {
    const json& o = doc["output"];
    check_keys(o, kOutputKeys, "output");
    if (o.contains("obj")) cfg.obj = get_string(o["obj"], "output.obj");
    if (o.contains("pgm")) cfg.pgm = get_string(o["pgm"], "output.pgm");
    if (o.contains("csv")) cfg.csv = get_string(o["csv"], "output.csv");
    if (o.contains("report")) cfg.report = get_string(o["report"], "output.report");
  }

  // validate the construction up front
  try {
    (void)build_surface(cfg);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("construction: ") + e.what());
  }
  return cfg;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config file " + path);
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  return parse_config(doc);
}

json config_to_json(const RunConfig& cfg) {
  json j;
  j["construction"] = cfg.construction;
  j["N"] = cfg.N;
  j["s"] = cfg.s;
  j["a"] = cfg.a;
  if (cfg.data) {
    json d = json::array();
    for (const auto& [k, v] : cfg.data->values) d.push_back({{"r", k.r}, {"c", k.c}, {"value", v}});
    j["data"] = d;
  }
  j["depth"] = cfg.depth;
  j["samples"] = cfg.samples;
  j["seed"] = cfg.seed;
  j["burn_in"] = cfg.burn_in;
  j["streams"] = cfg.streams;
  j["scales"] = default_scales(cfg);
  j["esc"] = {{"n", cfg.esc_n}, {"b", cfg.esc_b}, {"budget", cfg.esc_budget}};
  json gens = json::array();
  for (const auto& g : cfg.generators) {
    json m = json::array();
    for (const auto& x : g.e) m.push_back(scalar_json(x));
    gens.push_back(m);
  }
  j["markov"] = {{"n_max", cfg.n_max}, {"brute_max", cfg.brute_max}, {"generators", gens}};
  return j;
}

SurfaceIFS build_surface(const RunConfig& cfg) {
  if (cfg.construction == "geronimo-hardin") {
    if (cfg.s.size() != 1) throw std::invalid_argument("geronimo-hardin takes a single s");
    return build_geronimo_hardin(cfg.s.front(), cfg.a);
  }
  TriangulationSpec spec{cfg.N};
  InterpolationData data = cfg.data ? *cfg.data : plateau_data(cfg.N, cfg.a);
  if (cfg.s.size() == 1) return build_massopust(spec, data, cfg.s.front());
  return build_massopust(spec, data, cfg.s);
}

std::vector<double> default_scales(const RunConfig& cfg) {
  if (!cfg.scales.empty()) return cfg.scales;
  if (cfg.construction == "geronimo-hardin") return geometric_scales(2.0, 2, 6);
  return geometric_scales(static_cast<double>(cfg.N), 2, 6);
}

std::vector<double> parse_scales(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(item, &used);
    } catch (const std::exception&) {
      throw ConfigError("scales: cannot parse '" + item + "'");
    }
    if (used != item.size() && item.find_first_not_of(" \t", used) != std::string::npos)
      throw ConfigError("scales: cannot parse '" + item + "'");
    if (!(v > 0.0) || !std::isfinite(v)) throw ConfigError("scales: values must be positive");
    out.push_back(v);
  }
  if (out.size() < 2) throw ConfigError("scales: need at least two values");
  return out;
}

}  // namespace fsl
