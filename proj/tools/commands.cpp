#include "commands.hpp"

#include "fsl/attractor.hpp"
#include "fsl/cfs.hpp"
#include "fsl/dimension.hpp"
#include "fsl/furstenberg.hpp"
#include "fsl/markov.hpp"
#include "fsl/report.hpp"
#include "fsl/surface.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <optional>
#include <ostream>

namespace fsl::cli {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

std::string join_path(const std::string& dir, const std::string& name) { return (fs::path(dir) / name).string(); }

template <class F>
void guarded_write(F&& f, const std::string& path) {
  try {
    f();
  } catch (const IoError&) {
    throw;
  } catch (const std::runtime_error& e) {
    throw IoError(std::string("cannot write ") + path + ": " + e.what());
  }
}

ChaosOptions chaos_options(const RunConfig& cfg, std::size_t count) {
  ChaosOptions o;
  o.count = count;
  o.seed = cfg.seed;
  o.burn_in = cfg.burn_in;
  o.streams = cfg.streams;
  o.workers = cfg.workers;
  return o;
}

json classification_json(const SurfaceIFS& ifs) {
  if (ifs.kind != Construction::Massopust) return nullptr;
  Classification c = classify_and_constants(ifs);
  json j{{"A1", c.A1}, {"A2", c.A2}, {"A3", c.A3}};
  j["B"] = c.B ? json(*c.B) : json(nullptr);
  j["D"] = c.D ? json(*c.D) : json(nullptr);
  RegionReport rr = validate_region(ifs, c, parameter_region(ifs, c));
  j["in_parameter_region"] = rr.ok;
  j["region_violators"] = rr.violators;
  return j;
}

std::string matrix_rows_csv(const std::vector<std::vector<int>>& t) {
  std::string out;
  for (const auto& row : t) {
    for (std::size_t j = 0; j < row.size(); ++j) out += (j ? "," : "") + std::to_string(row[j] + 1);
    out += "\n";
  }
  return out;
}

json rational_matrix_json(const RationalMatrix& m) {
  json rows = json::array();
  for (const auto& r : m) {
    json row = json::array();
    for (const auto& x : r) row.push_back(x.str());
    rows.push_back(row);
  }
  return rows;
}

}  // namespace

json cmd_surface(const RunConfig& cfg, const std::string& out_dir) {
  SurfaceIFS ifs = build_surface(cfg);
  SubdivisionMesh mesh = subdivision_mesh(ifs, cfg.depth);
  const std::string obj = join_path(out_dir, cfg.obj), pgm = join_path(out_dir, cfg.pgm);
  guarded_write([&] { export_obj(mesh, obj); }, obj);
  guarded_write([&] { export_pgm(mesh, pgm, cfg.pgm_width); }, pgm);
  json r;
  r["command"] = "surface";
  r["construction"] = to_string(ifs.kind);
  r["depth"] = cfg.depth;
  r["maps"] = ifs.size();
  r["faces"] = mesh.triangles.size();
  r["files"] = {{"obj", cfg.obj}, {"pgm", cfg.pgm}};
  r["classification"] = classification_json(ifs);
  return r;
}

json cmd_dimension(const RunConfig& cfg, const std::string& out_dir) {
  SurfaceIFS ifs = build_surface(cfg);
  AffinitySolution sol = affinity_dimension(ifs);
  json r;
  r["command"] = "dimension";
  r["construction"] = to_string(ifs.kind);
  r["t0"] = sol.t0;
  r["r1"] = sol.r1;
  r["r2"] = sol.r2;
  r["branch"] = sol.branch == Branch::R2 ? "r2" : "r1";
  r["r2_in_band"] = sol.r2_in_band;
  r["closed_form"] = closed_form_dimension(ifs);
  r["classification"] = classification_json(ifs);

  std::vector<double> w(ifs.size(), 1.0 / static_cast<double>(ifs.size()));
  PointCloud3 cloud = chaos_game(ifs, w, chaos_options(cfg, cfg.samples));
  std::vector<double> scales = default_scales(cfg);
  OccupancyTable table = box_count(cloud, scales);
  SlopeFit fit = box_dimension_fit(table);
  const std::string csv = join_path(out_dir, cfg.csv);
  guarded_write([&] { export_csv(table, csv); }, csv);
  r["samples"] = cfg.samples;
  r["seed"] = cfg.seed;
  r["scales"] = scales;
  r["counts"] = table.counts;
  r["box_slope"] = fit.slope;
  r["box_slope_stderr"] = fit.stderr_;
  r["abs_slope_minus_t0"] = std::abs(fit.slope - sol.t0);
  r["files"] = {{"csv", cfg.csv}};
  return r;
}

json cmd_certify(const RunConfig& cfg, const std::string& /*out_dir*/) {
  SurfaceIFS ifs = build_surface(cfg);
  PipelineResult res = certificate_pipeline(ifs);
  json r;
  r["command"] = "certify";
  r["construction"] = to_string(ifs.kind);
  r["verdict"] = to_string(res.verdict);
  r["t0"] = res.t0;
  r["target"] = res.target;
  r["covering_bound"] = res.bound;
  r["Q"] = res.Q;
  r["trace"] = res.trace;
  r["classification"] = classification_json(ifs);
  if (res.Q > 0) {
    FurstenbergIFS f = build_furstenberg(ifs);
    std::size_t n = std::min<std::uint64_t>(cfg.samples, 100000);
    EmpiricalOverlap eo = empirical_overlap(f, n, cfg.seed, cfg.workers);
    r["empirical_overlap"] = {{"Q", eo.Q}, {"depth", eo.depth}, {"samples", eo.samples}};
  }
  if (ifs.kind == Construction::Massopust) {
    try {
      FurstDimae fd = furstdimae_inequality(ifs);
      r["entropy_bound"] = {{"inequality_value", fd.value},
                            {"inequality_positive", fd.positive},
                            {"entropy", fd.bound.entropy},
                            {"lyapunov", fd.bound.lyapunov},
                            {"plain", fd.bound.plain},
                            {"corrected", fd.bound.corrected},
                            {"warnings", fd.bound.warnings}};
    } catch (const std::invalid_argument& e) {
      r["entropy_bound"] = {{"skipped", e.what()}};
    }
  }
  return r;
}

json cmd_markov(const RunConfig& cfg, const std::string& out_dir) {
  MatrixGroup grp;
  try {
    grp = group_closure(cfg.generators.empty() ? gh_generators() : cfg.generators);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  } catch (const std::runtime_error& e) {
    throw ConfigError(e.what());
  }
  json r;
  r["command"] = "markov";
  r["order"] = grp.order();
  r["generators"] = grp.generators.size();
  json labels = json::array();
  for (std::size_t i = 0; i < grp.order(); ++i) labels.push_back(grp.label(static_cast<int>(i)));
  r["elements"] = labels;

  std::vector<int> ordering = grp.listing_order ? gh_bipartite_ordering() : std::vector<int>{};
  TransitionMatrix tm = transition_matrix(grp, ordering);
  ChainAnalysis ca = chain_analysis(tm);
  json ord = json::array();
  for (int i : tm.ordering) ord.push_back(grp.label(i));
  r["ordering"] = ord;
  r["P"] = rational_matrix_json(tm.P);
  r["period"] = ca.period;
  r["irreducible"] = ca.irreducible;
  r["bipartite_blocks"] = ca.bipartite_blocks;
  r["p2_block_diagonal"] = ca.p2_block_diagonal;
  if (ca.p2_block_diagonal) {
    r["R"] = rational_matrix_json(ca.R);
    r["R_period"] = ca.R_period;
    r["limit"] = ca.limit.str();
    r["converged_at"] = ca.converged_at;
  }

  ReturnCounts rc = return_counts(grp, cfg.n_max, cfg.brute_max);
  r["N"] = rc.N;
  r["N_over_g2n"] = rc.ratio;
  r["brute_force"] = rc.brute;
  r["brute_force_check"] = rc.brute_agrees ? "ok" : "mismatch";
  r["N0"] = rc.N0;

  const std::string d = out_dir;
  guarded_write([&] { write_text(matrix_rows_csv(grp.table), join_path(d, "group_table.csv")); }, "group_table.csv");
  guarded_write([&] { write_text(matrix_csv(tm.P), join_path(d, "transition_P.csv")); }, "transition_P.csv");
  if (ca.p2_block_diagonal)
    guarded_write([&] { write_text(matrix_csv(ca.R), join_path(d, "transition_R.csv")); }, "transition_R.csv");
  {
    std::string csv = "n,N_n,brute\n";
    for (std::size_t i = 0; i < rc.N.size(); ++i)
      csv += std::to_string(i + 1) + "," + std::to_string(rc.N[i]) + "," +
             (i < rc.brute.size() ? std::to_string(rc.brute[i]) : std::string()) + "\n";
    guarded_write([&] { write_text(csv, join_path(d, "return_counts.csv")); }, "return_counts.csv");
  }

  if (grp.listing_order) {
    double s = cfg.construction == "geronimo-hardin" ? cfg.s.front() : 0.82;
    if (s > 0.5 && s < 1.0) {
      GraphDirectedIFS gd = build_gd_ifs(grp, s);
      std::vector<Affine2> can = gh_canonical_maps(s);
      PointCloud2 cloud = chaos_game(can, std::vector<double>(4, 0.25),
                                     chaos_options(cfg, std::min<std::uint64_t>(cfg.samples, 20000)));
      std::vector<Vec2> pts(cloud.points.begin(), cloud.points.end());
      json t_hat_n = json::array();
      for (int n = 1; n <= cfg.n_max; ++n) t_hat_n.push_back(t_hat(s, n));
      json offsets = json::array();
      for (std::size_t l = 0; l < gd.vertices.size(); ++l) {
        json row = json::array();
        for (const auto& t : gd.translations) row.push_back(dot(gd.vertices[l], t).str());
        offsets.push_back(row);
      }
      r["gd_ifs"] = {{"s", s},
                     {"edges", gd.edges.size()},
                     {"out_degree", gd.out_degree},
                     {"in_degree", gd.in_degree},
                     {"degrees_ok", gd.degrees_ok},
                     {"offsets_distinct", gd.offsets_distinct},
                     {"offsets", offsets},
                     {"violations", gd.violations},
                     {"projection_residual", gd_projection_residual(gd, can, pts)},
                     {"t_hat", t_hat_n}};
    }
  }
  return r;
}

json cmd_esc(const RunConfig& cfg, const std::string& /*out_dir*/) {
  if (cfg.construction != "massopust") throw ConfigError("esc: needs a massopust construction");
  SurfaceIFS ifs = build_surface(cfg);
  FurstenbergIFS f = build_furstenberg(ifs);
  CFSSystem sys = from_projected_x(project_1d(f, Axis::X));
  json r;
  r["command"] = "esc";
  json cls = json::array();
  for (auto c : sys.cls) cls.push_back(c == CfsClass::I0 ? "I0" : c == CfsClass::I1 ? "I1" : "I2");
  r["classes"] = cls;
  r["lambda"] = sys.lambda;
  r["gamma"] = sys.gamma;
  CfsConstants k = cfs_constants(sys);
  r["B"] = k.B ? json(*k.B) : json(nullptr);
  r["D"] = k.D ? json(*k.D) : json(nullptr);
  LemmaA la = lemma_A_constant(sys);
  r["A"] = la.A;
  r["A_verified"] = la.verified;
  r["A_failures"] = la.failures;

  EscOptions opt;
  opt.n = cfg.esc_n;
  opt.b = cfg.esc_b;
  opt.budget = cfg.esc_budget;
  opt.seed = cfg.seed;
  EscReport rep = esc_violation_search(sys, opt);
  json v = json::array();
  for (const auto& x : rep.violations)
    v.push_back({{"u", word_string(x.u)}, {"v", word_string(x.v)}, {"distance", x.distance}});
  r["esc"] = {{"n", opt.n},
              {"b", opt.b},
              {"threshold", rep.threshold},
              {"words", rep.words},
              {"candidate_pairs", rep.candidate_pairs},
              {"examined_pairs", rep.examined_pairs},
              {"exhaustive", rep.exhaustive},
              {"coverage", rep.coverage},
              {"violations", v}};
  return r;
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"fractal surface toolkit"};
  app.require_subcommand(1);

  std::string config_path, out_dir = ".", scales;
  std::optional<std::uint64_t> seed, samples;
  std::optional<int> workers, depth;

  struct Cmd {
    const char* name;
    const char* help;
    json (*fn)(const RunConfig&, const std::string&);
  };
  const Cmd cmds[] = {
      {"surface", "build the IFS and export a subdivision mesh (OBJ, PGM)", cmd_surface},
      {"dimension", "affinity dimension, closed form and box-counting estimate", cmd_dimension},
      {"certify", "run the overlap and covering-bound certificate", cmd_certify},
      {"markov", "group closure, Markov chain and graph-directed IFS", cmd_markov},
      {"esc", "finite exponential-separation search on the x-projection", cmd_esc},
  };
  for (const auto& c : cmds) {
    CLI::App* sub = app.add_subcommand(c.name, c.help);
    sub->add_option("--config", config_path, "JSON config file");
    sub->add_option("--out", out_dir, "output directory");
    sub->add_option("--seed", seed, "random seed");
    sub->add_option("--workers", workers, "worker threads (0 = all cores)")->check(CLI::NonNegativeNumber);
    sub->add_option("--depth", depth, "subdivision depth")->check(CLI::NonNegativeNumber);
    sub->add_option("--samples", samples, "chaos-game points");
    sub->add_option("--scales", scales, "box sizes, comma separated");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kConfigError;
  }

  const Cmd* chosen = nullptr;
  for (const auto& c : cmds)
    if (app.got_subcommand(c.name)) chosen = &c;

  try {
    RunConfig cfg = config_path.empty() ? parse_config(json::object()) : load_config(config_path);
    if (seed) cfg.seed = *seed;
    if (samples) cfg.samples = *samples;
    if (depth) cfg.depth = *depth;
    if (!scales.empty()) cfg.scales = parse_scales(scales);
    if (workers) {
      cfg.workers = *workers;
    } else if (cfg.workers == 0) {
      if (const char* env = std::getenv("FSL_WORKERS")) {
        try {
          cfg.workers = std::max(0, std::stoi(env));
        } catch (const std::exception&) {
          throw ConfigError("FSL_WORKERS: not an integer");
        }
      }
    }

    std::error_code ec;
    fs::create_directories(out_dir, ec);
    if (ec || !fs::is_directory(out_dir)) throw IoError("cannot create output directory " + out_dir);

    auto t0 = std::chrono::steady_clock::now();
    json rep = chosen->fn(cfg, out_dir);
    double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    rep["inputs"] = config_to_json(cfg);
    const std::string path = join_path(out_dir, cfg.report);
    write_report(rep, path);
    fs::path timing = fs::path(path);
    timing.replace_extension(".timing.json");
    write_text(dump_report({{"command", chosen->name}, {"wall_seconds", secs}, {"workers", cfg.workers}}),
               timing.string());
    out << chosen->name << ": wrote " << path << "\n";
    if (rep.contains("verdict")) out << "verdict: " << rep["verdict"].get<std::string>() << "\n";
    return kOk;
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << "\n";
    return kConfigError;
  } catch (const IoError& e) {
    err << "i/o error: " << e.what() << "\n";
    return kIoError;
  } catch (const std::invalid_argument& e) {
    err << "invalid input: " << e.what() << "\n";
    return kConfigError;
  } catch (const std::domain_error& e) {
    err << "invalid input: " << e.what() << "\n";
    return kConfigError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kFailure;
  }
}

}  // namespace fsl::cli
