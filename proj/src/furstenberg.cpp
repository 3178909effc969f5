#include "fsl/furstenberg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace fsl {

namespace {
const double kSqrt3 = std::sqrt(3.0);
const double kGoldenThreshold = (1.0 + std::sqrt(5.0)) / 4.0;

std::string num(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}
}  // namespace

double FurstenbergIFS::p_min() const { return *std::min_element(weights.begin(), weights.end()); }
double FurstenbergIFS::ratio_max() const { return *std::max_element(ratios.begin(), ratios.end()); }

std::vector<Affine2> gh_canonical_maps(double s) {
  if (!(s > 0.0)) throw std::invalid_argument("gh canonical maps: s must be positive");
  const double h = kSqrt3 / 2;
  Mat2 Q[4];
  Q[0] << 0.5, h, h, -0.5;
  Q[1] << 0.5, -h, -h, -0.5;
  Q[2] << -1, 0, 0, 1;
  Q[3] << -1, 0, 0, -1;
  const Vec2 t[4] = {Vec2(1, 1 / kSqrt3), Vec2(-1, 1 / kSqrt3), Vec2(0, -2 / kSqrt3), Vec2(0, 0)};
  std::vector<Affine2> out;
  for (int i = 0; i < 4; ++i) out.push_back({Q[i] / (2 * s), t[i]});
  return out;
}

FurstenbergIFS build_furstenberg(const SurfaceIFS& ifs) {
  FurstenbergIFS f;
  f.kind = ifs.kind;
  f.N = ifs.N;
  f.s = ifs.s;
  for (std::size_t i = 0; i < ifs.size(); ++i) {
    const Mat3& L = ifs.maps[i].linear;
    if (std::abs(L(0, 2)) > 0 || std::abs(L(1, 2)) > 0)
      throw std::invalid_argument("furstenberg: linear part is not block lower-triangular");
    double si = ifs.s[i];
    if (si == 0.0) throw std::invalid_argument("furstenberg: zero scaling");
    double r = ifs.lambda / si;
    f.ratios.push_back(r);
    f.maps.push_back({r * ifs.U[i].transpose(), -ifs.grad[i] / si});
  }
  AffinitySolution sol = affinity_dimension(ifs);
  f.t0 = sol.r2;
  for (double si : ifs.s) f.weights.push_back(si * std::pow(ifs.lambda, f.t0 - 1.0));

  if (ifs.kind == Construction::GeronimoHardin) {
    double s = ifs.s.front();
    f.conj = -ifs.a / s;
    for (std::size_t i = 0; i < ifs.size(); ++i)
      f.canonical.push_back({(ifs.lambda / s) * ifs.U[i].transpose(), ifs.grad[i] / ifs.a});
  } else if (ifs.N == 3) {
    const auto& vals = ifs.data.values;
    double peak = ifs.data.value(1, 1);
    bool only_peak = std::all_of(vals.begin(), vals.end(), [](const auto& kv) {
      return (kv.first.r == 1 && kv.first.c == 1) || kv.second == 0.0;
    });
    if (only_peak && peak > 0.0) {
      f.peak_layout = true;
      f.peak = peak;
    }
  }
  return f;
}

SoscWitness sosc_witness(const SurfaceIFS& ifs) {
  SoscWitness w;
  auto base = base_triangle();
  ConvexPolygon delta(std::vector<Vec2>(base.begin(), base.end()));
  std::vector<ConvexPolygon> images;
  double area = 0.0;
  w.interior_mapped = true;
  for (const auto& m : ifs.planar_parts()) {
    ConvexPolygon img = delta.transformed(m);
    area += img.area();
    if (!polygon_contains(delta, img, 1e-12)) w.interior_mapped = false;
    images.push_back(std::move(img));
  }
  w.area_defect = std::abs(area - delta.area());
  for (std::size_t i = 0; i < images.size(); ++i)
    for (std::size_t j = i + 1; j < images.size(); ++j)
      if (clip_polygons(images[i], images[j], 1e-9)) ++w.overlapping_pairs;
  w.ok = w.interior_mapped && w.overlapping_pairs == 0 && w.area_defect < 1e-12;
  return w;
}

std::pair<double, double> ProjectedSystem::image(std::size_t i, double lo, double hi) const {
  double a = apply(i, lo), b = apply(i, hi);
  return {std::min(a, b), std::max(a, b)};
}

ProjectedSystem project_1d(const FurstenbergIFS& fifs, Axis axis) {
  ProjectedSystem sys;
  sys.axis = axis;
  sys.s = fifs.s;
  sys.peak_layout = fifs.peak_layout;
  sys.peak = fifs.peak;
  const int k = axis == Axis::X ? 0 : 1;
  for (const auto& m : fifs.maps) {
    if (std::abs(m.linear(0, 1)) > 1e-15 || std::abs(m.linear(1, 0)) > 1e-15)
      throw std::domain_error("projection not self-map: orthogonal parts are not axis-aligned");
    double sl = m.linear(k, k);
    double off = m.translation(k);
    sys.slope.push_back(sl);
    sys.offset.push_back(off);
    sys.fixed.push_back(off / (1.0 - sl));
  }
  return sys;
}

namespace {

void verify_interval(const ProjectedSystem& sys, IntervalResult& r) {
  double tol = 1e-10 * std::max({1.0, std::abs(r.lo), std::abs(r.hi)});
  r.contained = true;
  r.worst_excess = 0.0;
  r.violators.clear();
  for (std::size_t i = 0; i < sys.size(); ++i) {
    auto [a, b] = sys.image(i, r.lo, r.hi);
    double excess = std::max(r.lo - a, b - r.hi);
    r.worst_excess = std::max(r.worst_excess, excess);
    if (excess > tol) {
      r.contained = false;
      r.violators.push_back(static_cast<int>(i) + 1);
    }
  }
}

}  // namespace

IntervalResult hull_interval(const ProjectedSystem& sys) {
  IntervalResult r;
  r.method = "hull";
  r.branch = "iterated hull";
  r.lo = *std::min_element(sys.fixed.begin(), sys.fixed.end());
  r.hi = *std::max_element(sys.fixed.begin(), sys.fixed.end());
  for (int it = 0; it < 200000; ++it) {
    double lo = r.lo, hi = r.hi;
    for (std::size_t i = 0; i < sys.size(); ++i) {
      auto [a, b] = sys.image(i, r.lo, r.hi);
      lo = std::min(lo, a);
      hi = std::max(hi, b);
    }
    if (lo == r.lo && hi == r.hi) break;
    r.lo = lo;
    r.hi = hi;
  }
  verify_interval(sys, r);
  return r;
}

IntervalResult invariant_interval(const ProjectedSystem& sys) {
  bool degenerate = std::all_of(sys.offset.begin(), sys.offset.end(), [](double o) { return o == 0.0; });
  if (degenerate) {
    IntervalResult r;
    r.method = "degenerate";
    r.branch = "all offsets zero";
    verify_interval(sys, r);
    return r;
  }
  if (!sys.peak_layout || sys.size() != 9) return hull_interval(sys);

  IntervalResult r;
  r.method = "lemma";
  const auto& s = sys.s;
  if (sys.axis == Axis::X) {
    // the larger of Fix(f5), Fix(f8) after relabeling so that s5 <= s8
    r.lo = 0.0;
    bool five = sys.fixed[4] >= sys.fixed[7];
    r.hi = five ? sys.fixed[4] : sys.fixed[7];
    r.branch = five ? "Fix(f5)" : "Fix(f8)";
  } else {
    r.lo = sys.fixed[1];
    std::size_t p = s[3] <= s[4] ? 3 : 4;
    std::size_t q = s[6] <= s[7] ? 6 : 7;
    double c1 = sys.fixed[p];
    double c2 = sys.apply(q, r.lo);
    r.hi = std::max(c1, c2);
    r.branch = c1 >= c2 ? "Fix(g" + std::to_string(p + 1) + ")"
                        : "g" + std::to_string(q + 1) + "(Fix(g2))";
  }
  verify_interval(sys, r);
  return r;
}

Disjointness interval_disjointness(const ProjectedSystem& sys, const IntervalResult& iv,
                                   const std::vector<int>& left, const std::vector<int>& right) {
  Disjointness d;
  d.min_gap = std::numeric_limits<double>::infinity();
  double tol = 1e-12 * std::max({1.0, std::abs(iv.lo), std::abs(iv.hi)});
  for (int l : left)
    for (int r : right) {
      auto [a0, a1] = sys.image(static_cast<std::size_t>(l - 1), iv.lo, iv.hi);
      auto [b0, b1] = sys.image(static_cast<std::size_t>(r - 1), iv.lo, iv.hi);
      double gap = std::max(b0 - a1, a0 - b1);
      d.min_gap = std::min(d.min_gap, gap);
    }
  d.disjoint = d.min_gap >= -tol;
  d.touching = d.disjoint && std::abs(d.min_gap) <= tol;
  return d;
}

InvariantHexagon gh_hexagon(double s) {
  if (!(s > 0.5 && s < 1.0)) throw std::invalid_argument("gh hexagon: s must lie in (1/2, 1)");
  InvariantHexagon h;
  const double k = 4 * s - 2;
  h.A = Vec2(4 * s / k, 4 * s / (kSqrt3 * k));
  h.B = Vec2(-h.A.x(), h.A.y());
  h.C = Vec2(0, -8 * s / (kSqrt3 * k));
  auto maps = gh_canonical_maps(s);
  h.Ap = maps[3](h.A);
  h.Bp = maps[3](h.B);
  h.Cp = maps[3](h.C);
  h.polygon = ConvexPolygon({h.C, h.Bp, h.A, h.Cp, h.B, h.Ap});
  h.contained = true;
  for (int i = 0; i < 4; ++i) {
    for (const auto& v : h.polygon.vertices()) {
      Vec2 img = maps[static_cast<std::size_t>(i)](v);
      if (!h.polygon.contains(img, 1e-9)) {
        h.contained = false;
        h.failures.push_back("h" + std::to_string(i + 1) + " maps vertex (" + num(v.x()) + ", " + num(v.y()) +
                             ") outside");
      }
    }
  }
  return h;
}

GhOverlap overlap_certificate_gh(double s) {
  GhOverlap out;
  InvariantHexagon hex = gh_hexagon(s);
  auto maps = gh_canonical_maps(s);
  std::vector<ConvexPolygon> images;
  for (const auto& m : maps) images.push_back(hex.polygon.transformed(m));
  ArrangementDepth ad = arrangement_depth(images);
  out.cert.method = "polygon-arrangement";
  out.cert.n_maps = 4;
  out.cert.depth = ad.depth;
  for (int w : ad.witness) out.cert.witness.push_back(w + 1);
  out.cert.Q = 4 - ad.depth;
  out.above_threshold = s >= kGoldenThreshold;
  auto p12 = clip_polygons(images[0], images[1]);
  out.triple_123_empty = !p12 || !clip_polygons(*p12, images[2]);
  out.A1p = maps[0](hex.Ap);
  out.B2p = maps[1](hex.Bp);
  out.C3p = maps[2](hex.Cp);
  out.cert.hypotheses = hex.contained;
  if (!hex.contained) out.cert.notes.push_back("hexagon not invariant");
  if (!out.above_threshold) out.cert.notes.push_back("s below (1+sqrt5)/4: no claim");
  return out;
}

OverlapHypotheses overlap_hypotheses(const FurstenbergIFS& fifs) {
  OverlapHypotheses c;
  if (fifs.kind != Construction::Massopust || fifs.N != 3) {
    c.reasons.push_back("not a Massopust N=3 system");
    return c;
  }
  if (!fifs.peak_layout) c.reasons.push_back("data is not a single positive interior peak");
  const auto& s = fifs.s;
  for (std::size_t i = 0; i < s.size(); ++i)
    if (!(s[i] > 2.0 / 3.0 && s[i] < 1.0)) c.reasons.push_back("s_" + std::to_string(i + 1) + " not in (2/3, 1)");
  if (!(std::max(s[4], s[7]) <= std::min(s[3], s[6]))) c.reasons.push_back("max{s5,s8} > min{s4,s7}");
  if (!(s[1] <= s[8])) c.reasons.push_back("s2 > s9");
  c.ok = c.reasons.empty();
  return c;
}

int box_arrangement_depth(const std::vector<Box>& boxes) {
  std::vector<double> xs;
  for (const auto& b : boxes) {
    xs.push_back(b.x0);
    xs.push_back(b.x1);
  }
  std::sort(xs.begin(), xs.end());
  xs.erase(std::unique(xs.begin(), xs.end()), xs.end());
  int best = 0;
  for (std::size_t k = 0; k + 1 < xs.size(); ++k) {
    double xm = 0.5 * (xs[k] + xs[k + 1]);
    std::vector<std::pair<double, int>> ev;
    for (const auto& b : boxes)
      if (b.x0 < xm && xm < b.x1 && b.y0 < b.y1) {
        ev.push_back({b.y0, +1});
        ev.push_back({b.y1, -1});
      }
    // closings before openings at equal coordinates: touching is not overlap
    std::sort(ev.begin(), ev.end());
    int cur = 0;
    for (const auto& e : ev) {
      cur += e.second;
      best = std::max(best, cur);
    }
  }
  return best;
}

MassopustOverlap overlap_certificate_massopust3(const FurstenbergIFS& fifs) {
  MassopustOverlap out;
  out.cert.method = "box-arrangement";
  out.cert.n_maps = static_cast<int>(fifs.maps.size());
  OverlapHypotheses hyp = overlap_hypotheses(fifs);
  out.cert.hypotheses = hyp.ok;
  if (!hyp.ok) {
    out.cert.notes.push_back("outside the overlap-lemma hypotheses");
    for (const auto& r : hyp.reasons) out.cert.notes.push_back(r);
  }
  ProjectedSystem X = project_1d(fifs, Axis::X);
  ProjectedSystem Y = project_1d(fifs, Axis::Y);
  out.x_interval = invariant_interval(X);
  out.y_interval = invariant_interval(Y);
  if (!out.x_interval.contained) {
    out.cert.notes.push_back("x interval lemma failed; using hull");
    out.x_interval = hull_interval(X);
  }
  if (!out.y_interval.contained) {
    out.cert.notes.push_back("y interval lemma failed; using hull");
    out.y_interval = hull_interval(Y);
  }
  for (std::size_t i = 0; i < fifs.maps.size(); ++i) {
    auto [x0, x1] = X.image(i, out.x_interval.lo, out.x_interval.hi);
    auto [y0, y1] = Y.image(i, out.y_interval.lo, out.y_interval.hi);
    out.boxes.push_back({x0, x1, y0, y1});
  }
  bool flat = out.x_interval.hi <= out.x_interval.lo || out.y_interval.hi <= out.y_interval.lo;
  if (flat) {
    // every image collapses onto the common fixed point
    out.cert.depth = out.cert.n_maps;
    out.cert.notes.push_back("degenerate invariant region");
  } else {
    out.cert.depth = box_arrangement_depth(out.boxes);
  }
  out.cert.Q = out.cert.n_maps - out.cert.depth;
  return out;
}

double covering_lower_bound(double Q, double p_min, double lambda_max) {
  if (!(Q >= 0.0)) throw std::invalid_argument("covering bound: Q must be >= 0");
  if (!(lambda_max > 0.0 && lambda_max < 1.0)) throw std::invalid_argument("covering bound: lambda_max not in (0,1)");
  if (!(Q * p_min < 1.0)) throw std::invalid_argument("covering bound: Q * p_min >= 1");
  if (Q == 0.0) return 0.0;
  return std::log(1.0 - Q * p_min) / std::log(lambda_max);
}

EmpiricalOverlap empirical_overlap(const std::vector<ConvexPolygon>& regions, const PointCloud2& cloud,
                                   double tol) {
  EmpiricalOverlap e;
  e.samples = cloud.points.size();
  for (const auto& p : cloud.points) {
    int c = 0;
    for (const auto& r : regions)
      if (r.contains_strictly(p, tol)) ++c;
    e.depth = std::max(e.depth, c);
  }
  e.Q = static_cast<int>(regions.size()) - e.depth;
  return e;
}

EmpiricalOverlap empirical_overlap(const std::vector<Box>& regions, const PointCloud2& cloud, double tol) {
  EmpiricalOverlap e;
  e.samples = cloud.points.size();
  for (const auto& p : cloud.points) {
    int c = 0;
    for (const auto& b : regions)
      if (p.x() > b.x0 + tol && p.x() < b.x1 - tol && p.y() > b.y0 + tol && p.y() < b.y1 - tol) ++c;
    e.depth = std::max(e.depth, c);
  }
  e.Q = static_cast<int>(regions.size()) - e.depth;
  return e;
}

EmpiricalOverlap empirical_overlap(const FurstenbergIFS& fifs, std::size_t samples, std::uint64_t seed,
                                   int workers) {
  ChaosOptions opt;
  opt.count = samples;
  opt.seed = seed;
  opt.workers = workers;
  if (fifs.maps.size() == 1) {
    EmpiricalOverlap e;
    e.samples = samples;
    e.depth = 1;
    e.Q = 0;
    return e;
  }
  if (fifs.kind == Construction::GeronimoHardin) {
    double s = fifs.s.front();
    InvariantHexagon hex = gh_hexagon(s);
    std::vector<ConvexPolygon> regions;
    for (const auto& m : fifs.canonical) regions.push_back(hex.polygon.transformed(m));
    return empirical_overlap(regions, chaos_game(fifs.canonical, fifs.weights, opt));
  }
  if (fifs.N == 3) {
    MassopustOverlap mo = overlap_certificate_massopust3(fifs);
    return empirical_overlap(mo.boxes, chaos_game(fifs.maps, fifs.weights, opt));
  }
  throw std::invalid_argument("empirical overlap: no region construction for this system");
}

std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::Certified:
      return "Certified";
    case Verdict::HypothesesUnmet:
      return "Hypotheses-unmet";
    case Verdict::BoundInsufficient:
      return "Bound-insufficient";
  }
  return "?";
}

PipelineResult certificate_pipeline(const SurfaceIFS& ifs) {
  using nlohmann::json;
  PipelineResult res;
  json& tr = res.trace;
  AffinitySolution sol = affinity_dimension(ifs);
  res.t0 = sol.t0;
  res.target = 3.0 - sol.t0;
  tr["t0"] = sol.t0;
  tr["r1"] = sol.r1;
  tr["r2"] = sol.r2;
  tr["target_3_minus_t0"] = res.target;

  SoscWitness sw = sosc_witness(ifs);
  double sum_l2 = ifs.lambda * ifs.lambda * static_cast<double>(ifs.size());
  bool lambda_below_s = std::all_of(ifs.s.begin(), ifs.s.end(), [&](double s) { return ifs.lambda < s; });
  tr["preconditions"] = {{"sosc", sw.ok},
                         {"sosc_area_defect", sw.area_defect},
                         {"sum_lambda_sq", sum_l2},
                         {"lambda_below_s", lambda_below_s}};
  auto unmet = [&](const std::string& why) {
    res.verdict = Verdict::HypothesesUnmet;
    tr["reason"] = why;
    tr["verdict"] = to_string(res.verdict);
    return res;
  };
  if (!sw.ok) return unmet("no SOSC witness");
  if (std::abs(sum_l2 - 1.0) > 1e-12) return unmet("sum of lambda^2 != 1");
  if (!lambda_below_s) return unmet("lambda >= s_i for some i");

  FurstenbergIFS f = build_furstenberg(ifs);
  double wsum = std::accumulate(f.weights.begin(), f.weights.end(), 0.0);
  tr["weights_sum"] = wsum;
  const double pmin = f.p_min();
  const double lmax = f.ratio_max();
  tr["p_min"] = pmin;
  tr["lambda_max"] = lmax;

  if (ifs.kind == Construction::GeronimoHardin) {
    const double s = ifs.s.front();
    tr["route"] = "geronimo-hardin";
    tr["threshold"] = kGoldenThreshold;
    if (!(s >= kGoldenThreshold && s < 1.0)) return unmet("s below (1+sqrt5)/4");
    GhOverlap go = overlap_certificate_gh(s);
    InvariantHexagon hex = gh_hexagon(s);
    tr["hexagon_invariant"] = hex.contained;
    tr["hexagon"] = {{"A", {hex.A.x(), hex.A.y()}}, {"C", {hex.C.x(), hex.C.y()}}, {"Cp", {hex.Cp.x(), hex.Cp.y()}}};
    tr["overlap"] = {{"depth", go.cert.depth}, {"Q", go.cert.Q}, {"triple_123_empty", go.triple_123_empty},
                     {"witness", go.cert.witness}};
    if (!hex.contained) return unmet("hexagon not invariant");
    if (!go.triple_123_empty || go.cert.Q < 1) return unmet("overlap certificate Q >= 1 not obtained");
    res.Q = 1;
    res.bound = covering_lower_bound(res.Q, pmin, lmax);
  } else {
    tr["route"] = "massopust-3";
    if (ifs.N != 3) return unmet("no certificate route for N != 3");
    OverlapHypotheses hyp = overlap_hypotheses(f);
    tr["overlap_hypotheses"] = hyp.ok;
    if (!hyp.ok) {
      tr["hypothesis_failures"] = hyp.reasons;
      return unmet("outside the overlap-lemma hypotheses");
    }
    MassopustOverlap mo = overlap_certificate_massopust3(f);
    ProjectedSystem X = project_1d(f, Axis::X);
    Disjointness dj = interval_disjointness(X, mo.x_interval);
    tr["x_interval"] = {mo.x_interval.lo, mo.x_interval.hi, mo.x_interval.branch, mo.x_interval.method};
    tr["y_interval"] = {mo.y_interval.lo, mo.y_interval.hi, mo.y_interval.branch, mo.y_interval.method};
    tr["disjointness"] = {{"disjoint", dj.disjoint}, {"min_gap", dj.min_gap}, {"touching", dj.touching},
                          {"semantics", "interior"}};
    tr["overlap"] = {{"depth", mo.cert.depth}, {"Q", mo.cert.Q}, {"notes", mo.cert.notes}};
    double three_t0 = std::pow(3.0, sol.t0);
    double quad = three_t0 * three_t0 - 27.0 * three_t0 + 162.0;
    tr["three_pow_t0"] = three_t0;
    tr["three_sum_s"] = 3.0 * std::accumulate(ifs.s.begin(), ifs.s.end(), 0.0);
    tr["quadratic"] = quad;
    tr["sufficient_3t0_gt_18"] = three_t0 > 18.0;
    if (mo.cert.Q < 3) return unmet("box certificate Q >= 3 not obtained");
    res.Q = 3;
    res.bound = covering_lower_bound(res.Q, pmin, lmax);
    double alt_den = -std::log(3.0 * ifs.s_max());
    tr["bound_smax_variant"] = std::log(1.0 - res.Q * pmin) / alt_den;
  }
  tr["Q_used"] = res.Q;
  tr["covering_bound"] = res.bound;
  tr["margin"] = res.bound - res.target;
  res.verdict = res.bound > res.target ? Verdict::Certified : Verdict::BoundInsufficient;
  tr["verdict"] = to_string(res.verdict);
  if (res.verdict == Verdict::Certified) tr["dimension"] = sol.t0;
  return res;
}

FurstDimae furstdimae_inequality(const SurfaceIFS& ifs) {
  Classification cls = classify_and_constants(ifs);
  if (cls.A2.empty() && cls.A3.empty()) throw std::invalid_argument("furstdimae: A2 and A3 are empty");
  const double N2 = static_cast<double>(ifs.N) * ifs.N;
  const double sum = std::accumulate(ifs.s.begin(), ifs.s.end(), 0.0);
  double sum_other = 0.0;
  for (std::size_t i = 0; i < ifs.s.size(); ++i)
    if (cls.of[i] != MapClass::A1) sum_other += ifs.s[i];
  FurstDimae out;
  for (std::size_t i = 0; i < ifs.s.size(); ++i) {
    double si = ifs.s[i];
    if (cls.of[i] == MapClass::A1)
      out.value += si * std::log((si + sum_other) / (N2 * si * si * si) * sum);
    else
      out.value += si * std::log(sum * sum / (N2 * si * si * si));
  }
  out.positive = out.value > 0.0;
  std::vector<double> p, r;
  std::vector<bool> mask;
  for (std::size_t i = 0; i < ifs.s.size(); ++i) {
    p.push_back(ifs.s[i] / sum);
    r.push_back(ifs.lambda / ifs.s[i]);
    mask.push_back(cls.of[i] == MapClass::A1);
  }
  out.bound = entropy_lyapunov_bound(p, r, mask);
  return out;
}

}  // namespace fsl
