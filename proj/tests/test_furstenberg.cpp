#include "fsl/furstenberg.hpp"

#include <doctest.h>

#include <array>
#include <cmath>
#include <numeric>
#include <random>

using namespace fsl;

namespace {
const double r3 = std::sqrt(3.0);
const double golden = (1 + std::sqrt(5.0)) / 4;

SurfaceIFS massopust3(const std::vector<double>& s, double a = 1.0) {
  return build_massopust({3}, center_peak_data(a), s);
}
}  // namespace

TEST_CASE("furstenberg maps and weights") {
  std::vector<double> s{0.9, 0.8, 0.7, 0.85, 0.75, 0.95, 0.8, 0.7, 0.9};
  SurfaceIFS ifs = massopust3(s);
  FurstenbergIFS f = build_furstenberg(ifs);
  const double a = 1.0;
  const std::array<std::array<double, 4>, 9> diag_t{{{1, 1, 0, 0},
                                                      {1, 1, 0, 2 * a / r3},
                                                      {1, 1, 0, 0},
                                                      {-1, 1, -a, -a / r3},
                                                      {1, 1, -a, -a / r3},
                                                      {1, 1, 0, 0},
                                                      {-1, -1, -a, -a / r3},
                                                      {1, -1, -a, -a / r3},
                                                      {1, -1, 0, 2 * a / r3}}};
  for (std::size_t i = 0; i < 9; ++i) {
    Mat2 L = Mat2::Zero();
    L(0, 0) = diag_t[i][0];
    L(1, 1) = diag_t[i][1];
    CHECK((f.maps[i].linear - L / (3 * s[i])).norm() < 1e-15);
    CHECK((f.maps[i].translation + Vec2(diag_t[i][2], diag_t[i][3]) / s[i]).norm() < 1e-14);
  }
  Classification c = classify_and_constants(ifs);
  for (int i : {1, 3, 6}) {
    CHECK(c.of[static_cast<std::size_t>(i - 1)] == MapClass::A1);
    CHECK(f.maps[static_cast<std::size_t>(i - 1)].translation.norm() == 0.0);
  }
  CHECK(std::accumulate(f.weights.begin(), f.weights.end(), 0.0) == doctest::Approx(1.0).epsilon(1e-12));
  for (double r : f.ratios) {
    CHECK(r > 0);
    CHECK(r < 1);
  }
  FurstenbergIFS u = build_furstenberg(massopust3(std::vector<double>(9, 0.75)));
  for (double p : u.weights) CHECK(p == doctest::Approx(1.0 / 9).epsilon(1e-12));

  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> sd(0.4, 0.99);
  for (int k = 0; k < 30; ++k) {
    std::vector<double> r(9);
    for (auto& x : r) x = sd(rng);
    FurstenbergIFS g = build_furstenberg(massopust3(r));
    CHECK(std::abs(std::accumulate(g.weights.begin(), g.weights.end(), 0.0) - 1.0) < 1e-12);
  }
}

TEST_CASE("geronimo-hardin canonical form") {
  const double s = 0.82;
  FurstenbergIFS f = build_furstenberg(build_geronimo_hardin(s, 1.0));
  REQUIRE(f.canonical.size() == 4);
  Mat2 d;
  d << -1, 0, 0, 1;
  CHECK((f.canonical[2].linear - d / (2 * s)).norm() < 1e-15);
  CHECK((f.canonical[2].translation - Vec2(0, -2 / r3)).norm() < 1e-15);
  // maps = conj * canonical(x / conj)
  Vec2 x(0.3, -0.2);
  for (std::size_t i = 0; i < 4; ++i) {
    Vec2 lhs = f.maps[i](x);
    Vec2 rhs = f.conj * f.canonical[i](x / f.conj);
    CHECK((lhs - rhs).norm() < 1e-12);
    CHECK((f.canonical[i].linear - gh_canonical_maps(s)[i].linear).norm() < 1e-15);
    CHECK((f.canonical[i].translation - gh_canonical_maps(s)[i].translation).norm() < 1e-15);
  }
  for (double p : f.weights) CHECK(p == doctest::Approx(0.25).epsilon(1e-12));
}

TEST_CASE("x projection and interval lemma") {
  SurfaceIFS ifs = massopust3(std::vector<double>(9, 0.75));
  FurstenbergIFS f = build_furstenberg(ifs);
  ProjectedSystem X = project_1d(f, Axis::X);
  CHECK(X.fixed[4] == doctest::Approx(3.0 / (3 * 0.75 - 1)));
  CHECK(X.fixed[4] == doctest::Approx(2.4));
  CHECK(X.fixed[0] == 0.0);
  CHECK(X.slope[0] == doctest::Approx(1 / 2.25));
  IntervalResult iv = invariant_interval(X);
  CHECK(iv.lo == doctest::Approx(0.0));
  CHECK(iv.hi == doctest::Approx(2.4));
  CHECK(iv.contained);
  CHECK(iv.method == "lemma");
  auto img4 = X.image(3, iv.lo, iv.hi);
  CHECK(img4.first == doctest::Approx(1 * (3 * 0.75 - 2) / (0.75 * (3 * 0.75 - 1))));
  CHECK(img4.second == doctest::Approx(1 / 0.75));

  Disjointness dj = interval_disjointness(X, iv);
  CHECK(dj.disjoint);
  CHECK(dj.touching);

  std::vector<double> gap{0.8, 0.8, 0.8, 0.95, 0.70, 0.8, 0.95, 0.70, 0.8};
  FurstenbergIFS fg = build_furstenberg(massopust3(gap));
  ProjectedSystem Xg = project_1d(fg, Axis::X);
  Disjointness dg = interval_disjointness(Xg, invariant_interval(Xg));
  CHECK(dg.disjoint);
  CHECK(dg.min_gap > 0);

  std::vector<double> bad{0.8, 0.8, 0.8, 0.70, 0.95, 0.8, 0.8, 0.8, 0.8};
  FurstenbergIFS fb = build_furstenberg(massopust3(bad));
  ProjectedSystem Xb = project_1d(fb, Axis::X);
  CHECK_FALSE(interval_disjointness(Xb, invariant_interval(Xb)).disjoint);

  FurstenbergIFS flat = build_furstenberg(build_massopust({3}, InterpolationData{}, 0.75));
  IntervalResult z = invariant_interval(project_1d(flat, Axis::X));
  CHECK(z.lo == 0.0);
  CHECK(z.hi == 0.0);
}

TEST_CASE("y projection interval") {
  SurfaceIFS ifs = massopust3(std::vector<double>(9, 0.75));
  ProjectedSystem Y = project_1d(build_furstenberg(ifs), Axis::Y);
  IntervalResult iv = invariant_interval(Y);
  CHECK(iv.contained);
  for (std::size_t i = 0; i < Y.size(); ++i) {
    auto im = Y.image(i, iv.lo, iv.hi);
    CHECK(im.first >= iv.lo - 1e-10);
    CHECK(im.second <= iv.hi + 1e-10);
  }
  // the hull is the smallest invariant interval, so it sits inside the lemma interval
  IntervalResult h = hull_interval(Y);
  CHECK(h.lo >= iv.lo - 1e-10);
  CHECK(h.hi <= iv.hi + 1e-10);
}

TEST_CASE("geronimo-hardin projection is refused") {
  FurstenbergIFS f = build_furstenberg(build_geronimo_hardin(0.82, 1.0));
  CHECK_THROWS_AS(project_1d(f, Axis::X), std::domain_error);
}

TEST_CASE("hexagon") {
  InvariantHexagon h = gh_hexagon(0.82);
  CHECK(h.A.x() == doctest::Approx(2.5625));
  CHECK(h.A.y() == doctest::Approx(2.5625 / r3));
  CHECK(h.B.x() == doctest::Approx(-2.5625));
  CHECK(h.contained);
  InvariantHexagon near1 = gh_hexagon(0.999999);
  CHECK(near1.A.x() == doctest::Approx(2.0).epsilon(1e-5));
  CHECK(near1.A.y() == doctest::Approx(2 / r3).epsilon(1e-5));
  CHECK(gh_hexagon(0.75).contained);
  CHECK_THROWS(gh_hexagon(0.5));
}

TEST_CASE("geronimo-hardin overlap certificate") {
  GhOverlap at = overlap_certificate_gh(golden);
  CHECK(at.A1p.norm() < 1e-9);
  CHECK(at.B2p.norm() < 1e-9);
  CHECK(at.C3p.norm() < 1e-9);
  CHECK(std::abs(golden * (4 * golden - 2) - 1) < 1e-12);
  GhOverlap g = overlap_certificate_gh(0.9);
  CHECK(g.cert.Q >= 1);
  CHECK(g.triple_123_empty);
  CHECK(g.above_threshold);
  GhOverlap low = overlap_certificate_gh(0.6);
  CHECK_FALSE(low.above_threshold);
  CHECK(low.cert.Q >= 0);
}

TEST_CASE("massopust overlap certificate") {
  FurstenbergIFS f = build_furstenberg(massopust3(std::vector<double>(9, 0.75)));
  CHECK(overlap_hypotheses(f).ok);
  MassopustOverlap mo = overlap_certificate_massopust3(f);
  CHECK(mo.cert.Q >= 3);
  CHECK(mo.boxes.size() == 9);
  EmpiricalOverlap eo = empirical_overlap(f, 20000, 1);
  CHECK(eo.Q >= mo.cert.Q);

  std::vector<double> s(9, 0.8);
  s[1] = 0.9;
  s[8] = 0.7;  // s2 > s9
  FurstenbergIFS fb = build_furstenberg(massopust3(s));
  CHECK_FALSE(overlap_hypotheses(fb).ok);
  CHECK_FALSE(overlap_certificate_massopust3(fb).cert.hypotheses);

  std::vector<Box> same(9, Box{0, 1, 0, 1});
  CHECK(box_arrangement_depth(same) == 9);
  std::vector<Box> touching{{0, 1, 0, 1}, {1, 2, 0, 1}, {0, 1, 1, 2}};
  CHECK(box_arrangement_depth(touching) == 1);
}

TEST_CASE("covering bound") {
  CHECK(covering_lower_bound(0, 0.25, 0.5) == 0.0);
  CHECK(covering_lower_bound(1, 0.25, 1 / 1.64) == doctest::Approx(std::log(0.75) / std::log(1 / 1.64)));
  CHECK(covering_lower_bound(1, 0.25, 1 / 1.64) == doctest::Approx(0.581533).epsilon(1e-6));
  CHECK(covering_lower_bound(3, 1.0 / 9, 1 / 2.25) == doctest::Approx(0.5).epsilon(1e-12));
  CHECK_THROWS(covering_lower_bound(4, 0.25, 0.5));
}

TEST_CASE("certificate pipeline") {
  PipelineResult g = certificate_pipeline(build_geronimo_hardin(0.82, 1.0));
  CHECK(g.verdict == Verdict::Certified);
  CHECK(g.bound > g.target);
  CHECK(g.target == doctest::Approx(0.286304).epsilon(1e-6));

  PipelineResult m = certificate_pipeline(massopust3(std::vector<double>(9, 0.75)));
  CHECK(m.verdict == Verdict::Certified);
  CHECK(m.trace["three_pow_t0"].get<double>() == doctest::Approx(20.25));

  PipelineResult low = certificate_pipeline(build_geronimo_hardin(0.6, 1.0));
  CHECK(low.verdict == Verdict::HypothesesUnmet);
  CHECK(to_string(Verdict::BoundInsufficient) == "Bound-insufficient");
}

TEST_CASE("furstdimae inequality") {
  FurstDimae a = furstdimae_inequality(massopust3(std::vector<double>(9, 0.75)));
  CHECK(a.positive);
  FurstDimae b = furstdimae_inequality(massopust3(std::vector<double>(9, 0.75), 5.0));
  CHECK(b.value == doctest::Approx(a.value).epsilon(1e-14));
  for (double s : {0.7, 0.8, 0.95}) {
    double sum = 9 * s;
    CHECK(sum * sum / (9 * s * s * s) > 1.0);
  }
  CHECK_THROWS(furstdimae_inequality(build_massopust({3}, InterpolationData{}, 0.75)));
}

TEST_CASE("invariant regions contain the furstenberg attractor") {
  ChaosOptions o;
  o.count = 20000;
  o.seed = 11;
  FurstenbergIFS f = build_furstenberg(massopust3(std::vector<double>(9, 0.8)));
  MassopustOverlap mo = overlap_certificate_massopust3(f);
  PointCloud2 pc = chaos_game(f.maps, f.weights, o);
  int out = 0;
  for (const auto& p : pc.points)
    if (p.x() < mo.x_interval.lo - 1e-6 || p.x() > mo.x_interval.hi + 1e-6 || p.y() < mo.y_interval.lo - 1e-6 ||
        p.y() > mo.y_interval.hi + 1e-6)
      ++out;
  CHECK(out == 0);

  InvariantHexagon h = gh_hexagon(0.85);
  PointCloud2 gc = chaos_game(gh_canonical_maps(0.85), {0.25, 0.25, 0.25, 0.25}, o);
  int gout = 0;
  for (const auto& p : gc.points)
    if (!h.polygon.contains(p, 1e-6)) ++gout;
  CHECK(gout == 0);
}
