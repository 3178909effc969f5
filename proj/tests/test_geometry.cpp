#include "fsl/geometry.hpp"

#include <doctest.h>

#include <cmath>

using namespace fsl;

namespace {
ConvexPolygon square(double x0, double y0, double side) {
  return ConvexPolygon({{x0, y0}, {x0 + side, y0}, {x0 + side, y0 + side}, {x0, y0 + side}});
}
}  // namespace

TEST_CASE("dihedral scalars are exact") {
  DihedralScalar r3 = DihedralScalar::sqrt3();
  CHECK(r3 * r3 == DihedralScalar::integer(3));
  DihedralScalar a(1, 1, 2), b(1, -1, 2);
  CHECK(a * b == DihedralScalar(-1, 0, 2));
  CHECK(a + b == DihedralScalar::integer(1));
  DihedralScalar inv(0, 1, 3);  // 1/sqrt3
  CHECK(r3 * inv == DihedralScalar::integer(1));
  CHECK(inv.to_double() == doctest::Approx(1 / std::sqrt(3.0)).epsilon(1e-15));
  CHECK(DihedralScalar(2, 4, 6) == DihedralScalar(1, 2, 3));
  CHECK(DihedralScalar(1, 0, -2) == DihedralScalar(-1, 0, 2));
  CHECK_THROWS_AS(DihedralScalar(1, 0, 0), std::domain_error);
}

TEST_CASE("exact reflection squares to identity") {
  ExactMat2 q;
  q.e = {DihedralScalar(1, 0, 2), DihedralScalar(0, 1, 2), DihedralScalar(0, 1, 2), DihedralScalar(-1, 0, 2)};
  CHECK(q * q == ExactMat2::identity());
  CHECK(q.transpose() == q);
  ExactVec2 v{DihedralScalar::integer(1), DihedralScalar::integer(1)};
  ExactVec2 w = q * v;
  CHECK(w[0] == DihedralScalar(1, 1, 2));
  CHECK(w[1] == DihedralScalar(-1, 1, 2));
  CHECK((q.to_double() - q.to_double().transpose()).norm() == 0.0);
}

TEST_CASE("affine maps") {
  Affine2 f{Mat2::Identity() * 0.5, Vec2(1, 0)};
  CHECK((f.fixed_point() - Vec2(2, 0)).norm() < 1e-15);
  Affine2 g{Mat2::Identity() * 0.25, Vec2(0, 1)};
  Vec2 p(0.3, -0.7);
  CHECK((f.compose(g)(p) - f(g(p))).norm() < 1e-15);
  Affine3 h{Mat3::Identity() * 0.5, Vec3(1, 1, 1)};
  CHECK((h.fixed_point() - Vec3(2, 2, 2)).norm() < 1e-15);
  CHECK((apply_affine(h, Vec3::Zero()) - Vec3(1, 1, 1)).norm() == 0.0);
}

TEST_CASE("convex polygon construction") {
  ConvexPolygon cw({{0, 0}, {0, 1}, {1, 1}, {1, 0}});
  CHECK(cw.area() == doctest::Approx(1.0));
  CHECK(signed_area(cw.vertices()) > 0);
  ConvexPolygon with_collinear({{0, 0}, {0.5, 0}, {1, 0}, {1, 1}, {0, 1}, {0, 1}});
  CHECK(with_collinear.size() == 4);
  CHECK_THROWS(ConvexPolygon({{0, 0}, {1, 0}, {2, 0}}));
  CHECK_THROWS(ConvexPolygon({{0, 0}, {2, 0}, {1, 0.2}, {2, 2}, {0, 2}}));
  CHECK(cw.contains({0.5, 0.5}));
  CHECK(cw.contains({1.0, 0.5}));
  CHECK_FALSE(cw.contains_strictly({1.0, 0.5}));
  CHECK_FALSE(cw.contains({1.1, 0.5}));
  Affine2 shift{Mat2::Identity() * 2.0, Vec2(1, 1)};
  CHECK(cw.transformed(shift).area() == doctest::Approx(4.0));
}

TEST_CASE("clipping") {
  auto c = clip_polygons(square(0, 0, 1), square(0.5, 0, 1));
  REQUIRE(c.has_value());
  CHECK(c->area() == doctest::Approx(0.5));
  CHECK_FALSE(clip_polygons(square(0, 0, 1), square(1, 0, 1)).has_value());
  CHECK_FALSE(clip_polygons(square(0, 0, 1), square(3, 3, 1)).has_value());
  ConvexPolygon tri({{0, 0}, {1, 0}, {0, 1}});
  auto t = clip_polygons(tri, square(0, 0, 0.5));
  REQUIRE(t.has_value());
  CHECK(t->area() == doctest::Approx(0.25));
  CHECK(polygon_contains(square(0, 0, 2), square(0.5, 0.5, 1)));
  CHECK_FALSE(polygon_contains(square(0, 0, 1), square(0.5, 0.5, 1)));
}

TEST_CASE("arrangement depth") {
  std::vector<ConvexPolygon> nested{square(0, 0, 3), square(0.5, 0.5, 2), square(1, 1, 1)};
  ArrangementDepth d = arrangement_depth(nested);
  CHECK(d.depth == 3);
  CHECK(d.witness.size() == 3);
  std::vector<ConvexPolygon> chain{square(0, 0, 1), square(1, 0, 1), square(2, 0, 1)};
  CHECK(arrangement_max_depth(chain) == 1);
  // strips along the sides of a triangle overlap pairwise at the corners only
  auto strip = [](Vec2 p, Vec2 q) {
    Vec2 d = (q - p).normalized(), n(-d.y(), d.x());
    return ConvexPolygon({p - 0.5 * d - 0.2 * n, q + 0.5 * d - 0.2 * n, q + 0.5 * d + 0.2 * n, p - 0.5 * d + 0.2 * n});
  };
  Vec2 A(0, 0), B(10, 0), C(5, 8.66);
  std::vector<ConvexPolygon> ring{strip(A, B), strip(B, C), strip(C, A)};
  CHECK(arrangement_max_depth(ring) == 2);
}

TEST_CASE("operator norms") {
  Mat2 m;
  m << 3, 0, 0, -2;
  CHECK(operator_norm(m) == doctest::Approx(3.0));
  Mat3 r = Mat3::Identity();
  r(0, 1) = 1;
  CHECK(operator_norm(r) == doctest::Approx((1 + std::sqrt(5.0)) / 2));
}
