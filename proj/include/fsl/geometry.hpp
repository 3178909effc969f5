#pragma once

#include <Eigen/Dense>

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace fsl {

using Vec2 = Eigen::Vector2d;
using Vec3 = Eigen::Vector3d;
using Mat2 = Eigen::Matrix2d;
using Mat3 = Eigen::Matrix3d;

inline constexpr double kTol = 1e-9;

struct Affine2 {
  Mat2 linear = Mat2::Identity();
  Vec2 translation = Vec2::Zero();

  Vec2 operator()(const Vec2& p) const { return linear * p + translation; }
  // (*this)(other(x))
  Affine2 compose(const Affine2& other) const;
  Vec2 fixed_point() const;
};

struct Affine3 {
  Mat3 linear = Mat3::Identity();
  Vec3 translation = Vec3::Zero();

  Vec3 operator()(const Vec3& p) const { return linear * p + translation; }
  Affine3 compose(const Affine3& other) const;
  Vec3 fixed_point() const;
};

Vec2 apply_affine(const Affine2& map, const Vec2& point);
Vec3 apply_affine(const Affine3& map, const Vec3& point);

// Exact element (p + r*sqrt(3)) / d of Q(sqrt 3), d > 0, gcd(p, r, d) = 1.
class DihedralScalar {
 public:
  DihedralScalar() = default;
  DihedralScalar(std::int64_t p, std::int64_t r, std::int64_t d = 2);
  static DihedralScalar integer(std::int64_t n) { return {2 * n, 0, 2}; }
  static DihedralScalar sqrt3() { return {0, 1, 1}; }

  std::int64_t p() const { return p_; }
  std::int64_t r() const { return r_; }
  std::int64_t d() const { return d_; }
  bool is_zero() const { return p_ == 0 && r_ == 0; }
  double to_double() const;
  std::string str() const;

  DihedralScalar operator-() const { return {-p_, -r_, d_}; }
  friend DihedralScalar operator+(const DihedralScalar& a, const DihedralScalar& b);
  friend DihedralScalar operator-(const DihedralScalar& a, const DihedralScalar& b);
  friend DihedralScalar operator*(const DihedralScalar& a, const DihedralScalar& b);
  friend bool operator==(const DihedralScalar& a, const DihedralScalar& b) {
    return a.p_ == b.p_ && a.r_ == b.r_ && a.d_ == b.d_;
  }
  friend bool operator<(const DihedralScalar& a, const DihedralScalar& b) {
    if (a.p_ != b.p_) return a.p_ < b.p_;
    if (a.r_ != b.r_) return a.r_ < b.r_;
    return a.d_ < b.d_;
  }
  DihedralScalar& operator+=(const DihedralScalar& o) { return *this = *this + o; }

 private:
  void normalize();
  std::int64_t p_ = 0;
  std::int64_t r_ = 0;
  std::int64_t d_ = 1;
};

using ExactVec2 = std::array<DihedralScalar, 2>;

struct ExactMat2 {
  std::array<DihedralScalar, 4> e;  // row-major

  const DihedralScalar& operator()(int i, int j) const { return e[2 * i + j]; }
  DihedralScalar& operator()(int i, int j) { return e[2 * i + j]; }
  static ExactMat2 identity();
  ExactMat2 transpose() const;
  Mat2 to_double() const;
  friend ExactMat2 operator*(const ExactMat2& a, const ExactMat2& b);
  friend ExactVec2 operator*(const ExactMat2& a, const ExactVec2& v);
  friend bool operator==(const ExactMat2& a, const ExactMat2& b) { return a.e == b.e; }
  friend bool operator<(const ExactMat2& a, const ExactMat2& b) { return a.e < b.e; }
};

DihedralScalar dot(const ExactVec2& a, const ExactVec2& b);

class ConvexPolygon {
 public:
  ConvexPolygon() = default;
  // Sorts out orientation and drops duplicate/collinear vertices; throws on degenerate input.
  explicit ConvexPolygon(std::vector<Vec2> vertices);

  const std::vector<Vec2>& vertices() const { return v_; }
  std::size_t size() const { return v_.size(); }
  double area() const;
  Eigen::AlignedBox2d bounds() const;
  bool contains(const Vec2& p, double tol = kTol) const;
  bool contains_strictly(const Vec2& p, double tol = kTol) const;
  ConvexPolygon transformed(const Affine2& map) const;

 private:
  std::vector<Vec2> v_;
};

double signed_area(const std::vector<Vec2>& pts);

std::optional<ConvexPolygon> clip_polygons(const ConvexPolygon& a, const ConvexPolygon& b,
                                           double rel_area_eps = 1e-12);

bool polygon_contains(const ConvexPolygon& outer, const ConvexPolygon& inner, double tol = kTol);

struct ArrangementDepth {
  int depth = 0;
  std::vector<int> witness;  // indices of one deepest subset
};

ArrangementDepth arrangement_depth(const std::vector<ConvexPolygon>& polys,
                                   double rel_area_eps = 1e-12);
int arrangement_max_depth(const std::vector<ConvexPolygon>& polys);

double operator_norm(const Mat2& m);
double operator_norm(const Mat3& m);

}  // namespace fsl
