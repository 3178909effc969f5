#include "fsl/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace fsl {

Affine2 Affine2::compose(const Affine2& o) const {
  return {linear * o.linear, linear * o.translation + translation};
}

Vec2 Affine2::fixed_point() const {
  return (Mat2::Identity() - linear).fullPivLu().solve(translation);
}

Affine3 Affine3::compose(const Affine3& o) const {
  return {linear * o.linear, linear * o.translation + translation};
}

Vec3 Affine3::fixed_point() const {
  return (Mat3::Identity() - linear).fullPivLu().solve(translation);
}

Vec2 apply_affine(const Affine2& map, const Vec2& point) { return map(point); }
Vec3 apply_affine(const Affine3& map, const Vec3& point) { return map(point); }

namespace {

std::int64_t checked_mul(std::int64_t a, std::int64_t b) {
  std::int64_t out;
  if (__builtin_mul_overflow(a, b, &out)) throw std::overflow_error("DihedralScalar overflow");
  return out;
}

std::int64_t checked_add(std::int64_t a, std::int64_t b) {
  std::int64_t out;
  if (__builtin_add_overflow(a, b, &out)) throw std::overflow_error("DihedralScalar overflow");
  return out;
}

}  // namespace

DihedralScalar::DihedralScalar(std::int64_t p, std::int64_t r, std::int64_t d) : p_(p), r_(r), d_(d) {
  if (d == 0) throw std::domain_error("DihedralScalar: zero denominator");
  normalize();
}

void DihedralScalar::normalize() {
  if (d_ < 0) {
    p_ = -p_;
    r_ = -r_;
    d_ = -d_;
  }
  if (p_ == 0 && r_ == 0) {
    d_ = 1;
    return;
  }
  std::int64_t g = std::gcd(std::gcd(p_, r_), d_);
  if (g > 1) {
    p_ /= g;
    r_ /= g;
    d_ /= g;
  }
}

double DihedralScalar::to_double() const {
  return (static_cast<double>(p_) + static_cast<double>(r_) * std::sqrt(3.0)) / static_cast<double>(d_);
}

std::string DihedralScalar::str() const {
  std::ostringstream os;
  os << "(" << p_ << (r_ < 0 ? "-" : "+") << std::llabs(r_) << "r3)/" << d_;
  return os.str();
}

DihedralScalar operator+(const DihedralScalar& a, const DihedralScalar& b) {
  std::int64_t d = checked_mul(a.d_, b.d_ / std::gcd(a.d_, b.d_));
  std::int64_t fa = d / a.d_, fb = d / b.d_;
  return {checked_add(checked_mul(a.p_, fa), checked_mul(b.p_, fb)),
          checked_add(checked_mul(a.r_, fa), checked_mul(b.r_, fb)), d};
}

DihedralScalar operator-(const DihedralScalar& a, const DihedralScalar& b) { return a + (-b); }

DihedralScalar operator*(const DihedralScalar& a, const DihedralScalar& b) {
  std::int64_t p = checked_add(checked_mul(a.p_, b.p_), checked_mul(3, checked_mul(a.r_, b.r_)));
  std::int64_t r = checked_add(checked_mul(a.p_, b.r_), checked_mul(a.r_, b.p_));
  return {p, r, checked_mul(a.d_, b.d_)};
}

ExactMat2 ExactMat2::identity() {
  ExactMat2 m;
  m(0, 0) = DihedralScalar::integer(1);
  m(1, 1) = DihedralScalar::integer(1);
  return m;
}

ExactMat2 ExactMat2::transpose() const {
  ExactMat2 t = *this;
  std::swap(t(0, 1), t(1, 0));
  return t;
}

Mat2 ExactMat2::to_double() const {
  Mat2 m;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) m(i, j) = (*this)(i, j).to_double();
  return m;
}

ExactMat2 operator*(const ExactMat2& a, const ExactMat2& b) {
  ExactMat2 c;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) c(i, j) = a(i, 0) * b(0, j) + a(i, 1) * b(1, j);
  return c;
}

ExactVec2 operator*(const ExactMat2& a, const ExactVec2& v) {
  return {a(0, 0) * v[0] + a(0, 1) * v[1], a(1, 0) * v[0] + a(1, 1) * v[1]};
}

DihedralScalar dot(const ExactVec2& a, const ExactVec2& b) { return a[0] * b[0] + a[1] * b[1]; }

// ---------------------------------------------------------------------------

double signed_area(const std::vector<Vec2>& pts) {
  double s = 0.0;
  const std::size_t n = pts.size();
  for (std::size_t i = 0; i < n; ++i) {
    const Vec2& a = pts[i];
    const Vec2& b = pts[(i + 1) % n];
    s += a.x() * b.y() - a.y() * b.x();
  }
  return 0.5 * s;
}

namespace {

double cross(const Vec2& o, const Vec2& a, const Vec2& b) {
  return (a.x() - o.x()) * (b.y() - o.y()) - (a.y() - o.y()) * (b.x() - o.x());
}

double scale_of(const std::vector<Vec2>& pts) {
  double m = 0.0;
  for (const auto& p : pts) m = std::max(m, p.cwiseAbs().maxCoeff());
  return std::max(m, 1.0);
}

// removes duplicates and collinear middle vertices from a CCW loop
std::vector<Vec2> simplify(const std::vector<Vec2>& in, double eps) {
  std::vector<Vec2> pts;
  for (const auto& p : in)
    if (pts.empty() || (p - pts.back()).norm() > eps) pts.push_back(p);
  while (pts.size() > 1 && (pts.front() - pts.back()).norm() <= eps) pts.pop_back();
  bool changed = true;
  while (changed && pts.size() >= 3) {
    changed = false;
    for (std::size_t i = 0; i < pts.size(); ++i) {
      const Vec2& a = pts[(i + pts.size() - 1) % pts.size()];
      const Vec2& b = pts[i];
      const Vec2& c = pts[(i + 1) % pts.size()];
      double len = std::max((c - a).norm(), eps);
      if (std::abs(cross(a, b, c)) / len <= eps) {
        pts.erase(pts.begin() + static_cast<long>(i));
        changed = true;
        break;
      }
    }
  }
  return pts;
}

}  // namespace

ConvexPolygon::ConvexPolygon(std::vector<Vec2> vertices) {
  if (vertices.size() < 3) throw std::invalid_argument("polygon needs at least 3 vertices");
  for (const auto& p : vertices)
    if (!p.allFinite()) throw std::invalid_argument("polygon vertex not finite");
  if (signed_area(vertices) < 0) std::reverse(vertices.begin(), vertices.end());
  double eps = 1e-12 * scale_of(vertices);
  v_ = simplify(vertices, eps);
  if (v_.size() < 3) throw std::invalid_argument("degenerate polygon (collinear vertices)");
  const std::size_t n = v_.size();
  for (std::size_t i = 0; i < n; ++i)
    if (cross(v_[i], v_[(i + 1) % n], v_[(i + 2) % n]) < -1e-9 * scale_of(v_) * scale_of(v_))
      throw std::invalid_argument("polygon is not convex");
}

double ConvexPolygon::area() const { return signed_area(v_); }

Eigen::AlignedBox2d ConvexPolygon::bounds() const {
  Eigen::AlignedBox2d box;
  for (const auto& p : v_) box.extend(p);
  return box;
}

bool ConvexPolygon::contains(const Vec2& p, double tol) const {
  const std::size_t n = v_.size();
  for (std::size_t i = 0; i < n; ++i) {
    const Vec2& a = v_[i];
    const Vec2& b = v_[(i + 1) % n];
    Vec2 e = b - a;
    double dist = (e.x() * (p.y() - a.y()) - e.y() * (p.x() - a.x())) / e.norm();
    if (dist < -tol) return false;
  }
  return true;
}

bool ConvexPolygon::contains_strictly(const Vec2& p, double tol) const {
  const std::size_t n = v_.size();
  for (std::size_t i = 0; i < n; ++i) {
    const Vec2& a = v_[i];
    const Vec2& b = v_[(i + 1) % n];
    Vec2 e = b - a;
    double dist = (e.x() * (p.y() - a.y()) - e.y() * (p.x() - a.x())) / e.norm();
    if (dist <= tol) return false;
  }
  return true;
}

ConvexPolygon ConvexPolygon::transformed(const Affine2& map) const {
  std::vector<Vec2> out;
  out.reserve(v_.size());
  for (const auto& p : v_) out.push_back(map(p));
  return ConvexPolygon(std::move(out));
}

std::optional<ConvexPolygon> clip_polygons(const ConvexPolygon& a, const ConvexPolygon& b,
                                           double rel_area_eps) {
  if (a.size() < 3 || b.size() < 3) throw std::invalid_argument("degenerate input polygon");
  Eigen::AlignedBox2d box = a.bounds();
  box.extend(b.bounds());
  const double area_eps = rel_area_eps * std::max(box.volume(), 1e-300);

  std::vector<Vec2> out = a.vertices();
  const auto& clip = b.vertices();
  const std::size_t m = clip.size();
  for (std::size_t e = 0; e < m && !out.empty(); ++e) {
    const Vec2& c0 = clip[e];
    const Vec2& c1 = clip[(e + 1) % m];
    std::vector<Vec2> in;
    in.swap(out);
    const std::size_t n = in.size();
    for (std::size_t i = 0; i < n; ++i) {
      const Vec2& p = in[i];
      const Vec2& q = in[(i + 1) % n];
      double dp = cross(c0, c1, p);
      double dq = cross(c0, c1, q);
      if (dp >= 0) out.push_back(p);
      if ((dp >= 0) != (dq >= 0)) {
        double t = dp / (dp - dq);
        out.push_back(p + t * (q - p));
      }
    }
  }
  if (out.size() < 3 || signed_area(out) <= area_eps) return std::nullopt;
  try {
    return ConvexPolygon(std::move(out));
  } catch (const std::invalid_argument&) {
    return std::nullopt;
  }
}

bool polygon_contains(const ConvexPolygon& outer, const ConvexPolygon& inner, double tol) {
  for (const auto& p : inner.vertices())
    if (!outer.contains(p, tol)) return false;
  return true;
}

namespace {

void depth_search(const std::vector<ConvexPolygon>& polys, std::size_t next, const ConvexPolygon& acc,
                  std::vector<int>& chosen, ArrangementDepth& best, double eps) {
  if (static_cast<int>(chosen.size()) > best.depth) {
    best.depth = static_cast<int>(chosen.size());
    best.witness = chosen;
  }
  for (std::size_t j = next; j < polys.size(); ++j) {
    if (chosen.size() + (polys.size() - j) <= static_cast<std::size_t>(best.depth)) return;
    auto inter = clip_polygons(acc, polys[j], eps);
    if (!inter) continue;
    chosen.push_back(static_cast<int>(j));
    depth_search(polys, j + 1, *inter, chosen, best, eps);
    chosen.pop_back();
  }
}

}  // namespace

ArrangementDepth arrangement_depth(const std::vector<ConvexPolygon>& polys, double rel_area_eps) {
  if (polys.size() > 16) throw std::invalid_argument("arrangement_depth: too many polygons");
  ArrangementDepth best;
  std::vector<int> chosen;
  for (std::size_t i = 0; i < polys.size(); ++i) {
    if (polys.size() - i <= static_cast<std::size_t>(best.depth)) break;
    chosen = {static_cast<int>(i)};
    depth_search(polys, i + 1, polys[i], chosen, best, rel_area_eps);
  }
  return best;
}

int arrangement_max_depth(const std::vector<ConvexPolygon>& polys) { return arrangement_depth(polys).depth; }

double operator_norm(const Mat2& m) { return Eigen::JacobiSVD<Mat2>(m).singularValues()(0); }
double operator_norm(const Mat3& m) { return Eigen::JacobiSVD<Mat3>(m).singularValues()(0); }

}  // namespace fsl
