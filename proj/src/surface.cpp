#include "fsl/surface.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace fsl {

namespace {
const double kSqrt3 = std::sqrt(3.0);
}

Vec2 TriangulationSpec::point(int r, int c) const {
  return {static_cast<double>(c) / N + static_cast<double>(r) / (2.0 * N), r * kSqrt3 / (2.0 * N)};
}

std::vector<LatticeIndex> TriangulationSpec::lattice() const {
  std::vector<LatticeIndex> out;
  for (int r = 0; r <= N; ++r)
    for (int c = 0; c <= N - r; ++c) out.push_back({r, c});
  return out;
}

std::optional<LatticeIndex> TriangulationSpec::locate(const Vec2& p, double tol) const {
  double rf = p.y() * 2.0 * N / kSqrt3;
  int r = static_cast<int>(std::lround(rf));
  double cf = (p.x() - r / (2.0 * N)) * N;
  int c = static_cast<int>(std::lround(cf));
  if (!valid(r, c)) return std::nullopt;
  if ((point(r, c) - p).norm() > tol) return std::nullopt;
  return LatticeIndex{r, c};
}

std::array<Vec2, 3> base_triangle() { return {Vec2(0, 0), Vec2(1, 0), Vec2(0.5, kSqrt3 / 2)}; }

double InterpolationData::value(int r, int c) const {
  auto it = values.find({r, c});
  return it == values.end() ? 0.0 : it->second;
}

InterpolationData center_peak_data(double a) {
  InterpolationData d;
  d.set(1, 1, a);
  return d;
}

InterpolationData plateau_data(int N, double a) {
  InterpolationData d;
  TriangulationSpec spec{N};
  for (const auto& q : spec.lattice())
    if (!spec.is_boundary(q.r, q.c)) d.set(q.r, q.c, a);
  return d;
}

std::string to_string(Construction c) {
  return c == Construction::Massopust ? "massopust" : "geronimo-hardin";
}

std::vector<Affine2> SurfaceIFS::planar_parts() const {
  std::vector<Affine2> out;
  for (const auto& m : maps) out.push_back({m.linear.topLeftCorner<2, 2>(), m.translation.head<2>()});
  return out;
}

double SurfaceIFS::s_min() const { return *std::min_element(s.begin(), s.end()); }
double SurfaceIFS::s_max() const { return *std::max_element(s.begin(), s.end()); }

namespace {

Affine3 assemble(double lambda, const Mat2& U, const Vec2& grad, double s, const Vec2& shift, double c) {
  Affine3 w;
  w.linear.setZero();
  w.linear.topLeftCorner<2, 2>() = lambda * U;
  w.linear(2, 0) = grad.x();
  w.linear(2, 1) = grad.y();
  w.linear(2, 2) = s;
  w.translation = Vec3(shift.x(), shift.y(), c);
  return w;
}

}  // namespace

SurfaceIFS build_massopust(const TriangulationSpec& spec, const InterpolationData& data,
                           const std::vector<double>& s) {
  const int N = spec.N;
  if (N < 3) throw std::invalid_argument("massopust: N must be >= 3");
  if (static_cast<int>(s.size()) != spec.num_triangles()) {
    std::ostringstream os;
    os << "massopust: expected " << spec.num_triangles() << " scalings, got " << s.size();
    throw std::invalid_argument(os.str());
  }
  for (double si : s)
    if (!(si > 0.0 && si < 1.0)) throw std::invalid_argument("massopust: scaling outside (0,1)");
  for (const auto& [q, v] : data.values) {
    if (!spec.valid(q.r, q.c)) throw std::invalid_argument("massopust: data point outside lattice");
    if (!std::isfinite(v)) throw std::invalid_argument("massopust: non-finite data value");
    if (spec.is_boundary(q.r, q.c) && v != 0.0) throw std::invalid_argument("massopust: nonzero boundary value");
  }

  SurfaceIFS ifs;
  ifs.kind = Construction::Massopust;
  ifs.N = N;
  ifs.lambda = 1.0 / N;
  ifs.s = s;
  ifs.data = data;

  auto add = [&](Orientation o, int r, int c, LatticeIndex L, LatticeIndex R, LatticeIndex P) {
    TriangleRecord t;
    t.index = static_cast<int>(ifs.triangles.size()) + 1;
    t.orientation = o;
    t.row = r;
    t.col = c;
    t.corners = {L, R, P};
    t.left = spec.point(L);
    t.right = spec.point(R);
    t.apex = spec.point(P);
    t.a1 = data.value(L.r, L.c);
    t.a2 = data.value(R.r, R.c);
    t.a3 = data.value(P.r, P.c);
    ifs.triangles.push_back(t);
  };
  for (int r = 0; r < N; ++r)
    for (int c = 0; c < N - r; ++c) add(Orientation::Up, r, c, {r, c}, {r, c + 1}, {r + 1, c});
  for (int r = 0; r < N - 1; ++r)
    for (int c = 0; c < N - r - 1; ++c) add(Orientation::Down, r, c, {r + 1, c}, {r + 1, c + 1}, {r, c + 1});

  for (const auto& t : ifs.triangles) {
    const bool keep = t.a1 >= t.a2;
    const bool up = t.orientation == Orientation::Up;
    Mat2 U = Mat2::Zero();
    U(0, 0) = keep ? 1.0 : -1.0;
    U(1, 1) = up ? 1.0 : -1.0;
    Vec2 shift = keep ? t.left : t.right;
    Vec2 grad(-std::abs(t.a1 - t.a2), (2.0 / kSqrt3) * (t.a3 - 0.5 * (t.a1 + t.a2)));
    double c = std::max(t.a1, t.a2);
    std::size_t i = static_cast<std::size_t>(t.index - 1);
    ifs.U.push_back(U);
    ifs.grad.push_back(grad);
    ifs.c.push_back(c);
    ifs.maps.push_back(assemble(ifs.lambda, U, grad, s[i], shift, c));
  }

  double scale = 1.0;
  for (const auto& [q, v] : data.values) scale = std::max(scale, std::abs(v));
  if (join_up_residual(ifs) > 1e-12 * scale) throw std::logic_error("massopust: join-up condition violated");
  return ifs;
}

SurfaceIFS build_massopust(const TriangulationSpec& spec, const InterpolationData& data, double s) {
  return build_massopust(spec, data, std::vector<double>(static_cast<std::size_t>(spec.num_triangles()), s));
}

SurfaceIFS build_geronimo_hardin(double s, double a) {
  if (!(s > 0.0 && s < 1.0)) throw std::invalid_argument("geronimo-hardin: s outside (0,1)");
  if (a == 0.0 || !std::isfinite(a)) throw std::invalid_argument("geronimo-hardin: a must be nonzero");
  SurfaceIFS ifs;
  ifs.kind = Construction::GeronimoHardin;
  ifs.N = 2;
  ifs.lambda = 0.5;
  ifs.a = a;
  ifs.s.assign(4, s);
  ifs.data.a = a;
  ifs.data.set(0, 1, a);
  ifs.data.set(1, 0, a);
  ifs.data.set(1, 1, a);

  const double h = kSqrt3 / 2;
  Mat2 Q1, Q2, Q3, Q4;
  Q1 << 0.5, h, h, -0.5;
  Q2 << 0.5, -h, -h, -0.5;
  Q3 << -1, 0, 0, 1;
  Q4 << -1, 0, 0, -1;
  const Vec2 mid(0.75, kSqrt3 / 4);
  struct Row {
    Mat2 U;
    Vec2 grad;
    Vec2 shift;
    double c;
  };
  const Row rows[4] = {
      {Q1, Vec2(a, a / kSqrt3), Vec2::Zero(), 0.0},
      {Q2, Vec2(-a, a / kSqrt3), mid, a},
      {Q3, Vec2(0.0, -2.0 * a / kSqrt3), mid, a},
      {Q4, Vec2::Zero(), mid, a},
  };
  for (const auto& r : rows) {
    ifs.U.push_back(r.U);
    ifs.grad.push_back(r.grad);
    ifs.c.push_back(r.c);
    ifs.maps.push_back(assemble(0.5, r.U, r.grad, s, r.shift, r.c));
  }
  return ifs;
}

double join_up_residual(const SurfaceIFS& ifs) {
  TriangulationSpec spec{ifs.N};
  double worst = 0.0;
  for (const auto& w : ifs.maps) {
    for (const auto& q : base_triangle()) {
      Vec3 img = w(Vec3(q.x(), q.y(), 0.0));
      auto idx = spec.locate(img.head<2>());
      if (!idx) return std::numeric_limits<double>::infinity();
      worst = std::max(worst, std::abs(img.z() - ifs.data.value(idx->r, idx->c)));
    }
  }
  return worst;
}

// ---------------------------------------------------------------------------

double Classification::diff(const SurfaceIFS& ifs, int index1) const {
  const auto& t = ifs.triangles.at(static_cast<std::size_t>(index1 - 1));
  return std::abs(t.a1 - t.a2);
}

Classification classify_and_constants(const SurfaceIFS& ifs) {
  if (ifs.kind != Construction::Massopust) throw std::invalid_argument("classification needs a Massopust IFS");
  Classification out;
  for (const auto& t : ifs.triangles) {
    double scale = std::max({1.0, std::abs(t.a1), std::abs(t.a2)});
    MapClass m;
    if (std::abs(t.a1 - t.a2) <= 1e-12 * scale) {
      m = MapClass::A1;
      out.A1.push_back(t.index);
    } else if (t.a1 > t.a2) {
      m = MapClass::A2;
      out.A2.push_back(t.index);
    } else {
      m = MapClass::A3;
      out.A3.push_back(t.index);
    }
    out.of.push_back(m);
  }
  if (!out.A3.empty()) {
    double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
    for (int i : out.A3) {
      lo = std::min(lo, out.diff(ifs, i));
      hi = std::max(hi, out.diff(ifs, i));
    }
    out.D = lo / hi;
  }
  if (!out.A2.empty()) {
    double maxB = 0.0;
    if (!out.A3.empty()) {
      double lo3 = std::numeric_limits<double>::infinity();
      for (int k : out.A3) lo3 = std::min(lo3, out.diff(ifs, k));
      for (int i : out.A2) maxB = std::max(maxB, out.diff(ifs, i) / lo3);
    }
    out.B = 1.0 / (1.0 + maxB);
  }
  return out;
}

ParameterRegion parameter_region(const SurfaceIFS& ifs, const Classification& cls) {
  ParameterRegion r;
  r.N = ifs.N;
  r.lo_A1 = 1.0 / ifs.N;
  r.lo_A2 = cls.B ? 1.0 / (ifs.N * *cls.B) : r.lo_A1;
  r.lo_A3 = cls.D ? 1.0 / (ifs.N * *cls.D) : r.lo_A1;
  return r;
}

RegionReport validate_region(const SurfaceIFS& ifs, const Classification& cls, const ParameterRegion& region) {
  RegionReport rep;
  for (std::size_t i = 0; i < ifs.s.size(); ++i) {
    double lo = region.lo_A1;
    const char* name = "A1";
    if (cls.of[i] == MapClass::A2) {
      lo = region.lo_A2;
      name = "A2";
    } else if (cls.of[i] == MapClass::A3) {
      lo = region.lo_A3;
      name = "A3";
    }
    double si = ifs.s[i];
    if (!(si > lo && si < 1.0)) {
      rep.ok = false;
      rep.violators.push_back(static_cast<int>(i) + 1);
      std::ostringstream os;
      os << "s_" << i + 1 << " = " << si << " not in (" << lo << ", 1) for class " << name;
      rep.messages.push_back(os.str());
    }
  }
  return rep;
}

}  // namespace fsl
