#pragma once

#include "fsl/geometry.hpp"

#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace fsl {

struct LatticeIndex {
  int r = 0;
  int c = 0;
  friend bool operator<(const LatticeIndex& a, const LatticeIndex& b) {
    return a.r != b.r ? a.r < b.r : a.c < b.c;
  }
  friend bool operator==(const LatticeIndex& a, const LatticeIndex& b) { return a.r == b.r && a.c == b.c; }
};

struct TriangulationSpec {
  int N = 3;

  Vec2 point(int r, int c) const;
  Vec2 point(const LatticeIndex& q) const { return point(q.r, q.c); }
  int num_points() const { return (N + 1) * (N + 2) / 2; }
  int num_triangles() const { return N * N; }
  int num_up() const { return N * (N + 1) / 2; }
  bool is_boundary(int r, int c) const { return r == 0 || c == 0 || r + c == N; }
  bool valid(int r, int c) const { return r >= 0 && c >= 0 && r + c <= N; }
  std::vector<LatticeIndex> lattice() const;
  // lattice point at (x, y) if any, within tol
  std::optional<LatticeIndex> locate(const Vec2& p, double tol = 1e-9) const;
};

// corners of the base triangle
std::array<Vec2, 3> base_triangle();

struct InterpolationData {
  std::map<LatticeIndex, double> values;
  double a = 0.0;  // Geronimo-Hardin height

  double value(int r, int c) const;
  void set(int r, int c, double v) { values[{r, c}] = v; }
};

// N=3 data with a single interior peak of height a at the centroid
InterpolationData center_peak_data(double a);
// value a at every interior lattice point, zero on the boundary
InterpolationData plateau_data(int N, double a);

enum class Orientation { Up, Down };

struct TriangleRecord {
  int index = 0;  // 1-based
  Orientation orientation = Orientation::Up;
  int row = 0;
  int col = 0;
  double a1 = 0.0;  // left end of horizontal edge
  double a2 = 0.0;  // right end of horizontal edge
  double a3 = 0.0;  // apex
  Vec2 left = Vec2::Zero();   // (e_i, f_i)
  Vec2 right = Vec2::Zero();  // (g_i, f_i)
  Vec2 apex = Vec2::Zero();
  std::array<LatticeIndex, 3> corners{};  // left, right, apex
};

enum class Construction { Massopust, GeronimoHardin };

std::string to_string(Construction c);

enum class MapClass { A1 = 1, A2 = 2, A3 = 3 };

struct SurfaceIFS {
  Construction kind = Construction::Massopust;
  int N = 3;                 // subdivisions per side (2 for Geronimo-Hardin)
  double lambda = 1.0 / 3;   // similarity ratio of each planar part
  double a = 0.0;            // Geronimo-Hardin height
  std::vector<Affine3> maps;
  std::vector<double> s;
  std::vector<Mat2> U;       // orthogonal parts
  std::vector<Vec2> grad;    // (bold a_i, b_i)
  std::vector<double> c;
  std::vector<TriangleRecord> triangles;  // Massopust only
  InterpolationData data;

  std::size_t size() const { return maps.size(); }
  std::vector<Affine2> planar_parts() const;
  double s_min() const;
  double s_max() const;
};

SurfaceIFS build_massopust(const TriangulationSpec& spec, const InterpolationData& data,
                           const std::vector<double>& s);
SurfaceIFS build_massopust(const TriangulationSpec& spec, const InterpolationData& data, double s);
SurfaceIFS build_geronimo_hardin(double s, double a);

struct Classification {
  std::vector<int> A1, A2, A3;  // 1-based map indices
  std::optional<double> B;
  std::optional<double> D;
  std::vector<MapClass> of;     // per map, 0-based

  double diff(const SurfaceIFS& ifs, int index1) const;
};

Classification classify_and_constants(const SurfaceIFS& ifs);

struct ParameterRegion {
  int N = 3;
  double lo_A1 = 0.0;
  double lo_A2 = 0.0;
  double lo_A3 = 0.0;
};

ParameterRegion parameter_region(const SurfaceIFS& ifs, const Classification& cls);

struct RegionReport {
  bool ok = true;
  std::vector<int> violators;  // 1-based
  std::vector<std::string> messages;
};

RegionReport validate_region(const SurfaceIFS& ifs, const Classification& cls, const ParameterRegion& region);

// join-up residual: max over maps and corners |V_i(q,0) - data(U_i q)|
double join_up_residual(const SurfaceIFS& ifs);

}  // namespace fsl
