#pragma once

#include "fsl/geometry.hpp"
#include "fsl/surface.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace fsl {

// Counter-based generator: output k of stream j is a pure function of (seed, j, k).
class CounterRng {
 public:
  CounterRng(std::uint64_t seed, std::uint64_t stream);
  std::uint64_t next();
  double uniform();  // [0, 1)
  std::uint64_t counter() const { return ctr_; }

 private:
  std::uint64_t key_;
  std::uint64_t ctr_ = 0;
};

std::uint64_t splitmix64(std::uint64_t x);

struct ChaosOptions {
  std::size_t count = 100000;
  std::uint64_t seed = 1;
  int burn_in = 100;
  int streams = 16;
  int workers = 0;  // 0 = hardware concurrency
  bool has_start = false;
  Eigen::Vector3d start = Eigen::Vector3d::Zero();  // only the leading dim components are used
};

template <int D>
struct PointCloudT {
  using Point = Eigen::Matrix<double, D, 1>;
  std::vector<Point> points;
  std::uint64_t seed = 0;
  int burn_in = 0;
  int streams = 1;
  static constexpr int dimension = D;
};

using PointCloud2 = PointCloudT<2>;
using PointCloud3 = PointCloudT<3>;

// Throws std::invalid_argument for bad weights or a non-contractive family.
PointCloud2 chaos_game(const std::vector<Affine2>& maps, const std::vector<double>& weights,
                       const ChaosOptions& opt);
PointCloud3 chaos_game(const std::vector<Affine3>& maps, const std::vector<double>& weights,
                       const ChaosOptions& opt);
PointCloud3 chaos_game(const SurfaceIFS& ifs, const std::vector<double>& weights, const ChaosOptions& opt);

// Contractive in some metric obtained by rescaling the last axis.
bool is_contractive(const std::vector<Affine2>& maps);
bool is_contractive(const std::vector<Affine3>& maps);

using Triangle3 = std::array<Vec3, 3>;

struct SubdivisionMesh {
  int depth = 0;
  int branching = 1;
  std::vector<Triangle3> triangles;
};

SubdivisionMesh subdivision_mesh(const SurfaceIFS& ifs, int depth, std::size_t budget = 1000000);

struct OccupancyTable {
  std::vector<double> deltas;
  std::vector<std::uint64_t> counts;
};

OccupancyTable box_count(const PointCloud2& cloud, const std::vector<double>& scales);
OccupancyTable box_count(const PointCloud3& cloud, const std::vector<double>& scales);

std::vector<double> geometric_scales(double base, int k_lo, int k_hi);

// Exports. Throw std::runtime_error on I/O failure.
void export_obj(const SubdivisionMesh& mesh, const std::string& path);
void export_csv(const PointCloud2& cloud, const std::string& path);
void export_csv(const PointCloud3& cloud, const std::string& path);
void export_csv(const OccupancyTable& table, const std::string& path);
void export_pgm(const SubdivisionMesh& mesh, const std::string& path, int width = 512, int height = 0);

std::string obj_string(const SubdivisionMesh& mesh);
std::string csv_string(const OccupancyTable& table);
std::string pgm_string(const SubdivisionMesh& mesh, int width = 512, int height = 0);

}  // namespace fsl
