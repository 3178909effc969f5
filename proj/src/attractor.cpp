#include "fsl/attractor.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <sstream>
#include <stdexcept>
#include <thread>

namespace fsl {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

CounterRng::CounterRng(std::uint64_t seed, std::uint64_t stream)
    : key_(splitmix64(seed ^ splitmix64(stream + 0x632BE59BD9B4E019ULL))) {}

std::uint64_t CounterRng::next() {
  std::uint64_t z = key_ + 0x9E3779B97F4A7C15ULL * (++ctr_);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  z ^= z >> 31;
  return splitmix64(z ^ key_);
}

double CounterRng::uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

namespace {

template <class Map>
bool contractive_impl(const std::vector<Map>& maps) {
  using M = decltype(Map{}.linear);
  constexpr int D = M::RowsAtCompileTime;
  for (int k = 0; k <= 40; ++k) {
    double theta = std::ldexp(1.0, -k);
    bool ok = true;
    for (const auto& m : maps) {
      M a = m.linear;
      a.row(D - 1) *= theta;
      a.col(D - 1) /= theta;
      if (!(operator_norm(a) < 1.0)) {
        ok = false;
        break;
      }
    }
    if (ok) return true;
  }
  return false;
}

void check_weights(std::size_t n, const std::vector<double>& w) {
  if (n == 0) throw std::invalid_argument("chaos game: empty IFS");
  if (w.size() != n) throw std::invalid_argument("chaos game: weight count mismatch");
  double sum = 0.0;
  for (double x : w) {
    if (!(x >= 0.0) || !std::isfinite(x)) throw std::invalid_argument("chaos game: negative weight");
    sum += x;
  }
  if (std::abs(sum - 1.0) > 1e-12) throw std::invalid_argument("chaos game: weights do not sum to 1");
}

int resolve_workers(int w) {
  if (w > 0) return w;
  unsigned h = std::thread::hardware_concurrency();
  return h == 0 ? 1 : static_cast<int>(h);
}

template <int D, class Map>
PointCloudT<D> chaos_impl(const std::vector<Map>& maps, const std::vector<double>& weights,
                          const ChaosOptions& opt) {
  check_weights(maps.size(), weights);
  if (opt.count < 1) throw std::invalid_argument("chaos game: count must be >= 1");
  if (opt.burn_in < 0) throw std::invalid_argument("chaos game: negative burn-in");
  if (!contractive_impl(maps)) throw std::invalid_argument("chaos game: IFS is not contractive");

  using P = Eigen::Matrix<double, D, 1>;
  std::vector<double> cum(weights.size());
  std::partial_sum(weights.begin(), weights.end(), cum.begin());
  cum.back() = 1.0;

  P x0 = opt.has_start ? P(opt.start.head<D>()) : P(maps.front().fixed_point());
  const int streams = std::max(1, opt.streams);
  std::vector<std::size_t> offset(static_cast<std::size_t>(streams) + 1, 0);
  for (int j = 0; j < streams; ++j) {
    std::size_t len = opt.count / streams + (static_cast<std::size_t>(j) < opt.count % streams ? 1 : 0);
    offset[static_cast<std::size_t>(j) + 1] = offset[static_cast<std::size_t>(j)] + len;
  }

  PointCloudT<D> cloud;
  cloud.seed = opt.seed;
  cloud.burn_in = opt.burn_in;
  cloud.streams = streams;
  cloud.points.resize(opt.count);

  auto run_stream = [&](int j) {
    CounterRng rng(opt.seed, static_cast<std::uint64_t>(j));
    P x = x0;
    auto step = [&] {
      double u = rng.uniform();
      std::size_t i = static_cast<std::size_t>(std::upper_bound(cum.begin(), cum.end(), u) - cum.begin());
      if (i >= maps.size()) i = maps.size() - 1;
      x = maps[i].linear * x + maps[i].translation;
    };
    for (int b = 0; b < opt.burn_in; ++b) step();
    for (std::size_t k = offset[static_cast<std::size_t>(j)]; k < offset[static_cast<std::size_t>(j) + 1]; ++k) {
      step();
      cloud.points[k] = x;
    }
  };

  const int workers = std::min(resolve_workers(opt.workers), streams);
  if (workers <= 1) {
    for (int j = 0; j < streams; ++j) run_stream(j);
  } else {
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w)
      pool.emplace_back([&, w] {
        for (int j = w; j < streams; j += workers) run_stream(j);
      });
    for (auto& t : pool) t.join();
  }
  return cloud;
}

}  // namespace

bool is_contractive(const std::vector<Affine2>& maps) { return contractive_impl(maps); }
bool is_contractive(const std::vector<Affine3>& maps) { return contractive_impl(maps); }

PointCloud2 chaos_game(const std::vector<Affine2>& maps, const std::vector<double>& weights,
                       const ChaosOptions& opt) {
  return chaos_impl<2>(maps, weights, opt);
}

PointCloud3 chaos_game(const std::vector<Affine3>& maps, const std::vector<double>& weights,
                       const ChaosOptions& opt) {
  return chaos_impl<3>(maps, weights, opt);
}

PointCloud3 chaos_game(const SurfaceIFS& ifs, const std::vector<double>& weights, const ChaosOptions& opt) {
  return chaos_impl<3>(ifs.maps, weights, opt);
}

SubdivisionMesh subdivision_mesh(const SurfaceIFS& ifs, int depth, std::size_t budget) {
  if (depth < 0) throw std::invalid_argument("subdivision: negative depth");
  const std::size_t n = ifs.maps.size();
  std::size_t total = 1;
  for (int d = 0; d < depth; ++d) {
    if (total > budget / n) throw std::invalid_argument("subdivision: triangle budget exceeded");
    total *= n;
  }
  if (total > budget) throw std::invalid_argument("subdivision: triangle budget exceeded");

  SubdivisionMesh mesh;
  mesh.depth = depth;
  mesh.branching = static_cast<int>(n);
  auto base = base_triangle();
  mesh.triangles.push_back({Vec3(base[0].x(), base[0].y(), 0), Vec3(base[1].x(), base[1].y(), 0),
                            Vec3(base[2].x(), base[2].y(), 0)});
  for (int d = 0; d < depth; ++d) {
    std::vector<Triangle3> next;
    next.reserve(mesh.triangles.size() * n);
    for (const auto& w : ifs.maps)
      for (const auto& t : mesh.triangles) next.push_back({w(t[0]), w(t[1]), w(t[2])});
    mesh.triangles.swap(next);
  }
  return mesh;
}

namespace {

template <int D>
OccupancyTable box_count_impl(const PointCloudT<D>& cloud, const std::vector<double>& scales) {
  if (cloud.points.empty()) throw std::invalid_argument("box count: empty cloud");
  if (scales.empty()) throw std::invalid_argument("box count: no scales");
  for (std::size_t i = 0; i < scales.size(); ++i) {
    if (!(scales[i] > 0.0)) throw std::invalid_argument("box count: scales must be positive");
    if (i > 0 && !(scales[i] < scales[i - 1])) throw std::invalid_argument("box count: scales must decrease");
  }
  OccupancyTable table;
  std::vector<std::array<std::int64_t, D>> cells(cloud.points.size());
  for (double delta : scales) {
    for (std::size_t k = 0; k < cloud.points.size(); ++k)
      for (int c = 0; c < D; ++c)
        cells[k][static_cast<std::size_t>(c)] = static_cast<std::int64_t>(std::floor(cloud.points[k](c) / delta));
    std::sort(cells.begin(), cells.end());
    std::uint64_t distinct = static_cast<std::uint64_t>(std::unique(cells.begin(), cells.end()) - cells.begin());
    table.deltas.push_back(delta);
    table.counts.push_back(distinct);
  }
  return table;
}

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void write_file(const std::string& path, const std::string& body) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  out << body;
  out.flush();
  if (!out) throw std::runtime_error("write failed: " + path);
}

}  // namespace

OccupancyTable box_count(const PointCloud2& cloud, const std::vector<double>& scales) {
  return box_count_impl(cloud, scales);
}

OccupancyTable box_count(const PointCloud3& cloud, const std::vector<double>& scales) {
  return box_count_impl(cloud, scales);
}

std::vector<double> geometric_scales(double base, int k_lo, int k_hi) {
  std::vector<double> out;
  for (int k = k_lo; k <= k_hi; ++k) out.push_back(std::pow(base, -k));
  return out;
}

std::string obj_string(const SubdivisionMesh& mesh) {
  std::string s;
  s.reserve(mesh.triangles.size() * 200);
  s += "# fractal interpolation surface, depth " + std::to_string(mesh.depth) + "\n";
  for (const auto& t : mesh.triangles)
    for (const auto& v : t) s += "v " + fmt(v.x()) + " " + fmt(v.y()) + " " + fmt(v.z()) + "\n";
  for (std::size_t i = 0; i < mesh.triangles.size(); ++i) {
    std::size_t b = 3 * i + 1;
    s += "f " + std::to_string(b) + " " + std::to_string(b + 1) + " " + std::to_string(b + 2) + "\n";
  }
  return s;
}

std::string csv_string(const OccupancyTable& table) {
  std::string s = "delta,count\n";
  for (std::size_t i = 0; i < table.deltas.size(); ++i)
    s += fmt(table.deltas[i]) + "," + std::to_string(table.counts[i]) + "\n";
  return s;
}

std::string pgm_string(const SubdivisionMesh& mesh, int width, int height) {
  if (mesh.triangles.empty()) throw std::invalid_argument("pgm: empty mesh");
  double xmin = 1e300, xmax = -1e300, ymin = 1e300, ymax = -1e300, zmin = 1e300, zmax = -1e300;
  for (const auto& t : mesh.triangles)
    for (const auto& v : t) {
      xmin = std::min(xmin, v.x());
      xmax = std::max(xmax, v.x());
      ymin = std::min(ymin, v.y());
      ymax = std::max(ymax, v.y());
      zmin = std::min(zmin, v.z());
      zmax = std::max(zmax, v.z());
    }
  if (width < 2) throw std::invalid_argument("pgm: width too small");
  if (height <= 0) height = std::max(2, static_cast<int>(std::lround(width * (ymax - ymin) / (xmax - xmin))));
  std::vector<int> img(static_cast<std::size_t>(width) * static_cast<std::size_t>(height), 0);
  const double dx = (xmax - xmin) / width, dy = (ymax - ymin) / height;
  const double zr = zmax > zmin ? zmax - zmin : 1.0;

  for (const auto& t : mesh.triangles) {
    double tx0 = std::min({t[0].x(), t[1].x(), t[2].x()}), tx1 = std::max({t[0].x(), t[1].x(), t[2].x()});
    double ty0 = std::min({t[0].y(), t[1].y(), t[2].y()}), ty1 = std::max({t[0].y(), t[1].y(), t[2].y()});
    int i0 = std::max(0, static_cast<int>(std::floor((tx0 - xmin) / dx - 0.5)));
    int i1 = std::min(width - 1, static_cast<int>(std::ceil((tx1 - xmin) / dx - 0.5)));
    int j0 = std::max(0, static_cast<int>(std::floor((ymax - ty1) / dy - 0.5)));
    int j1 = std::min(height - 1, static_cast<int>(std::ceil((ymax - ty0) / dy - 0.5)));
    const Vec2 a = t[0].head<2>(), b = t[1].head<2>(), c = t[2].head<2>();
    const double det = (b.x() - a.x()) * (c.y() - a.y()) - (c.x() - a.x()) * (b.y() - a.y());
    if (std::abs(det) < 1e-300) continue;
    for (int j = j0; j <= j1; ++j)
      for (int i = i0; i <= i1; ++i) {
        std::size_t idx = static_cast<std::size_t>(j) * static_cast<std::size_t>(width) + static_cast<std::size_t>(i);
        if (img[idx] != 0) continue;
        Vec2 p(xmin + (i + 0.5) * dx, ymax - (j + 0.5) * dy);
        double l1 = ((b.x() - p.x()) * (c.y() - p.y()) - (c.x() - p.x()) * (b.y() - p.y())) / det;
        double l2 = ((c.x() - p.x()) * (a.y() - p.y()) - (a.x() - p.x()) * (c.y() - p.y())) / det;
        double l3 = 1.0 - l1 - l2;
        const double e = -1e-12;
        if (l1 < e || l2 < e || l3 < e) continue;
        double z = l1 * t[0].z() + l2 * t[1].z() + l3 * t[2].z();
        img[idx] = 1 + static_cast<int>(std::lround(254.0 * (z - zmin) / zr));
      }
  }
  std::string s = "P2\n" + std::to_string(width) + " " + std::to_string(height) + "\n255\n";
  for (int j = 0; j < height; ++j) {
    for (int i = 0; i < width; ++i) {
      if (i) s += ' ';
      s += std::to_string(img[static_cast<std::size_t>(j) * static_cast<std::size_t>(width) + static_cast<std::size_t>(i)]);
    }
    s += '\n';
  }
  return s;
}

void export_obj(const SubdivisionMesh& mesh, const std::string& path) { write_file(path, obj_string(mesh)); }
void export_csv(const OccupancyTable& table, const std::string& path) { write_file(path, csv_string(table)); }
void export_pgm(const SubdivisionMesh& mesh, const std::string& path, int width, int height) {
  write_file(path, pgm_string(mesh, width, height));
}

namespace {
template <int D>
std::string cloud_csv(const PointCloudT<D>& cloud) {
  std::string s = D == 2 ? "x,y\n" : "x,y,z\n";
  for (const auto& p : cloud.points) {
    for (int c = 0; c < D; ++c) {
      if (c) s += ',';
      s += fmt(p(c));
    }
    s += '\n';
  }
  return s;
}
}  // namespace

void export_csv(const PointCloud2& cloud, const std::string& path) { write_file(path, cloud_csv(cloud)); }
void export_csv(const PointCloud3& cloud, const std::string& path) { write_file(path, cloud_csv(cloud)); }

}  // namespace fsl
