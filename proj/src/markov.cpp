#include "fsl/markov.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <map>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace fsl {

namespace {

ExactMat2 mk(DihedralScalar a, DihedralScalar b, DihedralScalar c, DihedralScalar d) {
  ExactMat2 m;
  m.e = {a, b, c, d};
  return m;
}

const DihedralScalar kHalf(1, 0, 2);
const DihedralScalar kR3h(0, 1, 2);  // sqrt3 / 2
const DihedralScalar kOne = DihedralScalar::integer(1);
const DihedralScalar kZero = DihedralScalar::integer(0);

bool is_orthogonal(const ExactMat2& m) { return m * m.transpose() == ExactMat2::identity(); }

std::uint64_t ipow(std::uint64_t b, int e) {
  std::uint64_t r = 1;
  while (e-- > 0) r *= b;
  return r;
}

}  // namespace

int MatrixGroup::index_of(const ExactMat2& m) const {
  for (std::size_t i = 0; i < elements.size(); ++i)
    if (elements[i] == m) return static_cast<int>(i);
  return -1;
}

std::string MatrixGroup::label(int i) const {
  return (listing_order ? "Q" : "g") + std::to_string(i + 1);
}

std::vector<ExactMat2> gh_generators() {
  auto l = gh_group_listing();
  return {l[0], l[1], l[2], l[3]};
}

std::vector<ExactMat2> gh_group_listing() {
  return {
      mk(kHalf, kR3h, kR3h, -kHalf),     // Q1
      mk(kHalf, -kR3h, -kR3h, -kHalf),   // Q2
      mk(-kOne, kZero, kZero, kOne),     // Q3
      mk(-kOne, kZero, kZero, -kOne),    // Q4
      mk(kOne, kZero, kZero, kOne),      // Q5
      mk(-kHalf, -kR3h, -kR3h, kHalf),   // Q6
      mk(-kHalf, kR3h, kR3h, kHalf),     // Q7
      mk(-kHalf, kR3h, -kR3h, -kHalf),   // Q8
      mk(-kHalf, -kR3h, kR3h, -kHalf),   // Q9
      mk(kOne, kZero, kZero, -kOne),     // Q10
      mk(kHalf, -kR3h, kR3h, kHalf),     // Q11
      mk(kHalf, kR3h, -kR3h, kHalf),     // Q12
  };
}

MatrixGroup group_closure(const std::vector<ExactMat2>& generators) {
  if (generators.empty()) throw std::invalid_argument("group closure: no generators");
  for (const auto& g : generators)
    if (!is_orthogonal(g)) throw std::invalid_argument("group closure: generator is not orthogonal");

  std::vector<ExactMat2> elems{ExactMat2::identity()};
  std::map<ExactMat2, int> seen{{elems[0], 0}};
  std::deque<int> queue{0};
  while (!queue.empty()) {
    int a = queue.front();
    queue.pop_front();
    for (const auto& g : generators) {
      ExactMat2 m;
      try {
        m = elems[static_cast<std::size_t>(a)] * g;
      } catch (const std::overflow_error&) {
        throw std::runtime_error("group closure: entries overflow, generators do not form a finite group");
      }
      if (seen.count(m)) continue;
      if (elems.size() >= kClosureCap) throw std::runtime_error("group closure: exceeds cap of 1024 elements");
      seen[m] = static_cast<int>(elems.size());
      elems.push_back(m);
      queue.push_back(static_cast<int>(elems.size()) - 1);
    }
  }

  MatrixGroup grp;
  auto gh = gh_generators();
  if (generators == gh) {
    auto listing = gh_group_listing();
    if (elems.size() != listing.size()) throw std::logic_error("group closure: GH group order is not 12");
    for (const auto& q : listing)
      if (!seen.count(q)) throw std::logic_error("group closure: GH listing element missing");
    elems = listing;
    grp.listing_order = true;
  }
  grp.elements = elems;
  grp.identity = grp.index_of(ExactMat2::identity());
  const std::size_t n = elems.size();
  grp.table.assign(n, std::vector<int>(n, -1));
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t b = 0; b < n; ++b) {
      int c = grp.index_of(elems[a] * elems[b]);
      if (c < 0) throw std::logic_error("group closure: not closed");
      grp.table[a][b] = c;
    }
  for (const auto& g : generators) grp.generators.push_back(grp.index_of(g));
  return grp;
}

std::vector<int> gh_bipartite_ordering() { return {4, 5, 6, 7, 8, 9, 0, 1, 2, 3, 10, 11}; }

TransitionMatrix transition_matrix(const MatrixGroup& group, const std::vector<int>& ordering) {
  TransitionMatrix tm;
  const std::size_t n = group.order();
  if (ordering.empty()) {
    tm.ordering.resize(n);
    std::iota(tm.ordering.begin(), tm.ordering.end(), 0);
  } else {
    std::vector<int> sorted = ordering;
    std::sort(sorted.begin(), sorted.end());
    for (std::size_t i = 0; i < n; ++i)
      if (sorted.size() != n || sorted[i] != static_cast<int>(i))
        throw std::invalid_argument("transition matrix: ordering is not a permutation");
    tm.ordering = ordering;
  }
  std::vector<int> pos(n);
  for (std::size_t i = 0; i < n; ++i) pos[static_cast<std::size_t>(tm.ordering[i])] = static_cast<int>(i);
  const Rational w(1, static_cast<long long>(group.generators.size()));
  tm.P.assign(n, std::vector<Rational>(n, Rational(0)));
  for (std::size_t i = 0; i < n; ++i) {
    int l = tm.ordering[i];
    for (int k : group.generators) {
      int m = group.table[static_cast<std::size_t>(l)][static_cast<std::size_t>(k)];
      tm.P[i][static_cast<std::size_t>(pos[static_cast<std::size_t>(m)])] += w;
    }
  }
  return tm;
}

RationalMatrix mat_mul(const RationalMatrix& a, const RationalMatrix& b) {
  const std::size_t n = a.size(), m = b.front().size(), k = b.size();
  RationalMatrix c(n, std::vector<Rational>(m, Rational(0)));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t t = 0; t < k; ++t) {
      if (a[i][t] == 0) continue;
      for (std::size_t j = 0; j < m; ++j)
        if (b[t][j] != 0) c[i][j] += a[i][t] * b[t][j];
    }
  return c;
}

RationalMatrix mat_pow(const RationalMatrix& a, int n) {
  const std::size_t d = a.size();
  RationalMatrix r(d, std::vector<Rational>(d, Rational(0)));
  for (std::size_t i = 0; i < d; ++i) r[i][i] = 1;
  RationalMatrix b = a;
  while (n > 0) {
    if (n & 1) r = mat_mul(r, b);
    n >>= 1;
    if (n) b = mat_mul(b, b);
  }
  return r;
}

namespace {

bool strongly_connected(const RationalMatrix& m) {
  const std::size_t n = m.size();
  for (std::size_t src = 0; src < n; ++src) {
    std::vector<bool> vis(n, false);
    std::deque<std::size_t> q{src};
    vis[src] = true;
    while (!q.empty()) {
      auto u = q.front();
      q.pop_front();
      for (std::size_t v = 0; v < n; ++v)
        if (m[u][v] != 0 && !vis[v]) {
          vis[v] = true;
          q.push_back(v);
        }
    }
    if (std::find(vis.begin(), vis.end(), false) != vis.end()) return false;
  }
  return true;
}

// gcd of cycle lengths through state 0 via BFS levels
int graph_period(const RationalMatrix& m) {
  const std::size_t n = m.size();
  std::vector<int> level(n, -1);
  level[0] = 0;
  std::deque<std::size_t> q{0};
  int g = 0;
  while (!q.empty()) {
    auto u = q.front();
    q.pop_front();
    for (std::size_t v = 0; v < n; ++v) {
      if (m[u][v] == 0) continue;
      if (level[v] < 0) {
        level[v] = level[u] + 1;
        q.push_back(v);
      } else {
        g = std::gcd(g, std::abs(level[u] + 1 - level[v]));
      }
    }
  }
  return g;
}

}  // namespace

ChainAnalysis chain_analysis(const TransitionMatrix& tm) {
  ChainAnalysis out;
  const auto& P = tm.P;
  const std::size_t n = P.size();
  for (const auto& row : P) {
    Rational s(0);
    for (const auto& x : row) s += x;
    if (s != 1) throw std::invalid_argument("chain analysis: P is not row-stochastic");
  }
  out.irreducible = strongly_connected(P);
  out.period = out.irreducible ? graph_period(P) : 0;

  const std::size_t h = n / 2;
  out.bipartite_blocks = n % 2 == 0;
  for (std::size_t i = 0; i < n && out.bipartite_blocks; ++i)
    for (std::size_t j = 0; j < n; ++j)
      if ((i < h) == (j < h) && P[i][j] != 0) {
        out.bipartite_blocks = false;
        break;
      }
  RationalMatrix P2 = mat_mul(P, P);
  out.p2_block_diagonal = n % 2 == 0;
  for (std::size_t i = 0; i < n && out.p2_block_diagonal; ++i)
    for (std::size_t j = 0; j < n; ++j)
      if ((i < h) != (j < h) && P2[i][j] != 0) {
        out.p2_block_diagonal = false;
        break;
      }
  if (!out.p2_block_diagonal) return out;

  out.R.assign(h, std::vector<Rational>(h));
  out.S.assign(h, std::vector<Rational>(h));
  for (std::size_t i = 0; i < h; ++i)
    for (std::size_t j = 0; j < h; ++j) {
      out.R[i][j] = P2[i][j];
      out.S[i][j] = P2[h + i][h + j];
    }
  out.R_irreducible = strongly_connected(out.R);
  out.R_period = out.R_irreducible ? graph_period(out.R) : 0;
  out.limit = Rational(1, static_cast<long long>(h));
  if (!out.R_irreducible || out.R_period != 1) return out;

  // R is doubly stochastic here, so the limit is uniform
  RationalMatrix Rn = out.R;
  for (int k = 1; k <= 400; ++k) {
    double dev = 0.0;
    for (const auto& row : Rn)
      for (const auto& x : row) dev = std::max(dev, std::abs(static_cast<double>(x - out.limit)));
    out.deviation.push_back(dev);
    if (dev < 1e-12) {
      out.converged_at = k;
      break;
    }
    Rn = mat_mul(Rn, out.R);
  }
  return out;
}

ReturnCounts return_counts(const MatrixGroup& group, int n_max, int brute_max) {
  if (n_max < 1 || n_max > 12) throw std::invalid_argument("return counts: n_max must be in [1, 12]");
  brute_max = std::min(brute_max, n_max);
  ReturnCounts rc;
  TransitionMatrix tm = transition_matrix(group);
  const std::size_t id = static_cast<std::size_t>(group.identity);
  const std::uint64_t g = group.generators.size();
  RationalMatrix P2 = mat_mul(tm.P, tm.P);
  RationalMatrix Pn = P2;
  for (int n = 1; n <= n_max; ++n) {
    Rational c = Pn[id][id] * Rational(boost::multiprecision::cpp_int(ipow(g * g, n)));
    if (denominator(c) != 1) throw std::logic_error("return counts: non-integral count");
    rc.N.push_back(static_cast<std::uint64_t>(numerator(c)));
    rc.ratio.push_back(static_cast<double>(Pn[id][id]));
    if (n < n_max) Pn = mat_mul(Pn, P2);
  }

  // enumeration: distribution over elements after each symbol
  const std::size_t ord = group.order();
  std::vector<std::uint64_t> dist(ord, 0), next(ord);
  dist[id] = 1;
  for (int len = 1; len <= 2 * brute_max; ++len) {
    std::fill(next.begin(), next.end(), 0);
    for (std::size_t a = 0; a < ord; ++a)
      if (dist[a])
        for (int k : group.generators) next[static_cast<std::size_t>(group.table[a][static_cast<std::size_t>(k)])] += dist[a];
    dist.swap(next);
    if (len % 2 == 0) rc.brute.push_back(dist[id]);
  }
  for (int n = 1; n <= brute_max; ++n)
    if (rc.brute[static_cast<std::size_t>(n - 1)] != rc.N[static_cast<std::size_t>(n - 1)]) rc.brute_agrees = false;

  for (int n = n_max; n >= 1; --n) {
    // N_n >= 16^n / 12  <=>  12 N_n >= 16^n
    if (12 * rc.N[static_cast<std::size_t>(n - 1)] >= ipow(g * g, n))
      rc.N0 = n;
    else
      break;
  }
  return rc;
}

double t_hat(double s, int n) {
  if (n < 1) throw std::invalid_argument("t_hat: n must be >= 1");
  return 3.0 + std::log(s) / std::log(2.0) - std::log(12.0) / (2.0 * n * std::log(2.0));
}

std::vector<ExactVec2> gh_translations() {
  const DihedralScalar inv_r3(0, 1, 3);  // 1/sqrt3
  return {{kOne, inv_r3}, {-kOne, inv_r3}, {kZero, DihedralScalar(0, -2, 3)}, {kZero, kZero}};
}

GraphDirectedIFS build_gd_ifs(const MatrixGroup& group, double s, const ExactVec2& v) {
  if (!(s > 0.5 && s < 1.0)) throw std::invalid_argument("gd ifs: s must lie in (1/2, 1)");
  if (!group.listing_order) throw std::invalid_argument("gd ifs: needs the GH group");
  GraphDirectedIFS gd;
  gd.s = s;
  gd.translations = gh_translations();
  const std::size_t n = group.order();
  for (const auto& q : group.elements) gd.vertices.push_back(q.transpose() * v);
  gd.out_degree.assign(n, 0);
  gd.in_degree.assign(n, 0);
  for (std::size_t l = 0; l < n; ++l)
    for (std::size_t m = 0; m < n; ++m)
      for (std::size_t k = 0; k < group.generators.size(); ++k) {
        const auto& Qk = group.elements[static_cast<std::size_t>(group.generators[k])];
        if (gd.vertices[l] == Qk * gd.vertices[m]) {
          gd.edges.push_back({static_cast<int>(l), static_cast<int>(m), static_cast<int>(k),
                              dot(gd.vertices[l], gd.translations[k])});
          ++gd.out_degree[l];
          ++gd.in_degree[m];
        }
      }
  gd.degrees_ok = true;
  for (std::size_t l = 0; l < n; ++l) {
    if (gd.out_degree[l] != 4) {
      gd.degrees_ok = false;
      gd.violations.push_back("out-degree of v" + std::to_string(l + 1) + " is " + std::to_string(gd.out_degree[l]));
    }
    if (gd.in_degree[l] != 4) {
      gd.degrees_ok = false;
      gd.violations.push_back("in-degree of v" + std::to_string(l + 1) + " is " + std::to_string(gd.in_degree[l]));
    }
  }
  gd.offsets_distinct = true;
  for (std::size_t l = 0; l < n; ++l)
    for (std::size_t a = 0; a < gd.translations.size(); ++a)
      for (std::size_t b = a + 1; b < gd.translations.size(); ++b)
        if (dot(gd.vertices[l], gd.translations[a]) == dot(gd.vertices[l], gd.translations[b])) {
          gd.offsets_distinct = false;
          gd.violations.push_back("v" + std::to_string(l + 1) + ".t" + std::to_string(a + 1) + " = v" +
                                  std::to_string(l + 1) + ".t" + std::to_string(b + 1));
        }
  return gd;
}

double gd_projection_residual(const GraphDirectedIFS& gd, const std::vector<Affine2>& canonical,
                              const std::vector<Vec2>& points) {
  if (canonical.size() != gd.translations.size()) throw std::invalid_argument("gd residual: map count mismatch");
  auto vd = [](const ExactVec2& v) { return Vec2(v[0].to_double(), v[1].to_double()); };
  double worst = 0.0;
  for (const auto& e : gd.edges) {
    Vec2 vl = vd(gd.vertices[static_cast<std::size_t>(e.from)]);
    Vec2 vm = vd(gd.vertices[static_cast<std::size_t>(e.to)]);
    const Affine2& h = canonical[static_cast<std::size_t>(e.k)];
    for (const auto& x : points) worst = std::max(worst, std::abs(gd.apply(e, vm.dot(x)) - vl.dot(h(x))));
  }
  return worst;
}

std::string matrix_csv(const RationalMatrix& m) {
  std::ostringstream os;
  for (const auto& row : m) {
    for (std::size_t j = 0; j < row.size(); ++j) os << (j ? "," : "") << row[j];
    os << "\n";
  }
  return os.str();
}

}  // namespace fsl
