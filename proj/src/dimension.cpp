#include "fsl/dimension.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace fsl {

double singular_value_function(const Mat3& A, double t) {
  if (!A.allFinite()) throw std::invalid_argument("singular value function: non-finite matrix");
  if (!(t >= 0.0)) throw std::invalid_argument("singular value function: t must be >= 0");
  if (t > 3.0) return std::pow(std::abs(A.determinant()), t / 3.0);
  Eigen::Vector3d sv = Eigen::JacobiSVD<Mat3>(A).singularValues();  // descending
  int k = static_cast<int>(std::floor(t));
  double phi = 1.0;
  for (int j = 0; j < k; ++j) phi *= sv(j);
  if (k < 3) {
    double frac = t - k;
    if (frac > 0.0) phi *= std::pow(sv(k), frac);
  }
  return phi;
}

BisectionResult bisect_decreasing(const std::function<double(double)>& f, double lo, double hi, int max_iter) {
  double flo = f(lo);
  if (!(flo > 0.0)) {
    if (flo == 0.0) return {lo, 0.0, 0};
    std::ostringstream os;
    os << "no bracket: f(" << lo << ") = " << flo << " is not positive";
    throw std::runtime_error(os.str());
  }
  int expand = 0;
  while (f(hi) > 0.0) {
    lo = hi;
    hi *= 2.0;
    if (++expand > 200 || !std::isfinite(hi)) throw std::runtime_error("no bracket: function stays positive");
  }
  BisectionResult res;
  for (int it = 0; it < max_iter; ++it) {
    double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    double fm = f(mid);
    res.iterations = it + 1;
    if (fm > 0.0)
      lo = mid;
    else if (fm < 0.0)
      hi = mid;
    else {
      lo = hi = mid;
      break;
    }
  }
  double a = std::abs(f(lo)), b = std::abs(f(hi));
  res.root = a <= b ? lo : hi;
  res.residual = std::min(a, b);
  return res;
}

AffinitySolution affinity_dimension(const std::vector<double>& s, const std::vector<double>& lambda) {
  if (s.empty() || s.size() != lambda.size()) throw std::invalid_argument("affinity dimension: size mismatch");
  for (std::size_t i = 0; i < s.size(); ++i)
    if (!(s[i] > 0 && s[i] < 1 && lambda[i] > 0 && lambda[i] < 1))
      throw std::invalid_argument("affinity dimension: parameters outside (0,1)");
  auto p1 = [&](double r) {
    double sum = 0.0;
    for (double x : s) sum += std::pow(x, r);
    return sum - 1.0;
  };
  auto p2 = [&](double r) {
    double sum = 0.0;
    for (std::size_t i = 0; i < s.size(); ++i) sum += s[i] * std::pow(lambda[i], r - 1.0);
    return sum - 1.0;
  };
  AffinitySolution out;
  auto b1 = bisect_decreasing(p1, 0.0, 1.0);
  auto b2 = bisect_decreasing(p2, 0.0, 1.0);
  out.r1 = b1.root;
  out.r2 = b2.root;
  out.residual_r1 = b1.residual;
  out.residual_r2 = b2.residual;
  out.iterations = std::max(b1.iterations, b2.iterations);
  out.branch = out.r2 <= out.r1 ? Branch::R2 : Branch::R1;
  out.t0 = std::min(out.r1, out.r2);
  out.r2_in_band = out.branch == Branch::R2 && out.r2 >= 2.0 && out.r2 <= 3.0;
  return out;
}

AffinitySolution affinity_dimension(const SurfaceIFS& ifs) {
  double sum_l2 = ifs.lambda * ifs.lambda * static_cast<double>(ifs.size());
  if (std::abs(sum_l2 - 1.0) > 1e-12) throw std::invalid_argument("affinity dimension: sum of lambda^2 != 1");
  return affinity_dimension(ifs.s, std::vector<double>(ifs.size(), ifs.lambda));
}

ClosedFormResult closed_form_dimension(ClosedForm kind, const std::vector<double>& params) {
  ClosedFormResult out;
  switch (kind) {
    case ClosedForm::Massopust: {
      if (params.size() != 2) throw std::invalid_argument("closed form: expected {N, sum s}");
      double N = params[0], sum = params[1];
      out.value = 1.0 + std::log(sum) / std::log(N);
      if (!(sum > N && sum < N * N)) {
        out.in_range = false;
        out.warning = "sum of scalings outside (N, N^2)";
      }
      break;
    }
    case ClosedForm::GeronimoHardin: {
      if (params.size() != 1) throw std::invalid_argument("closed form: expected {s}");
      double s = params[0];
      out.value = 3.0 + std::log(s) / std::log(2.0);
      if (!(s >= (1.0 + std::sqrt(5.0)) / 4.0 && s < 1.0)) {
        out.in_range = false;
        out.warning = "s outside [(1+sqrt5)/4, 1)";
      }
      break;
    }
    case ClosedForm::UniformThird: {
      if (params.size() != 1) throw std::invalid_argument("closed form: expected {s}");
      double s = params[0];
      out.value = 3.0 + std::log(s) / std::log(3.0);
      if (!(s > 1.0 / 3.0 && s < 1.0)) {
        out.in_range = false;
        out.warning = "s outside (1/3, 1)";
      }
      break;
    }
  }
  return out;
}

double closed_form_dimension(const SurfaceIFS& ifs) {
  if (ifs.kind == Construction::GeronimoHardin)
    return closed_form_dimension(ClosedForm::GeronimoHardin, {ifs.s.front()}).value;
  double sum = std::accumulate(ifs.s.begin(), ifs.s.end(), 0.0);
  return closed_form_dimension(ClosedForm::Massopust, {static_cast<double>(ifs.N), sum}).value;
}

SlopeFit box_dimension_fit(const OccupancyTable& table, std::size_t first, std::size_t last) {
  if (table.deltas.size() != table.counts.size()) throw std::invalid_argument("box fit: malformed table");
  if (last >= table.deltas.size() || first > last) throw std::invalid_argument("box fit: bad range");
  std::vector<double> x, y;
  for (std::size_t i = first; i <= last; ++i) {
    if (table.counts[i] == 0 || !(table.deltas[i] > 0)) continue;
    x.push_back(-std::log(table.deltas[i]));
    y.push_back(std::log(static_cast<double>(table.counts[i])));
  }
  if (x.size() < 3) throw std::invalid_argument("box fit: fewer than 3 usable scales");
  const double n = static_cast<double>(x.size());
  double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
  double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
  double sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  SlopeFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  double sse = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    double e = y[i] - fit.intercept - fit.slope * x[i];
    sse += e * e;
  }
  fit.stderr_ = std::sqrt(sse / (n - 2.0) / sxx);
  fit.used = x.size();
  return fit;
}

SlopeFit box_dimension_fit(const OccupancyTable& table) {
  if (table.deltas.empty()) throw std::invalid_argument("box fit: empty table");
  return box_dimension_fit(table, 0, table.deltas.size() - 1);
}

EntropyBound entropy_lyapunov_bound(const std::vector<double>& p, const std::vector<double>& ratios,
                                    const std::vector<bool>& fixed_class) {
  if (p.size() != ratios.size()) throw std::invalid_argument("entropy bound: size mismatch");
  if (!fixed_class.empty() && fixed_class.size() != p.size())
    throw std::invalid_argument("entropy bound: class mask size mismatch");
  double total = std::accumulate(p.begin(), p.end(), 0.0);
  if (std::abs(total - 1.0) > 1e-12) throw std::invalid_argument("entropy bound: probabilities must sum to 1");
  EntropyBound out;
  double other = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i)
    if (!fixed_class.empty() && !fixed_class[i]) other += p[i];
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (!(ratios[i] > 0 && ratios[i] < 1)) throw std::invalid_argument("entropy bound: ratio outside (0,1)");
    if (p[i] < 0) throw std::invalid_argument("entropy bound: negative probability");
    if (p[i] == 0) {
      out.warnings.push_back("zero probability entry " + std::to_string(i) + " removed");
      continue;
    }
    out.entropy -= p[i] * std::log(p[i]);
    out.lyapunov -= p[i] * std::log(ratios[i]);
    if (!fixed_class.empty() && fixed_class[i]) out.phi += p[i] * std::log(p[i] + other);
  }
  out.plain = out.entropy / out.lyapunov;
  out.corrected = (out.entropy + out.phi) / out.lyapunov;
  out.plain_clipped = std::min(1.0, out.plain);
  out.corrected_clipped = std::min(1.0, out.corrected);
  return out;
}

std::vector<double> constant_data_multiplicities(long long N) {
  double n = static_cast<double>(N);
  return {(n - 3) * (n - 2) / 2 + 3, (n - 4) * (n - 3) / 2, n - 2, n - 2, n - 2, n - 2, n - 3, n - 2, 1};
}

std::vector<ProfileClass> plateau_profile(long long N) {
  if (N < 3) throw std::invalid_argument("plateau profile: N must be >= 3");
  double n = static_cast<double>(N);
  std::vector<ProfileClass> all = {
      {(n - 3) * (n - 2) / 2 + 3, true},  // corner and interior up triangles
      {N >= 4 ? (n - 4) * (n - 3) / 2 : 0.0, true},  // interior down triangles
      {n - 2, true},  {n - 2, false}, {n - 2, false},  // bottom row, left and right edges (up)
      {n - 3, true},  {n - 3, false}, {n - 3, false},  // the same edges (down)
      {1, false},     {1, false},     {1, true},       // down triangles at the corners
  };
  std::vector<ProfileClass> out;
  for (const auto& c : all)
    if (c.multiplicity > 0) out.push_back(c);
  return out;
}

namespace {

// sign-change bisection for continuous g on [lo, hi] with g(lo), g(hi) of opposite sign
double bisect_sign(const std::function<double(double)>& g, double lo, double hi) {
  double glo = g(lo);
  for (int it = 0; it < 200; ++it) {
    double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    double gm = g(mid);
    if ((gm > 0) == (glo > 0)) {
      lo = mid;
      glo = gm;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

}  // namespace

FailureInterval failure_interval(long long N, ProfileVariant variant) {
  if (N < 5) throw std::invalid_argument("failure interval: N must be >= 5");
  const double n2 = static_cast<double>(N) * static_cast<double>(N);
  FailureInterval out;
  if (variant == ProfileVariant::Plain) {
    for (double m : constant_data_multiplicities(N))
      if (m > 0) out.entropy -= (m / n2) * std::log(m / n2);
  } else {
    auto prof = plateau_profile(N);
    double other = 0.0;
    for (const auto& c : prof)
      if (!c.common_fixed_point) other += c.multiplicity / n2;
    for (const auto& c : prof) {
      double q = c.multiplicity / n2;
      out.entropy -= q * std::log(q);
      if (variant == ProfileVariant::PlateauPhi && c.common_fixed_point) out.phi += q * std::log(q + other);
    }
  }
  const double H = out.entropy + out.phi;
  const double L = std::log(static_cast<double>(N));
  // u = log s in (-L, 0); failure where H/(u+L) < -u/L
  auto g = [&](double u) { return H / (u + L) + u / L; };
  const double mid = -0.5 * L;
  if (!(g(mid) < 0.0)) {
    out.empty = true;
    return out;
  }
  double lo_edge = -L + 1e-15 * L;
  int guard = 0;
  while (!(g(lo_edge) > 0.0) && ++guard < 60) lo_edge = 0.5 * (lo_edge + (-L));
  double u_lo = g(lo_edge) > 0.0 ? bisect_sign(g, lo_edge, mid) : -L;
  double u_hi = bisect_sign(g, mid, 0.0);
  out.s_lo = std::exp(u_lo);
  out.s_hi = std::exp(u_hi);
  return out;
}

}  // namespace fsl
