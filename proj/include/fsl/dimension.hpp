#pragma once

#include "fsl/attractor.hpp"
#include "fsl/surface.hpp"

#include <array>
#include <functional>
#include <string>
#include <utility>
#include <vector>

namespace fsl {

double singular_value_function(const Mat3& A, double t);

enum class Branch { R1, R2 };

struct AffinitySolution {
  double t0 = 0.0;
  double r1 = 0.0;
  double r2 = 0.0;
  Branch branch = Branch::R2;
  double residual_r1 = 0.0;
  double residual_r2 = 0.0;
  int iterations = 0;
  bool r2_in_band = false;  // t0 == r2 and r2 in [2,3]
};

// Root of a strictly decreasing function on [0, inf) by bracket expansion and bisection.
struct BisectionResult {
  double root = 0.0;
  double residual = 0.0;
  int iterations = 0;
};
BisectionResult bisect_decreasing(const std::function<double(double)>& f, double lo, double hi,
                                  int max_iter = 200);

AffinitySolution affinity_dimension(const SurfaceIFS& ifs);
AffinitySolution affinity_dimension(const std::vector<double>& s, const std::vector<double>& lambda);

enum class ClosedForm { Massopust, GeronimoHardin, UniformThird };

struct ClosedFormResult {
  double value = 0.0;
  bool in_range = true;
  std::string warning;
};

// Massopust: params = {N, sum s}; GeronimoHardin: {s}; UniformThird: {s}
ClosedFormResult closed_form_dimension(ClosedForm kind, const std::vector<double>& params);
double closed_form_dimension(const SurfaceIFS& ifs);

struct SlopeFit {
  double slope = 0.0;
  double stderr_ = 0.0;
  double intercept = 0.0;
  std::size_t used = 0;
};

// OLS of log N against log(1/delta) over table rows [first, last]
SlopeFit box_dimension_fit(const OccupancyTable& table, std::size_t first, std::size_t last);
SlopeFit box_dimension_fit(const OccupancyTable& table);

struct EntropyBound {
  double entropy = 0.0;     // nats
  double lyapunov = 0.0;    // -sum p log ratio
  double plain = 0.0;       // H / chi
  double phi = 0.0;         // lower estimate of the correction term
  double corrected = 0.0;   // (H + phi) / chi
  double plain_clipped = 0.0;
  double corrected_clipped = 0.0;
  std::vector<std::string> warnings;
};

// fixed_class[i] true marks a map sharing the common fixed point (class A1)
EntropyBound entropy_lyapunov_bound(const std::vector<double>& p, const std::vector<double>& ratios,
                                    const std::vector<bool>& fixed_class = {});

struct ProfileClass {
  double multiplicity = 0.0;
  bool common_fixed_point = false;
};

// the nine-class profile for constant interior data
std::vector<double> constant_data_multiplicities(long long N);
// distinct Furstenberg maps of the plateau construction, with A1 labels
std::vector<ProfileClass> plateau_profile(long long N);

enum class ProfileVariant { Plain, PlateauPlain, PlateauPhi };

struct FailureInterval {
  bool empty = false;
  double s_lo = 0.0;
  double s_hi = 0.0;
  double entropy = 0.0;
  double phi = 0.0;
};

FailureInterval failure_interval(long long N, ProfileVariant variant = ProfileVariant::Plain);

}  // namespace fsl
