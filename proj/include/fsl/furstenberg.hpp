#pragma once

#include "fsl/attractor.hpp"
#include "fsl/dimension.hpp"
#include "fsl/geometry.hpp"
#include "fsl/surface.hpp"

#include <json.hpp>

#include <optional>
#include <string>
#include <vector>

namespace fsl {

struct FurstenbergIFS {
  Construction kind = Construction::Massopust;
  int N = 3;
  std::vector<double> s;
  std::vector<Affine2> maps;        // (lambda/s_i) U_i^T x - grad_i / s_i
  std::vector<double> weights;      // s_i lambda^(t0-1)
  std::vector<double> ratios;       // lambda / s_i
  double t0 = 0.0;
  double conj = 1.0;                // maps = conj * canonical(x / conj)
  std::vector<Affine2> canonical;   // Geronimo-Hardin normal form, empty otherwise
  // N = 3 with a single positive interior peak: the layout the interval lemmas speak about
  bool peak_layout = false;
  double peak = 0.0;

  double p_min() const;
  double ratio_max() const;
};

FurstenbergIFS build_furstenberg(const SurfaceIFS& ifs);
std::vector<Affine2> gh_canonical_maps(double s);

// preconditions on the planar part
struct SoscWitness {
  bool ok = false;
  double area_defect = 0.0;
  int overlapping_pairs = 0;
  bool interior_mapped = false;
};
SoscWitness sosc_witness(const SurfaceIFS& ifs);

enum class Axis { X, Y };

struct ProjectedSystem {
  Axis axis = Axis::X;
  std::vector<double> slope;
  std::vector<double> offset;
  std::vector<double> fixed;
  std::vector<double> s;
  bool peak_layout = false;
  double peak = 0.0;

  std::size_t size() const { return slope.size(); }
  double apply(std::size_t i, double x) const { return slope[i] * x + offset[i]; }
  std::pair<double, double> image(std::size_t i, double lo, double hi) const;
};

ProjectedSystem project_1d(const FurstenbergIFS& fifs, Axis axis);

struct IntervalResult {
  double lo = 0.0;
  double hi = 0.0;
  bool contained = false;
  double worst_excess = 0.0;
  std::string method;   // "lemma" or "hull"
  std::string branch;
  std::vector<int> violators;  // 1-based
};

IntervalResult hull_interval(const ProjectedSystem& sys);
IntervalResult invariant_interval(const ProjectedSystem& sys);

struct Disjointness {
  bool disjoint = false;
  double min_gap = 0.0;  // negative = interior overlap length
  bool touching = false;
};

// (f_l[I] for l in left) vs (f_r[I] for r in right); indices 1-based
Disjointness interval_disjointness(const ProjectedSystem& sys, const IntervalResult& iv,
                                   const std::vector<int>& left = {4, 7}, const std::vector<int>& right = {5, 8});

struct InvariantHexagon {
  Vec2 A, B, C, Ap, Bp, Cp;
  ConvexPolygon polygon;
  bool contained = false;
  std::vector<std::string> failures;
};

InvariantHexagon gh_hexagon(double s);

struct OverlapCertificate {
  int Q = 0;
  int depth = 0;
  int n_maps = 0;
  std::string method;
  std::vector<int> witness;  // deepest subset, 1-based
  bool hypotheses = true;
  std::vector<std::string> notes;
};

struct GhOverlap {
  OverlapCertificate cert;
  bool triple_123_empty = false;
  bool above_threshold = false;
  Vec2 A1p, B2p, C3p;
};

GhOverlap overlap_certificate_gh(double s);

struct Box {
  double x0, x1, y0, y1;
};

struct MassopustOverlap {
  OverlapCertificate cert;
  std::vector<Box> boxes;
  IntervalResult x_interval;
  IntervalResult y_interval;
};

struct OverlapHypotheses {
  bool ok = false;
  std::vector<std::string> reasons;
};
OverlapHypotheses overlap_hypotheses(const FurstenbergIFS& fifs);

MassopustOverlap overlap_certificate_massopust3(const FurstenbergIFS& fifs);
int box_arrangement_depth(const std::vector<Box>& boxes);

double covering_lower_bound(double Q, double p_min, double lambda_max);

struct EmpiricalOverlap {
  int depth = 0;
  int Q = 0;
  std::size_t samples = 0;
};

EmpiricalOverlap empirical_overlap(const std::vector<ConvexPolygon>& regions, const PointCloud2& cloud,
                                   double tol = 1e-9);
EmpiricalOverlap empirical_overlap(const std::vector<Box>& regions, const PointCloud2& cloud, double tol = 1e-9);
// samples the Furstenberg measure and counts against the certificate regions of its route
EmpiricalOverlap empirical_overlap(const FurstenbergIFS& fifs, std::size_t samples, std::uint64_t seed,
                                   int workers = 0);

enum class Verdict { Certified, HypothesesUnmet, BoundInsufficient };
std::string to_string(Verdict v);

struct PipelineResult {
  Verdict verdict = Verdict::HypothesesUnmet;
  double t0 = 0.0;
  double bound = 0.0;
  double target = 0.0;  // 3 - t0
  int Q = 0;
  nlohmann::json trace = nlohmann::json::object();
};

PipelineResult certificate_pipeline(const SurfaceIFS& ifs);

struct FurstDimae {
  bool positive = false;
  double value = 0.0;
  EntropyBound bound;
};

FurstDimae furstdimae_inequality(const SurfaceIFS& ifs);

}  // namespace fsl
