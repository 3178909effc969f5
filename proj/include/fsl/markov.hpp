#pragma once

#include "fsl/cfs.hpp"
#include "fsl/geometry.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace fsl {

struct MatrixGroup {
  std::vector<ExactMat2> elements;
  std::vector<int> generators;         // indices into elements
  std::vector<std::vector<int>> table; // table[a][b] = index of elements[a] * elements[b]
  int identity = 0;
  bool listing_order = false;            // elements[i] is Q_{i+1} of the GH listing

  std::size_t order() const { return elements.size(); }
  int index_of(const ExactMat2& m) const;  // -1 if absent
  std::string label(int i) const;
};

// The four linear parts of the GH Furstenberg maps
std::vector<ExactMat2> gh_generators();
// Q1..Q12 of the GH listing
std::vector<ExactMat2> gh_group_listing();

constexpr std::size_t kClosureCap = 1024;

// Breadth-first closure. Generators equal to the GH ones are reordered to the listing.
MatrixGroup group_closure(const std::vector<ExactMat2>& generators);

struct TransitionMatrix {
  std::vector<int> ordering;                 // element indices, row/column order
  std::vector<std::vector<Rational>> P;

  std::size_t size() const { return P.size(); }
};

// {Q5..Q10, Q1..Q4, Q11, Q12} as 0-based indices of the GH listing
std::vector<int> gh_bipartite_ordering();

TransitionMatrix transition_matrix(const MatrixGroup& group, const std::vector<int>& ordering = {});

using RationalMatrix = std::vector<std::vector<Rational>>;
RationalMatrix mat_mul(const RationalMatrix& a, const RationalMatrix& b);
RationalMatrix mat_pow(const RationalMatrix& a, int n);

struct ChainAnalysis {
  int period = 0;
  bool irreducible = false;
  bool bipartite_blocks = false;      // P has zero diagonal blocks in the given ordering
  bool p2_block_diagonal = false;
  RationalMatrix R;                    // leading block of P^2
  RationalMatrix S;
  bool R_irreducible = false;
  int R_period = 0;
  Rational limit;                      // common limit entry of R^n
  int converged_at = -1;               // first n with max |R^n - limit| < 1e-12
  std::vector<double> deviation;       // max deviation for n = 1..converged_at
};

ChainAnalysis chain_analysis(const TransitionMatrix& tm);

struct ReturnCounts {
  std::vector<std::uint64_t> N;        // N[n-1] = N_n
  std::vector<std::uint64_t> brute;    // enumeration for n <= brute_max
  bool brute_agrees = true;
  int N0 = -1;                         // minimal n with N_m >= 16^m / 12 for all computed m >= n
  std::vector<double> ratio;           // N_n / 16^n
};

// N_n = #{tau in gens^(2n) : Q_tau = Id}
ReturnCounts return_counts(const MatrixGroup& group, int n_max, int brute_max = 5);

double t_hat(double s, int n);

struct GdEdge {
  int from = 0;  // element index
  int to = 0;
  int k = 0;     // generator position, 0-based
  DihedralScalar offset;  // v_from . t_k
};

struct GraphDirectedIFS {
  double s = 0.0;
  std::vector<ExactVec2> vertices;     // v_l = Q_l^T v
  std::vector<ExactVec2> translations; // t_1..t_4
  std::vector<GdEdge> edges;
  std::vector<int> out_degree;
  std::vector<int> in_degree;
  bool degrees_ok = false;
  bool offsets_distinct = false;
  std::vector<std::string> violations;

  double ratio() const { return 1.0 / (2.0 * s); }
  double apply(const GdEdge& e, double x) const { return ratio() * x + e.offset.to_double(); }
};

// Translations of the GH canonical Furstenberg maps, exact
std::vector<ExactVec2> gh_translations();

GraphDirectedIFS build_gd_ifs(const MatrixGroup& group, double s, const ExactVec2& v = {DihedralScalar::integer(1),
                                                                                         DihedralScalar::integer(1)});

// Largest |f_e(v_m . x) - v_l . h_k(x)| over the sample, using the canonical maps at the same s
double gd_projection_residual(const GraphDirectedIFS& gd, const std::vector<Affine2>& canonical,
                              const std::vector<Vec2>& points);

std::string matrix_csv(const RationalMatrix& m);

}  // namespace fsl
