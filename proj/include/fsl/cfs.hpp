#pragma once

#include "fsl/furstenberg.hpp"

#include <boost/multiprecision/cpp_int.hpp>

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace fsl {

using Rational = boost::multiprecision::cpp_rational;

enum class CfsClass { I0 = 0, I1 = 1, I2 = 2 };

struct CFSSystem {
  std::vector<CfsClass> cls;
  std::vector<double> lambda;
  std::vector<double> gamma;  // 0 on I0
  // exact parameters, when given
  std::optional<std::vector<Rational>> lambda_q;
  std::optional<std::vector<Rational>> gamma_q;

  std::size_t size() const { return cls.size(); }
  double apply(std::size_t i, double x) const;
  Rational apply_exact(std::size_t i, const Rational& x) const;
  bool exact() const { return lambda_q.has_value() && gamma_q.has_value(); }
  void validate() const;
};

// From exact rationals; double fields are filled from them.
CFSSystem make_exact_cfs(const std::vector<CfsClass>& cls, const std::vector<Rational>& lambda,
                         const std::vector<Rational>& gamma);

using Word = std::vector<int>;  // 0-based symbols

std::string word_string(const Word& w);  // 1-based digits separated by nothing when < 10

CFSSystem from_projected_x(const ProjectedSystem& sys);

struct CfsConstants {
  std::optional<double> B;
  std::optional<double> D;
};
CfsConstants cfs_constants(const CFSSystem& sys);

struct LemmaA {
  double A = 0.0;
  bool verified = false;
  std::vector<std::string> failures;
};
LemmaA lemma_A_constant(const CFSSystem& sys);

double natural_projection(const CFSSystem& sys, const Word& w);
Rational natural_projection_exact(const CFSSystem& sys, const Word& w);

struct Block {
  bool fixed_run = false;  // a run of I0 symbols
  Word symbols;
};
using BlockDecomposition = std::vector<Block>;

BlockDecomposition block_decompose(const Word& w, const CFSSystem& sys);
bool same_block_structure(const Word& u, const Word& v, const CFSSystem& sys);

struct EscOptions {
  int n = 3;
  double b = 10.0;
  std::uint64_t budget = 531441;  // 9^(2*3)
  std::uint64_t seed = 1;
};

struct EscViolation {
  Word u;
  Word v;
  double distance = 0.0;
  bool exact_equal = false;
};

struct EscReport {
  std::vector<EscViolation> violations;
  std::uint64_t words = 0;
  std::uint64_t candidate_pairs = 0;  // equal contraction, different blocks
  std::uint64_t examined_pairs = 0;
  bool exhaustive = true;
  double coverage = 1.0;
  double threshold = 0.0;
};

EscReport esc_violation_search(const CFSSystem& sys, const EscOptions& opt);

}  // namespace fsl
