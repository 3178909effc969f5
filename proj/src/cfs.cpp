#include "fsl/cfs.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>
#include <stdexcept>
#include <tuple>

namespace fsl {

double CFSSystem::apply(std::size_t i, double x) const {
  switch (cls[i]) {
    case CfsClass::I0:
      return lambda[i] * x;
    case CfsClass::I1:
      return lambda[i] * x + gamma[i] * lambda[i];
    case CfsClass::I2:
      return -lambda[i] * x + gamma[i] * lambda[i];
  }
  return 0.0;
}

Rational CFSSystem::apply_exact(std::size_t i, const Rational& x) const {
  const Rational& l = (*lambda_q)[i];
  const Rational& g = (*gamma_q)[i];
  switch (cls[i]) {
    case CfsClass::I0:
      return l * x;
    case CfsClass::I1:
      return l * x + g * l;
    case CfsClass::I2:
      return -l * x + g * l;
  }
  return Rational(0);
}

void CFSSystem::validate() const {
  if (cls.empty()) throw std::invalid_argument("cfs: empty system");
  if (lambda.size() != cls.size() || gamma.size() != cls.size()) throw std::invalid_argument("cfs: size mismatch");
  for (std::size_t i = 0; i < cls.size(); ++i) {
    if (!(lambda[i] > 0.0 && lambda[i] < 1.0)) throw std::invalid_argument("cfs: lambda outside (0,1)");
    if (cls[i] == CfsClass::I0 && gamma[i] != 0.0) throw std::invalid_argument("cfs: gamma given on I0");
    if (cls[i] != CfsClass::I0 && !(gamma[i] > 0.0)) throw std::invalid_argument("cfs: gamma must be positive");
  }
}

CFSSystem make_exact_cfs(const std::vector<CfsClass>& cls, const std::vector<Rational>& lambda,
                         const std::vector<Rational>& gamma) {
  CFSSystem sys;
  sys.cls = cls;
  sys.lambda_q = lambda;
  sys.gamma_q = gamma;
  for (const auto& l : lambda) sys.lambda.push_back(static_cast<double>(l));
  for (const auto& g : gamma) sys.gamma.push_back(static_cast<double>(g));
  sys.validate();
  return sys;
}

std::string word_string(const Word& w) {
  bool wide = std::any_of(w.begin(), w.end(), [](int s) { return s >= 9; });
  std::string out;
  for (std::size_t k = 0; k < w.size(); ++k) {
    if (wide && k) out += '.';
    out += std::to_string(w[k] + 1);
  }
  return out;
}

CFSSystem from_projected_x(const ProjectedSystem& sys) {
  if (sys.axis != Axis::X) throw std::invalid_argument("cfs: expected the X projection");
  CFSSystem c;
  double scale = 1.0;
  for (double o : sys.offset) scale = std::max(scale, std::abs(o));
  for (std::size_t i = 0; i < sys.size(); ++i) {
    double l = std::abs(sys.slope[i]);
    double off = sys.offset[i];
    c.lambda.push_back(l);
    if (std::abs(off) <= 1e-15 * scale) {
      c.cls.push_back(CfsClass::I0);
      c.gamma.push_back(0.0);
    } else {
      c.cls.push_back(sys.slope[i] > 0 ? CfsClass::I1 : CfsClass::I2);
      c.gamma.push_back(off / l);
    }
  }
  c.validate();
  return c;
}

CfsConstants cfs_constants(const CFSSystem& sys) {
  CfsConstants out;
  double lo2 = INFINITY, hi2 = 0.0;
  for (std::size_t i = 0; i < sys.size(); ++i)
    if (sys.cls[i] == CfsClass::I2) {
      lo2 = std::min(lo2, sys.gamma[i]);
      hi2 = std::max(hi2, sys.gamma[i]);
    }
  bool has2 = hi2 > 0.0;
  if (has2) out.D = lo2 / hi2;
  double maxB = 0.0;
  bool has1 = false;
  for (std::size_t i = 0; i < sys.size(); ++i)
    if (sys.cls[i] == CfsClass::I1) {
      has1 = true;
      if (has2) maxB = std::max(maxB, sys.gamma[i] / lo2);
    }
  if (has1) out.B = 1.0 / (1.0 + maxB);
  return out;
}

LemmaA lemma_A_constant(const CFSSystem& sys) {
  sys.validate();
  LemmaA out;
  for (std::size_t i = 0; i < sys.size(); ++i) {
    double gl = sys.gamma[i] * sys.lambda[i];
    if (sys.cls[i] == CfsClass::I2) out.A = std::max(out.A, gl);
    if (sys.cls[i] == CfsClass::I1) out.A = std::max(out.A, gl / (1.0 - sys.lambda[i]));
  }
  CfsConstants k = cfs_constants(sys);
  out.verified = true;
  for (std::size_t i = 0; i < sys.size(); ++i) {
    if (sys.cls[i] == CfsClass::I0) continue;
    std::string tag = "f" + std::to_string(i + 1);
    if (sys.cls[i] == CfsClass::I1 && k.B && !(sys.lambda[i] < *k.B)) out.failures.push_back(tag + ": lambda >= B");
    if (sys.cls[i] == CfsClass::I2 && k.D && !(sys.lambda[i] < *k.D)) out.failures.push_back(tag + ": lambda >= D");
    double a = sys.apply(i, 0.0), b = sys.apply(i, out.A);
    double lo = std::min(a, b), hi = std::max(a, b);
    if (!(lo > 1e-12 * std::max(1.0, out.A))) out.failures.push_back(tag + ": image reaches 0");
    if (hi > out.A * (1.0 + 1e-12)) out.failures.push_back(tag + ": image exceeds A");
  }
  out.verified = out.failures.empty();
  return out;
}

double natural_projection(const CFSSystem& sys, const Word& w) {
  if (w.empty()) throw std::invalid_argument("natural projection: empty word");
  double x = 0.0;
  for (auto it = w.rbegin(); it != w.rend(); ++it) x = sys.apply(static_cast<std::size_t>(*it), x);
  return x;
}

Rational natural_projection_exact(const CFSSystem& sys, const Word& w) {
  if (!sys.exact()) throw std::invalid_argument("natural projection: system has no exact parameters");
  if (w.empty()) throw std::invalid_argument("natural projection: empty word");
  Rational x(0);
  for (auto it = w.rbegin(); it != w.rend(); ++it) x = sys.apply_exact(static_cast<std::size_t>(*it), x);
  return x;
}

BlockDecomposition block_decompose(const Word& w, const CFSSystem& sys) {
  BlockDecomposition out;
  for (int sym : w) {
    bool fixed = sys.cls.at(static_cast<std::size_t>(sym)) == CfsClass::I0;
    if (!out.empty()) {
      Block& last = out.back();
      if (fixed && last.fixed_run) {
        last.symbols.push_back(sym);
        continue;
      }
      if (!fixed && !last.fixed_run && last.symbols.front() == sym) {
        last.symbols.push_back(sym);
        continue;
      }
    }
    out.push_back({fixed, {sym}});
  }
  return out;
}

namespace {

std::string block_key(const Word& w, const CFSSystem& sys) {
  std::string key;
  for (auto b : block_decompose(w, sys)) {
    if (b.fixed_run) {
      std::sort(b.symbols.begin(), b.symbols.end());
      key += "F";
      for (int s : b.symbols) key += std::to_string(s) + ",";
    } else {
      key += "S" + std::to_string(b.symbols.front()) + "x" + std::to_string(b.symbols.size());
    }
    key += "|";
  }
  return key;
}

}  // namespace

bool same_block_structure(const Word& u, const Word& v, const CFSSystem& sys) {
  return block_key(u, sys) == block_key(v, sys);
}

EscReport esc_violation_search(const CFSSystem& sys, const EscOptions& opt) {
  sys.validate();
  if (opt.n < 1) throw std::invalid_argument("esc: n must be >= 1");
  const std::size_t k = sys.size();
  double total = std::pow(static_cast<double>(k), opt.n);
  if (total > 4e6) throw std::invalid_argument("esc: too many words at this depth");
  const std::size_t W = static_cast<std::size_t>(std::llround(total));
  const bool exact = sys.exact();

  EscReport rep;
  rep.words = W;
  rep.threshold = std::pow(2.0, -opt.b * opt.n);

  std::vector<Word> words(W, Word(static_cast<std::size_t>(opt.n)));
  for (std::size_t idx = 0; idx < W; ++idx) {
    std::size_t x = idx;
    for (int p = opt.n - 1; p >= 0; --p) {
      words[idx][static_cast<std::size_t>(p)] = static_cast<int>(x % k);
      x /= k;
    }
  }
  std::vector<std::string> keys(W);
  std::vector<double> proj(W), logl(W);
  std::vector<Rational> proj_q, lam_q;
  if (exact) {
    proj_q.resize(W);
    lam_q.resize(W);
  }
  for (std::size_t i = 0; i < W; ++i) {
    keys[i] = block_key(words[i], sys);
    proj[i] = natural_projection(sys, words[i]);
    double l = 0.0;
    for (int s : words[i]) l += std::log(sys.lambda[static_cast<std::size_t>(s)]);
    logl[i] = l;
    if (exact) {
      proj_q[i] = natural_projection_exact(sys, words[i]);
      Rational lp(1);
      for (int s : words[i]) lp *= (*sys.lambda_q)[static_cast<std::size_t>(s)];
      lam_q[i] = lp;
    }
  }

  // groups of words with equal contraction
  std::vector<std::vector<std::size_t>> groups;
  if (exact) {
    std::map<Rational, std::vector<std::size_t>> by;
    for (std::size_t i = 0; i < W; ++i) by[lam_q[i]].push_back(i);
    for (auto& [_, g] : by)
      if (g.size() > 1) groups.push_back(std::move(g));
  } else {
    std::vector<std::size_t> order(W);
    for (std::size_t i = 0; i < W; ++i) order[i] = i;
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return logl[a] < logl[b]; });
    std::vector<std::size_t> cur;
    for (std::size_t j = 0; j < W; ++j) {
      std::size_t i = order[j];
      // relative 1e-12 on the products: |log difference| <= 1e-12
      if (!cur.empty() && std::abs(logl[i] - logl[cur.back()]) > 1e-12) {
        if (cur.size() > 1) groups.push_back(cur);
        cur.clear();
      }
      cur.push_back(i);
    }
    if (cur.size() > 1) groups.push_back(cur);
  }

  std::vector<std::uint64_t> gpairs;
  for (auto& g : groups) {
    std::sort(g.begin(), g.end());
    std::map<std::string, std::uint64_t> cnt;
    for (std::size_t i : g) ++cnt[keys[i]];
    std::uint64_t n = g.size();
    std::uint64_t p = n * (n - 1) / 2;
    for (auto& [_, c] : cnt) p -= c * (c - 1) / 2;
    gpairs.push_back(p);
    rep.candidate_pairs += p;
  }

  auto check = [&](std::size_t a, std::size_t b) {
    if (keys[a] == keys[b]) return false;
    ++rep.examined_pairs;
    double d;
    bool eq = false;
    if (exact) {
      Rational diff = proj_q[a] - proj_q[b];
      eq = diff == 0;
      d = std::abs(static_cast<double>(diff));
    } else {
      d = std::abs(proj[a] - proj[b]);
    }
    if (d <= rep.threshold) rep.violations.push_back({words[std::min(a, b)], words[std::max(a, b)], d, eq});
    return true;
  };

  if (rep.candidate_pairs <= opt.budget) {
    for (const auto& g : groups)
      for (std::size_t x = 0; x < g.size(); ++x)
        for (std::size_t y = x + 1; y < g.size(); ++y) check(g[x], g[y]);
  } else {
    rep.exhaustive = false;
    CounterRng rng(opt.seed, 0xE5C);
    std::vector<double> cum;
    double acc = 0.0;
    for (auto p : gpairs) cum.push_back(acc += static_cast<double>(p));
    std::uint64_t tries = 0;
    while (rep.examined_pairs < opt.budget && tries < 20 * opt.budget) {
      ++tries;
      double u = rng.uniform() * acc;
      std::size_t gi = static_cast<std::size_t>(std::upper_bound(cum.begin(), cum.end(), u) - cum.begin());
      if (gi >= groups.size()) gi = groups.size() - 1;
      const auto& g = groups[gi];
      std::size_t x = static_cast<std::size_t>(rng.next() % g.size());
      std::size_t y = static_cast<std::size_t>(rng.next() % g.size());
      if (x == y) continue;
      check(g[x], g[y]);
    }
    rep.coverage = rep.candidate_pairs ? static_cast<double>(rep.examined_pairs) / rep.candidate_pairs : 1.0;
    std::sort(rep.violations.begin(), rep.violations.end(),
              [](const EscViolation& a, const EscViolation& b) { return std::tie(a.u, a.v) < std::tie(b.u, b.v); });
    rep.violations.erase(std::unique(rep.violations.begin(), rep.violations.end(),
                                     [](const EscViolation& a, const EscViolation& b) {
                                       return a.u == b.u && a.v == b.v;
                                     }),
                         rep.violations.end());
  }
  std::sort(rep.violations.begin(), rep.violations.end(),
            [](const EscViolation& a, const EscViolation& b) { return std::tie(a.u, a.v) < std::tie(b.u, b.v); });
  return rep;
}

}  // namespace fsl
