#include "abelian/tensor.hpp"

#include <algorithm>
#include <cmath>

namespace abelian {

namespace {

bool is_prefix_of(const PrefixString& a, const PrefixString& b) {
  if (a.size() > b.size()) return false;
  return std::equal(a.begin(), a.end(), b.begin());
}

struct TrieNode {
  cplx coeff{0.0};
  std::map<std::uint32_t, TrieNode> kids;
};

// Push parent coefficients down wherever a string carries mass and so does a
// proper extension: the short string expands along 1 = sum_i x_i one level
// at a time, only on the conflicting branch.
void resolve(TrieNode& node, std::size_t d, std::vector<std::uint32_t>& path,
             std::map<PrefixString, cplx>& out, double tol) {
  if (!node.kids.empty() && node.coeff != cplx(0.0)) {
    for (std::uint32_t s = 0; s < d; ++s) node.kids[s].coeff += node.coeff;
    node.coeff = 0.0;
  }
  if (node.kids.empty()) {
    if (std::abs(node.coeff) > tol) out.emplace(path, node.coeff);
    return;
  }
  for (auto& [sym, kid] : node.kids) {
    path.push_back(sym);
    resolve(kid, d, path, out, tol);
    path.pop_back();
  }
}

}  // namespace

TensorElement::TensorElement(Algebra factor) : factor_(std::move(factor)) {}

TensorElement TensorElement::basis_string(const Algebra& factor, PrefixString s) {
  for (std::uint32_t sym : s) {
    if (sym >= factor.dim()) {
      throw DimensionError("string symbol " + std::to_string(sym) + " outside factor dimension " +
                           std::to_string(factor.dim()));
    }
  }
  TensorElement e(factor);
  e.terms_.emplace(std::move(s), cplx(1.0));
  return e;
}

TensorElement TensorElement::unit(const Algebra& factor) {
  return basis_string(factor, PrefixString{});
}

TensorElement TensorElement::from_terms(const Algebra& factor,
                                        const std::vector<std::pair<PrefixString, cplx>>& terms,
                                        double tol) {
  TensorElement e(factor);
  e.tol_ = tol;
  for (const auto& [s, c] : terms) {
    for (std::uint32_t sym : s) {
      if (sym >= factor.dim()) {
        throw DimensionError("string symbol " + std::to_string(sym) +
                             " outside factor dimension " + std::to_string(factor.dim()));
      }
    }
    e.terms_[s] += c;
  }
  e.normalize();
  return e;
}

void TensorElement::normalize() {
  // fast path: support already an antichain with no small coefficients
  bool clean = true;
  const PrefixString* prev = nullptr;
  for (const auto& [s, c] : terms_) {
    if (std::abs(c) <= tol_) {
      clean = false;
      break;
    }
    // map order is lexicographic, so a prefix sorts immediately before its
    // extensions; checking neighbours finds every violation
    if (prev != nullptr && is_prefix_of(*prev, s)) {
      clean = false;
      break;
    }
    prev = &s;
  }
  if (clean) return;

  TrieNode root;
  for (auto& [s, c] : terms_) {
    TrieNode* node = &root;
    for (std::uint32_t sym : s) node = &node->kids[sym];
    node->coeff += c;
  }
  std::map<PrefixString, cplx> out;
  std::vector<std::uint32_t> path;
  resolve(root, factor_.dim(), path, out, tol_);
  terms_ = std::move(out);
}

double TensorElement::norm() const {
  double m = 0.0;
  for (const auto& [s, c] : terms_) m = std::max(m, std::abs(c));
  return m;
}

TensorElement TensorElement::star() const {
  TensorElement e(factor_);
  e.tol_ = tol_;
  for (const auto& [s, c] : terms_) e.terms_.emplace(s, std::conj(c));
  return e;
}

TensorElement operator+(const TensorElement& a, const TensorElement& b) {
  if (a.factor() != b.factor()) throw AlgebraMismatchError("tensor factors disagree");
  TensorElement e(a.factor_);
  e.tol_ = a.tol_;
  e.terms_ = a.terms_;
  for (const auto& [s, c] : b.terms_) e.terms_[s] += c;
  e.normalize();
  return e;
}

TensorElement operator-(const TensorElement& a, const TensorElement& b) {
  return a + cplx(-1.0) * b;
}

TensorElement operator*(cplx s, const TensorElement& a) {
  TensorElement e(a.factor_);
  e.tol_ = a.tol_;
  for (const auto& [str, c] : a.terms_) {
    const cplx v = s * c;
    if (std::abs(v) > e.tol_) e.terms_.emplace(str, v);
  }
  return e;
}

TensorElement operator*(const TensorElement& a, const TensorElement& b) {
  if (a.factor() != b.factor()) throw AlgebraMismatchError("tensor factors disagree");
  TensorElement e(a.factor_);
  e.tol_ = a.tol_;
  for (const auto& [s, c] : a.terms_) {
    for (const auto& [t, d] : b.terms_) {
      if (is_prefix_of(s, t)) {
        e.terms_[t] += c * d;
      } else if (is_prefix_of(t, s)) {
        e.terms_[s] += c * d;
      }
    }
  }
  e.normalize();
  return e;
}

TensorElement embed(const Element& x, std::size_t position, double tol) {
  const std::size_t d = x.algebra().dim();
  std::uint64_t count = 1;
  for (std::size_t i = 0; i < position; ++i) {
    count *= d;
    if (count > (std::uint64_t(1) << 26)) {
      throw BudgetError("embed at position " + std::to_string(position) +
                        " would expand too many prefix terms");
    }
  }
  std::vector<std::pair<PrefixString, cplx>> terms;
  for (std::uint64_t idx = 0; idx < count; ++idx) {
    PrefixString lead = index_to_string(idx, d, unsigned(position));
    lead.push_back(0);
    for (std::size_t i = 0; i < d; ++i) {
      if (std::abs(x.coeff(i)) > tol) {
        lead.back() = std::uint32_t(i);
        terms.emplace_back(lead, x.coeff(i));
      }
    }
  }
  return TensorElement::from_terms(x.algebra(), terms, tol);
}

ProductState::ProductState(std::vector<State> heads, State tail)
    : heads_(std::move(heads)), tail_(std::move(tail)) {
  for (const State& h : heads_) {
    if (h.algebra() != tail_.algebra()) {
      throw AlgebraMismatchError("product state factors must share one algebra");
    }
  }
}

ProductState ProductState::iid(State factor) { return ProductState({}, std::move(factor)); }

cplx texpect(const ProductState& omega, const TensorElement& x) {
  if (omega.factor() != x.factor()) throw AlgebraMismatchError("state factor disagrees");
  cplx total(0.0);
  for (const auto& [s, c] : x.terms()) {
    double p = 1.0;
    for (std::size_t j = 0; j < s.size(); ++j) p *= omega.factor_state(j).weight(s[j]);
    total += c * p;
  }
  return total;
}

Element power_output(const State& factor, unsigned n, const Budget& budget) {
  const std::size_t d = factor.dim();
  budget.require(double(n) * std::log2(double(d)), "power_output");
  std::uint64_t size = 1;
  for (unsigned i = 0; i < n; ++i) size *= d;

  std::vector<double> probs(1, 1.0);
  probs.reserve(size);
  for (unsigned level = 0; level < n; ++level) {
    std::vector<double> next(probs.size() * d);
    for (std::size_t i = 0; i < probs.size(); ++i) {
      for (std::size_t j = 0; j < d; ++j) next[i * d + j] = probs[i] * factor.weight(j);
    }
    probs = std::move(next);
  }
  return Element(Algebra(size), probs);
}

std::uint64_t string_to_index(const PrefixString& s, std::size_t d) {
  std::uint64_t idx = 0;
  for (std::uint32_t sym : s) idx = idx * d + sym;
  return idx;
}

PrefixString index_to_string(std::uint64_t idx, std::size_t d, unsigned n) {
  PrefixString s(n, 0);
  for (unsigned t = n; t > 0; --t) {
    s[t - 1] = std::uint32_t(idx % d);
    idx /= d;
  }
  return s;
}

}  // namespace abelian
