#pragma once

#include <cstdint>
#include <map>
#include <vector>

#include "abelian/algebra.hpp"
#include "abelian/budget.hpp"
#include "abelian/state.hpp"

namespace abelian {

// A basis string of the infinite tensor power: finitely many factor symbols
// followed by an implicit tail of identities. Symbols are 0-based.
using PrefixString = std::vector<std::uint32_t>;

// Finite combination of basis strings, kept in normal form: the support is an
// antichain under the prefix order (a string whose proper extensions also
// carry coefficients is expanded along 1 = sum_i x_i on the conflicting
// branch), duplicates merged, coefficients below tolerance dropped.
class TensorElement {
 public:
  explicit TensorElement(Algebra factor);

  static TensorElement basis_string(const Algebra& factor, PrefixString s);
  static TensorElement unit(const Algebra& factor);
  static TensorElement from_terms(const Algebra& factor,
                                  const std::vector<std::pair<PrefixString, cplx>>& terms,
                                  double tol = kTol);

  const Algebra& factor() const { return factor_; }
  const std::map<PrefixString, cplx>& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }

  double norm() const;  // max |coefficient| over the normal form
  TensorElement star() const;

  friend TensorElement operator+(const TensorElement& a, const TensorElement& b);
  friend TensorElement operator-(const TensorElement& a, const TensorElement& b);
  friend TensorElement operator*(cplx s, const TensorElement& a);

  // Product: on basis strings, s * t = the longer string when one is a
  // prefix of the other, else 0; extended bilinearly.
  friend TensorElement operator*(const TensorElement& a, const TensorElement& b);

 private:
  Algebra factor_;
  std::map<PrefixString, cplx> terms_;
  double tol_ = kTol;

  void normalize();
};

// x placed at a 0-based position of the tensor power; the leading identity
// factors are expanded into prefix terms (d^position of them per nonzero
// coefficient of x).
TensorElement embed(const Element& x, std::size_t position, double tol = kTol);

// Product state on the tensor power: explicit head factors, then an i.i.d.
// tail (defaults to the last head factor, or may be given directly).
class ProductState {
 public:
  ProductState(std::vector<State> heads, State tail);
  static ProductState iid(State factor);

  const Algebra& factor() const { return tail_.algebra(); }
  const State& factor_state(std::size_t position) const {
    return position < heads_.size() ? heads_[position] : tail_;
  }

 private:
  std::vector<State> heads_;
  State tail_;
};

// Expectation of a tensor element under a product state: each term
// contributes coeff * prod_j omega_j(x_{s_j}).
cplx texpect(const ProductState& omega, const TensorElement& x);

// The dense level-n restriction of an i.i.d. product state: the element of
// the d^n-dimensional algebra whose coordinate at a string is the product of
// the factor weights. Guarded by the coordinate budget.
Element power_output(const State& factor, unsigned n, const Budget& budget = {});

// Index helpers for the dense level-n basis (string -> flat index, big-endian).
std::uint64_t string_to_index(const PrefixString& s, std::size_t d);
PrefixString index_to_string(std::uint64_t idx, std::size_t d, unsigned n);

}  // namespace abelian
