#pragma once

#include <complex>
#include <cstddef>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "abelian/errors.hpp"

namespace abelian {

using cplx = std::complex<double>;

// Coefficient-equality tolerance shared by spectral grouping, state
// validation and the various predicates. Overridable per call.
inline constexpr double kTol = 1e-9;

// A finite-dimensional abelian C*-algebra, presented by its atomic basis.
// Immutable and cheap to copy; two algebras are interchangeable iff their
// dimensions agree.
class Algebra {
 public:
  explicit Algebra(std::size_t dim);
  Algebra(std::size_t dim, std::vector<std::string> labels);

  std::size_t dim() const { return impl_->dim; }
  const std::string& label(std::size_t i) const;

  friend bool operator==(const Algebra& a, const Algebra& b) { return a.dim() == b.dim(); }
  friend bool operator!=(const Algebra& a, const Algebra& b) { return !(a == b); }

 private:
  struct Impl {
    std::size_t dim;
    std::vector<std::string> labels;
  };
  std::shared_ptr<const Impl> impl_;
};

// Element of an algebra: the dense coefficient vector over the atomic basis.
// All operations are coordinatewise.
class Element {
 public:
  Element(Algebra algebra, std::vector<cplx> coeffs);
  Element(Algebra algebra, const std::vector<double>& coeffs);

  static Element zero(const Algebra& a);
  static Element unit(const Algebra& a);
  static Element basis(const Algebra& a, std::size_t i);

  const Algebra& algebra() const { return algebra_; }
  std::size_t dim() const { return coeffs_.size(); }
  const std::vector<cplx>& coeffs() const { return coeffs_; }
  cplx coeff(std::size_t i) const { return coeffs_[i]; }

  Element star() const;
  double norm() const;  // sup norm: max_i |a_i|

  bool is_self_adjoint(double tol = kTol) const;
  bool is_projection(double tol = kTol) const;  // coefficients 0 or 1
  bool is_zero(double tol = kTol) const;

  // Real parts of the coefficients; requires self-adjointness.
  std::vector<double> real_coeffs(double tol = kTol) const;

  friend Element operator+(const Element& a, const Element& b);
  friend Element operator-(const Element& a, const Element& b);
  friend Element operator*(const Element& a, const Element& b);
  friend Element operator*(cplx s, const Element& a);
  friend Element operator*(const Element& a, cplx s) { return s * a; }
  friend Element operator-(const Element& a) { return cplx(-1.0, 0.0) * a; }

 private:
  Algebra algebra_;
  std::vector<cplx> coeffs_;
};

// Distinct coefficient values (the spectrum), grouped within tol,
// sorted by (Re, Im).
std::vector<cplx> spectrum(const Element& x, double tol = kTol);

// |x|, x_+ = (|x|+x)/2, x_- = (|x|-x)/2 for self-adjoint x. Satisfies
// x = pos - neg, |x| = pos + neg, pos*neg = 0 exactly.
struct SelfAdjointParts {
  Element abs;
  Element pos;
  Element neg;
};
SelfAdjointParts decompose_self_adjoint(const Element& x, double tol = kTol);

// x = sum_i value_i * projection_i over distinct nonzero coefficient values;
// projections are 0/1 elements, pairwise orthogonal, summing to the support
// projection of x.
struct SpectralTerm {
  cplx value;
  Element projection;
};
std::vector<SpectralTerm> spectral_decomposition(const Element& x, double tol = kTol);

// Identity of the annihilator ideal of {x}: the projection onto the
// coordinates where x vanishes.
Element annihilator_identity(const Element& x, double tol = kTol);

// Coordinatewise application of a scalar function. f returns nullopt where
// it is undefined; that raises FunctionDomainError naming `what`.
template <typename F>
Element apply_function(const Element& x, F&& f, const std::string& what) {
  std::vector<cplx> out(x.dim());
  for (std::size_t i = 0; i < x.dim(); ++i) {
    std::optional<cplx> v = f(x.coeff(i));
    if (!v.has_value()) {
      throw FunctionDomainError(what + " undefined at coefficient index " + std::to_string(i));
    }
    out[i] = *v;
  }
  return Element(x.algebra(), std::move(out));
}

// log2 extended by log2(0) = 0; defined on self-adjoint elements with
// nonnegative coefficients.
Element log2_extended(const Element& x, double tol = kTol);

}  // namespace abelian
