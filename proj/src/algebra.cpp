#include "abelian/algebra.hpp"

#include <algorithm>
#include <cmath>

#include "abelian/kernels.hpp"

namespace abelian {

namespace {

void check_same_algebra(const Element& a, const Element& b) {
  if (a.algebra() != b.algebra()) {
    throw AlgebraMismatchError("elements live in algebras of dimension " +
                               std::to_string(a.dim()) + " and " + std::to_string(b.dim()));
  }
}

}  // namespace

Algebra::Algebra(std::size_t dim) : Algebra(dim, {}) {}

Algebra::Algebra(std::size_t dim, std::vector<std::string> labels) {
  if (dim == 0) throw DimensionError("algebra dimension must be positive");
  if (!labels.empty() && labels.size() != dim) {
    throw DimensionError("label count " + std::to_string(labels.size()) +
                         " does not match dimension " + std::to_string(dim));
  }
  impl_ = std::make_shared<const Impl>(Impl{dim, std::move(labels)});
}

const std::string& Algebra::label(std::size_t i) const {
  static const std::string empty;
  if (i >= impl_->dim) throw DimensionError("label index out of range");
  return impl_->labels.empty() ? empty : impl_->labels[i];
}

Element::Element(Algebra algebra, std::vector<cplx> coeffs)
    : algebra_(std::move(algebra)), coeffs_(std::move(coeffs)) {
  if (coeffs_.size() != algebra_.dim()) {
    throw DimensionError("coefficient count " + std::to_string(coeffs_.size()) +
                         " does not match algebra dimension " + std::to_string(algebra_.dim()));
  }
}

Element::Element(Algebra algebra, const std::vector<double>& coeffs)
    : Element(std::move(algebra), std::vector<cplx>(coeffs.begin(), coeffs.end())) {}

Element Element::zero(const Algebra& a) { return Element(a, std::vector<cplx>(a.dim(), cplx(0.0))); }

Element Element::unit(const Algebra& a) { return Element(a, std::vector<cplx>(a.dim(), cplx(1.0))); }

Element Element::basis(const Algebra& a, std::size_t i) {
  if (i >= a.dim()) throw DimensionError("basis index " + std::to_string(i) + " out of range");
  std::vector<cplx> c(a.dim(), cplx(0.0));
  c[i] = 1.0;
  return Element(a, std::move(c));
}

Element Element::star() const {
  std::vector<cplx> out(dim());
  kernels::active().conj(coeffs_.data(), out.data(), dim());
  return Element(algebra_, std::move(out));
}

double Element::norm() const { return std::sqrt(kernels::active().max_abs2(coeffs_.data(), dim())); }

bool Element::is_self_adjoint(double tol) const {
  for (const cplx& c : coeffs_) {
    if (std::abs(c.imag()) > tol) return false;
  }
  return true;
}

bool Element::is_projection(double tol) const {
  for (const cplx& c : coeffs_) {
    if (std::abs(c.imag()) > tol) return false;
    const double r = c.real();
    if (std::abs(r) > tol && std::abs(r - 1.0) > tol) return false;
  }
  return true;
}

bool Element::is_zero(double tol) const {
  for (const cplx& c : coeffs_) {
    if (std::abs(c.real()) > tol || std::abs(c.imag()) > tol) return false;
  }
  return true;
}

std::vector<double> Element::real_coeffs(double tol) const {
  if (!is_self_adjoint(tol)) {
    throw NotSelfAdjointError("element has a coefficient with imaginary part above tolerance");
  }
  std::vector<double> out(dim());
  for (std::size_t i = 0; i < dim(); ++i) out[i] = coeffs_[i].real();
  return out;
}

Element operator+(const Element& a, const Element& b) {
  check_same_algebra(a, b);
  std::vector<cplx> out(a.dim());
  kernels::active().add(a.coeffs().data(), b.coeffs().data(), out.data(), a.dim());
  return Element(a.algebra(), std::move(out));
}

Element operator-(const Element& a, const Element& b) {
  check_same_algebra(a, b);
  std::vector<cplx> out(a.dim());
  kernels::active().sub(a.coeffs().data(), b.coeffs().data(), out.data(), a.dim());
  return Element(a.algebra(), std::move(out));
}

Element operator*(const Element& a, const Element& b) {
  check_same_algebra(a, b);
  std::vector<cplx> out(a.dim());
  kernels::active().mul(a.coeffs().data(), b.coeffs().data(), out.data(), a.dim());
  return Element(a.algebra(), std::move(out));
}

Element operator*(cplx s, const Element& a) {
  std::vector<cplx> out(a.dim());
  kernels::active().scale(s, a.coeffs().data(), out.data(), a.dim());
  return Element(a.algebra(), std::move(out));
}

std::vector<cplx> spectrum(const Element& x, double tol) {
  std::vector<cplx> values(x.coeffs());
  std::sort(values.begin(), values.end(), [](const cplx& a, const cplx& b) {
    return a.real() != b.real() ? a.real() < b.real() : a.imag() < b.imag();
  });
  std::vector<cplx> out;
  for (const cplx& v : values) {
    if (out.empty() || std::abs(v - out.back()) > tol) out.push_back(v);
  }
  return out;
}

SelfAdjointParts decompose_self_adjoint(const Element& x, double tol) {
  const std::vector<double> a = x.real_coeffs(tol);
  const std::size_t n = a.size();
  std::vector<cplx> abs(n), pos(n), neg(n);
  for (std::size_t i = 0; i < n; ++i) {
    abs[i] = std::abs(a[i]);
    pos[i] = a[i] > 0.0 ? a[i] : 0.0;
    neg[i] = a[i] < 0.0 ? -a[i] : 0.0;
  }
  return {Element(x.algebra(), std::move(abs)), Element(x.algebra(), std::move(pos)),
          Element(x.algebra(), std::move(neg))};
}

std::vector<SpectralTerm> spectral_decomposition(const Element& x, double tol) {
  const std::size_t n = x.dim();
  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) {
    const cplx a = x.coeff(i), b = x.coeff(j);
    return a.real() != b.real() ? a.real() < b.real() : a.imag() < b.imag();
  });

  // group indices by coefficient value; the group value is its first member's
  std::vector<cplx> values;
  std::vector<std::vector<std::size_t>> groups;
  for (std::size_t idx : order) {
    const cplx v = x.coeff(idx);
    if (std::abs(v) <= tol) continue;  // zero coordinates belong to the annihilator
    if (values.empty() || std::abs(v - values.back()) > tol) {
      values.push_back(v);
      groups.emplace_back();
    }
    groups.back().push_back(idx);
  }

  std::vector<SpectralTerm> terms;
  terms.reserve(values.size());
  for (std::size_t g = 0; g < values.size(); ++g) {
    std::vector<cplx> c(n, cplx(0.0));
    for (std::size_t idx : groups[g]) c[idx] = 1.0;
    terms.push_back({values[g], Element(x.algebra(), std::move(c))});
  }
  return terms;
}

Element annihilator_identity(const Element& x, double tol) {
  std::vector<cplx> c(x.dim());
  for (std::size_t i = 0; i < x.dim(); ++i) {
    c[i] = std::abs(x.coeff(i)) <= tol ? 1.0 : 0.0;
  }
  return Element(x.algebra(), std::move(c));
}

Element log2_extended(const Element& x, double tol) {
  if (!x.is_self_adjoint(tol)) {
    throw NotSelfAdjointError("log2 is defined on self-adjoint elements only");
  }
  return apply_function(
      x,
      [tol](cplx v) -> std::optional<cplx> {
        const double r = v.real();
        if (r < -tol) return std::nullopt;
        if (r <= tol) return cplx(0.0);
        return cplx(std::log2(r));
      },
      "log2 of a negative coefficient");
}

}  // namespace abelian
