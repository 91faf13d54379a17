#include "abelian/probability.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>

#include "abelian/kernels.hpp"

namespace abelian {

namespace {

void check_pair(const State& omega, const Element& x) {
  if (omega.algebra() != x.algebra()) {
    throw AlgebraMismatchError("state and element dimensions disagree");
  }
}

std::vector<double> canonical_coordinates(std::size_t d) {
  std::vector<double> c(d);
  for (std::size_t i = 0; i < d; ++i) c[i] = double(i);
  return c;
}

double mean_of(const State& omega, const std::vector<double>& values) {
  double mu = 0.0;
  for (std::size_t i = 0; i < values.size(); ++i) mu += omega.weight(i) * values[i];
  return mu;
}

double variance_of(const State& omega, const std::vector<double>& values, double mu) {
  double var = 0.0;
  for (std::size_t i = 0; i < values.size(); ++i) {
    var += omega.weight(i) * (values[i] - mu) * (values[i] - mu);
  }
  return var;
}

}  // namespace

double Cdf::at(double t, double tol) const {
  double m = 0.0;
  for (std::size_t i = 0; i < points.size(); ++i) {
    if (points[i] <= t + tol) m += masses[i];
  }
  return m;
}

double Cdf::below(double t, double tol) const {
  double m = 0.0;
  for (std::size_t i = 0; i < points.size(); ++i) {
    if (points[i] < t - tol) m += masses[i];
  }
  return m;
}

Cdf cdf(const State& omega, const Element& x, double tol) {
  check_pair(omega, x);
  const std::vector<double> a = x.real_coeffs(tol);
  std::vector<std::size_t> order(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) { return a[i] < a[j]; });

  Cdf f;
  for (std::size_t idx : order) {
    if (!f.points.empty() && std::abs(a[idx] - f.points.back()) <= tol) {
      f.masses.back() += omega.weight(idx);
    } else {
      f.points.push_back(a[idx]);
      f.masses.push_back(omega.weight(idx));
    }
  }
  return f;
}

double cdf_at(const State& omega, const Element& x, double t, double tol) {
  check_pair(omega, x);
  if (!x.is_self_adjoint(tol)) {
    throw NotSelfAdjointError("distribution functions need a self-adjoint element");
  }
  return kernels::active().mass_le(omega.weights().data(), x.coeffs().data(), t + tol, x.dim());
}

double cdf_at_strict(const State& omega, const Element& x, double t, double tol) {
  check_pair(omega, x);
  if (!x.is_self_adjoint(tol)) {
    throw NotSelfAdjointError("distribution functions need a self-adjoint element");
  }
  double m = 0.0;
  for (std::size_t i = 0; i < x.dim(); ++i) {
    if (x.coeff(i).real() < t - tol) m += omega.weight(i);
  }
  return m;
}

std::vector<double> cdf_approx_identity(const State& omega, const Element& x, double t,
                                        unsigned steps, double tol) {
  check_pair(omega, x);
  const std::vector<double> a = x.real_coeffs(tol);
  std::vector<double> out;
  out.reserve(steps);
  for (unsigned m = 1; m <= steps; ++m) {
    // chi = ((t + 1/m) 1 - x)_+ ; e_m = m chi (1 + m chi)^{-1}
    double value = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
      const double chi = std::max(t + 1.0 / double(m) - a[i], 0.0);
      value += omega.weight(i) * (double(m) * chi) / (1.0 + double(m) * chi);
    }
    out.push_back(value);
  }
  return out;
}

double joint_cdf_at(const State& omega, std::span<const Element> xs, std::span<const double> ts,
                    double tol) {
  if (xs.size() != ts.size()) throw DimensionError("one threshold per element required");
  std::vector<std::vector<double>> coeffs;
  coeffs.reserve(xs.size());
  for (const Element& x : xs) {
    check_pair(omega, x);
    coeffs.push_back(x.real_coeffs(tol));
  }
  double m = 0.0;
  for (std::size_t i = 0; i < omega.dim(); ++i) {
    bool inside = true;
    for (std::size_t e = 0; e < coeffs.size(); ++e) {
      if (coeffs[e][i] > ts[e] + tol) {
        inside = false;
        break;
      }
    }
    if (inside) m += omega.weight(i);
  }
  return m;
}

Element event_gt(const Element& x, double a, double tol) {
  const std::vector<double> c = x.real_coeffs(tol);
  std::vector<cplx> out(c.size());
  for (std::size_t i = 0; i < c.size(); ++i) out[i] = c[i] > a + tol ? 1.0 : 0.0;
  return Element(x.algebra(), std::move(out));
}

Element event_le(const Element& x, double a, double tol) {
  return Element::unit(x.algebra()) - event_gt(x, a, tol);
}

ChebyshevCheck chebyshev_check(const State& omega, const Element& x, double eps, double tol) {
  check_pair(omega, x);
  if (eps <= 0.0) throw ValidationError("chebyshev needs eps > 0");
  const std::vector<double> a = x.real_coeffs(tol);
  const double mu = expectation(omega, x).real();
  std::vector<cplx> dev(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) dev[i] = std::abs(a[i] - mu);
  const Element abs_dev(x.algebra(), std::move(dev));
  const double lhs = expectation(omega, event_gt(abs_dev, eps, tol)).real();
  double var = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    var += omega.weight(i) * (a[i] - mu) * (a[i] - mu);
  }
  const double rhs = var / (eps * eps);
  return {lhs, rhs, lhs <= rhs + tol};
}

namespace {

// Exact sum over type classes of f(composition) * multinomial * prod w^m.
// The visitor gets the class probability and the symbol counts.
template <typename F>
void for_each_type_class(std::size_t d, unsigned n, const std::vector<double>& w, F&& visit) {
  std::vector<unsigned> counts(d, 0);
  // recursive composition enumeration with running multinomial and probability
  auto rec = [&](auto&& self, std::size_t level, unsigned remaining, double multinomial,
                 double prob) -> void {
    if (level + 1 == d) {
      counts[level] = remaining;
      visit(counts, multinomial * std::pow(w[level], double(remaining)) * prob);
      return;
    }
    double binom = 1.0;  // C(remaining, m) built incrementally
    double pw = 1.0;
    for (unsigned m = 0; m <= remaining; ++m) {
      counts[level] = m;
      self(self, level + 1, remaining - m, multinomial * binom, prob * pw);
      binom = binom * double(remaining - m) / double(m + 1);
      pw *= w[level];
    }
  };
  rec(rec, 0, n, 1.0, 1.0);
}

}  // namespace

double lln_moment(const State& factor, unsigned n, unsigned k, const Budget& budget, double tol) {
  if (n == 0) throw ValidationError("lln_moment needs n >= 1");
  if (k == 0) throw ValidationError("lln_moment needs k >= 1");
  const std::size_t d = factor.dim();
  const std::vector<double> values = canonical_coordinates(d);
  const double mu = mean_of(factor, values);
  if (k == 2) {
    return variance_of(factor, values, mu) / double(n);
  }
  budget.require(double(n) * std::log2(double(d)), "lln_moment enumeration");
  (void)tol;
  double total = 0.0;
  for_each_type_class(d, n, factor.weights(), [&](const std::vector<unsigned>& counts, double p) {
    double sum = 0.0;
    for (std::size_t i = 0; i < d; ++i) sum += double(counts[i]) * values[i];
    total += p * std::pow(sum / double(n) - mu, double(k));
  });
  return total;
}

double normal_cdf(double t) { return 0.5 * std::erfc(-t / std::sqrt(2.0)); }

double clt_gap(const State& factor, unsigned n, const Budget& budget) {
  if (n == 0) throw ValidationError("clt_gap needs n >= 1");
  const std::size_t d = factor.dim();
  budget.require(double(n) * std::log2(double(d)), "clt_gap enumeration");
  const std::vector<double> values = canonical_coordinates(d);
  const double mu = mean_of(factor, values);
  const double sigma = std::sqrt(variance_of(factor, values, mu));
  if (sigma <= 0.0) throw ComputationError("clt_gap: degenerate factor state (sigma = 0)");

  // distribution of the integer sum by n-fold convolution
  std::vector<double> mass{1.0};
  for (unsigned step = 0; step < n; ++step) {
    std::vector<double> next(mass.size() + d - 1, 0.0);
    for (std::size_t s = 0; s < mass.size(); ++s) {
      if (mass[s] == 0.0) continue;
      for (std::size_t j = 0; j < d; ++j) next[s + j] += mass[s] * factor.weight(j);
    }
    mass = std::move(next);
  }

  const double scale = sigma * std::sqrt(double(n));
  double gap = 0.0;
  double cum = 0.0;
  for (std::size_t s = 0; s < mass.size(); ++s) {
    if (mass[s] == 0.0) continue;
    const double t = (double(s) - double(n) * mu) / scale;
    const double phi = normal_cdf(t);
    gap = std::max(gap, std::abs(phi - cum));  // approach from the left
    cum += mass[s];
    gap = std::max(gap, std::abs(cum - phi));  // at the jump
  }
  return gap;
}

Element binomial_observable(unsigned n, const Budget& budget) {
  budget.require(double(n), "binomial_observable");
  const std::uint64_t size = std::uint64_t(1) << n;
  std::vector<cplx> c(size);
  for (std::uint64_t s = 0; s < size; ++s) c[s] = double(std::popcount(s));
  return Element(Algebra(size), std::move(c));
}

double binomial_cdf(const State& factor, unsigned n, unsigned k, const Budget& budget) {
  if (factor.dim() != 2) throw DimensionError("binomial needs a two-dimensional factor");
  if (n == 0) throw ValidationError("binomial needs n >= 1");
  if (k > n) throw ValidationError("binomial success count k exceeds trial count n");
  const double p = factor.weight(1), q = factor.weight(0);
  if (double(n) <= double(budget.log2_coords)) {
    // algebraic route: Omega(sum_{r <= k} Y_r) on the dense level
    const Element level = power_output(factor, n, budget);
    double total = 0.0;
    const std::uint64_t size = std::uint64_t(1) << n;
    for (std::uint64_t s = 0; s < size; ++s) {
      if (std::popcount(s) <= int(k)) total += level.coeff(s).real();
    }
    return total;
  }
  double total = 0.0;
  double binom = 1.0;
  for (unsigned r = 0; r <= std::min(k, n); ++r) {
    total += binom * std::pow(p, double(r)) * std::pow(q, double(n - r));
    binom = binom * double(n - r) / double(r + 1);
  }
  return total;
}

std::vector<TensorElement> waiting_observables(const Algebra& factor, const PrefixString& pattern,
                                               unsigned m_max, const Budget& budget) {
  if (pattern.empty()) throw ValidationError("waiting pattern must be nonempty");
  const std::size_t d = factor.dim();
  budget.require(double(m_max + pattern.size()) * std::log2(double(d)), "waiting_observables");

  std::vector<TensorElement> ys;
  ys.reserve(m_max + 1);
  TensorElement running_sum(factor);  // Y_0 + ... + Y_{m-1}
  for (unsigned m = 0; m <= m_max; ++m) {
    // Y'_m = 1_m (x) X (x) 1: every length-m prefix followed by the pattern
    std::vector<std::pair<PrefixString, cplx>> terms;
    std::uint64_t count = 1;
    for (unsigned i = 0; i < m; ++i) count *= d;
    for (std::uint64_t idx = 0; idx < count; ++idx) {
      PrefixString s = index_to_string(idx, d, m);
      s.insert(s.end(), pattern.begin(), pattern.end());
      terms.emplace_back(std::move(s), cplx(1.0));
    }
    const TensorElement shifted = TensorElement::from_terms(factor, terms);
    const TensorElement ym = m == 0 ? shifted : shifted - shifted * running_sum;
    running_sum = m == 0 ? ym : running_sum + ym;
    ys.push_back(ym);
  }
  return ys;
}

double waiting_cdf(const State& factor, const PrefixString& pattern, double t,
                   const Budget& budget) {
  if (t < 0.0) return 0.0;
  const unsigned m_max = unsigned(std::floor(t));
  const std::vector<TensorElement> ys = waiting_observables(factor.algebra(), pattern, m_max, budget);
  const ProductState omega = ProductState::iid(factor);
  double total = 0.0;
  for (const TensorElement& y : ys) total += texpect(omega, y).real();
  return total;
}

MarkovChain::MarkovChain(State state, std::vector<std::vector<double>> maps, double tol)
    : state_(std::move(state)), maps_(std::move(maps)) {
  if (maps_.empty()) throw ValidationError("markov chain needs at least one map");
  const std::size_t d = state_.dim();
  for (auto& m : maps_) {
    if (m.size() != d * d) {
      throw DimensionError("markov map must be a " + std::to_string(d) + "x" + std::to_string(d) +
                           " matrix");
    }
    for (double& v : m) {
      if (v < -tol) throw ValidationError("markov map has a negative entry: not positive");
      if (v < 0.0) v = 0.0;
    }
    for (std::size_t i = 0; i < d; ++i) {
      double row = 0.0;
      for (std::size_t j = 0; j < d; ++j) row += m[i * d + j];
      if (std::abs(row - 1.0) > tol) {
        throw ValidationError("markov map is not unital: row " + std::to_string(i) + " sums to " +
                              std::to_string(row));
      }
    }
  }
}

double MarkovChain::map_entry(std::size_t step, std::size_t i, std::size_t j) const {
  const std::size_t d = state_.dim();
  return maps_[step % maps_.size()][i * d + j];
}

Element MarkovChain::apply_map(std::size_t step, const Element& x) const {
  if (x.algebra() != algebra()) throw AlgebraMismatchError("element outside the chain's algebra");
  const std::size_t d = state_.dim();
  std::vector<cplx> out(d, cplx(0.0));
  for (std::size_t i = 0; i < d; ++i) {
    for (std::size_t j = 0; j < d; ++j) out[i] += map_entry(step, i, j) * x.coeff(j);
  }
  return Element(algebra(), std::move(out));
}

double markov_path_probability(const MarkovChain& chain, std::span<const std::size_t> path) {
  if (path.empty()) throw ValidationError("markov path must have at least one index");
  const std::size_t d = chain.algebra().dim();
  for (std::size_t idx : path) {
    if (idx >= d) throw ValidationError("markov path index out of range");
  }
  if (path.size() == 1) {
    // one-step stay probability
    const Element z0 = Element::basis(chain.algebra(), path[0]);
    return expectation(chain.state(), z0 * chain.apply_map(0, z0)).real();
  }
  Element y = chain.apply_map(0, Element::basis(chain.algebra(), path[0]));
  for (std::size_t k = 2; k < path.size(); ++k) {
    y = chain.apply_map(k - 1, Element::basis(chain.algebra(), path[k - 1]) * y);
  }
  return expectation(chain.state(), Element::basis(chain.algebra(), path.back()) * y).real();
}

}  // namespace abelian
