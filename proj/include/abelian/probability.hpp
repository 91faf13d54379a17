#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "abelian/algebra.hpp"
#include "abelian/budget.hpp"
#include "abelian/state.hpp"
#include "abelian/tensor.hpp"

namespace abelian {

// Full distribution function of a self-adjoint element under a state: jump
// points ascending with the mass carried at each.
struct Cdf {
  std::vector<double> points;
  std::vector<double> masses;

  // F(t) with the weak convention: total mass at points <= t + tol.
  double at(double t, double tol = kTol) const;
  // strict variant: mass at points < t - tol
  double below(double t, double tol = kTol) const;
};

Cdf cdf(const State& omega, const Element& x, double tol = kTol);

// Mass of {a_i <= t + tol} without building the jump list; this is the
// expectation of the annihilator identity of (t1 - x)_-.
double cdf_at(const State& omega, const Element& x, double t, double tol = kTol);
double cdf_at_strict(const State& omega, const Element& x, double t, double tol = kTol);

// The approximate-identity diagnostic: omega(e_m) for m = 1..steps, where
// e_m is built from chi = (t1 - x)_+ shifted by 1/m. Converges to cdf_at.
std::vector<double> cdf_approx_identity(const State& omega, const Element& x, double t,
                                        unsigned steps, double tol = kTol);

// Joint distribution: mass of the coordinates where every element is <= its
// threshold. Elements must share the state's algebra and be self-adjoint.
double joint_cdf_at(const State& omega, std::span<const Element> xs, std::span<const double> ts,
                    double tol = kTol);

// Projection onto {a_i > a + tol} (and its complement).
Element event_gt(const Element& x, double a, double tol = kTol);
Element event_le(const Element& x, double a, double tol = kTol);

// P(|x - omega(x)| > eps) <= Var(x)/eps^2.
struct ChebyshevCheck {
  double lhs;
  double rhs;
  bool holds;
};
ChebyshevCheck chebyshev_check(const State& omega, const Element& x, double eps,
                               double tol = kTol);

// k-th central moment of the sample mean of n i.i.d. copies of the canonical
// coordinate observable (coefficients 0..d-1) under the factor state.
// k = 2 uses the closed form Var/n; even k > 2 enumerates exactly (type
// classes internally, d^n budget contract enforced).
double lln_moment(const State& factor, unsigned n, unsigned k, const Budget& budget = {},
                  double tol = kTol);

// sup_t |F_n(t) - Phi(t)| for the standardized sum (s_n - mu) sqrt(n) / sigma
// of the canonical coordinate observable.
double clt_gap(const State& factor, unsigned n, const Budget& budget = {});

double normal_cdf(double t);

// Binomial machinery over a two-dimensional factor (success = symbol 1).
// Y_r is the sum of the weight-r basis strings of the n-th tensor level.
Element binomial_observable(unsigned n, const Budget& budget = {});
double binomial_cdf(const State& factor, unsigned n, unsigned k, const Budget& budget = {});

// Waiting time for a pattern: Y_0 = X(x)1, Y'_m = 1_m (x) X (x) 1,
// Y_m = Y'_m - Y'_m (Y_0 + ... + Y_{m-1}); the Y_m are orthogonal
// projections and F_W(t) = sum_{m <= floor(t)} Omega(Y_m).
std::vector<TensorElement> waiting_observables(const Algebra& factor, const PrefixString& pattern,
                                               unsigned m_max, const Budget& budget = {});
double waiting_cdf(const State& factor, const PrefixString& pattern, double t,
                   const Budget& budget = {});

// Markov chain: positive unital maps as dim x dim matrices, entry (i, j) =
// coefficient of basis i in the image of basis j (so unitality means unit
// row sums), plus the state evaluated at the end of the recursion.
class MarkovChain {
 public:
  // One matrix per step, cycled when the path is longer (a single matrix
  // gives the stationary chain).
  MarkovChain(State state, std::vector<std::vector<double>> maps, double tol = kTol);

  const State& state() const { return state_; }
  const Algebra& algebra() const { return state_.algebra(); }
  std::size_t steps() const { return maps_.size(); }
  bool stationary() const { return maps_.size() == 1; }
  // entry (i, j) of the step-th map
  double map_entry(std::size_t step, std::size_t i, std::size_t j) const;
  // the image phi_step(x) as an element
  Element apply_map(std::size_t step, const Element& x) const;

 private:
  State state_;
  std::vector<std::vector<double>> maps_;
};

// Probability of an index path, by the defining recursion
// y_1 = phi_0(z_0), y_k = phi_{k-1}(z_{k-1} y_{k-1}), p = omega(z_n y_n).
// A single-index path is the one-step stay probability omega(z_0 phi_0(z_0)).
// For stationary chains this equals omega(z_n) times the product of the
// matrix entries along the path.
double markov_path_probability(const MarkovChain& chain, std::span<const std::size_t> path);

}  // namespace abelian
