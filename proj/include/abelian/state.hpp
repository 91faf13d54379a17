#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "abelian/algebra.hpp"

namespace abelian {

// A state: positive linear functional of norm 1, i.e. a weight vector over
// the atomic basis summing to 1.
class State {
 public:
  State(Algebra algebra, std::vector<double> weights, bool renormalize = false, double tol = kTol);

  static State uniform(const Algebra& a);
  static State point_mass(const Algebra& a, std::size_t i);

  const Algebra& algebra() const { return algebra_; }
  std::size_t dim() const { return weights_.size(); }
  const std::vector<double>& weights() const { return weights_; }
  double weight(std::size_t i) const { return weights_[i]; }

 private:
  Algebra algebra_;
  std::vector<double> weights_;
};

// omega(x) = sum_i w_i a_i.
cplx expectation(const State& omega, const Element& x);

// tr(x) = sum_i a_i; the unnormalized trace functional.
cplx trace_functional(const Element& x);

// Pure iff a point mass iff multiplicative on the whole algebra.
bool is_pure(const State& omega, double tol = kTol);

// |omega(xy) - omega(x)omega(y)|, and whether it is within tolerance.
struct CorrelationCheck {
  bool uncorrelated;
  double defect;
};
CorrelationCheck uncorrelated(const State& omega, const Element& x, const Element& y,
                              double tol = kTol);

// The partition of the basis index set generated by a family of elements:
// indices are grouped by equal coefficient tuples (within tol).
struct Partition {
  std::vector<std::vector<std::size_t>> blocks;
  std::vector<Element> projections;  // one 0/1 projection per block
};
Partition generated_partition(const Algebra& a, std::span<const Element> elements,
                              double tol = kTol);

// k-fold independence of element sets: every tuple of blocks, one from each
// generated partition, must factorize under omega.
struct IndependenceCheck {
  bool independent;
  double max_defect;
};
IndependenceCheck independent(const State& omega,
                              const std::vector<std::vector<Element>>& sets, double tol = kTol);

// Cover verification: phi maps the source basis into the target algebra,
// gamma pairs source states with target states by index. phi must be a
// unital multiplicative map onto the target (checked structurally, throws
// ValidationError when ill-formed); the return value reports whether
// omega(x) = gamma(omega)(phi(x)) holds on the basis for every state pair.
struct CoverCheck {
  bool holds;
  double max_defect;
};
CoverCheck verify_cover(const Algebra& source, std::span<const State> source_states,
                        const Algebra& target, std::span<const State> target_states,
                        std::span<const Element> phi_images, double tol = kTol);

// The canonical cover instance for two element sets: source is the tensor
// square of the two generated quotients, target is the quotient by the
// jointly generated partition. Its cover condition holds iff the sets are
// independent under omega.
struct TensorCoverInstance {
  Algebra source;           // dim = blocks(S1) * blocks(S2)
  State source_state;       // product of the two restrictions
  Algebra target;           // dim = blocks(S1 u S2)
  State target_state;       // restriction of omega
  std::vector<Element> phi_images;
  CoverCheck check;
};
TensorCoverInstance tensor_cover_instance(const State& omega, std::span<const Element> set1,
                                          std::span<const Element> set2, double tol = kTol);

// sum_i omega(P_i) P_i over the spectral decomposition of x.
Element centroid(const State& omega, const Element& x, double tol = kTol);

}  // namespace abelian
