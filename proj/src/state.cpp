#include "abelian/state.hpp"

#include <algorithm>
#include <cmath>

#include "abelian/kernels.hpp"

namespace abelian {

State::State(Algebra algebra, std::vector<double> weights, bool renormalize, double tol)
    : algebra_(std::move(algebra)), weights_(std::move(weights)) {
  if (weights_.size() != algebra_.dim()) {
    throw DimensionError("weight count " + std::to_string(weights_.size()) +
                         " does not match algebra dimension " + std::to_string(algebra_.dim()));
  }
  for (double& w : weights_) {
    if (w < -tol) {
      throw ValidationError("state weight " + std::to_string(w) + " is negative");
    }
    if (w < 0.0) w = 0.0;
  }
  double total = kernels::active().sum(weights_.data(), weights_.size());
  if (renormalize) {
    if (total <= 0.0) throw ValidationError("cannot renormalize a zero weight vector");
    for (double& w : weights_) w /= total;
  } else if (std::abs(total - 1.0) > tol) {
    throw ValidationError("state weights sum to " + std::to_string(total) +
                          ", expected 1 (pass renormalize to rescale)");
  }
}

State State::uniform(const Algebra& a) {
  return State(a, std::vector<double>(a.dim(), 1.0 / double(a.dim())), true);
}

State State::point_mass(const Algebra& a, std::size_t i) {
  if (i >= a.dim()) throw DimensionError("point mass index out of range");
  std::vector<double> w(a.dim(), 0.0);
  w[i] = 1.0;
  return State(a, std::move(w));
}

cplx expectation(const State& omega, const Element& x) {
  if (omega.algebra() != x.algebra()) {
    throw AlgebraMismatchError("state and element dimensions disagree");
  }
  return kernels::active().weighted_sum(omega.weights().data(), x.coeffs().data(), x.dim());
}

cplx trace_functional(const Element& x) {
  cplx s(0.0);
  for (const cplx& c : x.coeffs()) s += c;
  return s;
}

bool is_pure(const State& omega, double tol) {
  for (double w : omega.weights()) {
    if (w > tol && w < 1.0 - tol) return false;
  }
  return true;
}

CorrelationCheck uncorrelated(const State& omega, const Element& x, const Element& y, double tol) {
  const cplx lhs = expectation(omega, x * y);
  const cplx rhs = expectation(omega, x) * expectation(omega, y);
  const double defect = std::abs(lhs - rhs);
  return {defect <= tol, defect};
}

Partition generated_partition(const Algebra& a, std::span<const Element> elements, double tol) {
  for (const Element& e : elements) {
    if (e.algebra() != a) throw AlgebraMismatchError("partition elements must share the algebra");
  }
  // group indices by their coefficient tuple across the family
  std::vector<std::vector<std::size_t>> blocks;
  auto same_tuple = [&](std::size_t i, std::size_t j) {
    for (const Element& e : elements) {
      if (std::abs(e.coeff(i) - e.coeff(j)) > tol) return false;
    }
    return true;
  };
  for (std::size_t i = 0; i < a.dim(); ++i) {
    bool placed = false;
    for (auto& block : blocks) {
      if (same_tuple(i, block.front())) {
        block.push_back(i);
        placed = true;
        break;
      }
    }
    if (!placed) blocks.push_back({i});
  }

  Partition p;
  p.blocks = std::move(blocks);
  p.projections.reserve(p.blocks.size());
  for (const auto& block : p.blocks) {
    std::vector<cplx> c(a.dim(), cplx(0.0));
    for (std::size_t i : block) c[i] = 1.0;
    p.projections.emplace_back(a, std::move(c));
  }
  return p;
}

namespace {

double block_mass(const State& omega, const std::vector<std::size_t>& block) {
  double m = 0.0;
  for (std::size_t i : block) m += omega.weight(i);
  return m;
}

// recursively checks every tuple of blocks, one per partition
void check_tuples(const State& omega, const std::vector<Partition>& parts, std::size_t level,
                  std::vector<std::size_t>& support, double product, double& max_defect) {
  if (level == parts.size()) {
    double joint = 0.0;
    for (std::size_t i : support) joint += omega.weight(i);
    max_defect = std::max(max_defect, std::abs(joint - product));
    return;
  }
  for (std::size_t b = 0; b < parts[level].blocks.size(); ++b) {
    const auto& block = parts[level].blocks[b];
    std::vector<std::size_t> next;
    if (level == 0) {
      next = block;
    } else {
      std::vector<bool> in_block(omega.dim(), false);
      for (std::size_t i : block) in_block[i] = true;
      for (std::size_t i : support) {
        if (in_block[i]) next.push_back(i);
      }
    }
    check_tuples(omega, parts, level + 1, next, product * block_mass(omega, block), max_defect);
  }
}

}  // namespace

IndependenceCheck independent(const State& omega, const std::vector<std::vector<Element>>& sets,
                              double tol) {
  if (sets.size() < 2) throw ValidationError("independence needs at least two element sets");
  std::vector<Partition> parts;
  parts.reserve(sets.size());
  for (const auto& set : sets) {
    parts.push_back(generated_partition(omega.algebra(), std::span(set.data(), set.size()), tol));
  }
  double max_defect = 0.0;
  std::vector<std::size_t> empty;
  check_tuples(omega, parts, 0, empty, 1.0, max_defect);
  return {max_defect <= tol, max_defect};
}

CoverCheck verify_cover(const Algebra& source, std::span<const State> source_states,
                        const Algebra& target, std::span<const State> target_states,
                        std::span<const Element> phi_images, double tol) {
  if (phi_images.size() != source.dim()) {
    throw DimensionError("phi must provide one image per source basis element");
  }
  if (source_states.size() != target_states.size()) {
    throw DimensionError("gamma must pair source and target states one to one");
  }
  for (const Element& img : phi_images) {
    if (img.algebra() != target) throw AlgebraMismatchError("phi images must live in the target");
  }

  // multiplicative on the basis: images are orthogonal idempotents
  for (std::size_t i = 0; i < phi_images.size(); ++i) {
    for (std::size_t j = i; j < phi_images.size(); ++j) {
      const Element prod = phi_images[i] * phi_images[j];
      const Element expect = i == j ? phi_images[i] : Element::zero(target);
      if (!(prod - expect).is_zero(tol)) {
        throw ValidationError("phi is not multiplicative on the basis");
      }
    }
  }
  // unital
  Element total = Element::zero(target);
  for (const Element& img : phi_images) total = total + img;
  if (!(total - Element::unit(target)).is_zero(tol)) {
    throw ValidationError("phi is not unital");
  }
  // onto: with orthogonal idempotents summing to 1, the image spans the
  // target iff every nonzero image is a single atom
  for (const Element& img : phi_images) {
    std::size_t support = 0;
    for (std::size_t t = 0; t < target.dim(); ++t) {
      if (std::abs(img.coeff(t)) > tol) ++support;
    }
    if (support > 1) throw ValidationError("phi is not onto: an image covers several atoms");
  }

  double max_defect = 0.0;
  for (std::size_t s = 0; s < source_states.size(); ++s) {
    for (std::size_t i = 0; i < phi_images.size(); ++i) {
      const cplx lhs = expectation(source_states[s], Element::basis(source, i));
      const cplx rhs = expectation(target_states[s], phi_images[i]);
      max_defect = std::max(max_defect, std::abs(lhs - rhs));
    }
  }
  return {max_defect <= tol, max_defect};
}

TensorCoverInstance tensor_cover_instance(const State& omega, std::span<const Element> set1,
                                          std::span<const Element> set2, double tol) {
  const Algebra& a = omega.algebra();
  const Partition p1 = generated_partition(a, set1, tol);
  const Partition p2 = generated_partition(a, set2, tol);

  // the jointly generated partition: blocks are nonempty pairwise
  // intersections, ordered by (block of p1, block of p2)
  std::vector<std::vector<std::size_t>> joint_blocks;
  std::vector<std::pair<std::size_t, std::size_t>> joint_origin;
  for (std::size_t i = 0; i < p1.blocks.size(); ++i) {
    std::vector<bool> in1(a.dim(), false);
    for (std::size_t idx : p1.blocks[i]) in1[idx] = true;
    for (std::size_t j = 0; j < p2.blocks.size(); ++j) {
      std::vector<std::size_t> inter;
      for (std::size_t idx : p2.blocks[j]) {
        if (in1[idx]) inter.push_back(idx);
      }
      if (!inter.empty()) {
        joint_blocks.push_back(std::move(inter));
        joint_origin.emplace_back(i, j);
      }
    }
  }

  const std::size_t k = p1.blocks.size(), l = p2.blocks.size();
  TensorCoverInstance inst{Algebra(k * l), State::uniform(Algebra(1)),
                           Algebra(joint_blocks.size()), State::uniform(Algebra(1)),
                           {}, {}};

  std::vector<double> w1(k), w2(l);
  for (std::size_t i = 0; i < k; ++i) w1[i] = block_mass(omega, p1.blocks[i]);
  for (std::size_t j = 0; j < l; ++j) w2[j] = block_mass(omega, p2.blocks[j]);

  std::vector<double> source_w(k * l);
  for (std::size_t i = 0; i < k; ++i) {
    for (std::size_t j = 0; j < l; ++j) source_w[i * l + j] = w1[i] * w2[j];
  }
  inst.source_state = State(inst.source, std::move(source_w), true, tol);

  std::vector<double> target_w(joint_blocks.size());
  for (std::size_t b = 0; b < joint_blocks.size(); ++b) {
    target_w[b] = block_mass(omega, joint_blocks[b]);
  }
  inst.target_state = State(inst.target, std::move(target_w), true, tol);

  // phi(P_i (x) Q_j) = P_i Q_j: the joint atom at origin (i, j), or 0
  inst.phi_images.reserve(k * l);
  for (std::size_t i = 0; i < k; ++i) {
    for (std::size_t j = 0; j < l; ++j) {
      std::vector<cplx> c(joint_blocks.size(), cplx(0.0));
      for (std::size_t b = 0; b < joint_blocks.size(); ++b) {
        if (joint_origin[b] == std::make_pair(i, j)) c[b] = 1.0;
      }
      inst.phi_images.emplace_back(inst.target, std::move(c));
    }
  }

  const State src_states[] = {inst.source_state};
  const State tgt_states[] = {inst.target_state};
  inst.check = verify_cover(inst.source, src_states, inst.target, tgt_states,
                            std::span(inst.phi_images.data(), inst.phi_images.size()), tol);
  return inst;
}

Element centroid(const State& omega, const Element& x, double tol) {
  if (omega.algebra() != x.algebra()) {
    throw AlgebraMismatchError("state and element dimensions disagree");
  }
  Element out = Element::zero(x.algebra());
  for (const SpectralTerm& term : spectral_decomposition(x, tol)) {
    out = out + expectation(omega, term.projection) * term.projection;
  }
  return out;
}

}  // namespace abelian
