#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "abelian/budget.hpp"
#include "abelian/state.hpp"
#include "abelian/tensor.hpp"

namespace abelian {

// Base-2 entropy; weights within tol of zero contribute nothing.
double shannon_entropy(std::span<const double> weights, double tol = kTol);
double shannon_entropy(const State& omega, double tol = kTol);

// Zero weights in a factor state: Strict refuses them (the per-string
// surprisal is undefined), Lenient restricts to the support.
enum class ZeroPolicy { Strict, Lenient };

// Typical-set report for the n-fold power of a factor state. The set
// collects the strings whose per-symbol surprisal is within eps of the
// entropy; counts are exact integers, masses are accumulated class by
// class in the log domain.
struct TypicalSummary {
  unsigned n = 0;
  double eps = 0.0;
  double entropy = 0.0;       // factor entropy
  double prob_mass = 0.0;     // omega^n of the typical projection
  std::string count_decimal;  // tr Q, exact
  double log2_count = 0.0;
  double log2_upper = 0.0;  // n (H + eps)
  double log2_lower = 0.0;  // log2(prob_mass) + n (H - eps)
  bool sandwich_holds = false;
};

TypicalSummary typical_summary(const State& factor, unsigned n, double eps,
                               ZeroPolicy policy = ZeroPolicy::Strict, const Budget& budget = {},
                               double tol = kTol);

// Kraft inequality over a code alphabet of size code_dim, decided exactly
// in integers after scaling by code_dim^{k_max}. The signed integer slack
// code_dim^{k_max} - sum_i code_dim^{k_max - k_i} is kept as an exact
// decimal string next to its double rendering.
struct KraftCheck {
  bool holds = false;
  double slack = 0.0;
  std::string slack_exact;
};

KraftCheck kraft_check(std::span<const unsigned> lengths, std::size_t code_dim);

// A code maps source symbol m to the m-th codeword, a string over the
// code alphabet. Prefix-freeness is decided algebraically: two distinct
// codewords must multiply to zero as tensor basis strings.
class Code {
 public:
  Code(std::size_t code_dim, std::vector<PrefixString> codewords);

  std::size_t code_dim() const { return code_dim_; }
  std::size_t source_dim() const { return codewords_.size(); }
  const std::vector<PrefixString>& codewords() const { return codewords_; }

  bool is_prefix_free() const;
  KraftCheck kraft() const;
  double average_length(const State& source) const;

  PrefixString encode(std::span<const std::uint32_t> message) const;
  // Greedy decode; throws DecodeError on an unmatched or truncated stream.
  std::vector<std::uint32_t> decode(const PrefixString& stream) const;

 private:
  std::size_t code_dim_;
  std::vector<PrefixString> codewords_;
};

// Noiseless coding bound: a prefix-free code's average length under the
// source state is at least H(source) / log2(code_dim).
struct NoiselessBound {
  double average_length = 0.0;
  double bound = 0.0;
  bool holds = false;
};

NoiselessBound noiseless_bound_check(const State& source, const Code& code, double tol = kTol);

// Fixed-width binary recode of a source alphabet (source_dim >= 2):
// every symbol becomes its index written MSB-first in
// width = bit_width(source_dim - 1) bits.
Code binary_recode(std::size_t source_dim);

}  // namespace abelian
