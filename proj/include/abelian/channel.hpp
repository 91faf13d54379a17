#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "abelian/budget.hpp"
#include "abelian/state.hpp"

namespace abelian {

// Discrete memoryless channel. Rows are indexed by the input symbol:
// entry (i, j) = C(y_j | x_i), each row summing to 1. The induced map
// sends output basis elements into the input algebra and is unital
// because the rows are stochastic.
class Channel {
 public:
  explicit Channel(std::vector<std::vector<double>> rows, double tol = kTol);

  static Channel identity(std::size_t d);
  static Channel bsc(double flip);

  std::size_t input_dim() const { return rows_.size(); }
  std::size_t output_dim() const { return rows_.front().size(); }
  double entry(std::size_t i, std::size_t j) const { return rows_[i][j]; }
  const std::vector<std::vector<double>>& rows() const { return rows_; }

 private:
  std::vector<std::vector<double>> rows_;
};

// Output state: omega_tilde(j) = sum_i omega(i) C(y_j | x_i).
State push_state(const State& omega, const Channel& c);

// Level-k channel output as a dense element of the (Y (x) X)^k algebra,
// laid out y-string major: index = yIdx * m^k + xIdx with big-endian
// string indices. Coordinate = prod_t C(y_t | x_t).
Element channel_output(const Channel& c, unsigned k, const Budget& budget = {});

// Joint input-output state on the same layout: C^{(k)}(y|x) * omega^k(x).
State joint_state(const State& omega, const Channel& c, unsigned k, const Budget& budget = {});

// Rank-1 test via the second singular value of the matrix.
struct UselessCheck {
  bool useless = false;
  double sigma1 = 0.0;
  double sigma2 = 0.0;
};

UselessCheck is_useless(const Channel& c, double tol = 1e-9);

// Lossless: every output symbol has exactly one supporting input. The
// partition lists, per input symbol, the output symbols it supports.
struct LosslessCheck {
  bool lossless = false;
  std::vector<std::vector<std::size_t>> partition;
};

LosslessCheck is_lossless(const Channel& c, double tol = kTol);

// I = H(Y) - H(Y|X), cross-checked against H(X) - H(X|Y).
struct MutualInformation {
  double input_entropy = 0.0;        // H(X)
  double output_entropy = 0.0;       // H(Y)
  double cond_output_entropy = 0.0;  // H(Y|X)
  double cond_input_entropy = 0.0;   // H(X|Y)
  double value = 0.0;
  double cross_check = 0.0;
};

MutualInformation mutual_information(const State& omega, const Channel& c, double tol = kTol);

enum class CodebookPolicy { UniformWithoutReplacement, LexicographicFirst, Supplied };

std::string policy_name(CodebookPolicy policy);

// One exact evaluation of the block-k coding experiment: codebook A_k of
// r_k = ceil(2^{kR}) input strings, maximum-likelihood decoding with ties
// to the lowest codebook index, and the decoder-vs-channel gap
// Omega^k(|O_C_k - O_L_k|) summed over the codebook columns. The joint
// mass on strings outside the codebook is reported, not dropped.
struct CodingReport {
  unsigned k = 0;
  double rate = 0.0;
  std::uint64_t codebook_size = 0;
  double gap = 0.0;
  double error_prob = 0.0;              // uniform input on the codebook
  double error_prob_conditioned = 0.0;  // omega^k conditioned on the codebook
  double mass_outside_support = 0.0;    // 1 - omega^k(A_k)
  std::uint64_t seed = 0;
  CodebookPolicy policy = CodebookPolicy::UniformWithoutReplacement;
  std::vector<std::uint64_t> codebook;  // x-string indices
};

struct CodingAggregate {
  unsigned k = 0;
  double rate = 0.0;
  std::uint64_t codebook_size = 0;
  unsigned trials = 0;
  double mean_error = 0.0;
  double max_error = 0.0;
  double mean_gap = 0.0;
  double max_gap = 0.0;
  double mean_mass_outside = 0.0;
};

std::vector<CodingReport> coding_experiment(const Channel& c, const State& omega, double rate,
                                            unsigned k, unsigned trials, CodebookPolicy policy,
                                            std::uint64_t seed, const Budget& budget = {},
                                            std::span<const std::uint64_t> supplied = {});

CodingAggregate aggregate_reports(std::span<const CodingReport> reports);

// Z_k diagnostic: restrict the gap to pairs whose information density
// log2(C^{(k)}(y|x) / omega_tilde^k(y)) exceeds k (R + eps); the restricted
// gap is bounded by 2^{-k eps}.
struct ZkDiagnostic {
  double gap = 0.0;
  double bound = 0.0;
  bool holds = false;
};

ZkDiagnostic zk_diagnostic(const Channel& c, const State& omega, double rate, double eps,
                           unsigned k, std::span<const std::uint64_t> codebook,
                           const Budget& budget = {});

// Deterministic helper shared by the experiment and the CLI: the codebook
// for a given policy, sorted ascending for the sampled policy.
std::vector<std::uint64_t> make_codebook(std::uint64_t universe, std::uint64_t r,
                                         CodebookPolicy policy, std::uint64_t seed,
                                         std::span<const std::uint64_t> supplied = {});

// Per-trial seed derived from the master seed by a counter scheme.
std::uint64_t trial_seed(std::uint64_t master, std::uint64_t trial);

}  // namespace abelian
