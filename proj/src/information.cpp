#include "abelian/information.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <map>

#include <boost/multiprecision/cpp_int.hpp>

#include "abelian/errors.hpp"

namespace abelian {

using boost::multiprecision::cpp_int;

namespace {

// log2 of a nonnegative big integer: exponent of the top bit plus the
// fractional part read off the top 53 bits.
double log2_big(const cpp_int& v) {
  if (v == 0) return -std::numeric_limits<double>::infinity();
  const unsigned top = boost::multiprecision::msb(v);
  if (top <= 52) return std::log2(v.convert_to<double>());
  const cpp_int shifted = v >> (top - 52);
  return std::log2(shifted.convert_to<double>()) + double(top - 52);
}

}  // namespace

double shannon_entropy(std::span<const double> weights, double tol) {
  double h = 0.0;
  for (double w : weights) {
    if (w < -tol) throw ValidationError("entropy needs nonnegative weights");
    if (w <= tol) continue;
    h -= w * std::log2(w);
  }
  return h;
}

double shannon_entropy(const State& omega, double tol) {
  return shannon_entropy(std::span<const double>(omega.weights()), tol);
}

TypicalSummary typical_summary(const State& factor, unsigned n, double eps, ZeroPolicy policy,
                               const Budget& budget, double tol) {
  if (n == 0) throw ValidationError("typical_summary needs n >= 1");
  if (eps <= 0.0) throw ValidationError("typical_summary needs eps > 0");

  std::vector<double> w;
  for (double wi : factor.weights()) {
    if (wi > tol) {
      w.push_back(wi);
    } else if (policy == ZeroPolicy::Strict) {
      throw FunctionDomainError(
          "factor state has a zero weight, so the per-string surprisal is undefined; "
          "the lenient policy restricts to the support");
    }
  }
  const std::size_t s = w.size();
  if (s == 0) throw ValidationError("factor state has empty support");

  // number of type classes is C(n+s-1, s-1)
  const double log2_classes =
      (std::lgamma(double(n) + double(s)) - std::lgamma(double(n) + 1.0) -
       std::lgamma(double(s))) /
      std::log(2.0);
  budget.require(log2_classes, "typical_summary type classes");

  std::vector<double> log2w(s);
  double entropy = 0.0;
  for (std::size_t i = 0; i < s; ++i) {
    log2w[i] = std::log2(w[i]);
    entropy -= w[i] * log2w[i];
  }

  cpp_int count = 0;
  double mass = 0.0, mass_c = 0.0;  // Kahan accumulator

  std::vector<unsigned> counts(s, 0);
  auto rec = [&](auto&& self, std::size_t level, unsigned remaining, const cpp_int& multinomial,
                 double log2_mass) -> void {
    if (level + 1 == s) {
      counts[level] = remaining;
      const double lm = log2_mass + double(remaining) * log2w[level];
      const double surprisal = -lm / double(n);
      if (std::abs(surprisal - entropy) <= eps + tol) {
        count += multinomial;
        const double contribution = std::exp2(log2_big(multinomial) + lm);
        const double y = contribution - mass_c;
        const double t = mass + y;
        mass_c = (t - mass) - y;
        mass = t;
      }
      return;
    }
    cpp_int binom = 1;  // C(remaining, m)
    for (unsigned m = 0; m <= remaining; ++m) {
      counts[level] = m;
      self(self, level + 1, remaining - m, multinomial * binom,
           log2_mass + double(m) * log2w[level]);
      binom = binom * (remaining - m) / (m + 1);
    }
  };
  rec(rec, 0, n, cpp_int(1), 0.0);

  TypicalSummary out;
  out.n = n;
  out.eps = eps;
  out.entropy = entropy;
  out.prob_mass = mass;
  out.count_decimal = count.str();
  out.log2_count = log2_big(count);
  out.log2_upper = double(n) * (entropy + eps);
  out.log2_lower = std::log2(mass) + double(n) * (entropy - eps);
  const double slack = 1e-6;
  out.sandwich_holds =
      out.log2_count <= out.log2_upper + slack && out.log2_count >= out.log2_lower - slack;
  return out;
}

KraftCheck kraft_check(std::span<const unsigned> lengths, std::size_t code_dim) {
  if (code_dim < 2) throw ValidationError("kraft needs a code alphabet of size >= 2");
  unsigned k_max = 0;
  for (unsigned k : lengths) {
    if (k == 0) throw ValidationError("kraft needs word lengths >= 1");
    k_max = std::max(k_max, k);
  }
  // scale by code_dim^k_max so the inequality is decided in integers
  const cpp_int rhs = boost::multiprecision::pow(cpp_int(code_dim), k_max);
  cpp_int lhs = 0;
  for (unsigned k : lengths) {
    lhs += boost::multiprecision::pow(cpp_int(code_dim), k_max - k);
  }
  const cpp_int slack = rhs - lhs;
  KraftCheck out;
  out.holds = slack >= 0;
  out.slack = slack.convert_to<double>();
  out.slack_exact = slack.str();
  return out;
}

Code::Code(std::size_t code_dim, std::vector<PrefixString> codewords)
    : code_dim_(code_dim), codewords_(std::move(codewords)) {
  if (code_dim_ < 2) throw ValidationError("code alphabet must have size >= 2");
  if (codewords_.empty()) throw ValidationError("code needs at least one codeword");
  for (const PrefixString& cw : codewords_) {
    if (cw.empty()) throw ValidationError("codewords must be nonempty");
    for (std::uint32_t sym : cw) {
      if (sym >= code_dim_) {
        throw ValidationError("codeword symbol " + std::to_string(sym) +
                              " outside the code alphabet");
      }
    }
  }
}

bool Code::is_prefix_free() const {
  const Algebra a(code_dim_);
  std::vector<TensorElement> atoms;
  atoms.reserve(codewords_.size());
  for (const PrefixString& cw : codewords_) atoms.push_back(TensorElement::basis_string(a, cw));
  for (std::size_t i = 0; i < atoms.size(); ++i) {
    for (std::size_t j = i + 1; j < atoms.size(); ++j) {
      if (!(atoms[i] * atoms[j]).is_zero()) return false;
    }
  }
  return true;
}

KraftCheck Code::kraft() const {
  std::vector<unsigned> lengths;
  lengths.reserve(codewords_.size());
  for (const PrefixString& cw : codewords_) lengths.push_back(unsigned(cw.size()));
  return kraft_check(lengths, code_dim_);
}

double Code::average_length(const State& source) const {
  if (source.dim() != codewords_.size()) {
    throw AlgebraMismatchError("source state must have one weight per codeword");
  }
  double avg = 0.0;
  for (std::size_t i = 0; i < codewords_.size(); ++i) {
    avg += source.weight(i) * double(codewords_[i].size());
  }
  return avg;
}

PrefixString Code::encode(std::span<const std::uint32_t> message) const {
  PrefixString out;
  for (std::uint32_t m : message) {
    if (m >= codewords_.size()) {
      throw ValidationError("source symbol " + std::to_string(m) + " outside the source alphabet");
    }
    const PrefixString& cw = codewords_[m];
    out.insert(out.end(), cw.begin(), cw.end());
  }
  return out;
}

std::vector<std::uint32_t> Code::decode(const PrefixString& stream) const {
  struct Node {
    std::map<std::uint32_t, std::size_t> kids;
    int word = -1;
  };
  std::vector<Node> trie(1);
  for (std::size_t m = 0; m < codewords_.size(); ++m) {
    std::size_t cur = 0;
    for (std::uint32_t sym : codewords_[m]) {
      auto it = trie[cur].kids.find(sym);
      if (it == trie[cur].kids.end()) {
        trie.push_back(Node{});
        it = trie[cur].kids.emplace(sym, trie.size() - 1).first;
      }
      cur = it->second;
    }
    trie[cur].word = int(m);
  }

  std::vector<std::uint32_t> out;
  std::size_t cur = 0;
  for (std::size_t pos = 0; pos < stream.size(); ++pos) {
    auto it = trie[cur].kids.find(stream[pos]);
    if (it == trie[cur].kids.end()) {
      throw DecodeError("no codeword matches the stream at position " + std::to_string(pos));
    }
    cur = it->second;
    if (trie[cur].word >= 0) {
      out.push_back(std::uint32_t(trie[cur].word));
      cur = 0;
    }
  }
  if (cur != 0) throw DecodeError("stream ends inside a codeword");
  return out;
}

NoiselessBound noiseless_bound_check(const State& source, const Code& code, double tol) {
  if (!code.is_prefix_free()) {
    throw ValidationError("noiseless bound is stated for prefix-free codes only");
  }
  NoiselessBound out;
  out.average_length = code.average_length(source);
  out.bound = shannon_entropy(source) / std::log2(double(code.code_dim()));
  out.holds = out.average_length >= out.bound - tol;
  return out;
}

Code binary_recode(std::size_t source_dim) {
  if (source_dim < 2) throw ValidationError("binary_recode needs a source alphabet of size >= 2");
  const unsigned width = unsigned(std::bit_width(std::uint64_t(source_dim - 1)));
  std::vector<PrefixString> words;
  words.reserve(source_dim);
  for (std::size_t m = 0; m < source_dim; ++m) {
    PrefixString cw(width);
    for (unsigned b = 0; b < width; ++b) {
      cw[b] = std::uint32_t((m >> (width - 1 - b)) & 1u);
    }
    words.push_back(std::move(cw));
  }
  return Code(2, std::move(words));
}

}  // namespace abelian
