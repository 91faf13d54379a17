#include "abelian/channel.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_set>

#include "abelian/information.hpp"

namespace abelian {

namespace {

constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ull;

std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

// splitmix64 stream with Lemire bounded draws; self-contained so runs
// reproduce across standard libraries.
struct Rng {
  std::uint64_t state;

  explicit Rng(std::uint64_t seed) : state(seed) {}

  std::uint64_t next() {
    state += kGolden;
    return mix64(state);
  }

  std::uint64_t below(std::uint64_t bound) {
    unsigned __int128 prod = (unsigned __int128)next() * bound;
    auto lo = std::uint64_t(prod);
    if (lo < bound) {
      const std::uint64_t threshold = std::uint64_t(-bound) % bound;
      while (lo < threshold) {
        prod = (unsigned __int128)next() * bound;
        lo = std::uint64_t(prod);
      }
    }
    return std::uint64_t(prod >> 64);
  }
};

// d^k with a cap so string indices stay in 64 bits.
std::uint64_t checked_pow(std::size_t d, unsigned k, const char* what) {
  if (double(k) * std::log2(double(d)) > 62.0) {
    throw BudgetError(std::string(what) + ": d^k does not fit a 64-bit index");
  }
  std::uint64_t out = 1;
  for (unsigned i = 0; i < k; ++i) out *= d;
  return out;
}

void decode_string(std::uint64_t idx, std::size_t d, unsigned k, std::uint32_t* digits) {
  for (unsigned t = k; t-- > 0;) {
    digits[t] = std::uint32_t(idx % d);
    idx /= d;
  }
}

// One-sided Jacobi SVD: plane rotations orthogonalize the columns and the
// singular values are the final column norms. Working on the matrix itself
// instead of its Gram keeps sigma2 accurate to ~eps * sigma1, so a stored
// rank-1 matrix (all rows the same doubles) lands far below any sane
// rank tolerance instead of at sqrt(eps).
std::vector<double> singular_values(const Channel& ch) {
  const std::size_t m = ch.input_dim(), n = ch.output_dim();
  const bool wide = n > m;  // rotate the orientation with fewer columns
  const std::size_t cols = wide ? m : n, len = wide ? n : m;
  std::vector<std::vector<double>> col(cols, std::vector<double>(len));
  for (std::size_t j = 0; j < cols; ++j) {
    for (std::size_t i = 0; i < len; ++i) col[j][i] = wide ? ch.entry(j, i) : ch.entry(i, j);
  }
  const auto dot = [len](const std::vector<double>& u, const std::vector<double>& v) {
    double s = 0.0;
    for (std::size_t i = 0; i < len; ++i) s += u[i] * v[i];
    return s;
  };
  for (unsigned sweep = 0; sweep < 64; ++sweep) {
    bool rotated = false;
    for (std::size_t p = 0; p < cols; ++p) {
      for (std::size_t q = p + 1; q < cols; ++q) {
        const double app = dot(col[p], col[p]);
        const double aqq = dot(col[q], col[q]);
        const double apq = dot(col[p], col[q]);
        if (std::abs(apq) <= 1e-15 * std::sqrt(app * aqq)) continue;
        rotated = true;
        const double tau = (aqq - app) / (2.0 * apq);
        const double t = (tau >= 0.0 ? 1.0 : -1.0) / (std::abs(tau) + std::sqrt(1.0 + tau * tau));
        const double c = 1.0 / std::sqrt(1.0 + t * t);
        const double s = t * c;
        for (std::size_t i = 0; i < len; ++i) {
          const double xp = col[p][i], xq = col[q][i];
          col[p][i] = c * xp - s * xq;
          col[q][i] = s * xp + c * xq;
        }
      }
    }
    if (!rotated) break;
  }
  std::vector<double> sv(cols);
  for (std::size_t j = 0; j < cols; ++j) sv[j] = std::sqrt(dot(col[j], col[j]));
  std::sort(sv.begin(), sv.end(), std::greater<>());
  return sv;
}

struct BlockSetup {
  std::uint64_t mk = 0, nk = 0;
  std::vector<std::vector<std::uint32_t>> cb_syms;  // per codeword, k input symbols
  std::vector<double> cb_mass;                      // omega^k per codeword
  std::vector<double> out_weights;                  // omega_tilde per output symbol
};

BlockSetup block_setup(const Channel& c, const State& omega, unsigned k,
                       std::span<const std::uint64_t> codebook, const Budget& budget,
                       const char* what) {
  if (omega.dim() != c.input_dim()) {
    throw AlgebraMismatchError("input state dimension does not match the channel");
  }
  if (k == 0) throw ValidationError("block length must be >= 1");
  BlockSetup s;
  s.mk = checked_pow(c.input_dim(), k, what);
  s.nk = checked_pow(c.output_dim(), k, what);
  budget.require(double(k) * std::log2(double(c.output_dim())) +
                     std::log2(double(std::max<std::size_t>(codebook.size(), 1))),
                 what);
  s.cb_syms.reserve(codebook.size());
  s.cb_mass.reserve(codebook.size());
  for (std::uint64_t idx : codebook) {
    if (idx >= s.mk) throw ValidationError("codebook entry outside the input string range");
    std::vector<std::uint32_t> syms(k);
    decode_string(idx, c.input_dim(), k, syms.data());
    double mass = 1.0;
    for (std::uint32_t sym : syms) mass *= omega.weight(sym);
    s.cb_syms.push_back(std::move(syms));
    s.cb_mass.push_back(mass);
  }
  s.out_weights = push_state(omega, c).weights();
  return s;
}

// Enumerates every output string against the codebook: the visitor gets
// the output-string mass under omega_tilde^k, the likelihood per codeword,
// and the decoded index.
template <typename F>
void scan_outputs(const Channel& c, unsigned k, const BlockSetup& s, F&& visit) {
  const std::size_t r = s.cb_syms.size();
  std::vector<std::uint32_t> y(k);
  std::vector<double> values(r);
  for (std::uint64_t yi = 0; yi < s.nk; ++yi) {
    decode_string(yi, c.output_dim(), k, y.data());
    double ymass = 1.0;
    for (unsigned t = 0; t < k; ++t) ymass *= s.out_weights[y[t]];
    std::size_t dec = 0;
    double best = -1.0;
    for (std::size_t j = 0; j < r; ++j) {
      double v = 1.0;
      for (unsigned t = 0; t < k; ++t) v *= c.entry(s.cb_syms[j][t], y[t]);
      values[j] = v;
      if (v > best) {
        best = v;
        dec = j;
      }
    }
    visit(ymass, values, dec);
  }
}

}  // namespace

Channel::Channel(std::vector<std::vector<double>> rows, double tol) : rows_(std::move(rows)) {
  if (rows_.empty() || rows_.front().empty()) {
    throw DimensionError("channel matrix must be nonempty");
  }
  const std::size_t n = rows_.front().size();
  for (std::size_t i = 0; i < rows_.size(); ++i) {
    auto& row = rows_[i];
    if (row.size() != n) throw DimensionError("channel rows must have equal length");
    double sum = 0.0;
    for (double& v : row) {
      if (v < -tol) throw ValidationError("channel entries must be nonnegative");
      if (v < 0.0) v = 0.0;
      sum += v;
    }
    if (std::abs(sum - 1.0) > tol) {
      throw ValidationError("channel row " + std::to_string(i) + " sums to " +
                            std::to_string(sum) + ", not 1");
    }
  }
}

Channel Channel::identity(std::size_t d) {
  if (d == 0) throw DimensionError("identity channel needs d >= 1");
  std::vector<std::vector<double>> rows(d, std::vector<double>(d, 0.0));
  for (std::size_t i = 0; i < d; ++i) rows[i][i] = 1.0;
  return Channel(std::move(rows));
}

Channel Channel::bsc(double flip) {
  if (flip < 0.0 || flip > 1.0) throw ValidationError("bsc flip probability must be in [0,1]");
  return Channel({{1.0 - flip, flip}, {flip, 1.0 - flip}});
}

State push_state(const State& omega, const Channel& c) {
  if (omega.dim() != c.input_dim()) {
    throw AlgebraMismatchError("state dimension does not match the channel input");
  }
  std::vector<double> out(c.output_dim(), 0.0);
  for (std::size_t i = 0; i < c.input_dim(); ++i) {
    for (std::size_t j = 0; j < c.output_dim(); ++j) out[j] += omega.weight(i) * c.entry(i, j);
  }
  return State(Algebra(c.output_dim()), std::move(out));
}

Element channel_output(const Channel& c, unsigned k, const Budget& budget) {
  if (k == 0) return Element::unit(Algebra(1));
  const std::size_t m = c.input_dim(), n = c.output_dim();
  budget.require(double(k) * std::log2(double(n) * double(m)), "channel_output");
  // level 1, y-major layout
  std::vector<cplx> cur(n * m);
  for (std::size_t y = 0; y < n; ++y) {
    for (std::size_t x = 0; x < m; ++x) cur[y * m + x] = c.entry(x, y);
  }
  std::uint64_t mk = m, nk = n;
  for (unsigned level = 1; level < k; ++level) {
    std::vector<cplx> next(cur.size() * n * m);
    for (std::uint64_t yo = 0; yo < nk; ++yo) {
      for (std::uint64_t xo = 0; xo < mk; ++xo) {
        const cplx base = cur[yo * mk + xo];
        if (base == cplx(0.0)) continue;
        for (std::size_t y = 0; y < n; ++y) {
          for (std::size_t x = 0; x < m; ++x) {
            next[(yo * n + y) * (mk * m) + (xo * m + x)] = base * c.entry(x, y);
          }
        }
      }
    }
    cur = std::move(next);
    mk *= m;
    nk *= n;
  }
  const Algebra alg(cur.size());
  return Element(alg, std::move(cur));
}

State joint_state(const State& omega, const Channel& c, unsigned k, const Budget& budget) {
  if (omega.dim() != c.input_dim()) {
    throw AlgebraMismatchError("state dimension does not match the channel input");
  }
  const Element out = channel_output(c, k, budget);
  const std::size_t m = c.input_dim();
  std::uint64_t mk = 1;
  for (unsigned i = 0; i < k; ++i) mk *= m;
  std::vector<double> w(out.dim());
  std::vector<std::uint32_t> syms(k);
  for (std::uint64_t x = 0; x < mk; ++x) {
    decode_string(x, m, k, syms.data());
    double mass = 1.0;
    for (std::uint32_t sym : syms) mass *= omega.weight(sym);
    for (std::uint64_t y = 0; y < out.dim() / mk; ++y) {
      w[y * mk + x] = out.coeff(y * mk + x).real() * mass;
    }
  }
  const Algebra alg(w.size());
  return State(alg, std::move(w));
}

UselessCheck is_useless(const Channel& c, double tol) {
  const std::vector<double> sv = singular_values(c);
  UselessCheck out;
  out.sigma1 = sv[0];
  out.sigma2 = sv.size() > 1 ? sv[1] : 0.0;
  out.useless = out.sigma2 <= tol * out.sigma1;
  return out;
}

LosslessCheck is_lossless(const Channel& c, double tol) {
  LosslessCheck out;
  std::vector<std::vector<std::size_t>> partition(c.input_dim());
  for (std::size_t j = 0; j < c.output_dim(); ++j) {
    std::size_t support = 0, owner = 0;
    for (std::size_t i = 0; i < c.input_dim(); ++i) {
      if (c.entry(i, j) > tol) {
        ++support;
        owner = i;
      }
    }
    if (support != 1) return out;  // lossless stays false
    partition[owner].push_back(j);
  }
  out.lossless = true;
  out.partition = std::move(partition);
  return out;
}

MutualInformation mutual_information(const State& omega, const Channel& c, double tol) {
  if (omega.dim() != c.input_dim()) {
    throw AlgebraMismatchError("state dimension does not match the channel input");
  }
  const State pushed = push_state(omega, c);
  MutualInformation out;
  out.input_entropy = shannon_entropy(omega, tol);
  out.output_entropy = shannon_entropy(pushed, tol);
  for (std::size_t i = 0; i < c.input_dim(); ++i) {
    out.cond_output_entropy +=
        omega.weight(i) * shannon_entropy(std::span<const double>(c.rows()[i]), tol);
  }
  std::vector<double> posterior(c.input_dim());
  for (std::size_t j = 0; j < c.output_dim(); ++j) {
    const double wj = pushed.weight(j);
    if (wj <= tol) continue;
    for (std::size_t i = 0; i < c.input_dim(); ++i) {
      posterior[i] = omega.weight(i) * c.entry(i, j) / wj;
    }
    out.cond_input_entropy += wj * shannon_entropy(std::span<const double>(posterior), tol);
  }
  out.value = out.output_entropy - out.cond_output_entropy;
  out.cross_check = out.input_entropy - out.cond_input_entropy;
  return out;
}

std::string policy_name(CodebookPolicy policy) {
  switch (policy) {
    case CodebookPolicy::UniformWithoutReplacement: return "uniform";
    case CodebookPolicy::LexicographicFirst: return "lexicographic";
    case CodebookPolicy::Supplied: return "supplied";
  }
  return "unknown";
}

std::uint64_t trial_seed(std::uint64_t master, std::uint64_t trial) {
  return mix64(master + kGolden * (trial + 1));
}

std::vector<std::uint64_t> make_codebook(std::uint64_t universe, std::uint64_t r,
                                         CodebookPolicy policy, std::uint64_t seed,
                                         std::span<const std::uint64_t> supplied) {
  if (r == 0) throw ValidationError("codebook must be nonempty");
  if (r > universe) throw ValidationError("rate too high: codebook larger than the string space");
  switch (policy) {
    case CodebookPolicy::LexicographicFirst: {
      std::vector<std::uint64_t> cb(r);
      for (std::uint64_t i = 0; i < r; ++i) cb[i] = i;
      return cb;
    }
    case CodebookPolicy::Supplied: {
      if (supplied.size() != r) {
        throw ValidationError("supplied codebook has " + std::to_string(supplied.size()) +
                              " entries, expected " + std::to_string(r));
      }
      std::unordered_set<std::uint64_t> seen;
      for (std::uint64_t idx : supplied) {
        if (idx >= universe) throw ValidationError("supplied codeword outside the string space");
        if (!seen.insert(idx).second) throw ValidationError("supplied codebook has duplicates");
      }
      return std::vector<std::uint64_t>(supplied.begin(), supplied.end());
    }
    case CodebookPolicy::UniformWithoutReplacement: {
      // Floyd's sampling: uniform r-subset without building the universe
      Rng rng(seed);
      std::unordered_set<std::uint64_t> chosen;
      chosen.reserve(std::size_t(r) * 2);
      for (std::uint64_t j = universe - r; j < universe; ++j) {
        const std::uint64_t t = rng.below(j + 1);
        if (!chosen.insert(t).second) chosen.insert(j);
      }
      std::vector<std::uint64_t> cb(chosen.begin(), chosen.end());
      std::sort(cb.begin(), cb.end());
      return cb;
    }
  }
  throw ValidationError("unknown codebook policy");
}

std::vector<CodingReport> coding_experiment(const Channel& c, const State& omega, double rate,
                                            unsigned k, unsigned trials, CodebookPolicy policy,
                                            std::uint64_t seed, const Budget& budget,
                                            std::span<const std::uint64_t> supplied) {
  if (rate <= 0.0) throw ValidationError("transmission rate must be positive");
  if (trials == 0) throw ValidationError("coding experiment needs at least one trial");
  const std::uint64_t mk = checked_pow(c.input_dim(), k, "coding_experiment");
  checked_pow(c.output_dim(), k, "coding_experiment");
  const auto r = std::uint64_t(std::ceil(std::exp2(double(k) * rate)));
  if (r > mk) {
    throw ValidationError("rate too high for block length: need " + std::to_string(r) +
                          " codewords but only " + std::to_string(mk) + " strings exist");
  }
  budget.require(double(k) * std::log2(double(c.output_dim())) + std::log2(double(r)),
                 "coding_experiment");

  std::vector<CodingReport> reports;
  reports.reserve(trials);
  for (unsigned trial = 0; trial < trials; ++trial) {
    const std::uint64_t tseed =
        policy == CodebookPolicy::UniformWithoutReplacement ? trial_seed(seed, trial) : seed;
    const std::vector<std::uint64_t> cb = make_codebook(mk, r, policy, tseed, supplied);
    const BlockSetup s = block_setup(c, omega, k, cb, budget, "coding_experiment");

    double mass_in = 0.0;
    for (double w : s.cb_mass) mass_in += w;

    std::vector<double> correct(cb.size(), 0.0);
    double gap = 0.0;
    scan_outputs(c, k, s, [&](double ymass, const std::vector<double>& values, std::size_t dec) {
      correct[dec] += values[dec];
      for (std::size_t j = 0; j < values.size(); ++j) {
        if (values[j] == 0.0 && j != dec) continue;
        const double decoded = j == dec ? ymass : 0.0;
        gap += values[j] * s.cb_mass[j] * std::abs(values[j] - decoded);
      }
    });

    CodingReport rep;
    rep.k = k;
    rep.rate = rate;
    rep.codebook_size = r;
    rep.gap = gap;
    double err = 0.0, err_cond = 0.0;
    for (std::size_t j = 0; j < cb.size(); ++j) {
      err += (1.0 - correct[j]) / double(r);
      if (mass_in > 0.0) err_cond += s.cb_mass[j] / mass_in * (1.0 - correct[j]);
    }
    rep.error_prob = std::max(err, 0.0);
    rep.error_prob_conditioned = std::max(err_cond, 0.0);
    rep.mass_outside_support = std::max(1.0 - mass_in, 0.0);
    rep.seed = tseed;
    rep.policy = policy;
    rep.codebook = cb;
    reports.push_back(std::move(rep));
  }
  return reports;
}

CodingAggregate aggregate_reports(std::span<const CodingReport> reports) {
  if (reports.empty()) throw ValidationError("nothing to aggregate");
  CodingAggregate agg;
  agg.k = reports.front().k;
  agg.rate = reports.front().rate;
  agg.codebook_size = reports.front().codebook_size;
  agg.trials = unsigned(reports.size());
  for (const CodingReport& r : reports) {
    agg.mean_error += r.error_prob;
    agg.max_error = std::max(agg.max_error, r.error_prob);
    agg.mean_gap += r.gap;
    agg.max_gap = std::max(agg.max_gap, r.gap);
    agg.mean_mass_outside += r.mass_outside_support;
  }
  agg.mean_error /= double(reports.size());
  agg.mean_gap /= double(reports.size());
  agg.mean_mass_outside /= double(reports.size());
  return agg;
}

ZkDiagnostic zk_diagnostic(const Channel& c, const State& omega, double rate, double eps,
                           unsigned k, std::span<const std::uint64_t> codebook,
                           const Budget& budget) {
  if (rate <= 0.0) throw ValidationError("transmission rate must be positive");
  if (eps <= 0.0) throw ValidationError("zk diagnostic needs eps > 0");
  if (codebook.empty()) throw ValidationError("zk diagnostic needs a codebook");
  const BlockSetup s = block_setup(c, omega, k, codebook, budget, "zk_diagnostic");

  const double threshold = double(k) * (rate + eps);
  double gap = 0.0;
  scan_outputs(c, k, s, [&](double ymass, const std::vector<double>& values, std::size_t dec) {
    if (ymass <= 0.0) return;  // joint mass vanishes on this output string
    for (std::size_t j = 0; j < values.size(); ++j) {
      if (values[j] <= 0.0) continue;
      if (std::log2(values[j] / ymass) <= threshold) continue;
      const double decoded = j == dec ? ymass : 0.0;
      gap += values[j] * s.cb_mass[j] * std::abs(values[j] - decoded);
    }
  });

  ZkDiagnostic out;
  out.gap = gap;
  out.bound = std::exp2(-double(k) * eps);
  out.holds = out.gap <= out.bound + 1e-12;
  return out;
}

}  // namespace abelian
