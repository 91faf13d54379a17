// End-to-end acceptance harness. Runs ten independent criteria, prints one
// PASS/FAIL line per criterion with its wall time, and exits nonzero if any
// fail. argv[1] must be the path to the abelian_info binary; criteria 1 and
// 10 drive the CLI as a subprocess, the rest call the library directly.
#include <sys/wait.h>

#include <array>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include <json.hpp>

#include "abelian/algebra.hpp"
#include "abelian/budget.hpp"
#include "abelian/channel.hpp"
#include "abelian/errors.hpp"
#include "abelian/information.hpp"
#include "abelian/probability.hpp"
#include "abelian/state.hpp"
#include "abelian/tensor.hpp"

namespace {

std::string g_cli;

struct CliResult {
  int status = -1;
  std::string out;
};

CliResult run_cli(const std::string& args) {
  CliResult res;
  const std::string cmd = g_cli + " " + args + " 2>/dev/null";
  FILE* pipe = popen(cmd.c_str(), "r");
  if (!pipe) return res;
  std::array<char, 4096> buf{};
  std::size_t nread = 0;
  while ((nread = fread(buf.data(), 1, buf.size(), pipe)) > 0) res.out.append(buf.data(), nread);
  const int rc = pclose(pipe);
  if (WIFEXITED(rc)) res.status = WEXITSTATUS(rc);
  return res;
}

struct Check {
  bool ok = true;
  std::string first_fail;

  void require(bool cond, const std::string& what) {
    if (cond) return;
    if (ok) first_fail = what;
    ok = false;
  }
};

bool run_criterion(int idx, const char* label, double time_limit_s,
                   const std::function<void(Check&)>& body) {
  Check c;
  const auto t0 = std::chrono::steady_clock::now();
  try {
    body(c);
  } catch (const std::exception& e) {
    c.require(false, std::string("unexpected exception: ") + e.what());
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (time_limit_s > 0.0) {
    c.require(secs < time_limit_s,
              "time limit " + std::to_string(time_limit_s) + "s exceeded");
  }
  char head[160];
  std::snprintf(head, sizeof head, "[%s] %2d. %s (%.2fs)", c.ok ? "PASS" : "FAIL", idx, label,
                secs);
  std::string line(head);
  if (!c.ok) line += "  -- " + c.first_fail;
  std::printf("%s\n", line.c_str());
  std::fflush(stdout);
  return c.ok;
}

abelian::State random_state(std::mt19937_64& rng, const abelian::Algebra& a) {
  std::uniform_real_distribution<double> u(0.05, 1.0);
  std::vector<double> w(a.dim());
  double total = 0.0;
  for (double& v : w) total += (v = u(rng));
  for (double& v : w) v /= total;
  double partial = 0.0;
  for (std::size_t i = 0; i + 1 < w.size(); ++i) partial += w[i];
  w.back() = 1.0 - partial;
  return abelian::State(a, std::move(w));
}

abelian::Element random_element(std::mt19937_64& rng, const abelian::Algebra& a,
                                bool self_adjoint) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<abelian::cplx> c(a.dim());
  for (auto& v : c) {
    v = self_adjoint ? abelian::cplx(u(rng), 0.0) : abelian::cplx(u(rng), u(rng));
  }
  return abelian::Element(a, std::move(c));
}

std::vector<double> random_row(std::mt19937_64& rng, std::size_t n) {
  std::uniform_real_distribution<double> u(0.05, 1.0);
  std::vector<double> row(n);
  double total = 0.0;
  for (double& v : row) total += (v = u(rng));
  for (double& v : row) v /= total;
  double partial = 0.0;
  for (std::size_t j = 0; j + 1 < n; ++j) partial += row[j];
  row.back() = 1.0 - partial;
  return row;
}

// ---- criterion 1: CLI entropy closed forms -------------------------------

void crit_entropy_cli(Check& c) {
  const CliResult even = run_cli("entropy --probs 0.5,0.5 --format json");
  c.require(even.status == 0, "entropy 0.5,0.5 exited with " + std::to_string(even.status));
  if (even.status == 0) {
    const double h = nlohmann::json::parse(even.out).at("entropy_bits").get<double>();
    c.require(std::abs(h - 1.0) <= 1e-12, "entropy(0.5,0.5) = " + std::to_string(h));
  }
  const CliResult skew = run_cli("entropy --probs 0.3,0.7 --format json");
  c.require(skew.status == 0, "entropy 0.3,0.7 exited with " + std::to_string(skew.status));
  if (skew.status == 0) {
    const double h = nlohmann::json::parse(skew.out).at("entropy_bits").get<double>();
    c.require(std::abs(h - 0.881291) <= 1e-6, "entropy(0.3,0.7) = " + std::to_string(h));
  }
}

// ---- criterion 2: spectral structure suite -------------------------------

void crit_structure(Check& c) {
  std::mt19937_64 rng(2024);
  for (int it = 0; it < 1000; ++it) {
    const abelian::Algebra a(2 + std::size_t(it) % 7);
    const abelian::Element x = random_element(rng, a, false);

    const double lhs = (x * x.star()).norm();
    const double rhs = x.norm() * x.norm();
    c.require(std::abs(lhs - rhs) <= 1e-12 * std::max(1.0, rhs), "norm identity broke");

    const auto terms = abelian::spectral_decomposition(x);
    abelian::Element sum = abelian::Element::zero(a);
    for (const auto& t : terms) sum = sum + t.value * t.projection;
    c.require((x - sum).norm() <= 1e-12 * std::max(1.0, x.norm()),
              "spectral reconstruction off at iteration " + std::to_string(it));
    for (std::size_t i = 0; i < terms.size(); ++i) {
      for (std::size_t j = i + 1; j < terms.size(); ++j) {
        c.require((terms[i].projection * terms[j].projection).is_zero(0.0),
                  "spectral projections not orthogonal");
      }
    }
  }
}

// ---- criterion 3: distribution function laws ------------------------------

void crit_distribution(Check& c) {
  std::mt19937_64 rng(31);
  for (int it = 0; it < 500; ++it) {
    const abelian::Algebra a(2 + std::size_t(it) % 7);
    const abelian::State omega = random_state(rng, a);
    const abelian::Element x = random_element(rng, a, true);
    const double nx = x.norm();

    c.require(std::abs(abelian::cdf_at(omega, x, -nx - 1.0)) <= 1e-12, "cdf not 0 below the range");
    c.require(std::abs(abelian::cdf_at(omega, x, nx) - 1.0) <= 1e-12, "cdf not 1 at the top");

    const abelian::Cdf full = abelian::cdf(omega, x);
    double acc = 0.0, prev = -1.0;
    for (std::size_t i = 0; i < full.points.size(); ++i) {
      c.require(full.masses[i] >= -1e-15, "negative jump mass");
      acc += full.masses[i];
      c.require(acc >= prev - 1e-15, "cdf not monotone");
      prev = acc;
    }
    c.require(std::abs(acc - 1.0) <= 1e-12, "cdf total mass != 1");
  }

  // joint distribution factorizes on product states
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int it = 0; it < 50; ++it) {
    const abelian::Algebra a2(2), a3(3), prod(6);
    const abelian::State wa = random_state(rng, a2), wb = random_state(rng, a3);
    std::vector<double> joint_w(6);
    for (std::size_t p = 0; p < 2; ++p) {
      for (std::size_t q = 0; q < 3; ++q) joint_w[p * 3 + q] = wa.weight(p) * wb.weight(q);
    }
    const abelian::State omega(prod, std::move(joint_w), true);
    const abelian::Element x = random_element(rng, a2, true);
    const abelian::Element y = random_element(rng, a3, true);
    std::vector<abelian::cplx> xc(6), yc(6);
    for (std::size_t p = 0; p < 2; ++p) {
      for (std::size_t q = 0; q < 3; ++q) {
        xc[p * 3 + q] = x.coeff(p);
        yc[p * 3 + q] = y.coeff(q);
      }
    }
    const std::vector<abelian::Element> xs{abelian::Element(prod, std::move(xc)),
                                           abelian::Element(prod, std::move(yc))};
    for (int rep = 0; rep < 4; ++rep) {
      const double s = u(rng) * (x.norm() + 0.2), t = u(rng) * (y.norm() + 0.2);
      const std::vector<double> ts{s, t};
      const double lhs = abelian::joint_cdf_at(omega, xs, ts);
      const double rhs = abelian::cdf_at(wa, x, s) * abelian::cdf_at(wb, y, t);
      c.require(std::abs(lhs - rhs) <= 1e-12, "joint cdf does not factorize");
    }
  }

  // Chebyshev on 1000 random instances with eps in (0, 2||x||]
  std::uniform_real_distribution<double> ueps(1e-3, 1.0);
  for (int it = 0; it < 1000; ++it) {
    const abelian::Algebra a(2 + std::size_t(it) % 7);
    const abelian::State omega = random_state(rng, a);
    const abelian::Element x = random_element(rng, a, true);
    const double eps = ueps(rng) * 2.0 * std::max(x.norm(), 1e-3);
    const auto cb = abelian::chebyshev_check(omega, x, eps);
    c.require(cb.holds && cb.lhs <= cb.rhs + 1e-12, "Chebyshev bound violated");
  }
}

// ---- criterion 4: law of large numbers moments ----------------------------

double brute_second_moment(double p, unsigned n) {
  const double w[2] = {1.0 - p, p};
  double acc = 0.0;
  for (std::uint32_t mask = 0; mask < (1u << n); ++mask) {
    double prob = 1.0, sum = 0.0;
    for (unsigned t = 0; t < n; ++t) {
      const unsigned bit = (mask >> t) & 1u;
      prob *= w[bit];
      sum += double(bit);
    }
    const double dev = sum / double(n) - p;
    acc += prob * dev * dev;
  }
  return acc;
}

void crit_lln(Check& c) {
  for (const double p : {0.5, 0.3, 0.25, 0.9}) {
    const abelian::State f(abelian::Algebra(2), {1.0 - p, p});
    for (unsigned n = 1; n <= 20; ++n) {
      const double got = abelian::lln_moment(f, n, 2);
      const double want = p * (1.0 - p) / double(n);
      c.require(std::abs(got - want) <= 1e-12,
                "second moment off at p=" + std::to_string(p) + " n=" + std::to_string(n));
    }
  }
  for (const double p : {0.5, 0.3}) {
    const abelian::State f(abelian::Algebra(2), {1.0 - p, p});
    for (unsigned n = 1; n <= 16; ++n) {
      const double got = abelian::lln_moment(f, n, 2);
      c.require(std::abs(got - brute_second_moment(p, n)) <= 1e-12,
                "enumeration disagrees at p=" + std::to_string(p) + " n=" + std::to_string(n));
    }
  }
  const abelian::State half(abelian::Algebra(2), {0.5, 0.5});
  const double g16 = abelian::clt_gap(half, 16);
  const double g1 = abelian::clt_gap(half, 1);
  c.require(g16 < g1, "normal approximation did not improve from n=1 to n=16");
}

// ---- criterion 5: waiting-time distribution -------------------------------

double brute_wait_11(unsigned m_max) {
  const unsigned len = m_max + 2;
  std::uint64_t hits = 0;
  for (std::uint32_t mask = 0; mask < (1u << len); ++mask) {
    for (unsigned s = 0; s <= m_max; ++s) {
      if (((mask >> s) & 3u) == 3u) {
        ++hits;
        break;
      }
    }
  }
  return double(hits) / double(std::uint64_t(1) << len);
}

void crit_waiting(Check& c) {
  const abelian::State half(abelian::Algebra(2), {0.5, 0.5});
  const double f3 = abelian::waiting_cdf(half, abelian::PrefixString{1}, 3.0);
  c.require(std::abs(f3 - 0.9375) <= 1e-12, "F_W(3) for pattern 1 = " + std::to_string(f3));

  const abelian::PrefixString pat{1, 1};
  for (unsigned m = 0; m <= 10; ++m) {
    const double want = brute_wait_11(m);
    c.require(abelian::waiting_cdf(half, pat, double(m)) == want,
              "pattern 11 mismatch at t=" + std::to_string(m));
    c.require(abelian::waiting_cdf(half, pat, double(m) + 0.5) == want,
              "pattern 11 mismatch at t=" + std::to_string(m) + ".5");
  }

  const auto ys = abelian::waiting_observables(abelian::Algebra(2), pat, 10);
  for (std::size_t i = 0; i < ys.size(); ++i) {
    for (std::size_t j = i + 1; j < ys.size(); ++j) {
      c.require((ys[i] * ys[j]).is_zero(), "waiting observables not orthogonal");
    }
  }
}

// ---- criterion 6: typical sets and equipartition --------------------------

struct TypicalOracle {
  std::uint64_t count = 0;
  double mass = 0.0;
};

// Replicates the per-string membership arithmetic of the type-class route,
// so counts must agree exactly; masses go through a different summation
// order and are compared at 1e-12.
TypicalOracle brute_typical(const std::vector<double>& w, unsigned n, double eps,
                            double tol = 1e-9) {
  const std::size_t d = w.size();
  std::vector<double> lw(d);
  for (std::size_t i = 0; i < d; ++i) lw[i] = std::log2(w[i]);
  double entropy = 0.0;
  for (std::size_t i = 0; i < d; ++i) entropy -= w[i] * lw[i];

  TypicalOracle out;
  double comp = 0.0;
  std::vector<std::uint32_t> s(n, 0);
  std::vector<std::uint64_t> counts(d, 0);
  std::uint64_t total = 1;
  for (unsigned i = 0; i < n; ++i) total *= d;
  for (std::uint64_t idx = 0; idx < total; ++idx) {
    std::uint64_t v = idx;
    std::fill(counts.begin(), counts.end(), 0);
    for (unsigned t = 0; t < n; ++t) {
      s[t] = std::uint32_t(v % d);
      ++counts[s[t]];
      v /= d;
    }
    double lm = 0.0;
    for (std::size_t i = 0; i < d; ++i) lm += double(counts[i]) * lw[i];
    if (std::abs(-lm / double(n) - entropy) <= eps + tol) {
      ++out.count;
      double pm = 1.0;
      for (unsigned t = 0; t < n; ++t) pm *= w[s[t]];
      const double y = pm - comp;
      const double t2 = out.mass + y;
      comp = (t2 - out.mass) - y;
      out.mass = t2;
    }
  }
  return out;
}

void crit_aep(Check& c) {
  const std::vector<double> w{0.3, 0.7};
  const abelian::State omega(abelian::Algebra(2), w);
  const double eps = 0.1;

  for (unsigned n = 1; n <= 20; ++n) {
    const auto got = abelian::typical_summary(omega, n, eps);
    const auto want = brute_typical(w, n, eps);
    c.require(got.count_decimal == std::to_string(want.count),
              "typical count mismatch at n=" + std::to_string(n));
    c.require(std::abs(got.prob_mass - want.mass) <= 1e-12,
              "typical mass mismatch at n=" + std::to_string(n));
    c.require(got.sandwich_holds, "count sandwich broke at n=" + std::to_string(n));
  }

  // n0 chosen by sweep: mass crosses 0.9 by n = 100 and stays there
  for (const unsigned n : {100u, 200u}) {
    const auto s = abelian::typical_summary(omega, n, eps);
    c.require(s.prob_mass > 0.9, "prob mass <= 0.9 at n=" + std::to_string(n));
    c.require(s.sandwich_holds, "count sandwich broke at n=" + std::to_string(n));
  }

  const auto big = abelian::typical_summary(omega, 10000, eps, abelian::ZeroPolicy::Strict,
                                            abelian::Budget{64});
  c.require(big.prob_mass > 0.99, "prob mass did not saturate at n=10000");
  c.require(big.sandwich_holds, "count sandwich broke at n=10000");
}

// ---- criterion 7: Kraft and noiseless bounds -------------------------------

void crit_kraft(Check& c) {
  const std::vector<unsigned> lens{1, 2, 3, 3};
  const auto kc = abelian::kraft_check(lens, 2);
  c.require(kc.holds && kc.slack == 0.0 && kc.slack_exact == "0",
            "lengths (1,2,3,3) base 2 should be tight");

  for (std::size_t d = 2; d <= 33; ++d) {
    const abelian::Code code = abelian::binary_recode(d);
    c.require(code.is_prefix_free(), "recode not prefix-free at d=" + std::to_string(d));
    c.require(code.kraft().holds, "recode violates Kraft at d=" + std::to_string(d));
  }

  const abelian::Code dyadic(2, {{0}, {1, 0}, {1, 1, 0}, {1, 1, 1}});
  c.require(dyadic.is_prefix_free() && dyadic.kraft().holds, "dyadic code rejected");
  const abelian::State src(abelian::Algebra(4), {0.5, 0.25, 0.125, 0.125});
  const auto nb = abelian::noiseless_bound_check(src, dyadic);
  c.require(nb.holds, "noiseless bound rejected the dyadic code");
  c.require(std::abs(nb.average_length - nb.bound) <= 1e-12,
            "dyadic code should meet the bound with equality");
  c.require(std::abs(nb.average_length - 1.75) <= 1e-12, "dyadic average length != 1.75");
}

// ---- criterion 8: channel classification ----------------------------------

void crit_classification(Check& c) {
  std::mt19937_64 rng(47);
  for (int it = 0; it < 20; ++it) {
    const std::size_t m = 2 + rng() % 4, n = 2 + rng() % 4;
    const std::vector<double> row = random_row(rng, n);
    const abelian::Channel flat(std::vector<std::vector<double>>(m, row));
    c.require(abelian::is_useless(flat).useless, "rank-1 channel not flagged useless");
    const abelian::State omega = random_state(rng, abelian::Algebra(m));
    c.require(std::abs(abelian::mutual_information(omega, flat).value) <= 1e-10,
              "rank-1 channel carries information");
  }

  for (const std::size_t d : {2u, 3u, 5u}) {
    const abelian::Channel id = abelian::Channel::identity(d);
    c.require(abelian::is_lossless(id).lossless, "identity channel not lossless");
    const abelian::State omega = random_state(rng, abelian::Algebra(d));
    const double i = abelian::mutual_information(omega, id).value;
    c.require(std::abs(i - abelian::shannon_entropy(omega)) <= 1e-12,
              "identity channel lost entropy");
  }

  const abelian::State half(abelian::Algebra(2), {0.5, 0.5});
  const double i_bsc = abelian::mutual_information(half, abelian::Channel::bsc(0.1)).value;
  c.require(std::abs(i_bsc - 0.531004) <= 1e-6, "BSC(0.1) capacity point off: " +
                                                    std::to_string(i_bsc));
}

// ---- criterion 9: block-coding error decay ---------------------------------

void crit_coding(Check& c) {
  const abelian::Channel bsc = abelian::Channel::bsc(0.05);
  const abelian::State half(abelian::Algebra(2), {0.5, 0.5});
  const double rate = 0.4, eps = 0.1;
  double prev_mean = 2.0;
  for (const unsigned k : {4u, 8u, 12u}) {
    const auto reports = abelian::coding_experiment(
        bsc, half, rate, k, 50, abelian::CodebookPolicy::UniformWithoutReplacement, 7);
    const auto agg = abelian::aggregate_reports(reports);
    c.require(agg.mean_error < prev_mean,
              "mean error did not decrease at k=" + std::to_string(k));
    prev_mean = agg.mean_error;
    for (const auto& rep : reports) {
      const auto zk = abelian::zk_diagnostic(bsc, half, rate, eps, k, rep.codebook);
      c.require(zk.holds, "zk bound violated at k=" + std::to_string(k));
    }
  }
}

// ---- criterion 10: seeded reproducibility ----------------------------------

void crit_reproducibility(Check& c) {
  namespace fs = std::filesystem;
  const fs::path cfg = fs::temp_directory_path() / "abelian_accept_sweep.json";
  {
    std::ofstream f(cfg);
    f << R"({"kind":"coding","rows":[[0.95,0.05],[0.05,0.95]],"input_probs":[0.5,0.5],)"
      << R"("rate":0.4,"eps":0.1,"trials":8,"policy":"uniform","k_values":[4,6],"seed":7})";
  }
  for (const std::string fmt : {"json", "csv"}) {
    const std::string args = "sweep --config " + cfg.string() + " --format " + fmt;
    const CliResult a = run_cli(args);
    const CliResult b = run_cli(args);
    c.require(a.status == 0 && b.status == 0, "sweep exited nonzero in format " + fmt);
    c.require(!a.out.empty(), "sweep produced no output in format " + fmt);
    c.require(a.out == b.out, "sweep reports differ between identical runs in format " + fmt);
  }
  fs::remove(cfg);
}

}  // namespace

int main(int argc, char** argv) {
  if (argc < 2) {
    std::fprintf(stderr, "usage: acceptance <path-to-abelian_info>\n");
    return 2;
  }
  g_cli = argv[1];

  bool all = true;
  all &= run_criterion(1, "CLI entropy closed forms", 1.0, crit_entropy_cli);
  all &= run_criterion(2, "spectral structure suite", 5.0, crit_structure);
  all &= run_criterion(3, "distribution function laws", 0.0, crit_distribution);
  all &= run_criterion(4, "law of large numbers moments", 0.0, crit_lln);
  all &= run_criterion(5, "waiting-time distribution", 0.0, crit_waiting);
  all &= run_criterion(6, "typical sets and equipartition", 30.0, crit_aep);
  all &= run_criterion(7, "Kraft and noiseless bounds", 0.0, crit_kraft);
  all &= run_criterion(8, "channel classification", 0.0, crit_classification);
  all &= run_criterion(9, "block-coding error decay", 120.0, crit_coding);
  all &= run_criterion(10, "seeded reproducibility", 0.0, crit_reproducibility);

  return all ? 0 : 1;
}
