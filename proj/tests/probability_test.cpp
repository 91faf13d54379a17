#include <doctest.h>

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include "abelian/budget.hpp"
#include "abelian/errors.hpp"
#include "abelian/probability.hpp"
#include "test_util.hpp"

using abelian::Algebra;
using abelian::Budget;
using abelian::Element;
using abelian::MarkovChain;
using abelian::PrefixString;
using abelian::State;
using abelian::cplx;

namespace {

State bernoulli(double p) { return State(Algebra(2), {1.0 - p, p}); }

Element coords(const Algebra& a) {
  std::vector<double> c(a.dim());
  for (std::size_t i = 0; i < c.size(); ++i) c[i] = double(i);
  return Element(a, c);
}

// k-th central moment of the sample mean by direct string enumeration
double brute_moment(const State& f, unsigned n, unsigned k) {
  const std::size_t d = f.dim();
  double mu = 0.0;
  for (std::size_t i = 0; i < d; ++i) mu += f.weight(i) * double(i);
  std::uint64_t total = 1;
  for (unsigned i = 0; i < n; ++i) total *= d;
  double acc = 0.0;
  for (std::uint64_t s = 0; s < total; ++s) {
    double prob = 1.0, sum = 0.0;
    std::uint64_t rest = s;
    for (unsigned pos = 0; pos < n; ++pos) {
      const std::size_t sym = rest % d;
      rest /= d;
      prob *= f.weight(sym);
      sum += double(sym);
    }
    acc += prob * std::pow(sum / double(n) - mu, double(k));
  }
  return acc;
}

// P(pattern occurs starting at some position <= m_max) over full strings
double brute_waiting(const State& f, const PrefixString& pattern, unsigned m_max) {
  const std::size_t d = f.dim();
  const unsigned len = m_max + unsigned(pattern.size());
  std::uint64_t total = 1;
  for (unsigned i = 0; i < len; ++i) total *= d;
  double acc = 0.0;
  for (std::uint64_t s = 0; s < total; ++s) {
    std::vector<std::uint32_t> str(len);
    std::uint64_t rest = s;
    for (unsigned pos = len; pos > 0; --pos) {
      str[pos - 1] = std::uint32_t(rest % d);
      rest /= d;
    }
    bool hit = false;
    for (unsigned m = 0; m <= m_max && !hit; ++m) {
      hit = std::equal(pattern.begin(), pattern.end(), str.begin() + m);
    }
    if (!hit) continue;
    double prob = 1.0;
    for (std::uint32_t sym : str) prob *= f.weight(sym);
    acc += prob;
  }
  return acc;
}

}  // namespace

TEST_CASE("distribution function basics") {
  const Algebra a2(2);
  const State half(a2, {0.5, 0.5});
  const Element x = coords(a2);

  CHECK(cdf_at(half, x, -0.5) == 0.0);
  CHECK(cdf_at(half, x, 0.0) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(cdf_at(half, x, 1.0) == doctest::Approx(1.0).epsilon(1e-15));

  const Algebra a3(3);
  const State w3(a3, {0.25, 0.25, 0.5});
  const Element y(a3, std::vector<double>{2.0, 2.0, 5.0});
  CHECK(cdf_at(w3, y, 2.0) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(cdf_at_strict(w3, y, 2.0) == 0.0);
  CHECK(cdf_at_strict(w3, y, 5.0) == doctest::Approx(0.5).epsilon(1e-15));

  const auto f = cdf(w3, y);
  REQUIRE(f.points.size() == 2);
  CHECK(f.points[0] == 2.0);
  CHECK(f.points[1] == 5.0);
  CHECK(f.masses[0] == doctest::Approx(0.5).epsilon(1e-15));
  double mass = 0.0;
  for (double m : f.masses) mass += m;
  CHECK(mass == doctest::Approx(1.0).epsilon(1e-12));

  const Element bad(a2, std::vector<cplx>{cplx(0, 1), cplx(1, 0)});
  CHECK_THROWS_AS(cdf_at(half, bad, 0.0), abelian::NotSelfAdjointError);
  CHECK_THROWS_AS(cdf_at_strict(half, bad, 0.0), abelian::NotSelfAdjointError);
}

TEST_CASE("distribution boundary and monotonicity on random pairs") {
  std::mt19937_64 rng(53);
  for (int it = 0; it < 200; ++it) {
    const Algebra a(2 + rng() % 7);
    const State w = testutil::random_state(rng, a);
    const Element x = testutil::random_element(rng, a, /*self_adjoint=*/true);
    const double nx = x.norm();

    CHECK(cdf_at(w, x, -nx - 1.0) == 0.0);
    CHECK(cdf_at(w, x, nx) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(cdf_at_strict(w, x, -nx) == 0.0);

    const auto f = cdf(w, x);
    double prev = 0.0, mass = 0.0;
    for (std::size_t i = 0; i < f.points.size(); ++i) {
      if (i > 0) CHECK(f.points[i] > f.points[i - 1]);
      CHECK(f.masses[i] >= 0.0);
      mass += f.masses[i];
      const double cur = f.at(f.points[i]);
      CHECK(cur >= prev);
      prev = cur;
    }
    CHECK(mass == doctest::Approx(1.0).epsilon(1e-12));

    // the jump list agrees with the direct kernels at random thresholds
    std::uniform_real_distribution<double> ut(-nx - 0.5, nx + 0.5);
    for (int j = 0; j < 5; ++j) {
      const double t = ut(rng);
      CHECK(f.at(t) == doctest::Approx(cdf_at(w, x, t)).epsilon(1e-12));
      CHECK(f.below(t) == doctest::Approx(cdf_at_strict(w, x, t)).epsilon(1e-12));
    }
  }
}

TEST_CASE("approximate identity diagnostic converges") {
  const Algebra a2(2);
  const State half(a2, {0.5, 0.5});
  const Element x = coords(a2);

  // non-atom threshold: the net climbs to the exact value
  const auto seq = cdf_approx_identity(half, x, 0.5, 2000);
  REQUIRE(seq.size() == 2000);
  CHECK(std::abs(seq.front() - 0.5) > std::abs(seq.back() - 0.5));
  CHECK(std::abs(seq.back() - 0.5) <= 2e-3);

  // at an atom the net splits the jump in half
  const auto at_atom = cdf_approx_identity(half, x, 0.0, 2000);
  CHECK(std::abs(at_atom.back() - 0.25) <= 2e-3);
}

TEST_CASE("joint distribution") {
  const Algebra a4(4);
  const Element first(a4, std::vector<double>{0.0, 0.0, 1.0, 1.0});
  const Element second(a4, std::vector<double>{0.0, 1.0, 0.0, 1.0});
  const std::vector<Element> xs{first, second};

  const State prod(a4, {0.25, 0.25, 0.25, 0.25});
  const std::vector<double> t00{0.0, 0.0};
  CHECK(joint_cdf_at(prod, xs, t00) == doctest::Approx(0.25).epsilon(1e-15));

  const std::vector<double> thigh{5.0, 5.0};
  CHECK(joint_cdf_at(prod, xs, thigh) == doctest::Approx(1.0).epsilon(1e-15));

  // factorization on a product state, at several thresholds
  const State skew(a4, {0.2 * 0.3, 0.2 * 0.7, 0.8 * 0.3, 0.8 * 0.7});
  for (double t1 : {-1.0, 0.0, 1.0}) {
    for (double t2 : {-1.0, 0.0, 1.0}) {
      const std::vector<double> ts{t1, t2};
      CHECK(joint_cdf_at(skew, xs, ts) ==
            doctest::Approx(cdf_at(skew, first, t1) * cdf_at(skew, second, t2)).epsilon(1e-12));
    }
  }

  // correlation breaks the product rule
  const State diag(a4, {0.5, 0.0, 0.0, 0.5});
  CHECK(joint_cdf_at(diag, xs, t00) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(cdf_at(diag, first, 0.0) * cdf_at(diag, second, 0.0) ==
        doctest::Approx(0.25).epsilon(1e-15));

  const std::vector<double> short_ts{0.0};
  CHECK_THROWS_AS(joint_cdf_at(diag, xs, short_ts), abelian::ValidationError);
}

TEST_CASE("event projections") {
  const Algebra a3(3);
  const Element x = coords(a3);
  const Element gt = event_gt(x, 0.5);
  CHECK(gt.coeff(0) == cplx(0, 0));
  CHECK(gt.coeff(1) == cplx(1, 0));
  CHECK(gt.coeff(2) == cplx(1, 0));
  CHECK(event_gt(x, x.norm()).is_zero(0.0));
  CHECK((event_le(x, 0.5) + gt - Element::unit(a3)).is_zero(0.0));

  // the squared event agrees with the absolute one
  std::mt19937_64 rng(59);
  for (int it = 0; it < 200; ++it) {
    const Algebra a(2 + rng() % 7);
    const Element y = testutil::random_element(rng, a, /*self_adjoint=*/true);
    const auto abs_y = decompose_self_adjoint(y).abs;
    std::uniform_real_distribution<double> ue(0.01, y.norm() + 0.1);
    const double eps = ue(rng);
    const Element e1 = event_gt(abs_y, eps);
    const Element e2 = event_gt(y * y, eps * eps);
    CHECK((e1 - e2).is_zero(0.0));
  }
}

TEST_CASE("chebyshev inequality") {
  const Algebra a2(2);
  const State half(a2, {0.5, 0.5});
  const Element x = coords(a2);

  const auto c1 = chebyshev_check(half, x, 1.0);
  CHECK(c1.lhs == 0.0);
  CHECK(c1.rhs == doctest::Approx(0.25).epsilon(1e-12));
  CHECK(c1.holds);

  const Element pm(a2, std::vector<double>{-1.0, 1.0});
  const auto c2 = chebyshev_check(half, pm, 0.5);
  CHECK(c2.lhs == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(c2.rhs == doctest::Approx(4.0).epsilon(1e-12));
  CHECK(c2.holds);

  CHECK_THROWS_AS(chebyshev_check(half, x, 0.0), abelian::ValidationError);
  CHECK_THROWS_AS(chebyshev_check(half, x, -1.0), abelian::ValidationError);

  std::mt19937_64 rng(61);
  for (int it = 0; it < 500; ++it) {
    const Algebra a(2 + rng() % 7);
    const State w = testutil::random_state(rng, a);
    const Element y = testutil::random_element(rng, a, /*self_adjoint=*/true);
    std::uniform_real_distribution<double> ue(1e-3, 2.0 * y.norm() + 1e-3);
    CHECK(chebyshev_check(w, y, ue(rng)).holds);
  }
}

TEST_CASE("law of large numbers moments") {
  const State f = bernoulli(0.3);
  for (unsigned n = 1; n <= 20; ++n) {
    CHECK(lln_moment(f, n, 2) == doctest::Approx(0.3 * 0.7 / double(n)).epsilon(1e-12));
  }

  // scaled second moment is constant in n
  const double base = lln_moment(f, 1, 2);
  for (unsigned n = 2; n <= 20; ++n) {
    CHECK(lln_moment(f, n, 2) * double(n) == doctest::Approx(base).epsilon(1e-12));
  }

  // n = 1 reduces to the central moment of the coordinate observable
  CHECK(lln_moment(bernoulli(0.5), 1, 4) == doctest::Approx(0.0625).epsilon(1e-12));
  CHECK(lln_moment(bernoulli(0.5), 2, 2) == doctest::Approx(0.125).epsilon(1e-12));

  // type-class enumeration matches the direct string sum
  const Algebra a3(3);
  const State f3(a3, {0.2, 0.3, 0.5});
  for (unsigned n : {1u, 2u, 3u, 5u, 8u}) {
    CHECK(lln_moment(f, n, 4) == doctest::Approx(brute_moment(f, n, 4)).epsilon(1e-12));
    CHECK(lln_moment(f3, n, 4) == doctest::Approx(brute_moment(f3, n, 4)).epsilon(1e-12));
    CHECK(lln_moment(f3, n, 6) == doctest::Approx(brute_moment(f3, n, 6)).epsilon(1e-12));
  }

  // the closed form needs no enumeration budget
  CHECK(lln_moment(f, 1000000, 2) == doctest::Approx(0.21 / 1e6).epsilon(1e-12));
  CHECK_THROWS_AS(lln_moment(f, 40, 4, Budget{10}), abelian::BudgetError);
  CHECK_THROWS_AS(lln_moment(f, 0, 2), abelian::ValidationError);
}

TEST_CASE("central limit gap") {
  CHECK(abelian::normal_cdf(0.0) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(abelian::normal_cdf(1.0) == doctest::Approx(0.841344746069).epsilon(1e-9));
  CHECK(abelian::normal_cdf(-8.0) <= 1e-14);

  const State f = bernoulli(0.5);
  const double g1 = clt_gap(f, 1);
  CHECK(g1 == doctest::Approx(abelian::normal_cdf(1.0) - 0.5).epsilon(1e-12));
  const double g16 = clt_gap(f, 16);
  CHECK(g16 < g1);
  CHECK(clt_gap(f, 64, Budget{64}) < g16);

  CHECK_THROWS_AS(clt_gap(State(Algebra(2), {1.0, 0.0}), 4), abelian::ComputationError);
  CHECK_THROWS_AS(clt_gap(f, 100, Budget{24}), abelian::BudgetError);
}

TEST_CASE("binomial distribution") {
  CHECK(binomial_cdf(bernoulli(0.5), 2, 1) == doctest::Approx(0.75).epsilon(1e-12));
  CHECK(binomial_cdf(bernoulli(0.3), 7, 7) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(binomial_cdf(bernoulli(0.3), 4, 2) == doctest::Approx(0.9163).epsilon(1e-10));

  // dense and closed-form routes agree
  for (unsigned k = 0; k <= 9; ++k) {
    const double dense = binomial_cdf(bernoulli(0.3), 9, k);
    const double closed = binomial_cdf(bernoulli(0.3), 9, k, Budget{3});
    CHECK(dense == doctest::Approx(closed).epsilon(1e-12));
  }

  CHECK_THROWS_AS(binomial_cdf(bernoulli(0.3), 4, 5), abelian::ValidationError);
  CHECK_THROWS_AS(binomial_cdf(bernoulli(0.3), 0, 0), abelian::ValidationError);
  CHECK_THROWS_AS(binomial_cdf(State::uniform(Algebra(3)), 4, 2), abelian::ValidationError);

  // Z = sum_r r Y_r: expectation is the binomial mean n p
  const Element z = abelian::binomial_observable(6);
  const Element level = power_output(bernoulli(0.3), 6);
  double mean = 0.0;
  for (std::size_t i = 0; i < z.dim(); ++i) mean += level.coeff(i).real() * z.coeff(i).real();
  CHECK(mean == doctest::Approx(6 * 0.3).epsilon(1e-12));
}

TEST_CASE("waiting time for a pattern") {
  const State half = bernoulli(0.5);

  CHECK(waiting_cdf(half, {1}, 3.0) == doctest::Approx(0.9375).epsilon(1e-13));
  CHECK(waiting_cdf(half, {1}, 3.9) == doctest::Approx(0.9375).epsilon(1e-13));
  CHECK(waiting_cdf(half, {1}, -0.5) == 0.0);

  // geometric closed form at several cutoffs
  for (unsigned m = 0; m <= 8; ++m) {
    const double expect = 1.0 - std::pow(0.5, double(m + 1));
    CHECK(waiting_cdf(half, {1}, double(m)) == doctest::Approx(expect).epsilon(1e-13));
  }

  // the pattern "11" against direct enumeration, dyadic so the sums are exact
  for (unsigned m = 0; m <= 10; ++m) {
    CHECK(waiting_cdf(half, {1, 1}, double(m)) == brute_waiting(half, {1, 1}, m));
  }
  // and for a biased factor, to rounding error
  const State biased = bernoulli(0.3);
  for (unsigned m = 0; m <= 8; ++m) {
    CHECK(waiting_cdf(biased, {1, 0}, double(m)) ==
          doctest::Approx(brute_waiting(biased, {1, 0}, m)).epsilon(1e-12));
  }

  // the orthogonalized observables are pairwise-orthogonal projections
  const Algebra a2(2);
  const auto ys = waiting_observables(a2, {1, 1}, 6);
  REQUIRE(ys.size() == 7);
  double mass = 0.0;
  for (std::size_t i = 0; i < ys.size(); ++i) {
    CHECK((ys[i] * ys[i] - ys[i]).is_zero());
    CHECK((ys[i].star() - ys[i]).is_zero());
    for (std::size_t j = i + 1; j < ys.size(); ++j) {
      CHECK((ys[i] * ys[j]).is_zero());
    }
    mass += texpect(abelian::ProductState::iid(half), ys[i]).real();
  }
  CHECK(mass <= 1.0 + 1e-12);

  CHECK_THROWS_AS(waiting_cdf(half, {}, 3.0), abelian::ValidationError);
}

TEST_CASE("markov chains") {
  const Algebra a2(2);
  const State init(a2, {0.25, 0.75});

  CHECK_THROWS_AS(MarkovChain(init, {}), abelian::ValidationError);
  CHECK_THROWS_AS(MarkovChain(init, {{0.5, 0.5, 0.5}}), abelian::ValidationError);
  CHECK_THROWS_AS(MarkovChain(init, {{0.5, 0.4, 0.3, 0.7}}), abelian::ValidationError);
  CHECK_THROWS_AS(MarkovChain(init, {{1.2, -0.2, 0.3, 0.7}}), abelian::ValidationError);

  // identity map: paths stay put
  const MarkovChain id(init, {{1.0, 0.0, 0.0, 1.0}});
  const std::vector<std::size_t> stay{1, 1, 1};
  CHECK(markov_path_probability(id, stay) == doctest::Approx(0.75).epsilon(1e-15));
  const std::vector<std::size_t> move{0, 1};
  CHECK(markov_path_probability(id, move) == 0.0);

  // unitality: the unit is fixed by every map
  const MarkovChain chain(init, {{0.9, 0.1, 0.4, 0.6}});
  CHECK((chain.apply_map(0, Element::unit(a2)) - Element::unit(a2)).is_zero(1e-12));

  // stationary closed form: weight of the final index times the entry product
  std::mt19937_64 rng(67);
  for (int it = 0; it < 100; ++it) {
    const Algebra a(2 + rng() % 3);
    const State w = testutil::random_state(rng, a);
    const auto rows = testutil::random_stochastic(rng, a.dim(), a.dim());
    std::vector<double> flat;
    for (const auto& r : rows) flat.insert(flat.end(), r.begin(), r.end());
    const MarkovChain mc(w, {flat});

    std::vector<std::size_t> path(2 + rng() % 4);
    for (auto& idx : path) idx = rng() % a.dim();
    double expect = w.weight(path.back());
    for (std::size_t k = path.size() - 1; k > 0; --k) {
      expect *= mc.map_entry(0, path[k], path[k - 1]);
    }
    CHECK(markov_path_probability(mc, path) == doctest::Approx(expect).epsilon(1e-10));
  }

  // a single-index path is the one-step stay probability
  const MarkovChain mc2(init, {{0.9, 0.1, 0.4, 0.6}});
  const std::vector<std::size_t> one{1};
  CHECK(markov_path_probability(mc2, one) == doctest::Approx(0.75 * 0.6).epsilon(1e-12));

  // cycled maps apply in step order
  const std::vector<double> m0{0.9, 0.1, 0.4, 0.6};
  const std::vector<double> m1{0.2, 0.8, 0.5, 0.5};
  const MarkovChain cyc(init, {m0, m1});
  CHECK(cyc.steps() == 2);
  CHECK(!cyc.stationary());
  const std::vector<std::size_t> p3{0, 1, 0};
  // y1 = phi0(z0); y2 = phi1(z1 y1); p = omega(z0 y2)
  const double expect = init.weight(0) * m1[0 * 2 + 1] * m0[1 * 2 + 0];
  CHECK(markov_path_probability(cyc, p3) == doctest::Approx(expect).epsilon(1e-12));
  CHECK(cyc.map_entry(2, 0, 1) == m0[1]);  // cycles back to the first map

  // path probabilities of a fixed length marginalize to 1
  const Algebra a3(3);
  const State w3(a3, {0.2, 0.3, 0.5});
  const auto rows3 = testutil::random_stochastic(rng, 3, 3);
  std::vector<double> flat3;
  for (const auto& r : rows3) flat3.insert(flat3.end(), r.begin(), r.end());
  const MarkovChain mc3(w3, {flat3});
  double total = 0.0;
  for (std::size_t i = 0; i < 3; ++i) {
    for (std::size_t j = 0; j < 3; ++j) {
      for (std::size_t k = 0; k < 3; ++k) {
        const std::vector<std::size_t> p{i, j, k};
        total += markov_path_probability(mc3, p);
      }
    }
  }
  CHECK(total == doctest::Approx(1.0).epsilon(1e-12));

  const std::vector<std::size_t> badpath{0, 2};
  CHECK_THROWS_AS(markov_path_probability(mc2, badpath), abelian::ValidationError);
  const std::vector<std::size_t> empty;
  CHECK_THROWS_AS(markov_path_probability(mc2, empty), abelian::ValidationError);
}
