#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "qzrp/cumulants.hpp"
#include "support.hpp"

using namespace qzrp;
using support::rat;

namespace {

ModelParams<Rational> model(int N, int p, const Rational& q) { return ModelParams<Rational>::make(N, p, q); }

Rational delta(int N, int p, const Rational& q) { return delta_exact_resummed(model(N, p, q)).Delta; }

}  // namespace

TEST_CASE("single particle") {
  for (const auto& q : {rat(-1, 2), Rational(0), rat(1, 3), rat(1, 2), Rational(1), Rational(2), Rational(3)}) {
    for (int N = 1; N <= 8; ++N) {
      const auto r = delta_exact_resummed(model(N, 1, q));
      CHECK(r.J == 1);
      CHECK(r.Delta == 1);
    }
  }
}

TEST_CASE("one site, two particles") {
  for (const auto& q : {rat(-1, 2), Rational(0), rat(1, 2), Rational(2), Rational(3)}) {
    const auto r = delta_exact_resummed(model(1, 2, q));
    CHECK(r.Delta == 1 + q);
    CHECK(r.S1 + r.S2 == -1 / (2 * (1 + q)));
  }
  CHECK(delta(1, 2, rat(1, 2)) == rat(3, 2));
}

TEST_CASE("frozen small cases") {
  struct Case {
    int N, p;
    Rational q, J, Delta;
  };
  const std::vector<Case> cases = {
      {2, 2, rat(1, 2), rat(12, 7), rat(600, 343)},
      {3, 2, rat(1, 2), rat(9, 5), rat(231, 125)},
      {3, 2, rat(-1, 2), Rational(1), rat(5, 3)},
      {2, 2, rat(-1, 2), rat(4, 5), rat(136, 125)},
      {3, 2, Rational(2), rat(9, 4), rat(75, 32)},
      {2, 2, Rational(2), rat(12, 5), rat(312, 125)},
      {4, 3, Rational(2), rat(154, 43), rat(305746, 79507)},
      {2, 3, Rational(2), rat(35, 8), rat(1183, 256)},
      {3, 2, Rational(3), rat(12, 5), rat(332, 125)},
      {2, 2, Rational(3), rat(8, 3), rat(80, 27)},
      {4, 3, Rational(3), rat(91, 23), rat(2457, 529)},
      {2, 3, Rational(3), rat(39, 7), rat(2119, 343)},
  };
  for (const auto& c : cases) {
    CAPTURE(c.N);
    CAPTURE(c.p);
    const auto r = delta_exact_resummed(model(c.N, c.p, c.q));
    CHECK(r.J == c.J);
    CHECK(r.Delta == c.Delta);
    CHECK(r.A0 == 0);
  }
}

TEST_CASE("agreement with an independent generator computation") {
  for (const auto& q : {rat(-1, 2), Rational(0), rat(1, 3), rat(1, 2), Rational(2), Rational(3)}) {
    for (int N = 1; N <= 4; ++N) {
      for (int p = 1; p <= 4; ++p) {
        CAPTURE(N);
        CAPTURE(p);
        const auto brute = support::brute_cumulants(N, p, q);
        const auto r = delta_exact_resummed(model(N, p, q));
        CHECK(r.J == brute.J);
        CHECK(r.Delta == brute.Delta);
      }
    }
  }
}

TEST_CASE("q = 1 returns the Poisson values") {
  for (int N = 1; N <= 5; ++N) {
    for (int p = 1; p <= 5; ++p) {
      const auto r = delta_exact_resummed(model(N, p, Rational(1)));
      CHECK(r.method == DeltaMethod::unity);
      CHECK(r.J == p);
      CHECK(r.Delta == p);
    }
  }
}

TEST_CASE("truncated i-sum plus its tail equals the resummed value") {
  for (const auto& q : {rat(-1, 2), rat(1, 2), rat(7, 8), Rational(2), Rational(3)}) {
    for (const auto& [N, p] : {std::pair{1, 2}, {3, 2}, {4, 3}, {3, 4}}) {
      const auto params = model(N, p, q);
      const auto exact = delta_exact_resummed(params).Delta;
      for (int i_max : {0, 1, 3, 10}) {
        const auto t = delta_exact_truncated(params, i_max);
        CHECK(t.Delta + t.tail == exact);
        CHECK(abs(t.tail) <= t.tail_bound);
      }
    }
  }
  // Without i-terms only the S1 part remains.
  const auto params = model(3, 3, rat(1, 2));
  const auto zero = delta_exact_truncated(params, 0);
  CHECK(zero.S2 == 0);
  CHECK(zero.Delta == zero.pJ_term + 2 * 9 / (zero.Zp * zero.Zp) * zero.S1);

  // Forty i-terms leave an omitted remainder of about 1.07e-12.
  const auto forty = delta_exact_truncated(model(1, 2, rat(1, 2)), 40);
  CHECK(forty.Delta + forty.tail == rat(3, 2));
  CHECK(abs(forty.Delta - rat(3, 2)) < rat(11, 10000000000000LL));
  const auto more = delta_exact_truncated(model(1, 2, rat(1, 2)), 41);
  CHECK(abs(more.Delta - rat(3, 2)) < rat(1, 1000000000000LL));
  CHECK_THROWS_AS(delta_exact_truncated(params, -1), DomainError);
}

TEST_CASE("float backend") {
  PrecisionScope scope(256);
  for (const auto& q : {rat(1, 2), Rational(2)}) {
    const auto exact = delta(6, 5, q);
    const auto approx = delta_exact_resummed(ModelParams<Real>::make(6, 5, Real(q)));
    CHECK(abs(approx.Delta - Real(exact)) < Real("1e-60"));
    CHECK(abs(approx.A0) < Real("1e-60"));
    const auto truncated = delta_exact_truncated(ModelParams<Real>::make(6, 5, Real(q)), 200);
    CHECK(abs(truncated.Delta - approx.Delta) <= truncated.tail_bound + Real("1e-60"));
  }
}

TEST_CASE("finite-size estimate") {
  // p = 1: Z(N,1) = N and j_N = 1/N, j_2N = 2N/Z(2N,2), so the estimate
  // reduces to Z(2N,2)/N - 2N, which is exact (= 1) at q = 0.
  for (const auto& q : {Rational(0), rat(1, 2), Rational(2)}) {
    for (int N = 2; N <= 6; ++N) {
      const Rational Z2N2 = support::brute_Z(2 * N, 2, q);
      CHECK(delta_fss_estimate(model(N, 1, q)) == Z2N2 / N - 2 * N);
    }
  }
  CHECK(delta_fss_estimate(model(5, 1, Rational(0))) == 1);
  // The gap to the exact value, scaled as N |Delta - estimate| / N^2, shrinks.
  for (const auto& q : {Rational(0), rat(1, 2)}) {
    double previous = 1e300;
    for (int N : {8, 16, 32}) {
      const auto params = model(N, N, q);
      const Rational gap = abs(delta_exact_resummed(params).Delta - delta_fss_estimate(params)) / N;
      const double g = gap.convert_to<double>();
      CHECK(g <= previous);
      previous = g;
    }
  }
  CHECK_THROWS_AS(delta_fss_estimate(model(3, 3, Rational(1))), DomainError);
}
