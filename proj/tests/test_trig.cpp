#include <cmath>
#include <numbers>
#include <random>

#include "doctest.h"
#include "qgraph/error.hpp"
#include "qgraph/trig.hpp"
#include "test_util.hpp"

using namespace qgraph;

namespace {

const double pi = std::numbers::pi;

AlphaPolynomial k(long c) { return AlphaPolynomial::constant(c); }

TrigMonomial random_monomial(std::mt19937_64& rng, bool allow_composite) {
  static const TrigKind kinds[] = {TrigKind::Cot, TrigKind::Csc, TrigKind::Tan,
                                   TrigKind::Sec, TrigKind::TanHalf, TrigKind::CotHalf};
  std::uniform_int_distribution<int> mu(-2, 2), nf(0, 2), edge(1, 3), kind(0, 5), ex(1, 3);
  TrigMonomial m = TrigMonomial::mu(mu(rng));
  const int count = nf(rng);
  for (int i = 0; i < count; ++i) {
    TrigFactor f{"e" + std::to_string(edge(rng)), kinds[kind(rng)], ex(rng)};
    bool clash = false;
    for (auto& g : m.factors) {
      if (g.edge == f.edge && g.kind == f.kind) clash = true;
      if (g.edge == f.edge && !allow_composite) clash = true;
    }
    if (clash) continue;
    m.factors.push_back(f);
  }
  std::sort(m.factors.begin(), m.factors.end(),
            [](const TrigFactor& a, const TrigFactor& b) { return std::tie(a.edge, a.kind) < std::tie(b.edge, b.kind); });
  return m;
}

AlphaPolynomial random_poly(std::mt19937_64& rng, int first_var = 1) {
  std::uniform_int_distribution<int> c(-4, 4), mask(0, 7);
  AlphaPolynomial p;
  for (int t = 0; t < 2; ++t) {
    AlphaPolynomial::Key key;
    const int m = mask(rng);
    for (int v = 0; v < 3; ++v) {
      if (m & (1 << v)) key.push_back("V" + std::to_string(v + first_var));
    }
    p.add_term(key, c(rng));
  }
  return p;
}

TrigSum random_raw_sum(std::mt19937_64& rng, int terms = 3, bool composite = true, int first_var = 1) {
  TrigSum s;
  for (int i = 0; i < terms; ++i) s.add_raw(random_monomial(rng, composite), random_poly(rng, first_var));
  return s;
}

TrigSum random_sum(std::mt19937_64& rng, int terms, int first_var) {
  return reduce(random_raw_sum(rng, terms, false, first_var));
}

}  // namespace

TEST_CASE("mono_mul examples") {
  const auto cot = TrigMonomial::of("e", TrigKind::Cot, 1);
  const auto sq = mono_mul(cot, cot);
  REQUIRE(sq.size() == 1);
  const auto& m = sq.terms().begin()->first;
  CHECK(m.mu_power == 2);
  CHECK(m.factors.size() == 1);
  CHECK(m.factors[0].exp == 2);
  CHECK(m.factors[0].kind == TrigKind::Cot);

  const auto tan_mu = mono_mul(TrigMonomial::of("e", TrigKind::Tan, -1), TrigMonomial::mu(1));
  CHECK(tan_mu == TrigSum(TrigMonomial::of("e", TrigKind::Tan, 0), k(1)));

  const auto csc = TrigMonomial::of("e", TrigKind::Csc);
  TrigSum expected(TrigMonomial::of("e", TrigKind::Cot, 0, 2), k(1));
  expected += TrigSum::constant(1);
  CHECK(mono_mul(csc, csc) == expected);
  CHECK(mono_mul(csc, csc).size() == 2);
}

TEST_CASE("reduce examples") {
  TrigSum s;
  s.add_raw(TrigMonomial::of("e", TrigKind::Cot, 2, 2), k(1));
  s.add_raw(TrigMonomial::mu(2), k(1));
  s.add_raw(TrigMonomial::of("e", TrigKind::Csc, 2, 2), k(-1));
  CHECK(reduce(s).is_zero());

  TrigSum t;
  t.add_raw(TrigMonomial::of("e", TrigKind::Sec, 0, 2), AlphaPolynomial::variable("V1"));
  TrigSum expected(TrigMonomial::of("e", TrigKind::Tan, 0, 2), AlphaPolynomial::variable("V1"));
  expected += TrigSum(TrigMonomial{}, AlphaPolynomial::variable("V1"));
  CHECK(reduce(t) == expected);

  CHECK(reduce(expected) == expected);
}

TEST_CASE("eval examples") {
  const auto g = test::corpus_graph("edge_dd");  // e1 has length 1
  const auto alpha = CouplingVector::from_values(g, {0, 0});
  const TrigSum minus_mu2(TrigMonomial::mu(2), k(-1));
  CHECK(eval(minus_mu2, g, alpha, 4.0) == doctest::Approx(-4.0));
  CHECK(eval(minus_mu2, g, alpha, -4.0) == doctest::Approx(4.0));
  const TrigSum mucot(TrigMonomial::of("e1", TrigKind::Cot, 1), k(1));
  CHECK(std::abs(eval(mucot, g, alpha, pi * pi / 4)) < 1e-15);
}

TEST_CASE("eval raises PoleProximity and NonRealEvaluation") {
  const auto g = test::corpus_graph("edge_dd");
  const auto alpha = CouplingVector::from_values(g, {0, 0});
  const TrigSum csc(TrigMonomial::of("e1", TrigKind::Csc), k(1));
  CHECK_THROWS_AS(eval(csc, g, alpha, pi * pi), Error);
  // mu * 1 is imaginary for lambda < 0
  const TrigSum mu1(TrigMonomial::mu(1), k(1));
  try {
    eval(mu1, g, alpha, -4.0);
    FAIL("expected NonRealEvaluation");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::NonRealEvaluation);
  }
}

TEST_CASE("hyperbolic substitution for negative lambda") {
  const auto g = test::corpus_graph("edge_dd");
  const auto alpha = CouplingVector::from_values(g, {0, 0});
  const double y = 1.3;
  // mu cot(mu) at mu = i y equals y coth(y)
  const TrigSum mucot(TrigMonomial::of("e1", TrigKind::Cot, 1), k(1));
  CHECK(eval(mucot, g, alpha, -y * y) == doctest::Approx(y / std::tanh(y)).epsilon(1e-13));
  const TrigSum sec(TrigMonomial::of("e1", TrigKind::Sec), k(1));
  CHECK(eval(sec, g, alpha, -y * y) == doctest::Approx(1.0 / std::cosh(y)).epsilon(1e-13));
}

TEST_CASE("reduce is idempotent and preserves value") {
  std::mt19937_64 rng(11);
  const auto g = test::corpus_graph("triangle_ddd");
  std::uniform_real_distribution<double> lam(-30.0, 60.0);
  int evaluated = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    const auto s = random_raw_sum(rng);
    const auto r = reduce(s);
    CHECK(reduce(r) == r);
    for (const auto& [m, c] : r.terms()) {
      for (const auto& f : m.factors) {
        if (f.kind == TrigKind::Csc || f.kind == TrigKind::Sec) CHECK(f.exp == 1);
      }
    }
    const auto alpha = test::random_couplings(g, rng);
    const double lambda = lam(rng);
    try {
      const auto mu = mu_of(lambda);
      const auto a = eval_complex(s, g, alpha, mu, {1e-3});
      const auto b = eval_complex(r, g, alpha, mu, {1e-3});
      CHECK(std::abs(a - b) <= 1e-9 * (1.0 + std::abs(a)));
      ++evaluated;
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::PoleProximity);
    }
  }
  CHECK(evaluated > 900);
}

TEST_CASE("ring laws hold on canonical forms") {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 150; ++trial) {
    // disjoint coupling variables keep every product multilinear
    const auto a = random_sum(rng, 2, 1);
    const auto b = random_sum(rng, 2, 4);
    const auto c = random_sum(rng, 2, 7);
    CHECK(a * b == b * a);
    CHECK((a * b) * c == a * (b * c));
    CHECK(a * (b + c) == a * b + a * c);
    CHECK(a + b == b + a);
    CHECK((a - a).is_zero());
    CHECK(a * TrigSum::constant(1) == a);
    CHECK(reduce(a * b) == a * b);
  }
}

TEST_CASE("AlphaPolynomial multiplication stays multilinear") {
  const auto a1 = AlphaPolynomial::variable("V1");
  const auto a2 = AlphaPolynomial::variable("V2", 3);
  const auto p = (a1 + AlphaPolynomial::constant(1)) * a2;
  CHECK(p.terms().size() == 2);
  CHECK(p.terms().at({"V1", "V2"}) == 3);
  CHECK(p.terms().at({"V2"}) == 3);
  try {
    (void)(a1 * a1);
    FAIL("expected NonMultilinear");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::NonMultilinear);
  }
}

TEST_CASE("canonical ordering: mu power, then edge, then kind") {
  TrigSum s;
  s.add(TrigMonomial::of("b", TrigKind::Cot, 1), k(1));
  s.add(TrigMonomial::of("a", TrigKind::Tan, 1), k(1));
  s.add(TrigMonomial::of("a", TrigKind::Cot, 1), k(1));
  s.add(TrigMonomial::mu(0), k(1));
  std::vector<std::string> order;
  for (const auto& [m, c] : s.terms()) order.push_back(m.to_string());
  REQUIRE(order.size() == 4);
  CHECK(order[0] == TrigMonomial::mu(0).to_string());
  CHECK(order[1] == TrigMonomial::of("a", TrigKind::Cot, 1).to_string());
  CHECK(order[2] == TrigMonomial::of("a", TrigKind::Tan, 1).to_string());
  CHECK(order[3] == TrigMonomial::of("b", TrigKind::Cot, 1).to_string());
}

TEST_CASE("trig kind names round trip") {
  for (auto kind : {TrigKind::Cot, TrigKind::Csc, TrigKind::Tan, TrigKind::Sec, TrigKind::TanHalf, TrigKind::CotHalf,
                    TrigKind::CotQuarterShift}) {
    CHECK(trig_kind_from_string(to_string(kind)) == kind);
  }
}
