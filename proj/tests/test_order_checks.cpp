#include "doctest.h"

#include <algorithm>
#include <numeric>
#include <random>

#include "gds/order_checks.hpp"
#include "test_support.hpp"

using namespace gds;
using gds::testing::R;

namespace {

using Gds = GeometricDataSet<Rational>;

Gds random_instance(std::mt19937_64& rng, std::size_t max_n, std::size_t max_k) {
  return random_gds<Rational>(1 + rng() % max_n, 1 + rng() % max_k, rng());
}

Gds relabeled(const Gds& X, const std::vector<std::size_t>& p) {
  Matrix<Rational> values(X.features().size(), X.size());
  std::vector<Rational> w(X.size());
  for (std::size_t x = 0; x < X.size(); ++x) {
    w[p[x]] = X.measure()[x];
    for (std::size_t f = 0; f < X.features().size(); ++f) values(f, p[x]) = X.features()(f, x);
  }
  return Gds(FeatureFamily<Rational>(values), DiscreteMeasure<Rational>(w));
}

// Quotient of X by a random nonempty subset of its features.
Quotient<Rational> random_quotient(std::mt19937_64& rng, const Gds& X) {
  Matrix<Rational> rows(0, X.size());
  for (std::size_t f = 0; f < X.features().size(); ++f)
    if (rng() % 2 == 0 || (f + 1 == X.features().size() && rows.rows() == 0)) rows.append_row(X.features().row(f));
  return quotient_gds(X, FeatureFamily<Rational>(rows));
}

// Literal domination test of a given map.
bool is_domination(const Gds& X, const Gds& Y, const std::vector<std::size_t>& phi) {
  std::vector<Rational> load(Y.size(), R(0));
  for (std::size_t x = 0; x < X.size(); ++x) load[phi[x]] += X.measure()[x];
  for (std::size_t y = 0; y < Y.size(); ++y)
    if (load[y] != Y.measure()[y]) return false;
  for (std::size_t g = 0; g < Y.features().size(); ++g) {
    bool matched = false;
    for (std::size_t f = 0; f < X.features().size() && !matched; ++f) {
      matched = true;
      for (std::size_t x = 0; x < X.size(); ++x)
        if (Y.features()(g, phi[x]) != X.features()(f, x)) matched = false;
    }
    if (!matched) return false;
  }
  return true;
}

}  // namespace

TEST_CASE("check_domination examples") {
  auto X = random_gds<Rational>(3, 2, 7);
  auto self = check_domination(X, X);
  CHECK(self.holds);
  CHECK(*self.map == std::vector<std::size_t>{0, 1, 2});

  auto Y = random_gds<Rational>(2, 2, 8);
  auto P = product_gds(X, Y);
  auto pr1 = check_domination(P, X);
  REQUIRE(pr1.holds);
  CHECK(is_domination(P, X, *pr1.map));
  CHECK(check_domination(P, Y).holds);

  auto zero = singleton_gds<Rational>({R(0)});
  auto one = singleton_gds<Rational>({R(1)});
  CHECK_FALSE(check_domination(zero, one).holds);
  CHECK_FALSE(check_domination(zero, one).map);

  auto big = n_point_discrete<Rational>(7);
  CHECK_THROWS_AS(check_domination(big, big, R(0), 1000), BudgetExceeded);
}

TEST_CASE("check_domination tolerance") {
  auto a = singleton_gds<double>({0.0});
  auto b = singleton_gds<double>({1e-12});
  CHECK(check_domination(a, b).holds);
  CHECK_FALSE(check_domination(a, b, 0.0).holds);
}

TEST_CASE("check_isomorphism examples") {
  auto X = random_gds<Rational>(4, 2, 11);
  CHECK(check_isomorphism(X, X).holds);

  std::vector<std::size_t> p{2, 0, 3, 1};
  auto Y = relabeled(X, p);
  auto r = check_isomorphism(X, Y);
  REQUIRE(r.holds);
  CHECK(*r.map == p);

  CHECK_FALSE(check_isomorphism(singleton_gds<Rational>({R(0)}), singleton_gds<Rational>({R(1)})).holds);
  // same point but one constant missing
  CHECK_FALSE(check_isomorphism(singleton_gds<Rational>({R(0), R(1)}), singleton_gds<Rational>({R(0)})).holds);
  CHECK(check_domination(singleton_gds<Rational>({R(0), R(1)}), singleton_gds<Rational>({R(0)})).holds);
}

TEST_CASE("witnesses are the lexicographically first dominations") {
  std::mt19937_64 rng(301);
  for (int trial = 0; trial < 30; ++trial) {
    auto X = random_instance(rng, 4, 3);
    auto Q = random_quotient(rng, X);
    auto r = check_domination(X, Q.space);
    REQUIRE(r.holds);
    CHECK(is_domination(X, Q.space, *r.map));
    CHECK(is_domination(X, Q.space, Q.map));
    CHECK(*r.map <= Q.map);

    // scan all maps in order for the first domination
    const std::size_t n = X.size();
    const std::size_t m = Q.space.size();
    std::vector<std::size_t> phi(n, 0);
    std::optional<std::vector<std::size_t>> first;
    for (std::size_t code = 0, total = detail::saturating_power(m, n); code < total && !first; ++code) {
      std::size_t c = code;
      for (std::size_t x = n; x-- > 0; c /= m) phi[x] = c % m;
      if (is_domination(X, Q.space, phi)) first = phi;
    }
    CHECK(first == r.map);
  }
}

TEST_CASE("domination is reflexive and transitive") {
  std::mt19937_64 rng(307);
  for (int trial = 0; trial < 25; ++trial) {
    auto X = random_instance(rng, 4, 3);
    CHECK(check_domination(X, X).holds);
    auto Q1 = random_quotient(rng, X);
    auto Q2 = random_quotient(rng, Q1.space);
    auto a = check_domination(X, Q1.space);
    auto b = check_domination(Q1.space, Q2.space);
    REQUIRE(a.holds);
    REQUIRE(b.holds);
    std::vector<std::size_t> composed(X.size());
    for (std::size_t x = 0; x < X.size(); ++x) composed[x] = (*b.map)[(*a.map)[x]];
    CHECK(is_domination(X, Q2.space, composed));
    CHECK(check_domination(X, Q2.space).holds);
  }
}

TEST_CASE("mutual domination implies isomorphism") {
  std::mt19937_64 rng(311);
  int mutual = 0;
  for (int trial = 0; trial < 40; ++trial) {
    auto X = random_instance(rng, 3, 3);
    Gds Y = X;
    if (trial % 2 == 0) {
      std::vector<std::size_t> p(X.size());
      std::iota(p.begin(), p.end(), std::size_t{0});
      std::shuffle(p.begin(), p.end(), rng);
      Y = relabeled(X, p);
    } else {
      Y = random_quotient(rng, X).space;
    }
    const bool xy = check_domination(X, Y).holds;
    const bool yx = check_domination(Y, X).holds;
    if (xy && yx) {
      ++mutual;
      CHECK(check_isomorphism(X, Y).holds);
    }
    if (check_isomorphism(X, Y).holds) CHECK((xy && yx));
  }
  CHECK(mutual >= 20);
}

TEST_CASE("dominated partner") {
  std::mt19937_64 rng(313);
  for (int trial = 0; trial < 15; ++trial) {
    auto X = random_instance(rng, 3, 3);
    auto Y = random_instance(rng, 3, 3);
    auto Q = random_quotient(rng, X);
    auto r = dominated_partner(X, Q.space, Q.map, Y);
    CHECK(r.partner.space.features().size() <= Q.space.features().size());
    CHECK(r.dconc_reduced <= r.dconc_original);
    CHECK(r.dconc_reduced == dconc_exact(Q.space, r.partner.space).value);
    CHECK(r.dconc_original == dconc_exact(X, Y).value);
    CHECK(check_domination(Y, r.partner.space).holds);
  }
}
