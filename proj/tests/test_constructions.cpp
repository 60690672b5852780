#include "doctest.h"

#include <random>

#include "gds/box_distance.hpp"
#include "gds/constructions.hpp"
#include "gds/observable_distance.hpp"
#include "gds/order_checks.hpp"
#include "test_support.hpp"

using namespace gds;
using gds::testing::R;

namespace {

using Gds = GeometricDataSet<Rational>;

Gds random_instance(std::mt19937_64& rng, std::size_t max_n, std::size_t max_k) {
  return random_gds<Rational>(1 + rng() % max_n, 1 + rng() % max_k, rng());
}

FeatureFamily<Rational> random_rows(std::mt19937_64& rng, const FeatureFamily<Rational>& F) {
  Matrix<Rational> rows(0, F.points());
  for (std::size_t f = 0; f < F.size(); ++f)
    if (rng() % 2 == 0 || (f + 1 == F.size() && rows.rows() == 0)) rows.append_row(F.row(f));
  return FeatureFamily<Rational>(rows);
}

}  // namespace

TEST_CASE("singleton_gds") {
  auto s = singleton_gds<Rational>({R(3), R(0), R(3)});
  CHECK(s.size() == 1);
  CHECK(s.features().size() == 2);
  CHECK(s.features()(0, 0) == 0);
  CHECK(s.features()(1, 0) == 3);
  CHECK(s.measure()[0] == 1);
  for (const Rational& k : {R(0), R(1, 3), R(1)}) CHECK(observable_diameter(s, k) == 0);
  CHECK_THROWS_AS(singleton_gds<Rational>(std::span<const Rational>{}), EmptyFamily);

  std::vector<std::vector<Rational>> subsets{{R(0)}, {R(1)}, {R(0), R(2)}, {R(1), R(2), R(4)}};
  for (std::size_t a = 0; a < subsets.size(); ++a)
    for (std::size_t b = a + 1; b < subsets.size(); ++b)
      CHECK(dconc_exact(singleton_gds<Rational>(subsets[a]), singleton_gds<Rational>(subsets[b])).value == 1);
}

TEST_CASE("product_gds") {
  auto X = random_gds<Rational>(3, 2, 41);
  auto zero = singleton_gds<Rational>({R(0)});
  CHECK(product_gds(X, zero).metric() == X.metric());

  std::mt19937_64 rng(401);
  for (int trial = 0; trial < 20; ++trial) {
    auto A = random_instance(rng, 3, 3);
    auto B = random_instance(rng, 3, 3);
    auto P = product_gds(A, B);
    const std::size_t m = B.size();
    for (std::size_t p = 0; p < P.size(); ++p)
      for (std::size_t q = 0; q < P.size(); ++q)
        CHECK(P.metric()(p, q) == std::max(A.metric()(p / m, q / m), B.metric()(p % m, q % m)));
    std::vector<std::size_t> pr1(P.size()), pr2(P.size());
    for (std::size_t p = 0; p < P.size(); ++p) {
      pr1[p] = p / m;
      pr2[p] = p % m;
    }
    auto first = pushforward(P.measure(), pr1, A.size());
    auto second = pushforward(P.measure(), pr2, m);
    for (std::size_t x = 0; x < A.size(); ++x) CHECK(first.weights[x] == A.measure()[x]);
    for (std::size_t y = 0; y < m; ++y) CHECK(second.weights[y] == B.measure()[y]);
    CHECK(check_domination(P, A).holds);
    CHECK(check_domination(P, B).holds);
  }
}

TEST_CASE("n_point_discrete") {
  auto one = n_point_discrete<Rational>(1);
  CHECK(one.size() == 1);
  CHECK(one.features().size() == 1);
  CHECK(one.features()(0, 0) == 0);

  for (std::size_t N = 2; N <= 5; ++N) {
    auto X = n_point_discrete<Rational>(N);
    for (std::size_t a = 0; a < N; ++a)
      for (std::size_t b = 0; b < N; ++b) CHECK(X.metric()(a, b) == (a == b ? 0 : 1));
    // a feature is 0 on mass 1/N and 1 elsewhere
    for (const Rational& k : {R(0), R(1, 10), R(1, 5), R(1, 4), R(1, 3), R(1, 2), R(1)})
      CHECK(observable_diameter(X, k) == (k < R(1, static_cast<unsigned long>(N)) ? 1 : 0));
  }
  CHECK_THROWS_AS(n_point_discrete<Rational>(0), InvalidInput);
}

TEST_CASE("quotient_gds examples") {
  auto X = random_gds<Rational>(4, 2, 43);
  auto same = quotient_gds(X, X.features());
  CHECK(same.space.size() == 4);
  CHECK(check_isomorphism(X, same.space).holds);

  auto constant = FeatureFamily<Rational>(Matrix<Rational>(1, 4, R(1, 3)));
  auto point = quotient_gds(X, constant);
  CHECK(point.space.size() == 1);
  CHECK(point.map == std::vector<std::size_t>{0, 0, 0, 0});
  CHECK(check_isomorphism(point.space, singleton_gds<Rational>({R(1, 3)})).holds);

  auto X2 = n_point_discrete<Rational>(2);
  Matrix<Rational> d1(0, 2);
  d1.append_row(X2.features().row(0));
  auto q = quotient_gds(X2, FeatureFamily<Rational>(d1));
  CHECK(q.space.size() == 2);
  CHECK(q.space.features().size() == 1);

  auto steep = FeatureFamily<Rational>(Matrix<Rational>::from_rows({{R(0), R(2)}}));
  CHECK_THROWS_AS(quotient_gds(X2, steep), NotLipschitzFamily);
}

TEST_CASE("quotient map properties") {
  std::mt19937_64 rng(409);
  for (int trial = 0; trial < 30; ++trial) {
    auto X = random_instance(rng, 4, 3);
    auto G = random_rows(rng, X.features());
    auto q = quotient_gds(X, G);
    const auto& Y = q.space;
    // F_Y o f = G row for row
    for (std::size_t g = 0; g < G.size(); ++g)
      for (std::size_t x = 0; x < X.size(); ++x) CHECK(Y.features()(g, q.map[x]) == G(g, x));
    auto image = pushforward(X.measure(), q.map, Y.size());
    for (std::size_t y = 0; y < Y.size(); ++y) CHECK(image.weights[y] == Y.measure()[y]);
    for (std::size_t a = 0; a < X.size(); ++a)
      for (std::size_t b = 0; b < X.size(); ++b) CHECK(Y.metric()(q.map[a], q.map[b]) <= X.metric()(a, b));
    // the map is onto, so {h in Lip1(Y) : h o f in G} is exactly the descended family
    std::vector<bool> hit(Y.size(), false);
    for (std::size_t y : q.map) hit[y] = true;
    CHECK(std::count(hit.begin(), hit.end(), false) == 0);
    for (std::size_t g = 0; g < Y.features().size(); ++g) CHECK(is_lipschitz(Y.features().row(g), Y.metric()));
  }
}

TEST_CASE("quotient universal property") {
  std::mt19937_64 rng(419);
  for (int trial = 0; trial < 25; ++trial) {
    auto X = random_instance(rng, 4, 3);
    auto G = random_rows(rng, X.features());
    auto q = quotient_gds(X, G);
    // Z = X / G' with G' inside G, so its domination g has F_Z o g inside G
    auto Z = quotient_gds(X, random_rows(rng, G));
    const auto& Y = q.space;
    std::size_t factorizations = 0;
    std::vector<std::size_t> t(Y.size(), 0);
    const std::size_t total = detail::saturating_power(Z.space.size(), Y.size());
    for (std::size_t code = 0; code < total; ++code) {
      std::size_t c = code;
      for (std::size_t y = 0; y < Y.size(); ++y, c /= Z.space.size()) t[y] = c % Z.space.size();
      bool commutes = true;
      for (std::size_t x = 0; x < X.size(); ++x)
        if (t[q.map[x]] != Z.map[x]) commutes = false;
      if (!commutes) continue;
      ++factorizations;
      auto image = pushforward(Y.measure(), t, Z.space.size());
      for (std::size_t z = 0; z < Z.space.size(); ++z) CHECK(image.weights[z] == Z.space.measure()[z]);
      for (std::size_t a = 0; a < Y.size(); ++a)
        for (std::size_t b = 0; b < Y.size(); ++b) CHECK(Z.space.metric()(t[a], t[b]) <= Y.metric()(a, b));
    }
    CHECK(factorizations == 1);
  }
}

TEST_CASE("levy sequences") {
  auto seq = levy_sequence<Rational>(LevyKind::n_point_discrete, 6);
  REQUIRE(seq.size() == 6);
  std::vector<Rational> kappas{R(1, 8), R(1, 5), R(1, 4), R(1, 3), R(1, 2)};
  auto table = levy_table<Rational>(seq, kappas);
  // X_1 is one point, so its row is 0; from N = 2 on the row is 1 below kappa = 1/N
  for (std::size_t j = 0; j < kappas.size(); ++j) CHECK(table(0, j) == 0);
  for (std::size_t N = 2; N <= 6; ++N)
    for (std::size_t j = 0; j < kappas.size(); ++j) {
      CHECK(table(N - 1, j) == (kappas[j] < R(1, static_cast<unsigned long>(N)) ? 1 : 0));
      if (N > 2) CHECK(table(N - 1, j) <= table(N - 2, j));
    }

  auto base = singleton_gds<Rational>({R(0), R(1, 2)});
  auto powers = levy_sequence<Rational>(LevyKind::product_power, 3, &base);
  auto flat = levy_table<Rational>(powers, kappas);
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t j = 0; j < kappas.size(); ++j) CHECK(flat(i, j) == 0);
  CHECK(powers[2].features().size() == 6);
  CHECK_THROWS_AS(levy_sequence<Rational>(LevyKind::product_power, 2), InvalidInput);
}

TEST_CASE("random_gds") {
  auto a = random_gds<Rational>(4, 3, 99);
  auto b = random_gds<Rational>(4, 3, 99);
  CHECK(a.features().values() == b.features().values());
  CHECK(a.measure() == b.measure());
  auto s = random_gds<Rational>(1, 3, 5);
  CHECK(s.size() == 1);
  CHECK(s.measure()[0] == 1);
  auto f = random_gds<double>(5, 2, 7);
  CHECK(f.size() == 5);
  auto scaled = random_gds<Rational>(3, 2, 13, R(1, 4));
  for (std::size_t x = 0; x < 3; ++x) CHECK(scaled.features()(0, x) <= R(1, 4));
}
