#include "doctest.h"

#include <random>

#include "gds/model.hpp"
#include "test_support.hpp"

using namespace gds;
using gds::testing::R;

namespace {

FeatureFamily<Rational> discrete_features(std::size_t N) {
  std::vector<std::vector<Rational>> rows(N, std::vector<Rational>(N, R(1)));
  for (std::size_t m = 0; m < N; ++m) rows[m][m] = 0;
  return FeatureFamily<Rational>::from_rows(rows);
}

}  // namespace

TEST_CASE("discrete measure validation") {
  CHECK_NOTHROW(DiscreteMeasure<Rational>({R(1, 3), R(2, 3)}));
  CHECK_THROWS_AS(DiscreteMeasure<Rational>({R(1, 2), R(1, 3)}), InvalidInput);
  CHECK_THROWS_AS(DiscreteMeasure<Rational>({R(1), R(0)}), InvalidInput);
  CHECK_THROWS_AS(DiscreteMeasure<double>({0.5, 0.4}), InvalidInput);

  std::vector<Rational> with_zero{R(1, 2), R(0), R(1, 2)};
  auto norm = DiscreteMeasure<Rational>::normalize_support(with_zero);
  CHECK(norm.measure.size() == 2);
  CHECK(norm.kept == std::vector<std::size_t>{0, 2});
}

TEST_CASE("induced metric examples") {
  SUBCASE("constant feature gives the zero matrix") {
    auto F = FeatureFamily<Rational>::from_rows({{R(3), R(3), R(3)}});
    auto d = induced_metric(F);
    for (std::size_t i = 0; i < 3; ++i)
      for (std::size_t j = 0; j < 3; ++j) CHECK(d(i, j) == 0);
  }
  SUBCASE("single feature on two points") {
    auto d = induced_metric(FeatureFamily<Rational>::from_rows({{R(0), R(1)}}));
    CHECK(d(0, 1) == 1);
    CHECK(d(1, 0) == 1);
  }
  SUBCASE("three-point discrete features") {
    auto d = induced_metric(discrete_features(3));
    for (std::size_t i = 0; i < 3; ++i)
      for (std::size_t j = 0; j < 3; ++j) CHECK(d(i, j) == (i == j ? 0 : 1));
  }
}

TEST_CASE("induced metric is a pseudometric on random families") {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t n = 1 + rng() % 5;
    const std::size_t k = 1 + rng() % 4;
    std::vector<std::vector<Rational>> rows;
    for (std::size_t f = 0; f < k; ++f) rows.push_back(gds::testing::random_values(rng, n));
    auto d = induced_metric(FeatureFamily<Rational>::from_rows(rows));
    for (std::size_t x = 0; x < n; ++x) {
      CHECK(d(x, x) == 0);
      for (std::size_t y = 0; y < n; ++y) {
        CHECK(d(x, y) == d(y, x));
        CHECK(d(x, y) >= 0);
        for (std::size_t z = 0; z < n; ++z) CHECK(d(x, z) <= d(x, y) + d(y, z));
      }
    }
  }
}

TEST_CASE("gds_to_mm") {
  SUBCASE("singleton") {
    GeometricDataSet<Rational> X(FeatureFamily<Rational>::from_rows({{R(5)}}), DiscreteMeasure<Rational>::dirac());
    auto M = gds_to_mm(X);
    CHECK(M.size() == 1);
    CHECK(M.dist()(0, 0) == 0);
  }
  SUBCASE("discrete space") {
    GeometricDataSet<Rational> X(discrete_features(4), DiscreteMeasure<Rational>::uniform(4));
    auto M = gds_to_mm(X);
    for (std::size_t i = 0; i < 4; ++i) {
      CHECK(M.measure()[i] == R(1, 4));
      for (std::size_t j = 0; j < 4; ++j) CHECK(M.dist()(i, j) == (i == j ? 0 : 1));
    }
  }
  SUBCASE("max of two features") {
    GeometricDataSet<Rational> X(FeatureFamily<Rational>::from_rows({{R(0), R(3, 10)}, {R(0), R(1, 10)}}),
                                 DiscreteMeasure<Rational>::uniform(2));
    CHECK(gds_to_mm(X).dist()(0, 1) == R(3, 10));
  }
  SUBCASE("non-separating family is rejected") {
    CHECK_THROWS_AS(GeometricDataSet<Rational>(FeatureFamily<Rational>::from_rows({{R(1), R(1)}}),
                                               DiscreteMeasure<Rational>::uniform(2)),
                    SeparationFailure);
  }
}

TEST_CASE("mm_lip1_generators reproduce the metric") {
  SUBCASE("one point") {
    MmSpace<Rational> M(Matrix<Rational>(1, 1), DiscreteMeasure<Rational>::dirac());
    auto F = mm_lip1_generators(M);
    CHECK(F.size() == 1);
    CHECK(F(0, 0) == 0);
  }
  SUBCASE("two points") {
    MmSpace<Rational> M(Matrix<Rational>::from_rows({{R(0), R(2, 5)}, {R(2, 5), R(0)}}),
                        DiscreteMeasure<Rational>::uniform(2));
    auto F = mm_lip1_generators(M);
    CHECK(F(0, 1) == R(2, 5));
    CHECK(F(1, 0) == R(2, 5));
    CHECK(induced_metric(F)(0, 1) == R(2, 5));
  }
  SUBCASE("path metric 1-1-2") {
    auto d = Matrix<Rational>::from_rows({{R(0), R(1), R(2)}, {R(1), R(0), R(1)}, {R(2), R(1), R(0)}});
    MmSpace<Rational> M(d, DiscreteMeasure<Rational>::uniform(3));
    CHECK(induced_metric(mm_lip1_generators(M)) == d);
  }
  SUBCASE("random metrics") {
    std::mt19937_64 rng(11);
    for (int trial = 0; trial < 30; ++trial) {
      const std::size_t n = 1 + rng() % 5;
      std::vector<std::vector<Rational>> rows;
      for (int f = 0; f < 3; ++f) rows.push_back(gds::testing::random_values(rng, n, 16));
      auto d = induced_metric(FeatureFamily<Rational>::from_rows(rows));
      bool separated = true;
      for (std::size_t x = 0; x < n; ++x)
        for (std::size_t y = x + 1; y < n; ++y) separated = separated && d(x, y) > 0;
      if (!separated) continue;
      MmSpace<Rational> M(d, DiscreteMeasure<Rational>::uniform(n));
      CHECK(induced_metric(mm_lip1_generators(M)) == d);
    }
  }
}

TEST_CASE("sample_lip1") {
  auto d = Matrix<Rational>::from_rows({{R(0), R(1), R(2)}, {R(1), R(0), R(1)}, {R(2), R(1), R(0)}});
  MmSpace<Rational> M(d, DiscreteMeasure<Rational>::uniform(3));
  CHECK(sample_lip1(M, 0, 1).size() == 3);
  auto a = sample_lip1(M, 25, 42);
  auto b = sample_lip1(M, 25, 42);
  CHECK(a == b);
  CHECK(a.size() == 28);
  for (std::size_t f = 0; f < a.size(); ++f) CHECK(is_lipschitz(a.row(f), d));
}

TEST_CASE("pushforward") {
  auto mu = DiscreteMeasure<Rational>::uniform(4);
  SUBCASE("identity") {
    std::vector<std::size_t> id{0, 1, 2, 3};
    auto p = pushforward(mu, id, 4);
    CHECK(p.support == mu);
  }
  SUBCASE("constant map") {
    std::vector<std::size_t> c{2, 2, 2, 2};
    auto p = pushforward(mu, c, 3);
    CHECK(p.support.size() == 1);
    CHECK(p.support[0] == 1);
    CHECK(p.support_index == std::vector<std::size_t>{2});
  }
  SUBCASE("two classes") {
    std::vector<std::size_t> m{0, 0, 1, 1};
    auto p = pushforward(mu, m, 2);
    CHECK(p.support[0] == R(1, 2));
    CHECK(p.support[1] == R(1, 2));
  }
  SUBCASE("mass is preserved exactly") {
    std::mt19937_64 rng(5);
    for (int trial = 0; trial < 30; ++trial) {
      const std::size_t n = 1 + rng() % 6;
      DiscreteMeasure<Rational> w(gds::testing::random_weights(rng, n));
      std::vector<std::size_t> map(n);
      for (auto& t : map) t = rng() % 3;
      auto p = pushforward(w, map, 3);
      Rational total = 0;
      for (const auto& v : p.weights) total += v;
      CHECK(total == 1);
    }
  }
}

TEST_CASE("float mode uses tolerance") {
  GeometricDataSet<double> X(FeatureFamily<double>::from_rows({{0.0, 0.3}, {0.0, 0.1}}),
                             DiscreteMeasure<double>::uniform(2));
  CHECK(gds_to_mm(X).dist()(0, 1) == doctest::Approx(0.3));
}
