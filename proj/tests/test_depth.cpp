#include <gtest/gtest.h>

#include <random>

#include "ddtest/depth.hpp"
#include "support/fixtures.hpp"
#include "support/oracles.hpp"

using namespace ddtest;

namespace {

const DepthKind kAllKinds[] = {DepthKind::mahalanobis(), DepthKind::spatial(), DepthKind::projection(200, 3)};

double one(const SampleSet& ref, std::vector<double> x, const DepthKind& kind) {
  return depth(SampleSet::from_rows({x}), ref, kind).values[0];
}

Eigen::MatrixXd random_invertible(std::mt19937_64& gen, int d) {
  std::normal_distribution<double> z;
  Eigen::MatrixXd a(d, d);
  for (int i = 0; i < d; ++i) {
    for (int j = 0; j < d; ++j) a(i, j) = z(gen);
  }
  return a + 3.0 * Eigen::MatrixXd::Identity(d, d);
}

}  // namespace

TEST(Depth, MahalanobisAtMeanIsOne) {
  const auto ref = SampleSet::from_rows({{0, 0}, {2, 1}, {1, 3}, {-1, 2}});
  const Eigen::VectorXd mean = ref.matrix().colwise().mean();
  EXPECT_DOUBLE_EQ(one(ref, {mean[0], mean[1]}, DepthKind::mahalanobis()), 1.0);
}

TEST(Depth, MahalanobisOneDimensionalExample) {
  const auto ref = SampleSet::from_values({0, 1, 2});
  EXPECT_NEAR(one(ref, {0.9}, DepthKind::mahalanobis()), 1.0 / 1.01, 1e-12);
  EXPECT_NEAR(one(ref, {0.9}, DepthKind::mahalanobis()), 0.990099, 1e-6);
  const auto self = depth(ref, ref, DepthKind::mahalanobis()).values;
  EXPECT_NEAR(self[0], 0.5, 1e-15);
  EXPECT_NEAR(self[1], 1.0, 1e-15);
  EXPECT_NEAR(self[2], 0.5, 1e-15);
}

TEST(Depth, SpatialSymmetricCrossIsOne) {
  const auto ref = SampleSet::from_rows({{1, 0}, {-1, 0}, {0, 1}, {0, -1}});
  EXPECT_NEAR(one(ref, {0, 0}, DepthKind::spatial()), 1.0, 1e-15);
}

TEST(Depth, SpatialSkipsCoincidentPoint) {
  const auto ref = SampleSet::from_rows({{0, 0}, {1, 0}, {-1, 0}});
  EXPECT_NEAR(one(ref, {0, 0}, DepthKind::spatial()), 1.0, 1e-15);
}

TEST(Depth, VanishesAtInfinity) {
  std::mt19937_64 gen(1);
  const auto ref = fixture::gaussian(gen, 40, 2);
  for (const auto& kind : kAllKinds) EXPECT_LT(one(ref, {1e9, 0}, kind), 1e-6) << to_string(kind.type);
}

TEST(Depth, MatchesDirectOracles) {
  std::mt19937_64 gen(2);
  for (int d = 1; d <= 3; ++d) {
    const auto ref = fixture::gaussian(gen, 25, static_cast<std::size_t>(d));
    const auto query = fixture::gaussian(gen, 10, static_cast<std::size_t>(d), 0.3, 1.5);
    const auto maha = depth(query, ref, DepthKind::mahalanobis()).values;
    const auto spat = depth(query, ref, DepthKind::spatial()).values;
    const auto proj_kind = DepthKind::projection(64, 9);
    const auto proj = depth(query, ref, proj_kind).values;
    const auto dirs = projection_directions(static_cast<std::size_t>(d), 64, 9);
    for (std::size_t i = 0; i < query.size(); ++i) {
      const auto x = oracle::row(query, i);
      EXPECT_NEAR(maha[i], oracle::mahalanobis_depth(x, ref), 1e-12);
      EXPECT_NEAR(spat[i], oracle::spatial_depth(x, ref), 1e-12);
      EXPECT_NEAR(proj[i], oracle::projection_depth(x, ref, dirs), 1e-12);
    }
  }
}

TEST(Depth, ProjectionDirectionsAreUnitAndSeeded) {
  const auto a = projection_directions(3, 50, 4);
  const auto b = projection_directions(3, 50, 4);
  const auto c = projection_directions(3, 50, 5);
  EXPECT_EQ(a, b);
  EXPECT_NE(a, c);
  for (Eigen::Index k = 0; k < a.rows(); ++k) EXPECT_NEAR(a.row(k).norm(), 1.0, 1e-14);
}

TEST(Depth, RangeIsUnitInterval) {
  std::mt19937_64 gen(3);
  for (const auto& kind : kAllKinds) {
    const auto ref = fixture::gaussian(gen, 30, 2);
    const auto query = fixture::gaussian(gen, 200, 2, 0.0, 3.0);
    for (double v : depth(query, ref, kind).values) {
      EXPECT_GE(v, 0.0);
      EXPECT_LE(v, 1.0);
    }
  }
}

TEST(Depth, MahalanobisAffineInvariance) {
  std::mt19937_64 gen(4);
  for (int trial = 0; trial < 10; ++trial) {
    const auto ref = fixture::gaussian(gen, 30, 3);
    const auto query = fixture::gaussian(gen, 15, 3);
    const auto a = random_invertible(gen, 3);
    const Eigen::Vector3d b(1.5, -2.0, 7.0);
    const auto before = depth(query, ref, DepthKind::mahalanobis()).values;
    const auto after =
        depth(fixture::transformed(query, a, b), fixture::transformed(ref, a, b), DepthKind::mahalanobis()).values;
    for (std::size_t i = 0; i < before.size(); ++i) EXPECT_NEAR(after[i], before[i], 1e-9 * before[i]);
  }
}

TEST(Depth, SpatialSimilarityInvariance) {
  std::mt19937_64 gen(5);
  const auto ref = fixture::gaussian(gen, 30, 2);
  const auto query = fixture::gaussian(gen, 15, 2);
  const double t = 0.7;
  Eigen::Matrix2d rot;
  rot << std::cos(t), -std::sin(t), std::sin(t), std::cos(t);
  const Eigen::MatrixXd a = 2.5 * rot;
  const Eigen::Vector2d b(-3.0, 4.0);
  const auto before = depth(query, ref, DepthKind::spatial()).values;
  const auto after = depth(fixture::transformed(query, a, b), fixture::transformed(ref, a, b), DepthKind::spatial()).values;
  for (std::size_t i = 0; i < before.size(); ++i) EXPECT_NEAR(after[i], before[i], 1e-9);
}

TEST(Depth, ProjectionTranslationInvariance) {
  std::mt19937_64 gen(6);
  const auto ref = fixture::gaussian(gen, 30, 2);
  const auto query = fixture::gaussian(gen, 15, 2);
  const Eigen::Vector2d b(10.0, -5.0);
  const Eigen::MatrixXd id = Eigen::MatrixXd::Identity(2, 2);
  const auto kind = DepthKind::projection(300, 8);
  const auto before = depth(query, ref, kind).values;
  const auto after = depth(fixture::transformed(query, id, b), fixture::transformed(ref, id, b), kind).values;
  for (std::size_t i = 0; i < before.size(); ++i) EXPECT_NEAR(after[i], before[i], 1e-9);
}

TEST(Depth, MaximalityAtCenterOfSymmetricSample) {
  std::mt19937_64 gen(7);
  const auto half = fixture::gaussian(gen, 20, 2);
  Matrix sym(40, 2);
  sym << half.matrix(), -half.matrix();
  const SampleSet ref(sym);
  for (const auto& kind : kAllKinds) {
    const double center = one(ref, {0, 0}, kind);
    for (double v : depth(ref, ref, kind).values) EXPECT_GE(center, v) << to_string(kind.type);
  }
}

TEST(Depth, MahalanobisMonotoneAlongRays) {
  std::mt19937_64 gen(8);
  const auto ref = fixture::gaussian(gen, 30, 2);
  const Eigen::Vector2d mu = ref.matrix().colwise().mean();
  const auto points = fixture::gaussian(gen, 20, 2, 0.0, 2.0);
  for (std::size_t i = 0; i < points.size(); ++i) {
    const Eigen::Vector2d x = oracle::row(points, i);
    const double dx = one(ref, {x[0], x[1]}, DepthKind::mahalanobis());
    for (double a : {0.1, 0.5, 0.9}) {
      const Eigen::Vector2d y = mu + a * (x - mu);
      EXPECT_GE(one(ref, {y[0], y[1]}, DepthKind::mahalanobis()), dx);
    }
  }
}

TEST(Depth, Errors) {
  const auto ref2 = SampleSet::from_rows({{0, 0}, {1, 0}, {0, 1}, {1, 1}});
  const auto query1 = SampleSet::from_values({0.5});
  try {
    depth(query1, ref2, DepthKind::spatial());
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::dimension_mismatch);
  }
  const auto collinear = SampleSet::from_rows({{0, 0}, {1, 1}, {2, 2}, {3, 3}});
  try {
    depth(collinear, collinear, DepthKind::mahalanobis());
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::singular_covariance);
  }
  const auto too_few = SampleSet::from_rows({{0, 0}, {1, 2}});
  try {
    depth(too_few, too_few, DepthKind::mahalanobis());
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::singular_covariance);
  }
  const auto constant = SampleSet::from_rows({{1, 1}, {1, 1}, {1, 1}});
  try {
    depth(constant, constant, DepthKind::projection(20, 1));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::degenerate_sample);
  }
}

TEST(SampleSetTest, RejectsNonFiniteAndRagged) {
  EXPECT_THROW(SampleSet::from_values({1.0, std::nan("")}), Error);
  EXPECT_THROW(SampleSet::from_rows({{1, 2}, {3}}), Error);
  EXPECT_THROW(SampleSet::from_rows({}), Error);
}
