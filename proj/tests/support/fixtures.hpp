#pragma once

#include <random>
#include <vector>

#include "ddtest/sample_set.hpp"

namespace fixture {

/// Gaussian sample from a test-local generator (kept separate from the
/// library's own streams).
inline ddtest::SampleSet gaussian(std::mt19937_64& gen, std::size_t n, std::size_t d, double shift = 0.0, double scale = 1.0) {
  std::normal_distribution<double> z;
  ddtest::Matrix m(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(d));
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) m(i, j) = shift + scale * z(gen);
  }
  return ddtest::SampleSet(m);
}

inline ddtest::SampleSet transformed(const ddtest::SampleSet& s, const Eigen::MatrixXd& a, const Eigen::VectorXd& b) {
  ddtest::Matrix out = (s.matrix() * a.transpose()).rowwise() + b.transpose();
  return ddtest::SampleSet(out);
}

}  // namespace fixture
