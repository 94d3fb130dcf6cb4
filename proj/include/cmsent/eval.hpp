#pragma once

#include <cstdint>
#include <span>

#include <Eigen/Core>

#include "cmsent/corpus.hpp"

namespace cmsent {

// Rows are gold labels, columns predictions, both in Sentiment order.
using ConfusionMatrix = Eigen::Matrix<std::int64_t, 3, 3>;

ConfusionMatrix confusion(std::span<const Sentiment> gold, std::span<const Sentiment> pred);

struct EvalReport {
  Eigen::Vector3d precision = Eigen::Vector3d::Zero();
  Eigen::Vector3d recall = Eigen::Vector3d::Zero();
  Eigen::Vector3d f1 = Eigen::Vector3d::Zero();
  Eigen::Matrix<std::int64_t, 3, 1> support = Eigen::Matrix<std::int64_t, 3, 1>::Zero();
  double macro_f1 = 0.0;     // unweighted mean of f1
  double weighted_f1 = 0.0;  // f1 weighted by gold support
  double accuracy = 0.0;
  ConfusionMatrix confusion = ConfusionMatrix::Zero();
  std::int64_t n = 0;
};

// Undefined ratios (0/0) are reported as 0.
EvalReport report(const ConfusionMatrix& cm);

}  // namespace cmsent
