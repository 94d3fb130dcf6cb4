#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>

#include <Eigen/Core>
#include <Eigen/SparseCore>

#include "cmsent/errors.hpp"

namespace cmsent {

template <typename Scalar>
using DenseVec = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

// Naive-Bayes log-count ratio of in-class (+1) against out-of-class (-1) rows:
//   p = alpha + sum of in-class rows,  q = alpha + sum of out-of-class rows
//   r = ln(p / |p|_1) - ln(q / |q|_1)
// With `binarize` every stored entry counts as 1 instead of its value.
// Both sides are evaluated symmetrically so swapping the labels negates r
// exactly.
template <typename Scalar>
DenseVec<Scalar> nb_log_ratio(std::span<const Eigen::SparseVector<Scalar>> rows,
                              std::span<const int> signs, Scalar alpha, bool binarize = false) {
  if (rows.empty()) throw TrainError("nb_log_ratio: no rows");
  if (rows.size() != signs.size()) throw TrainError("nb_log_ratio: rows/labels length mismatch");
  if (!(alpha > Scalar(0))) throw TrainError("nb_log_ratio: alpha must be positive");

  const Eigen::Index dim = rows.front().size();
  DenseVec<Scalar> p = DenseVec<Scalar>::Constant(dim, alpha);
  DenseVec<Scalar> q = DenseVec<Scalar>::Constant(dim, alpha);
  std::size_t n_in = 0, n_out = 0;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].size() != dim) throw TrainError("nb_log_ratio: rows differ in dimension");
    DenseVec<Scalar>& side = signs[i] > 0 ? p : q;
    (signs[i] > 0 ? n_in : n_out) += 1;
    for (typename Eigen::SparseVector<Scalar>::InnerIterator it(rows[i]); it; ++it)
      side[it.index()] += binarize ? Scalar(1) : it.value();
  }
  if (n_in == 0 || n_out == 0) throw TrainError("nb_log_ratio: a class has no documents");

  const Scalar log_p_norm = std::log(p.template lpNorm<1>());
  const Scalar log_q_norm = std::log(q.template lpNorm<1>());
  return (p.array().log() - log_p_norm) - (q.array().log() - log_q_norm);
}

// x scaled elementwise by r; entries that become zero are dropped.
template <typename Scalar>
Eigen::SparseVector<Scalar> scale_features(const Eigen::SparseVector<Scalar>& x,
                                           const DenseVec<Scalar>& r) {
  if (x.size() != r.size()) throw std::invalid_argument("scale_features: dimension mismatch");
  Eigen::SparseVector<Scalar> out(x.size());
  out.reserve(x.nonZeros());
  for (typename Eigen::SparseVector<Scalar>::InnerIterator it(x); it; ++it) {
    const Scalar v = it.value() * r[it.index()];
    if (v != Scalar(0)) out.insertBack(it.index()) = v;
  }
  return out;
}

// w' = (1 - beta) * mean|w| + beta * w.
template <typename Scalar>
DenseVec<Scalar> interpolate(const DenseVec<Scalar>& w, Scalar beta) {
  if (!(beta >= Scalar(0) && beta <= Scalar(1)))
    throw std::invalid_argument("interpolate: beta must lie in [0, 1]");
  if (w.size() == 0) return w;
  const Scalar mean_mag = w.template lpNorm<1>() / static_cast<Scalar>(w.size());
  return ((Scalar(1) - beta) * mean_mag + beta * w.array()).matrix();
}

}  // namespace cmsent
