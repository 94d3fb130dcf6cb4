#include "cmsent/eval.hpp"

#include <stdexcept>

namespace cmsent {

namespace {

double ratio(std::int64_t num, std::int64_t den) {
  return den == 0 ? 0.0 : static_cast<double>(num) / static_cast<double>(den);
}

}  // namespace

ConfusionMatrix confusion(std::span<const Sentiment> gold, std::span<const Sentiment> pred) {
  if (gold.size() != pred.size()) throw std::invalid_argument("confusion: length mismatch");
  if (gold.empty()) throw std::invalid_argument("confusion: no labels");
  ConfusionMatrix cm = ConfusionMatrix::Zero();
  for (std::size_t i = 0; i < gold.size(); ++i)
    ++cm(static_cast<Eigen::Index>(index_of(gold[i])), static_cast<Eigen::Index>(index_of(pred[i])));
  return cm;
}

EvalReport report(const ConfusionMatrix& cm) {
  if ((cm.array() < 0).any()) throw std::invalid_argument("report: negative count");
  EvalReport r;
  r.confusion = cm;
  r.n = cm.sum();
  if (r.n == 0) throw std::invalid_argument("report: empty confusion matrix");

  const Eigen::Matrix<std::int64_t, 3, 1> predicted = cm.colwise().sum().transpose();
  r.support = cm.rowwise().sum();
  for (Eigen::Index c = 0; c < 3; ++c) {
    const std::int64_t tp = cm(c, c);
    r.precision[c] = ratio(tp, predicted[c]);
    r.recall[c] = ratio(tp, r.support[c]);
    const double sum = r.precision[c] + r.recall[c];
    r.f1[c] = sum > 0.0 ? 2.0 * r.precision[c] * r.recall[c] / sum : 0.0;
  }
  r.macro_f1 = r.f1.mean();
  r.weighted_f1 = r.f1.dot(r.support.cast<double>()) / static_cast<double>(r.n);
  r.accuracy = ratio(cm.trace(), r.n);
  return r;
}

}  // namespace cmsent
