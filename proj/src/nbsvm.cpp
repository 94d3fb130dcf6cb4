#include "cmsent/nbsvm.hpp"

#include <future>
#include <stdexcept>
#include <string>

namespace cmsent {

namespace {

std::string prepare(bool enabled, const PreprocessConfig& cfg, const SegmentDictionary& dict,
                    std::string_view text) {
  return enabled ? preprocess(text, cfg, dict) : std::string(text);
}

ClassWeights fit_class(ModelKind kind, const std::vector<SparseVector>& rows,
                       const std::vector<int>& signs, const TrainConfig& cfg, Eigen::Index dim) {
  ClassWeights cw;
  cw.r = kind == ModelKind::Nbsvm
             ? nb_log_ratio<double>(rows, signs, cfg.alpha, cfg.nb_binarize)
             : DenseVec<double>::Ones(dim);

  std::vector<SparseVector> scaled;
  scaled.reserve(rows.size());
  for (const auto& x : rows) scaled.push_back(scale_features<double>(x, cw.r));

  const LinearFit<double> fit = train_linear<double>(scaled, signs, cfg);
  cw.w = interpolate<double>(fit.w, cfg.beta);
  cw.b = fit.b;
  return cw;
}

}  // namespace

std::string_view to_string(ModelKind kind) { return kind == ModelKind::Nbsvm ? "nbsvm" : "svm"; }

ModelKind parse_model_kind(std::string_view s) {
  if (s == "nbsvm") return ModelKind::Nbsvm;
  if (s == "svm") return ModelKind::Svm;
  throw std::invalid_argument("unknown model type '" + std::string(s) + "'");
}

std::string prepare_text(const NbsvmModel& model, std::string_view raw_text) {
  return prepare(model.preprocess_enabled, model.preprocess, model.dictionary, raw_text);
}

NbsvmModel train_model(ModelKind kind, const std::vector<Tweet>& corpus, const TrainConfig& cfg,
                       const FeatureConfig& features, const SegmentDictionary& dict, int jobs) {
  cfg.validate();
  features.range.validate();
  if (corpus.empty()) throw TrainError("training corpus is empty");

  std::array<std::size_t, kNumClasses> per_class{};
  for (const auto& t : corpus) {
    if (!t.sentiment) throw TrainError("tweet '" + t.uid + "' has no sentiment label");
    ++per_class[index_of(*t.sentiment)];
  }
  for (Sentiment s : kAllSentiments)
    if (per_class[index_of(s)] == 0)
      throw TrainError("training corpus has no '" + std::string(to_string(s)) + "' tweets");

  NbsvmModel model;
  model.kind = kind;
  model.preprocess = features.preprocess;
  model.preprocess_enabled = features.preprocess_enabled;
  model.dictionary = dict;
  model.train = cfg;

  std::vector<std::string> docs;
  docs.reserve(corpus.size());
  for (const auto& t : corpus) docs.push_back(prepare_text(model, t.text()));
  model.vocabulary = fit_vocabulary(docs, features.range, features.min_df);
  const std::vector<SparseVector> rows = tfidf_transform(docs, model.vocabulary);
  const auto dim = static_cast<Eigen::Index>(model.vocabulary.size());

  // One-vs-rest problems are independent; each is sequential internally.
  std::array<std::future<ClassWeights>, kNumClasses> pending;
  for (Sentiment s : kAllSentiments) {
    pending[index_of(s)] = std::async(jobs == 1 ? std::launch::deferred : std::launch::async, [&, s] {
      std::vector<int> signs;
      signs.reserve(corpus.size());
      for (const auto& t : corpus) signs.push_back(*t.sentiment == s ? 1 : -1);
      return fit_class(kind, rows, signs, cfg, dim);
    });
  }
  for (Sentiment s : kAllSentiments) model.classes[index_of(s)] = pending[index_of(s)].get();
  return model;
}

NbsvmModel train_nbsvm(const std::vector<Tweet>& corpus, const TrainConfig& cfg,
                       const FeatureConfig& features, const SegmentDictionary& dict) {
  return train_model(ModelKind::Nbsvm, corpus, cfg, features, dict);
}

NbsvmModel train_svm(const std::vector<Tweet>& corpus, const TrainConfig& cfg,
                     const FeatureConfig& features, const SegmentDictionary& dict) {
  return train_model(ModelKind::Svm, corpus, cfg, features, dict);
}

Sentiment argmax_label(const std::array<double, kNumClasses>& scores) {
  std::size_t best = 0;
  for (std::size_t c = 1; c < kNumClasses; ++c)
    if (scores[c] > scores[best]) best = c;
  return kAllSentiments[best];
}

Prediction predict_features(const NbsvmModel& model, const SparseVector& x) {
  Prediction p;
  for (Sentiment s : kAllSentiments) {
    const ClassWeights& cw = model.weights(s);
    p.scores[index_of(s)] = scale_features<double>(x, cw.r).dot(cw.w) + cw.b;
  }
  p.label = argmax_label(p.scores);
  return p;
}

Prediction predict(const NbsvmModel& model, std::string_view raw_text) {
  return predict_features(model, tfidf_transform(prepare_text(model, raw_text), model.vocabulary));
}

}  // namespace cmsent
