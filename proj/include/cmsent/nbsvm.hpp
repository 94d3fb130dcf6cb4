#pragma once

#include <array>
#include <cstddef>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "cmsent/corpus.hpp"
#include "cmsent/features.hpp"
#include "cmsent/linear.hpp"
#include "cmsent/nb.hpp"
#include "cmsent/preprocess.hpp"

namespace cmsent {

// nbsvm scales features by per-class NB log-count ratios; svm keeps r = 1.
enum class ModelKind { Nbsvm, Svm };

std::string_view to_string(ModelKind kind);
ModelKind parse_model_kind(std::string_view s);

struct ClassWeights {
  DenseVec<double> r;  // NB log-count ratio (all ones for the svm baseline)
  DenseVec<double> w;
  double b = 0.0;
};

// Everything prediction depends on; the dictionary is stored by value so a
// model file is self-contained.
struct NbsvmModel {
  ModelKind kind = ModelKind::Nbsvm;
  PreprocessConfig preprocess;
  bool preprocess_enabled = true;
  SegmentDictionary dictionary;
  Vocabulary vocabulary;
  std::array<ClassWeights, kNumClasses> classes;
  TrainConfig train;

  const ClassWeights& weights(Sentiment s) const { return classes[index_of(s)]; }
};

struct FeatureConfig {
  NgramRange range;
  std::uint32_t min_df = 1;
  bool preprocess_enabled = true;
  PreprocessConfig preprocess;
};

struct Prediction {
  Sentiment label = Sentiment::Negative;
  std::array<double, kNumClasses> scores{};
};

// Applies the model's stored preprocessing (or none) to raw text.
std::string prepare_text(const NbsvmModel& model, std::string_view raw_text);

// Trains one-vs-rest: for each class, NB ratios against the rest (nbsvm only),
// a linear classifier on the scaled rows, then interpolation with beta.
// Requires at least one labeled tweet per class; unlabeled tweets are an error.
NbsvmModel train_nbsvm(const std::vector<Tweet>& corpus, const TrainConfig& cfg,
                       const FeatureConfig& features, const SegmentDictionary& dict);

// Same pipeline with r fixed to all ones.
NbsvmModel train_svm(const std::vector<Tweet>& corpus, const TrainConfig& cfg,
                     const FeatureConfig& features, const SegmentDictionary& dict);

// jobs == 1 trains the three classes sequentially; the result does not depend
// on it.
NbsvmModel train_model(ModelKind kind, const std::vector<Tweet>& corpus, const TrainConfig& cfg,
                       const FeatureConfig& features, const SegmentDictionary& dict,
                       int jobs = 0);

// Argmax over w_c . (r_c * x) + b_c; ties go to the earliest class in
// Negative < Neutral < Positive order.
Prediction predict(const NbsvmModel& model, std::string_view raw_text);
Prediction predict_features(const NbsvmModel& model, const SparseVector& x);
Sentiment argmax_label(const std::array<double, kNumClasses>& scores);

// Versioned JSON with a CRC-32 over the canonical body.
inline constexpr int kModelFormatVersion = 1;

std::string serialize_model(const NbsvmModel& model);
NbsvmModel deserialize_model(std::string_view text);
// Writes to a temporary sibling and renames it into place.
void save_model(const NbsvmModel& model, const std::string& path);
NbsvmModel load_model(const std::string& path);

}  // namespace cmsent
