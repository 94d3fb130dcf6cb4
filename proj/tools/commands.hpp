#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "cmsent/features.hpp"
#include "cmsent/linear.hpp"
#include "cmsent/nbsvm.hpp"
#include "cmsent/preprocess.hpp"

namespace cmsent::cli {

// Exit codes shared by every subcommand.
inline constexpr int kExitOk = 0;
inline constexpr int kExitModel = 1;  // evaluation or model error
inline constexpr int kExitUsage = 2;  // usage or I/O error

struct RunConfig {
  std::string corpus_path;
  std::string model_path;
  std::string input_path;
  std::string dict_path;

  std::string model_type = "nbsvm";
  std::string loss;  // empty: logistic for nbsvm, hinge for svm
  int ngram_min = 2;
  int ngram_max = 6;
  std::uint32_t min_df = 1;
  bool no_preprocess = false;
  bool no_segment = false;
  bool no_url_removal = false;
  bool no_lowercase = false;
  double penalty = kDefaultOovPenalty;

  TrainConfig train;
  int jobs = 0;
  bool json = false;

  bool raw = false;
  bool scores = false;

  double dev_fraction = 0.2;
  std::string split_dir;
  std::vector<std::string> grid_models;
  std::vector<std::string> grid_losses;
  std::vector<std::string> grid_ngrams;
  std::vector<double> grid_lambdas;
  std::vector<double> grid_alphas;
  std::vector<double> grid_betas;

  ModelKind kind() const { return parse_model_kind(model_type); }
  TrainConfig train_config() const;
  FeatureConfig feature_config() const;
  SegmentDictionary dictionary() const;
};

int cmd_stats(const RunConfig& cfg);
int cmd_train(const RunConfig& cfg);
int cmd_predict(const RunConfig& cfg);
int cmd_evaluate(const RunConfig& cfg);
int cmd_segment(const RunConfig& cfg);
int cmd_grid(const RunConfig& cfg);

}  // namespace cmsent::cli
