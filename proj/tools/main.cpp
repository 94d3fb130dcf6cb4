#include <iostream>

#include "CLI11.hpp"

#include "cmsent/errors.hpp"
#include "commands.hpp"

using namespace cmsent;
using namespace cmsent::cli;

namespace {

void add_preprocess_flags(CLI::App* sub, RunConfig& cfg) {
  sub->add_flag("--no-preprocess", cfg.no_preprocess, "Use tweet text as-is (no pipeline)");
  sub->add_flag("--no-segment", cfg.no_segment, "Keep hashtags unsegmented");
  sub->add_flag("--no-url-removal", cfg.no_url_removal, "Keep URLs");
  sub->add_flag("--no-lowercase", cfg.no_lowercase, "Keep letter case");
  sub->add_option("--dict", cfg.dict_path, "Segmentation dictionary (word count per line)")
      ->check(CLI::ExistingFile);
  sub->add_option("--penalty", cfg.penalty, "Per-character penalty for unknown hashtag spans")
      ->capture_default_str();
}

void add_train_flags(CLI::App* sub, RunConfig& cfg) {
  sub->add_option("--ngram-min", cfg.ngram_min, "Shortest character n-gram")->capture_default_str();
  sub->add_option("--ngram-max", cfg.ngram_max, "Longest character n-gram")->capture_default_str();
  sub->add_option("--min-df", cfg.min_df, "Minimum document frequency")->capture_default_str();
  sub->add_option("--model", cfg.model_type, "Classifier")
      ->check(CLI::IsMember({"nbsvm", "svm"}))
      ->capture_default_str();
  sub->add_option("--loss", cfg.loss, "Loss (default: logistic for nbsvm, hinge for svm)")
      ->check(CLI::IsMember({"logistic", "hinge"}));
  sub->add_option("--lambda", cfg.train.lambda, "L2 regularization strength")->capture_default_str();
  sub->add_option("--alpha", cfg.train.alpha, "NB smoothing")->capture_default_str();
  sub->add_option("--beta", cfg.train.beta, "Weight interpolation (1 = off)")->capture_default_str();
  sub->add_option("--epochs", cfg.train.epochs, "Iteration budget")->capture_default_str();
  sub->add_option("--tol", cfg.train.tol, "Gradient-norm tolerance")->capture_default_str();
  sub->add_flag("--nb-binarize", cfg.train.nb_binarize, "Binarize features for NB ratios");
  sub->add_option("--seed", cfg.train.seed, "Random seed")->capture_default_str();
  sub->add_option("--jobs", cfg.jobs, "Parallel workers (0 = all cores)")->capture_default_str();
  add_preprocess_flags(sub, cfg);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Code-mixed tweet sentiment: NBSVM over character n-gram TF-IDF"};
  app.require_subcommand(1);
  app.set_config("--config", "", "Key = value config file; command-line flags take precedence");
  RunConfig cfg;

  auto* stats = app.add_subcommand("stats", "Corpus label, language and vocabulary-overlap statistics");
  stats->add_option("corpus", cfg.corpus_path, "Corpus file")->required()->check(CLI::ExistingFile);
  stats->add_flag("--json", cfg.json, "Emit JSON");

  auto* train = app.add_subcommand("train", "Train a model on a labeled corpus");
  train->add_option("corpus", cfg.corpus_path, "Labeled corpus file")->required()->check(CLI::ExistingFile);
  train->add_option("-o,--out", cfg.model_path, "Model file to write")->required();
  train->add_flag("--json", cfg.json, "Emit JSON summary");
  add_train_flags(train, cfg);

  auto* pred = app.add_subcommand("predict", "Label tweets with a trained model");
  pred->add_option("model", cfg.model_path, "Model file")->required()->check(CLI::ExistingFile);
  pred->add_option("input", cfg.input_path, "Corpus file, or text lines with --raw")
      ->required()
      ->check(CLI::ExistingFile);
  pred->add_flag("--raw", cfg.raw, "Input is one raw text per line");
  pred->add_flag("--scores", cfg.scores, "Append negative/neutral/positive scores");

  auto* evaluate = app.add_subcommand("evaluate", "Per-class F1 and macro average on a labeled corpus");
  evaluate->add_option("model", cfg.model_path, "Model file")->required()->check(CLI::ExistingFile);
  evaluate->add_option("corpus", cfg.corpus_path, "Labeled corpus file")->required()->check(CLI::ExistingFile);
  evaluate->add_flag("--json", cfg.json, "Emit JSON");

  auto* segment = app.add_subcommand("segment", "Segment hashtags read one per line from stdin");
  segment->add_option("--dict", cfg.dict_path, "Segmentation dictionary")->check(CLI::ExistingFile);
  segment->add_option("--penalty", cfg.penalty, "Per-character penalty for unknown spans")
      ->capture_default_str();

  auto* grid = app.add_subcommand("grid", "Grid search on a stratified train/dev split");
  grid->add_option("corpus", cfg.corpus_path, "Labeled corpus file")->required()->check(CLI::ExistingFile);
  grid->add_option("-o,--out", cfg.model_path, "Write the best model here");
  grid->add_option("--dev-fraction", cfg.dev_fraction, "Share of each class held out")
      ->capture_default_str();
  grid->add_option("--split-dir", cfg.split_dir, "Also write train.txt and dev.txt here");
  grid->add_option("--grid-model", cfg.grid_models, "Model types")->delimiter(',');
  grid->add_option("--grid-loss", cfg.grid_losses, "Losses")->delimiter(',');
  grid->add_option("--grid-ngram", cfg.grid_ngrams, "N-gram ranges as MIN-MAX")->delimiter(',');
  grid->add_option("--grid-lambda", cfg.grid_lambdas, "Regularization strengths")->delimiter(',');
  grid->add_option("--grid-alpha", cfg.grid_alphas, "NB smoothing values")->delimiter(',');
  grid->add_option("--grid-beta", cfg.grid_betas, "Interpolation values")->delimiter(',');
  grid->add_flag("--json", cfg.json, "Emit JSON");
  add_train_flags(grid, cfg);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (*stats) return cmd_stats(cfg);
    if (*train) return cmd_train(cfg);
    if (*pred) return cmd_predict(cfg);
    if (*evaluate) return cmd_evaluate(cfg);
    if (*segment) return cmd_segment(cfg);
    if (*grid) return cmd_grid(cfg);
  } catch (const ParseError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const IoError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitModel;
  }
  return kExitUsage;
}
