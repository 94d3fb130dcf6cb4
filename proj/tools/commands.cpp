#include "commands.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <numeric>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "json.hpp"

#include "cmsent/corpus.hpp"
#include "cmsent/errors.hpp"
#include "cmsent/eval.hpp"

namespace cmsent::cli {

namespace {

using json = nlohmann::json;

json stats_json(const CorpusStats& st) {
  json labels;
  for (Sentiment s : kAllSentiments) labels[std::string(to_string(s))] = st.label_counts[index_of(s)];
  return {{"n_tweets", st.n_tweets},         {"n_unlabeled", st.n_unlabeled},
          {"label_counts", labels},          {"lang1_tokens", st.lang1_tokens},
          {"lang2_tokens", st.lang2_tokens}, {"other_tokens", st.other_tokens},
          {"lang1_pct", st.lang1_pct},       {"lang2_pct", st.lang2_pct},
          {"vocab1_size", st.vocab1_size},   {"vocab2_size", st.vocab2_size},
          {"overlap_size", st.overlap_size}, {"overlap_pct", st.overlap_pct}};
}

json report_json(const EvalReport& r) {
  json per_class;
  for (Sentiment s : kAllSentiments) {
    const auto c = static_cast<Eigen::Index>(index_of(s));
    per_class[std::string(to_string(s))] = {{"precision", r.precision[c]},
                                            {"recall", r.recall[c]},
                                            {"f1", r.f1[c]},
                                            {"support", r.support[c]}};
  }
  json cm = json::array();
  for (Eigen::Index i = 0; i < 3; ++i)
    cm.push_back({r.confusion(i, 0), r.confusion(i, 1), r.confusion(i, 2)});
  return {{"n", r.n},
          {"accuracy", r.accuracy},
          {"macro_f1", r.macro_f1},
          {"weighted_f1", r.weighted_f1},
          {"per_class", per_class},
          {"confusion", cm}};
}

void print_report(std::ostream& out, const EvalReport& r) {
  out << std::fixed << std::setprecision(4);
  out << std::left << std::setw(14) << "class" << std::right << std::setw(10) << "precision"
      << std::setw(10) << "recall" << std::setw(10) << "f1" << std::setw(10) << "support" << '\n';
  for (Sentiment s : kAllSentiments) {
    const auto c = static_cast<Eigen::Index>(index_of(s));
    out << std::left << std::setw(14) << to_string(s) << std::right << std::setw(10)
        << r.precision[c] << std::setw(10) << r.recall[c] << std::setw(10) << r.f1[c]
        << std::setw(10) << r.support[c] << '\n';
  }
  out << '\n'
      << std::left << std::setw(34) << "macro avg f1" << std::right << std::setw(10) << r.macro_f1
      << std::setw(10) << r.n << '\n'
      << std::left << std::setw(34) << "weighted avg f1" << std::right << std::setw(10)
      << r.weighted_f1 << std::setw(10) << r.n << '\n'
      << std::left << std::setw(34) << "accuracy" << std::right << std::setw(10) << r.accuracy
      << std::setw(10) << r.n << '\n';
  out << "\nconfusion (rows gold, columns predicted: negative neutral positive)\n";
  for (Sentiment s : kAllSentiments) {
    const auto i = static_cast<Eigen::Index>(index_of(s));
    out << std::left << std::setw(14) << to_string(s) << std::right;
    for (Eigen::Index j = 0; j < 3; ++j) out << std::setw(10) << r.confusion(i, j);
    out << '\n';
  }
  out.unsetf(std::ios::floatfield);
}

EvalReport evaluate_model(const NbsvmModel& model, const std::vector<Tweet>& tweets) {
  std::vector<Sentiment> gold, pred;
  gold.reserve(tweets.size());
  pred.reserve(tweets.size());
  for (const auto& t : tweets) {
    if (!t.sentiment) throw ModelError("tweet '" + t.uid + "' has no gold label; evaluation needs a labeled corpus");
    gold.push_back(*t.sentiment);
    pred.push_back(predict(model, t.text()).label);
  }
  return report(confusion(gold, pred));
}

NgramRange parse_range(const std::string& spec) {
  const auto dash = spec.find('-');
  try {
    if (dash == std::string::npos) {
      const int n = std::stoi(spec);
      return {n, n};
    }
    return {std::stoi(spec.substr(0, dash)), std::stoi(spec.substr(dash + 1))};
  } catch (const std::logic_error&) {
    throw std::invalid_argument("n-gram range '" + spec + "' is not of the form MIN-MAX");
  }
}

void write_corpus_file(const std::string& path, const std::vector<Tweet>& tweets) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write '" + path + "'");
  write_corpus(out, tweets);
}

struct GridPoint {
  ModelKind kind;
  Loss loss;
  NgramRange range;
  double lambda, alpha, beta;
};

struct GridResult {
  GridPoint point;
  EvalReport report;
  NbsvmModel model;
};

}  // namespace

TrainConfig RunConfig::train_config() const {
  TrainConfig t = train;
  t.loss = loss.empty() ? (kind() == ModelKind::Svm ? Loss::Hinge : Loss::Logistic) : parse_loss(loss);
  t.validate();
  return t;
}

FeatureConfig RunConfig::feature_config() const {
  FeatureConfig f;
  f.range = {ngram_min, ngram_max};
  f.range.validate();
  f.min_df = min_df;
  f.preprocess_enabled = !no_preprocess;
  f.preprocess.segment_hashtags = !no_segment;
  f.preprocess.remove_urls = !no_url_removal;
  f.preprocess.lowercase = !no_lowercase;
  f.preprocess.oov_penalty = penalty;
  f.preprocess.dictionary_path = dict_path;
  return f;
}

SegmentDictionary RunConfig::dictionary() const {
  return dict_path.empty() ? SegmentDictionary::builtin() : SegmentDictionary::load(dict_path);
}

int cmd_stats(const RunConfig& cfg) {
  const CorpusStats st = corpus_stats(read_corpus_file(cfg.corpus_path));
  if (cfg.json) {
    std::cout << stats_json(st).dump(2) << '\n';
    return kExitOk;
  }
  auto row = [](std::string_view name, auto value) {
    std::cout << std::left << std::setw(24) << name << std::right << value << '\n';
  };
  row("tweets", st.n_tweets);
  for (Sentiment s : kAllSentiments) row("  " + std::string(to_string(s)), st.label_counts[index_of(s)]);
  row("  unlabeled", st.n_unlabeled);
  row("tokens lang1", st.lang1_tokens);
  row("tokens lang2", st.lang2_tokens);
  row("tokens other", st.other_tokens);
  std::cout << std::fixed << std::setprecision(2);
  row("lang1 % (of lang1+2)", st.lang1_pct);
  row("lang2 % (of lang1+2)", st.lang2_pct);
  row("vocab lang1", st.vocab1_size);
  row("vocab lang2", st.vocab2_size);
  row("overlap types", st.overlap_size);
  row("overlap % (Jaccard)", st.overlap_pct);
  return kExitOk;
}

int cmd_train(const RunConfig& cfg) {
  const auto start = std::chrono::steady_clock::now();
  const TrainConfig tc = cfg.train_config();
  const FeatureConfig fc = cfg.feature_config();
  const SegmentDictionary dict = cfg.dictionary();
  const auto corpus = read_corpus_file(cfg.corpus_path);

  const NbsvmModel model = train_model(cfg.kind(), corpus, tc, fc, dict, cfg.jobs);
  save_model(model, cfg.model_path);
  const EvalReport fit = evaluate_model(model, corpus);
  const double seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

  if (cfg.json) {
    std::cout << json{{"model_path", cfg.model_path},
                      {"model_type", to_string(model.kind)},
                      {"n_tweets", corpus.size()},
                      {"vocab_size", model.vocabulary.size()},
                      {"train_accuracy", fit.accuracy},
                      {"train_macro_f1", fit.macro_f1},
                      {"wall_time_s", seconds}}
                     .dump(2)
              << '\n';
  } else {
    std::cout << "model        " << cfg.model_path << " (" << to_string(model.kind) << ", "
              << to_string(tc.loss) << ")\n"
              << "tweets       " << corpus.size() << '\n'
              << "vocabulary   " << model.vocabulary.size() << '\n'
              << "train acc    " << std::fixed << std::setprecision(4) << fit.accuracy << '\n'
              << "train macroF " << fit.macro_f1 << '\n'
              << "wall time    " << std::setprecision(2) << seconds << " s\n";
  }
  return kExitOk;
}

int cmd_predict(const RunConfig& cfg) {
  const NbsvmModel model = load_model(cfg.model_path);

  std::vector<std::pair<std::string, std::string>> items;  // uid, text
  if (cfg.raw) {
    std::ifstream in(cfg.input_path, std::ios::binary);
    if (!in) throw IoError("cannot open input '" + cfg.input_path + "'");
    std::string line;
    for (std::size_t n = 1; std::getline(in, line); ++n) {
      if (!line.empty() && line.back() == '\r') line.pop_back();
      items.emplace_back(std::to_string(n), line);
    }
  } else {
    for (const auto& t : read_corpus_file(cfg.input_path)) items.emplace_back(t.uid, t.text());
  }

  std::cout << std::setprecision(17);
  for (const auto& [uid, text] : items) {
    const Prediction p = predict(model, text);
    std::cout << uid << '\t' << to_string(p.label);
    if (cfg.scores)
      for (double s : p.scores) std::cout << '\t' << s;
    std::cout << '\n';
  }
  return kExitOk;
}

int cmd_evaluate(const RunConfig& cfg) {
  const NbsvmModel model = load_model(cfg.model_path);
  const EvalReport r = evaluate_model(model, read_corpus_file(cfg.corpus_path));
  if (cfg.json)
    std::cout << report_json(r).dump(2) << '\n';
  else
    print_report(std::cout, r);
  return kExitOk;
}

int cmd_segment(const RunConfig& cfg) {
  const SegmentDictionary dict = cfg.dictionary();
  std::string line;
  while (std::getline(std::cin, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const auto first = line.find_first_not_of(" \t");
    const auto last = line.find_last_not_of(" \t");
    std::string tag = first == std::string::npos ? "" : line.substr(first, last - first + 1);
    if (tag.empty()) {
      std::cout << '\n';
      continue;
    }
    if (tag.front() != '#') tag.insert(tag.begin(), '#');
    const auto pieces = segment_hashtag(tag, dict, cfg.penalty);
    for (std::size_t i = 0; i < pieces.size(); ++i) std::cout << (i ? " " : "") << pieces[i];
    std::cout << '\n';
  }
  return kExitOk;
}

int cmd_grid(const RunConfig& cfg) {
  const TrainConfig base = cfg.train_config();
  const FeatureConfig base_features = cfg.feature_config();
  const SegmentDictionary dict = cfg.dictionary();
  const auto corpus = read_corpus_file(cfg.corpus_path);
  const CorpusSplit split = stratified_split(corpus, cfg.dev_fraction, base.seed);
  if (!cfg.split_dir.empty()) {
    std::filesystem::create_directories(cfg.split_dir);
    write_corpus_file(cfg.split_dir + "/train.txt", split.train);
    write_corpus_file(cfg.split_dir + "/dev.txt", split.dev);
  }

  auto or_default = [](const auto& values, auto fallback) {
    using T = std::decay_t<decltype(fallback)>;
    return values.empty() ? std::vector<T>{fallback} : std::vector<T>(values.begin(), values.end());
  };
  const auto models = or_default(cfg.grid_models, cfg.model_type);
  const auto ngrams = or_default(cfg.grid_ngrams, std::to_string(cfg.ngram_min) + "-" + std::to_string(cfg.ngram_max));
  const auto lambdas = or_default(cfg.grid_lambdas, base.lambda);
  const auto alphas = or_default(cfg.grid_alphas, base.alpha);
  const auto betas = or_default(cfg.grid_betas, base.beta);

  std::vector<GridPoint> points;
  for (const auto& m : models) {
    const ModelKind kind = parse_model_kind(m);
    std::vector<std::string> losses = cfg.grid_losses;
    if (losses.empty()) losses.push_back(cfg.loss.empty() ? (kind == ModelKind::Svm ? "hinge" : "logistic") : cfg.loss);
    for (const auto& l : losses)
      for (const auto& ng : ngrams)
        for (double lambda : lambdas)
          for (double alpha : alphas)
            for (double beta : betas) {
              GridPoint p{kind, parse_loss(l), parse_range(ng), lambda, alpha, beta};
              p.range.validate();
              points.push_back(p);
            }
  }

  std::vector<std::optional<GridResult>> results(points.size());
  std::vector<std::exception_ptr> errors(points.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i; (i = next++) < points.size();) {
      try {
        const GridPoint& p = points[i];
        TrainConfig tc = base;
        tc.loss = p.loss;
        tc.lambda = p.lambda;
        tc.alpha = p.alpha;
        tc.beta = p.beta;
        FeatureConfig fc = base_features;
        fc.range = p.range;
        NbsvmModel model = train_model(p.kind, split.train, tc, fc, dict, cfg.jobs == 1 ? 1 : 0);
        EvalReport r = evaluate_model(model, split.dev);
        results[i] = GridResult{p, r, std::move(model)};
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  const std::size_t n_threads = std::min<std::size_t>(
      points.size(), cfg.jobs > 0 ? static_cast<std::size_t>(cfg.jobs)
                                  : std::max(1u, std::thread::hardware_concurrency()));
  std::vector<std::thread> threads;
  for (std::size_t t = 0; t < n_threads; ++t) threads.emplace_back(worker);
  for (auto& t : threads) t.join();
  for (const auto& e : errors)
    if (e) std::rethrow_exception(e);

  std::vector<std::size_t> order(points.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return results[a]->report.macro_f1 > results[b]->report.macro_f1;
  });

  const GridResult& best = *results[order.front()];
  if (!cfg.model_path.empty()) save_model(best.model, cfg.model_path);

  auto point_json = [](const GridResult& g) {
    return json{{"model", to_string(g.point.kind)},
                {"loss", to_string(g.point.loss)},
                {"ngram_min", g.point.range.min_n},
                {"ngram_max", g.point.range.max_n},
                {"lambda", g.point.lambda},
                {"alpha", g.point.alpha},
                {"beta", g.point.beta},
                {"macro_f1", g.report.macro_f1},
                {"weighted_f1", g.report.weighted_f1},
                {"accuracy", g.report.accuracy}};
  };
  if (cfg.json) {
    json rows = json::array();
    for (std::size_t i : order) rows.push_back(point_json(*results[i]));
    std::cout << json{{"n_train", split.train.size()},
                      {"n_dev", split.dev.size()},
                      {"results", rows},
                      {"best", point_json(best)}}
                     .dump(2)
              << '\n';
    return kExitOk;
  }

  std::cout << "train " << split.train.size() << " / dev " << split.dev.size() << " tweets\n";
  std::cout << std::left << std::setw(7) << "model" << std::setw(10) << "loss" << std::setw(7)
            << "ngram" << std::right << std::setw(11) << "lambda" << std::setw(8) << "alpha"
            << std::setw(7) << "beta" << std::setw(10) << "macroF1" << std::setw(10) << "wF1"
            << std::setw(10) << "acc" << '\n';
  for (std::size_t i : order) {
    const GridResult& g = *results[i];
    std::ostringstream range;
    range << g.point.range.min_n << '-' << g.point.range.max_n;
    std::cout << std::left << std::setw(7) << to_string(g.point.kind) << std::setw(10)
              << to_string(g.point.loss) << std::setw(7) << range.str() << std::right
              << std::setw(11) << std::defaultfloat << std::setprecision(4) << g.point.lambda
              << std::setw(8) << g.point.alpha << std::setw(7) << g.point.beta << std::fixed
              << std::setw(10) << g.report.macro_f1 << std::setw(10) << g.report.weighted_f1
              << std::setw(10) << g.report.accuracy << '\n';
  }
  if (!cfg.model_path.empty()) std::cout << "best model written to " << cfg.model_path << '\n';
  return kExitOk;
}

}  // namespace cmsent::cli
