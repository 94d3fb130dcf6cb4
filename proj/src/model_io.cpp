#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <unistd.h>
#include <zlib.h>

#include "json.hpp"

#include "cmsent/errors.hpp"
#include "cmsent/nbsvm.hpp"

namespace cmsent {

namespace {

using json = nlohmann::json;

std::string crc32_hex(std::string_view bytes) {
  uLong crc = crc32(0L, Z_NULL, 0);
  crc = crc32(crc, reinterpret_cast<const Bytef*>(bytes.data()), static_cast<uInt>(bytes.size()));
  char buf[16];
  std::snprintf(buf, sizeof buf, "%08lx", static_cast<unsigned long>(crc));
  return std::string("crc32:") + buf;
}

json vec_to_json(const DenseVec<double>& v) {
  return json(std::vector<double>(v.data(), v.data() + v.size()));
}

DenseVec<double> vec_from_json(const json& j, std::size_t expected) {
  const auto values = j.get<std::vector<double>>();
  if (values.size() != expected) throw ModelError("weight vector length does not match vocabulary");
  return Eigen::Map<const DenseVec<double>>(values.data(), static_cast<Eigen::Index>(values.size()));
}

json body_to_json(const NbsvmModel& m) {
  json dict = json::object();
  for (const auto& [word, count] : m.dictionary.entries()) dict[word] = count;

  json classes = json::array();
  for (Sentiment s : kAllSentiments) {
    const ClassWeights& cw = m.weights(s);
    classes.push_back({{"label", to_string(s)}, {"r", vec_to_json(cw.r)},
                       {"w", vec_to_json(cw.w)}, {"b", cw.b}});
  }

  const Vocabulary& v = m.vocabulary;
  return {
      {"format_version", kModelFormatVersion},
      {"model_type", to_string(m.kind)},
      {"preprocess_config",
       {{"enabled", m.preprocess_enabled},
        {"segment_hashtags", m.preprocess.segment_hashtags},
        {"remove_urls", m.preprocess.remove_urls},
        {"lowercase", m.preprocess.lowercase},
        {"oov_penalty", m.preprocess.oov_penalty},
        {"dictionary", std::move(dict)}}},
      {"vocabulary",
       {{"ngram_min", v.range().min_n},
        {"ngram_max", v.range().max_n},
        {"min_df", v.min_df()},
        {"n_docs", v.n_docs()},
        {"ngrams", v.ngrams()},
        {"df", v.df()}}},
      {"classes", std::move(classes)},
      {"train_config",
       {{"loss", to_string(m.train.loss)},
        {"lambda", m.train.lambda},
        {"alpha", m.train.alpha},
        {"beta", m.train.beta},
        {"epochs", m.train.epochs},
        {"seed", m.train.seed},
        {"tol", m.train.tol},
        {"nb_binarize", m.train.nb_binarize}}},
  };
}

NbsvmModel body_from_json(const json& doc) {
  NbsvmModel m;
  m.kind = parse_model_kind(doc.at("model_type").get<std::string>());

  const json& pp = doc.at("preprocess_config");
  m.preprocess_enabled = pp.at("enabled").get<bool>();
  m.preprocess.segment_hashtags = pp.at("segment_hashtags").get<bool>();
  m.preprocess.remove_urls = pp.at("remove_urls").get<bool>();
  m.preprocess.lowercase = pp.at("lowercase").get<bool>();
  m.preprocess.oov_penalty = pp.at("oov_penalty").get<double>();
  for (const auto& [word, count] : pp.at("dictionary").items())
    m.dictionary.add(word, count.get<std::uint64_t>());

  const json& v = doc.at("vocabulary");
  m.vocabulary = Vocabulary(v.at("ngrams").get<std::vector<std::string>>(),
                            v.at("df").get<std::vector<std::uint32_t>>(),
                            v.at("n_docs").get<std::size_t>(),
                            NgramRange{v.at("ngram_min").get<int>(), v.at("ngram_max").get<int>()},
                            v.at("min_df").get<std::uint32_t>());

  const json& classes = doc.at("classes");
  if (!classes.is_array() || classes.size() != kNumClasses)
    throw ModelError("model must contain exactly three classes");
  const std::size_t dim = m.vocabulary.size();
  for (Sentiment s : kAllSentiments) {
    const json& c = classes.at(index_of(s));
    if (c.at("label").get<std::string>() != to_string(s))
      throw ModelError("classes are not in negative, neutral, positive order");
    ClassWeights& cw = m.classes[index_of(s)];
    cw.r = vec_from_json(c.at("r"), dim);
    cw.w = vec_from_json(c.at("w"), dim);
    cw.b = c.at("b").get<double>();
  }

  const json& tc = doc.at("train_config");
  m.train.loss = parse_loss(tc.at("loss").get<std::string>());
  m.train.lambda = tc.at("lambda").get<double>();
  m.train.alpha = tc.at("alpha").get<double>();
  m.train.beta = tc.at("beta").get<double>();
  m.train.epochs = tc.at("epochs").get<int>();
  m.train.seed = tc.at("seed").get<std::uint64_t>();
  m.train.tol = tc.at("tol").get<double>();
  m.train.nb_binarize = tc.at("nb_binarize").get<bool>();
  return m;
}

}  // namespace

std::string serialize_model(const NbsvmModel& model) {
  json doc = body_to_json(model);
  const std::string body = doc.dump();
  doc["checksum"] = crc32_hex(body);
  return doc.dump() + "\n";
}

NbsvmModel deserialize_model(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error&) {
    throw ModelError("model file is truncated or not valid JSON");
  }
  if (!doc.is_object() || !doc.contains("format_version") ||
      !doc["format_version"].is_number_integer())
    throw ModelError("model file has no format_version");
  const auto version = doc["format_version"].get<long long>();
  if (version != kModelFormatVersion)
    throw ModelError("unsupported model format version " + std::to_string(version) +
                     " (this build reads version " + std::to_string(kModelFormatVersion) + ")");
  if (!doc.contains("checksum") || !doc["checksum"].is_string())
    throw ModelError("model file has no checksum");
  const std::string stored = doc["checksum"].get<std::string>();
  doc.erase("checksum");
  if (crc32_hex(doc.dump()) != stored) throw ModelError("model checksum mismatch (file is corrupted)");

  try {
    return body_from_json(doc);
  } catch (const json::exception& e) {
    throw ModelError(std::string("malformed model file: ") + e.what());
  } catch (const std::invalid_argument& e) {
    throw ModelError(std::string("malformed model file: ") + e.what());
  }
}

void save_model(const NbsvmModel& model, const std::string& path) {
  namespace fs = std::filesystem;
  const std::string text = serialize_model(model);
  const fs::path target(path);
  fs::path tmp = target;
  tmp += ".tmp" + std::to_string(::getpid());
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write model file '" + tmp.string() + "'");
    out.write(text.data(), static_cast<std::streamsize>(text.size()));
    out.close();
    if (!out) {
      std::error_code ec;
      fs::remove(tmp, ec);
      throw IoError("failed writing model file '" + tmp.string() + "'");
    }
  }
  std::error_code ec;
  fs::rename(tmp, target, ec);
  if (ec) {
    fs::remove(tmp, ec);
    throw IoError("cannot move model into place at '" + path + "'");
  }
}

NbsvmModel load_model(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open model file '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return deserialize_model(buf.str());
}

}  // namespace cmsent
