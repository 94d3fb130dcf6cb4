#include "cmsent/features.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "cmsent/unicode.hpp"

namespace cmsent {

namespace {

// Visits every n-gram of text in (start, length) order.
template <typename Fn>
void for_each_ngram(std::string_view text, NgramRange range, Fn&& fn) {
  const std::u32string s = unicode::decode(text);
  // Byte offset of every scalar boundary, so n-grams are slices of one encoding.
  std::string utf8;
  std::vector<std::size_t> offset;
  offset.reserve(s.size() + 1);
  for (char32_t c : s) {
    offset.push_back(utf8.size());
    utf8 += unicode::encode(c);
  }
  offset.push_back(utf8.size());

  const auto m = static_cast<int>(s.size());
  for (int start = 0; start < m; ++start) {
    const int longest = std::min(range.max_n, m - start);
    for (int n = range.min_n; n <= longest; ++n)
      fn(std::string_view(utf8).substr(offset[start], offset[start + n] - offset[start]));
  }
}

}  // namespace

void NgramRange::validate() const {
  if (min_n < 1 || min_n > max_n || max_n > 10)
    throw std::invalid_argument("n-gram range must satisfy 1 <= min <= max <= 10");
}

std::vector<std::string> extract_char_ngrams(std::string_view text, NgramRange range) {
  range.validate();
  std::vector<std::string> out;
  for_each_ngram(text, range, [&](std::string_view g) { out.emplace_back(g); });
  return out;
}

double smooth_idf(std::size_t df, std::size_t n_docs) {
  return std::log((1.0 + static_cast<double>(n_docs)) / (1.0 + static_cast<double>(df))) + 1.0;
}

Vocabulary::Vocabulary(std::vector<std::string> ngrams, std::vector<std::uint32_t> df,
                       std::size_t n_docs, NgramRange range, std::uint32_t min_df)
    : ngrams_(std::move(ngrams)), df_(std::move(df)), n_docs_(n_docs), range_(range),
      min_df_(min_df) {
  range_.validate();
  if (ngrams_.size() != df_.size()) throw std::invalid_argument("vocabulary: ngram/df size mismatch");
  index_.reserve(ngrams_.size());
  for (std::size_t i = 0; i < ngrams_.size(); ++i) {
    if (df_[i] < 1 || df_[i] > n_docs_) throw std::invalid_argument("vocabulary: df out of range");
    if (!index_.emplace(ngrams_[i], static_cast<std::uint32_t>(i)).second)
      throw std::invalid_argument("vocabulary: duplicate n-gram");
  }
}

std::ptrdiff_t Vocabulary::index_of(std::string_view ngram) const {
  const auto it = index_.find(std::string(ngram));
  return it == index_.end() ? -1 : static_cast<std::ptrdiff_t>(it->second);
}

double Vocabulary::idf(std::size_t index) const { return smooth_idf(df_.at(index), n_docs_); }

Vocabulary fit_vocabulary(const std::vector<std::string>& docs, NgramRange range,
                          std::uint32_t min_df) {
  range.validate();
  if (docs.empty()) throw std::invalid_argument("fit_vocabulary: empty corpus");
  if (min_df < 1) min_df = 1;

  // First pass: document frequencies and first-seen order.
  std::unordered_map<std::string, std::uint32_t> slot;
  std::vector<std::string> seen;
  std::vector<std::uint32_t> df;
  std::vector<std::uint32_t> last_doc;
  for (std::uint32_t d = 0; d < docs.size(); ++d) {
    for_each_ngram(docs[d], range, [&](std::string_view g) {
      auto [it, inserted] = slot.try_emplace(std::string(g), static_cast<std::uint32_t>(seen.size()));
      if (inserted) {
        seen.emplace_back(g);
        df.push_back(1);
        last_doc.push_back(d);
      } else if (last_doc[it->second] != d) {
        ++df[it->second];
        last_doc[it->second] = d;
      }
    });
  }

  std::vector<std::string> kept;
  std::vector<std::uint32_t> kept_df;
  for (std::size_t i = 0; i < seen.size(); ++i) {
    if (df[i] < min_df) continue;
    kept.push_back(std::move(seen[i]));
    kept_df.push_back(df[i]);
  }
  return Vocabulary(std::move(kept), std::move(kept_df), docs.size(), range, min_df);
}

SparseVector tfidf_transform(std::string_view doc, const Vocabulary& vocab) {
  std::unordered_map<std::uint32_t, double> counts;
  for_each_ngram(doc, vocab.range(), [&](std::string_view g) {
    if (const auto idx = vocab.index_of(g); idx >= 0) counts[static_cast<std::uint32_t>(idx)] += 1.0;
  });

  std::vector<std::pair<std::uint32_t, double>> entries(counts.begin(), counts.end());
  std::sort(entries.begin(), entries.end());
  double norm2 = 0.0;
  for (auto& [idx, w] : entries) {
    w *= vocab.idf(idx);
    norm2 += w * w;
  }

  SparseVector x(static_cast<Eigen::Index>(vocab.size()));
  x.reserve(static_cast<Eigen::Index>(entries.size()));
  const double inv_norm = norm2 > 0.0 ? 1.0 / std::sqrt(norm2) : 0.0;
  for (const auto& [idx, w] : entries) x.insertBack(idx) = w * inv_norm;
  return x;
}

std::vector<SparseVector> tfidf_transform(const std::vector<std::string>& docs,
                                          const Vocabulary& vocab) {
  std::vector<SparseVector> rows;
  rows.reserve(docs.size());
  for (const auto& d : docs) rows.push_back(tfidf_transform(d, vocab));
  return rows;
}

}  // namespace cmsent
