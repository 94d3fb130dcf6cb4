#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include <Eigen/SparseCore>

namespace cmsent {

template <typename Scalar>
using SparseVec = Eigen::SparseVector<Scalar>;

// One TF-IDF row: sorted unique indices, non-zero weights.
using SparseVector = SparseVec<double>;

struct NgramRange {
  int min_n = 2;
  int max_n = 6;

  // Throws std::invalid_argument unless 1 <= min_n <= max_n <= 10.
  void validate() const;
  bool operator==(const NgramRange&) const = default;
};

// All contiguous substrings with length in [min_n, max_n], measured in Unicode
// scalar values. Spaces count as characters. Ordered by start position, then
// by length.
std::vector<std::string> extract_char_ngrams(std::string_view text, NgramRange range);

class Vocabulary {
 public:
  Vocabulary() = default;
  // Rebuilds a fitted vocabulary from its serialized parts.
  Vocabulary(std::vector<std::string> ngrams, std::vector<std::uint32_t> df, std::size_t n_docs,
             NgramRange range, std::uint32_t min_df);

  std::size_t size() const { return ngrams_.size(); }
  std::size_t n_docs() const { return n_docs_; }
  NgramRange range() const { return range_; }
  std::uint32_t min_df() const { return min_df_; }

  const std::vector<std::string>& ngrams() const { return ngrams_; }
  const std::vector<std::uint32_t>& df() const { return df_; }

  // -1 when absent.
  std::ptrdiff_t index_of(std::string_view ngram) const;
  double idf(std::size_t index) const;

  bool operator==(const Vocabulary& other) const {
    return ngrams_ == other.ngrams_ && df_ == other.df_ && n_docs_ == other.n_docs_ &&
           range_ == other.range_ && min_df_ == other.min_df_;
  }

 private:
  std::vector<std::string> ngrams_;
  std::vector<std::uint32_t> df_;
  std::unordered_map<std::string, std::uint32_t> index_;
  std::size_t n_docs_ = 0;
  NgramRange range_;
  std::uint32_t min_df_ = 1;
};

// Smoothed inverse document frequency: ln((1 + n_docs) / (1 + df)) + 1.
double smooth_idf(std::size_t df, std::size_t n_docs);

// Keeps n-grams whose document frequency is at least min_df. Indices follow
// the order in which surviving n-grams are first seen while scanning the
// documents in order.
Vocabulary fit_vocabulary(const std::vector<std::string>& docs, NgramRange range,
                          std::uint32_t min_df = 1);

// Raw-count TF times smoothed IDF, L2-normalized. Unknown n-grams are ignored;
// a document with no known n-gram yields an empty vector.
SparseVector tfidf_transform(std::string_view doc, const Vocabulary& vocab);

std::vector<SparseVector> tfidf_transform(const std::vector<std::string>& docs,
                                          const Vocabulary& vocab);

}  // namespace cmsent
