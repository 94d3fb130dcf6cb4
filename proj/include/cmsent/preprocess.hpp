#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace cmsent {

// Unigram counts for hashtag segmentation. Keys are stored lowercased.
class SegmentDictionary {
 public:
  SegmentDictionary() = default;

  // Lines of `word count`. Blank lines and lines starting with '#' are skipped.
  static SegmentDictionary parse(std::istream& in);
  static SegmentDictionary load(const std::string& path);
  // The small English list bundled with the library.
  static const SegmentDictionary& builtin();

  // Adds to an existing count when the word is already present.
  void add(std::string_view word, std::uint64_t count);

  // 0 when absent.
  std::uint64_t frequency(std::u32string_view word) const;
  std::size_t size() const { return counts_.size(); }
  bool empty() const { return counts_.empty(); }
  std::size_t max_word_length() const { return max_len_; }

  // Entries in sorted order; used for serialization.
  std::map<std::string, std::uint64_t> entries() const;

  bool operator==(const SegmentDictionary& other) const { return counts_ == other.counts_; }

 private:
  std::unordered_map<std::u32string, std::uint64_t> counts_;
  std::size_t max_len_ = 0;
};

inline constexpr double kDefaultOovPenalty = 5.0;

struct PreprocessConfig {
  bool segment_hashtags = true;
  bool remove_urls = true;
  bool lowercase = true;
  // Log-space cost per character of a span not found in the dictionary.
  double oov_penalty = kDefaultOovPenalty;
  std::string dictionary_path;  // empty: built-in dictionary

  static PreprocessConfig disabled() { return {false, false, false, kDefaultOovPenalty, {}}; }
};

// Tweet-aware tokenizer. URLs, @mentions, #hashtags and emoticons survive as
// single tokens; everything else splits on whitespace and punctuation.
std::vector<std::string> tokenize(std::string_view text);

bool is_url(std::string_view token);
std::vector<std::string> remove_urls(std::vector<std::string> tokens);

// Strips the leading '#' and splits the lowercased body into the segmentation
// with the highest total score, where a dictionary word scores ln(count) and
// any other span scores -oov_penalty per character. Ties prefer fewer pieces,
// then a longer first piece (and so on left to right).
std::vector<std::string> segment_hashtag(std::string_view tag, const SegmentDictionary& dict,
                                         double oov_penalty = kDefaultOovPenalty);

std::string preprocess(std::string_view text, const PreprocessConfig& cfg,
                       const SegmentDictionary& dict);

}  // namespace cmsent
