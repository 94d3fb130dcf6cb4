#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace cmsent {

// Order is fixed: it is the row/column order of confusion matrices and the
// tie-break order of prediction.
enum class Sentiment { Negative = 0, Neutral = 1, Positive = 2 };

inline constexpr std::size_t kNumClasses = 3;
inline constexpr std::array<Sentiment, kNumClasses> kAllSentiments = {
    Sentiment::Negative, Sentiment::Neutral, Sentiment::Positive};

constexpr std::size_t index_of(Sentiment s) { return static_cast<std::size_t>(s); }

std::string_view to_string(Sentiment s);
// Case-insensitive; std::nullopt for anything but negative/neutral/positive.
std::optional<Sentiment> parse_sentiment(std::string_view s);

// Lang1 is English; Lang2 is Hindi or Spanish.
enum class LangTag { Lang1, Lang2, Other };

LangTag lang_from_raw(std::string_view raw_tag);

struct Token {
  std::string text;
  LangTag lang = LangTag::Other;
  std::string raw_tag;  // kept verbatim so a corpus can be written back out

  bool operator==(const Token&) const = default;
};

struct Tweet {
  std::string uid;
  std::optional<Sentiment> sentiment;
  std::vector<Token> tokens;

  // Token texts joined with single spaces.
  std::string text() const;

  bool operator==(const Tweet&) const = default;
};

std::vector<Tweet> parse_corpus(std::istream& in);
std::vector<Tweet> read_corpus_file(const std::string& path);
void write_corpus(std::ostream& out, const std::vector<Tweet>& tweets);

struct CorpusStats {
  std::size_t n_tweets = 0;
  std::size_t n_unlabeled = 0;
  std::array<std::size_t, kNumClasses> label_counts{};
  std::size_t lang1_tokens = 0;
  std::size_t lang2_tokens = 0;
  std::size_t other_tokens = 0;
  double lang1_pct = 0.0;
  double lang2_pct = 0.0;
  std::size_t vocab1_size = 0;
  std::size_t vocab2_size = 0;
  std::size_t overlap_size = 0;
  double overlap_pct = 0.0;  // Jaccard, in percent
};

CorpusStats corpus_stats(const std::vector<Tweet>& tweets);

struct CorpusSplit {
  std::vector<Tweet> train;
  std::vector<Tweet> dev;
};

// Per sentiment, a seeded shuffle picks round(dev_fraction * count) tweets for
// the dev side. Both sides keep corpus order. Throws std::invalid_argument
// naming the class when a class would be missing from either side.
CorpusSplit stratified_split(const std::vector<Tweet>& tweets, double dev_fraction,
                             std::uint64_t seed);

}  // namespace cmsent
