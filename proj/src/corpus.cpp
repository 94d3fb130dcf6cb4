#include "cmsent/corpus.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <random>
#include <stdexcept>
#include <fstream>
#include <istream>
#include <ostream>
#include <unordered_set>

#include "cmsent/errors.hpp"
#include "cmsent/unicode.hpp"

namespace cmsent {

namespace {

std::string ascii_lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

bool is_blank(std::string_view line) {
  return line.find_first_not_of(" \t") == std::string_view::npos;
}

std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t')) ++i;
    const std::size_t start = i;
    while (i < line.size() && line[i] != ' ' && line[i] != '\t') ++i;
    if (i > start) fields.push_back(line.substr(start, i - start));
  }
  return fields;
}

// `<token>\t<tag>` or `<token><spaces><tag>`.
Token parse_token_line(std::string_view line, std::size_t line_no) {
  std::string_view text, tag;
  if (const auto tab = line.find('\t'); tab != std::string_view::npos) {
    text = line.substr(0, tab);
    tag = line.substr(tab + 1);
    if (tag.find('\t') != std::string_view::npos)
      throw ParseError("token line has more than two tab-separated fields", line_no);
  } else {
    const auto end = line.find_last_not_of(' ');
    const auto sep = line.find_last_of(' ', end);
    if (sep == std::string_view::npos) throw ParseError("token line has no language tag", line_no);
    tag = line.substr(sep + 1, end - sep);
    const auto text_end = line.find_last_not_of(' ', sep);
    text = text_end == std::string_view::npos ? std::string_view{} : line.substr(0, text_end + 1);
  }
  if (text.empty()) throw ParseError("empty token text", line_no);
  if (tag.empty()) throw ParseError("empty language tag", line_no);
  return Token{std::string(text), lang_from_raw(tag), std::string(tag)};
}

}  // namespace

std::string_view to_string(Sentiment s) {
  switch (s) {
    case Sentiment::Negative: return "negative";
    case Sentiment::Neutral: return "neutral";
    case Sentiment::Positive: return "positive";
  }
  return "negative";
}

std::optional<Sentiment> parse_sentiment(std::string_view s) {
  const std::string lower = ascii_lower(s);
  if (lower == "negative") return Sentiment::Negative;
  if (lower == "neutral") return Sentiment::Neutral;
  if (lower == "positive") return Sentiment::Positive;
  return std::nullopt;
}

LangTag lang_from_raw(std::string_view raw_tag) {
  const std::string lower = ascii_lower(raw_tag);
  if (lower == "eng" || lower == "lang1") return LangTag::Lang1;
  if (lower == "hin" || lower == "spa" || lower == "lang2") return LangTag::Lang2;
  return LangTag::Other;
}

std::string Tweet::text() const {
  std::string out;
  for (const auto& tok : tokens) {
    if (!out.empty()) out += ' ';
    out += tok.text;
  }
  return out;
}

std::vector<Tweet> parse_corpus(std::istream& in) {
  std::vector<Tweet> tweets;
  std::unordered_set<std::string> uids;
  std::string line;
  std::size_t line_no = 0, meta_line = 0;
  bool in_block = false;

  auto close_block = [&] {
    if (tweets.back().tokens.empty()) throw ParseError("empty token block", meta_line);
    in_block = false;
  };

  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();

    if (is_blank(line)) {
      if (in_block) close_block();
      continue;
    }
    if (in_block) {
      tweets.back().tokens.push_back(parse_token_line(line, line_no));
      continue;
    }

    const auto fields = split_fields(line);
    if (fields.empty() || ascii_lower(fields[0]) != "meta")
      throw ParseError("expected a meta line", line_no);
    if (fields.size() < 2 || fields.size() > 3) throw ParseError("malformed meta line", line_no);

    Tweet tweet;
    tweet.uid = std::string(fields[1]);
    if (fields.size() == 3) {
      tweet.sentiment = parse_sentiment(fields[2]);
      if (!tweet.sentiment)
        throw ParseError("unknown sentiment '" + std::string(fields[2]) + "'", line_no);
    }
    if (!uids.insert(tweet.uid).second)
      throw ParseError("duplicate uid '" + tweet.uid + "'", line_no);
    tweets.push_back(std::move(tweet));
    meta_line = line_no;
    in_block = true;
  }
  if (in_block) close_block();
  return tweets;
}

std::vector<Tweet> read_corpus_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open corpus file '" + path + "'");
  return parse_corpus(in);
}

void write_corpus(std::ostream& out, const std::vector<Tweet>& tweets) {
  for (const auto& t : tweets) {
    out << "meta\t" << t.uid;
    if (t.sentiment) out << '\t' << to_string(*t.sentiment);
    out << '\n';
    for (const auto& tok : t.tokens) {
      std::string_view tag = tok.raw_tag;
      if (tag.empty()) {
        tag = tok.lang == LangTag::Lang1 ? "Eng" : tok.lang == LangTag::Lang2 ? "lang2" : "O";
      }
      out << tok.text << '\t' << tag << '\n';
    }
    out << '\n';
  }
}

CorpusStats corpus_stats(const std::vector<Tweet>& tweets) {
  if (tweets.empty()) throw std::invalid_argument("corpus_stats: empty corpus");

  CorpusStats st;
  st.n_tweets = tweets.size();
  std::unordered_set<std::string> vocab1, vocab2;
  for (const auto& t : tweets) {
    if (t.sentiment)
      ++st.label_counts[index_of(*t.sentiment)];
    else
      ++st.n_unlabeled;
    for (const auto& tok : t.tokens) {
      switch (tok.lang) {
        case LangTag::Lang1:
          ++st.lang1_tokens;
          vocab1.insert(unicode::to_lower(tok.text));
          break;
        case LangTag::Lang2:
          ++st.lang2_tokens;
          vocab2.insert(unicode::to_lower(tok.text));
          break;
        case LangTag::Other:
          ++st.other_tokens;
          break;
      }
    }
  }

  const std::size_t tagged = st.lang1_tokens + st.lang2_tokens;
  if (tagged > 0) {
    st.lang1_pct = 100.0 * static_cast<double>(st.lang1_tokens) / static_cast<double>(tagged);
    st.lang2_pct = 100.0 - st.lang1_pct;
  }
  st.vocab1_size = vocab1.size();
  st.vocab2_size = vocab2.size();
  const auto& smaller = vocab1.size() <= vocab2.size() ? vocab1 : vocab2;
  const auto& larger = vocab1.size() <= vocab2.size() ? vocab2 : vocab1;
  st.overlap_size = static_cast<std::size_t>(
      std::count_if(smaller.begin(), smaller.end(), [&](const auto& w) { return larger.contains(w); }));
  const std::size_t union_size = st.vocab1_size + st.vocab2_size - st.overlap_size;
  if (union_size > 0)
    st.overlap_pct = 100.0 * static_cast<double>(st.overlap_size) / static_cast<double>(union_size);
  return st;
}

CorpusSplit stratified_split(const std::vector<Tweet>& tweets, double dev_fraction,
                             std::uint64_t seed) {
  if (!(dev_fraction > 0.0 && dev_fraction < 1.0))
    throw std::invalid_argument("dev fraction must lie strictly between 0 and 1");

  std::array<std::vector<std::size_t>, kNumClasses> by_class;
  for (std::size_t i = 0; i < tweets.size(); ++i) {
    if (!tweets[i].sentiment)
      throw std::invalid_argument("tweet '" + tweets[i].uid + "' has no sentiment label");
    by_class[index_of(*tweets[i].sentiment)].push_back(i);
  }

  std::mt19937_64 rng(seed);
  std::vector<bool> to_dev(tweets.size(), false);
  for (Sentiment s : kAllSentiments) {
    auto& idx = by_class[index_of(s)];
    std::shuffle(idx.begin(), idx.end(), rng);
    const auto n_dev = static_cast<std::size_t>(std::lround(dev_fraction * static_cast<double>(idx.size())));
    if (n_dev == 0 || n_dev >= idx.size())
      throw std::invalid_argument("split leaves class '" + std::string(to_string(s)) +
                                  "' missing from the " + (n_dev == 0 ? "dev" : "train") + " side");
    for (std::size_t k = 0; k < n_dev; ++k) to_dev[idx[k]] = true;
  }

  CorpusSplit split;
  for (std::size_t i = 0; i < tweets.size(); ++i)
    (to_dev[i] ? split.dev : split.train).push_back(tweets[i]);
  return split;
}

}  // namespace cmsent
