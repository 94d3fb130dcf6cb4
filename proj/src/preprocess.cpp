#include "cmsent/preprocess.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <sstream>

#include "cmsent/errors.hpp"
#include "cmsent/unicode.hpp"

namespace cmsent {

namespace detail {
extern const std::string_view kBuiltinDictionary;
}

namespace {

// Matched case-insensitively, longest first.
constexpr std::array<std::u32string_view, 31> kEmoticons = {
    U":'-(", U":'(", U":-)", U":-(", U":-d", U":-p", U":-o", U":-/", U":-|", U":-*",
    U";-)", U"</3", U"^_^", U"-_-", U":)", U":(", U":d", U":p", U":o", U":/",
    U":|", U":*", U":3", U";)", U";p", U";d", U"<3", U"=)", U"=(", U"=d", U"=p"};

char32_t ascii_fold(char32_t c) { return (c >= U'A' && c <= U'Z') ? c + 32 : c; }

bool starts_with_ci(std::u32string_view s, std::size_t pos, std::u32string_view prefix) {
  if (s.size() - pos < prefix.size()) return false;
  for (std::size_t k = 0; k < prefix.size(); ++k)
    if (ascii_fold(s[pos + k]) != prefix[k]) return false;
  return true;
}

bool url_at(std::u32string_view s, std::size_t pos) {
  return starts_with_ci(s, pos, U"http://") || starts_with_ci(s, pos, U"https://") ||
         starts_with_ci(s, pos, U"www.");
}

std::size_t emoticon_at(std::u32string_view s, std::size_t pos) {
  std::size_t best = 0;
  for (auto emo : kEmoticons) {
    if (emo.size() <= best || !starts_with_ci(s, pos, emo)) continue;
    const std::size_t end = pos + emo.size();
    // ":D" must not swallow the start of ":Dude".
    if (unicode::is_word(emo.back()) && end < s.size() && unicode::is_word(s[end])) continue;
    best = emo.size();
  }
  return best;
}

void tokenize_chunk(std::u32string_view chunk, std::vector<std::string>& out) {
  const std::size_t n = chunk.size();
  std::size_t i = 0;
  while (i < n) {
    const char32_t c = chunk[i];
    std::size_t j = i + 1;
    if (url_at(chunk, i)) {
      j = n;
    } else if ((c == U'@' || c == U'#') && j < n && unicode::is_word(chunk[j])) {
      while (j < n && unicode::is_word(chunk[j])) ++j;
    } else if (const std::size_t len = emoticon_at(chunk, i); len > 0) {
      j = i + len;
    } else if (unicode::is_word(c)) {
      while (j < n && unicode::is_word(chunk[j])) ++j;
    } else {
      while (j < n && unicode::is_mark(chunk[j])) ++j;
    }
    out.push_back(unicode::encode(chunk.substr(i, j - i)));
    i = j;
  }
}

std::uint64_t parse_count(std::string_view s, std::size_t line_no) {
  std::uint64_t value = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (ec != std::errc() || ptr != s.data() + s.size() || value == 0)
    throw ParseError("dictionary count must be a positive integer", line_no);
  return value;
}

}  // namespace

// --- SegmentDictionary ---

SegmentDictionary SegmentDictionary::parse(std::istream& in) {
  SegmentDictionary dict;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    std::istringstream fields(line);
    std::string word, count, extra;
    if (!(fields >> word) || word.front() == '#') continue;
    if (!(fields >> count) || (fields >> extra))
      throw ParseError("dictionary lines must be 'word count'", line_no);
    dict.add(word, parse_count(count, line_no));
  }
  return dict;
}

SegmentDictionary SegmentDictionary::load(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open dictionary '" + path + "'");
  return parse(in);
}

const SegmentDictionary& SegmentDictionary::builtin() {
  static const SegmentDictionary dict = [] {
    std::istringstream in{std::string(detail::kBuiltinDictionary)};
    return parse(in);
  }();
  return dict;
}

void SegmentDictionary::add(std::string_view word, std::uint64_t count) {
  std::u32string key = unicode::decode(unicode::to_lower(word));
  if (key.empty() || count == 0) throw std::invalid_argument("dictionary entries need a word and a positive count");
  max_len_ = std::max(max_len_, key.size());
  counts_[std::move(key)] += count;
}

std::uint64_t SegmentDictionary::frequency(std::u32string_view word) const {
  if (word.size() > max_len_) return 0;
  const auto it = counts_.find(std::u32string(word));
  return it == counts_.end() ? 0 : it->second;
}

std::map<std::string, std::uint64_t> SegmentDictionary::entries() const {
  std::map<std::string, std::uint64_t> out;
  for (const auto& [word, count] : counts_) out.emplace(unicode::encode(word), count);
  return out;
}

// --- pipeline steps ---

std::vector<std::string> tokenize(std::string_view text) {
  const std::u32string s = unicode::decode(text);
  std::vector<std::string> out;
  std::size_t i = 0;
  while (i < s.size()) {
    while (i < s.size() && unicode::is_space(s[i])) ++i;
    const std::size_t start = i;
    while (i < s.size() && !unicode::is_space(s[i])) ++i;
    if (i > start) tokenize_chunk(std::u32string_view(s).substr(start, i - start), out);
  }
  return out;
}

bool is_url(std::string_view token) { return url_at(unicode::decode(token), 0); }

std::vector<std::string> remove_urls(std::vector<std::string> tokens) {
  std::erase_if(tokens, [](const std::string& t) { return is_url(t); });
  return tokens;
}

std::vector<std::string> segment_hashtag(std::string_view tag, const SegmentDictionary& dict,
                                         double oov_penalty) {
  if (!tag.empty() && tag.front() == '#') tag.remove_prefix(1);
  const std::u32string body = unicode::decode(unicode::to_lower(tag));
  const std::size_t n = body.size();
  if (n == 0) return {};

  // best[i] describes the best segmentation of body[i..n).
  struct Cell {
    double score = 0.0;
    std::size_t words = 0;
    std::size_t first_len = 0;
  };
  constexpr double kTieEps = 1e-9;
  std::vector<Cell> best(n + 1);
  const std::u32string_view view(body);

  for (std::size_t i = n; i-- > 0;) {
    Cell cur;
    bool have = false;
    for (std::size_t len = 1; len <= n - i; ++len) {
      const std::uint64_t freq = dict.frequency(view.substr(i, len));
      const double piece = freq > 0 ? std::log(static_cast<double>(freq))
                                    : -oov_penalty * static_cast<double>(len);
      const Cell cand{piece + best[i + len].score, 1 + best[i + len].words, len};
      bool better = !have;
      if (have) {
        if (cand.score > cur.score + kTieEps) better = true;
        else if (cand.score >= cur.score - kTieEps)
          better = cand.words < cur.words || (cand.words == cur.words && cand.first_len > cur.first_len);
      }
      if (better) {
        cur = cand;
        have = true;
      }
    }
    best[i] = cur;
  }

  std::vector<std::string> pieces;
  for (std::size_t i = 0; i < n; i += best[i].first_len)
    pieces.push_back(unicode::encode(view.substr(i, best[i].first_len)));
  return pieces;
}

std::string preprocess(std::string_view text, const PreprocessConfig& cfg,
                       const SegmentDictionary& dict) {
  std::vector<std::string> tokens = tokenize(text);
  if (cfg.remove_urls) tokens = remove_urls(std::move(tokens));
  if (cfg.segment_hashtags) {
    std::vector<std::string> expanded;
    expanded.reserve(tokens.size());
    for (auto& tok : tokens) {
      if (tok.size() > 1 && tok.front() == '#') {
        for (auto& piece : segment_hashtag(tok, dict, cfg.oov_penalty))
          expanded.push_back(std::move(piece));
      } else {
        expanded.push_back(std::move(tok));
      }
    }
    tokens = std::move(expanded);
  }

  std::string out;
  for (const auto& tok : tokens) {
    if (!out.empty()) out += ' ';
    out += cfg.lowercase ? unicode::to_lower(tok) : tok;
  }
  return out;
}

}  // namespace cmsent
