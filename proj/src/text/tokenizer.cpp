#include "forumqa/text/tokenizer.hpp"

#include <algorithm>
#include <cctype>

#include "forumqa/text/porter_stemmer.hpp"
#include "forumqa/util/fileio.hpp"
#include "forumqa/util/hash.hpp"
#include "forumqa/util/utf8.hpp"

namespace forumqa::text {

namespace {

constexpr std::string_view kAnalysisVersion = "tokenizer=v2;stemmer=porter-reference";

bool is_number(std::string_view token) {
  return !token.empty() && std::all_of(token.begin(), token.end(), [](char c) { return c >= '0' && c <= '9'; });
}

// Pseudonymous author references ("u_" + 16 hex digits) left by ingestion.
bool pseudonym_at(std::string_view text, std::size_t pos) {
  constexpr std::size_t kLength = 18;
  if (text.size() - pos < kLength || text[pos] != 'u' || text[pos + 1] != '_') return false;
  for (std::size_t i = pos + 2; i < pos + kLength; ++i)
    if (!std::isxdigit(static_cast<unsigned char>(text[i])) || std::isupper(static_cast<unsigned char>(text[i]))) return false;
  if (pos + kLength == text.size()) return true;
  std::size_t next = pos + kLength;
  const char32_t cp = utf8::decode(text, next);
  return utf8::is_space(cp) || utf8::is_punct(cp);
}

}  // namespace

StopwordList StopwordList::load(const std::string& path) { return parse(fileio::read_file(path)); }

StopwordList StopwordList::parse(std::string_view contents) {
  std::set<std::string> words;
  std::size_t start = 0;
  while (start <= contents.size()) {
    std::size_t nl = contents.find('\n', start);
    if (nl == std::string_view::npos) nl = contents.size();
    std::string_view line = contents.substr(start, nl - start);
    start = nl + 1;
    while (!line.empty() && (line.back() == '\r' || line.back() == ' ' || line.back() == '\t')) line.remove_suffix(1);
    while (!line.empty() && (line.front() == ' ' || line.front() == '\t')) line.remove_prefix(1);
    if (line.empty() || line.front() == '#') continue;
    for (auto& w : split_words(line)) words.insert(std::move(w));
  }
  return StopwordList(std::move(words));
}

std::vector<std::string> split_words(std::string_view text) {
  std::vector<std::string> tokens;
  std::string current;
  auto flush = [&] {
    if (!current.empty() && !is_number(current)) tokens.push_back(current);
    current.clear();
  };
  std::size_t pos = 0;
  while (pos < text.size()) {
    if (current.empty() && pseudonym_at(text, pos)) {
      pos += 18;
      continue;
    }
    const char32_t cp = utf8::decode(text, pos);
    if (utf8::is_space(cp) || utf8::is_punct(cp) || cp == 0xFFFD) {
      flush();
      continue;
    }
    if (cp >= 'A' && cp <= 'Z') {
      current.push_back(static_cast<char>(cp - 'A' + 'a'));
    } else {
      utf8::append(current, cp);
    }
  }
  flush();
  return tokens;
}

std::vector<std::string> tokenize(std::string_view text, const StopwordList& stopwords) {
  auto tokens = split_words(text);
  std::erase_if(tokens, [&](const std::string& t) { return stopwords.contains(t); });
  return tokens;
}

Analyzer::Analyzer(StopwordList stopwords) : stopwords_(std::move(stopwords)) {
  std::string fingerprint(kAnalysisVersion);
  fingerprint += ";stopwords=";
  for (const auto& w : stopwords_.words()) {
    fingerprint += w;
    fingerprint.push_back('\n');
  }
  config_hash_ = hash::sha256_hex(fingerprint);
}

std::string Analyzer::stem(std::string_view token) const {
  const bool ascii_alpha = std::all_of(token.begin(), token.end(), [](char c) { return c >= 'a' && c <= 'z'; });
  return ascii_alpha ? porter_stem(token) : std::string(token);
}

std::vector<std::string> Analyzer::analyze(std::string_view text) const {
  auto tokens = tokenize(text);
  for (auto& t : tokens) t = stem(t);
  return tokens;
}

}  // namespace forumqa::text
