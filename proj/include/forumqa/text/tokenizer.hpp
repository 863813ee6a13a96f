#pragma once

#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace forumqa::text {

class StopwordList {
 public:
  StopwordList() = default;
  explicit StopwordList(std::set<std::string> words) : words_(std::move(words)) {}

  // One word per line; blank lines and lines starting with '#' are ignored.
  static StopwordList load(const std::string& path);
  static StopwordList parse(std::string_view contents);

  bool contains(std::string_view word) const { return words_.find(std::string(word)) != words_.end(); }
  const std::set<std::string>& words() const { return words_; }

 private:
  std::set<std::string> words_;
};

// Lowercased word tokens: maximal runs of non-space, non-punctuation code
// points. Pure-number tokens and pseudonymous author references
// ("u_" followed by 16 hex digits) are dropped; stopwords are kept.
std::vector<std::string> split_words(std::string_view text);

// split_words minus stopwords.
std::vector<std::string> tokenize(std::string_view text, const StopwordList& stopwords);

/// Tokenize + stem, the single analysis path shared by indexing, querying and
/// topic modelling.
class Analyzer {
 public:
  explicit Analyzer(StopwordList stopwords);

  std::vector<std::string> analyze(std::string_view text) const;
  std::vector<std::string> tokenize(std::string_view text) const { return text::tokenize(text, stopwords_); }
  std::string stem(std::string_view token) const;

  const StopwordList& stopwords() const { return stopwords_; }

  // Identifies the analysis configuration (tokenizer rules, stemmer, stopwords).
  const std::string& config_hash() const { return config_hash_; }

 private:
  StopwordList stopwords_;
  std::string config_hash_;
};

}  // namespace forumqa::text
