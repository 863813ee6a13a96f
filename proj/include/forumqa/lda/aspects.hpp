#pragma once

#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "forumqa/lda/lda.hpp"
#include "forumqa/text/tokenizer.hpp"
#include "forumqa/text/vocabulary.hpp"

namespace forumqa::lda {

struct TopicAspects {
  Topic topic_id = 0;
  std::vector<std::string> aspects;  // ranked, display forms

  bool operator==(const TopicAspects&) const = default;
};

/// Surface statistics of the raw corpus: which surface words produced each
/// stem, and how often adjacent words occur together.
class SurfaceStats {
 public:
  static SurfaceStats collect(const std::vector<std::string>& texts, const text::Analyzer& analyzer);

  // Most frequent surface form of a stem, ties to the lexicographically
  // smallest; the stem itself when it was never observed.
  std::string display(const std::string& stem) const;

  // "first second" -> occurrences. Words are adjacent when no punctuation
  // other than an apostrophe separates them.
  const std::map<std::string, std::size_t>& bigrams() const { return bigrams_; }

  void add_surface(const std::string& stem, const std::string& surface, std::size_t count = 1);
  void add_bigram(const std::string& first, const std::string& second, std::size_t count = 1);

 private:
  std::map<std::string, std::map<std::string, std::size_t>> surfaces_;
  std::map<std::string, std::size_t> bigrams_;
};

struct AspectOptions {
  std::size_t per_topic = 9;
  std::size_t bigram_threshold = 25;
};

/// Ranks each topic's terms by phi and returns exactly `per_topic` aspects.
/// A bigram seen at least `bigram_threshold` times, with at least one
/// non-stopword member and every non-stopword member among the topic's top
/// 3 * per_topic terms, replaces its members at the best member's rank.
/// Throws ParameterError when per_topic is 0 or exceeds the vocabulary size.
std::vector<TopicAspects> extract_aspects(const TopicModel& model, const text::Vocabulary& vocab,
                                          const SurfaceStats& surfaces, const text::Analyzer& analyzer,
                                          const AspectOptions& options = {});

nlohmann::json aspects_to_json(const std::vector<TopicAspects>& aspects);
std::vector<TopicAspects> aspects_from_json(const nlohmann::json& j);

}  // namespace forumqa::lda
