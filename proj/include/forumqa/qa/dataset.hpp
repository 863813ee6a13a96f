#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "forumqa/segment/segmenter.hpp"

namespace forumqa::qa {

using segment::Topic;

struct QAAnswer {
  std::string answer_id;  // "{qid}@{start}-{end}"
  std::string text;
  std::size_t answer_start = 0;  // in Unicode scalar values

  bool operator==(const QAAnswer&) const = default;
};

struct QAItem {
  std::string qid;
  std::string question;
  std::string aspect;
  std::string question_type;
  bool needs_review = false;
  std::vector<QAAnswer> answers;

  bool operator==(const QAItem&) const = default;
};

struct QAParagraph {
  std::string paragraph_id;
  Topic topic_id = 0;
  std::string context;
  std::vector<QAItem> qas;

  bool operator==(const QAParagraph&) const = default;
};

struct QAArticle {
  std::string title;
  std::vector<QAParagraph> paragraphs;

  bool operator==(const QAArticle&) const = default;
};

/// SQuAD v1.1 shaped dataset; one article per topic.
struct QADataset {
  std::string version = "1.1";
  std::vector<QAArticle> data;

  bool operator==(const QADataset&) const = default;

  QAParagraph* find_paragraph(const std::string& paragraph_id);
  const QAParagraph* find_paragraph(const std::string& paragraph_id) const;
  // Returns the owning paragraph too.
  std::pair<QAParagraph*, QAItem*> find_question(const std::string& qid);
  std::pair<const QAParagraph*, const QAItem*> find_question(const std::string& qid) const;

  std::size_t question_count() const;
  std::size_t answer_count() const;
  std::vector<std::string> qids() const;
};

// Empty dataset holding every paragraph as a context, grouped by topic.
QADataset dataset_from_paragraphs(const std::vector<segment::TopicParagraph>& paragraphs);

nlohmann::json to_json(const QADataset& dataset);
// Throws ValidationError on structural problems; offset problems are left to validate().
QADataset dataset_from_json(const nlohmann::json& j);
void save_dataset(const std::string& path, const QADataset& dataset);
QADataset load_dataset(const std::string& path);

std::string answer_id(const std::string& qid, std::size_t start, std::size_t end);

/// Appends a question to a paragraph under the next free qid
/// "{paragraph_id}-q{n}" and returns the qid. Throws NotFoundError for an
/// unknown paragraph and ValidationError for an empty question.
std::string add_question(QADataset& dataset, const std::string& paragraph_id, QAItem item);

/// Adds the context span [start, end) (character offsets) as an answer and
/// returns its answer id. Throws NotFoundError for an unknown qid and
/// ValidationError for an inverted, empty, out-of-bounds, whitespace-only or
/// duplicate span.
std::string add_answer(QADataset& dataset, const std::string& qid, std::size_t start, std::size_t end);

// Throws NotFoundError when no answer has this id.
void remove_answer(QADataset& dataset, const std::string& answer_id);

struct Violation {
  std::string qid;  // empty for dataset-level problems
  std::string reason;

  bool operator==(const Violation&) const = default;
};

using AspectSets = std::map<Topic, std::set<std::string>>;

/// Every violated invariant: answer offsets, qid uniqueness, at least one
/// answer, non-empty question, aspect membership (when `aspects` is given),
/// and question types not exceeding topics. Never throws.
std::vector<Violation> validate(const QADataset& dataset, const AspectSets* aspects = nullptr);

struct DatasetStats {
  std::size_t posts = 0;
  std::size_t max_seq_words = 0;
  std::size_t topic_paragraphs = 0;  // distinct topics
  std::size_t contexts = 0;          // bounded-length contexts
  std::size_t question_types = 0;
  std::size_t questions = 0;
  std::size_t qa_pairs = 0;

  nlohmann::json to_json() const;
  std::string to_table() const;
};

// Counts over all contexts; `posts` is passed through from the corpus.
// Questions without a type count by their text.
DatasetStats dataset_stats(const QADataset& dataset, std::size_t posts = 0);

struct SplitResult {
  QADataset train;
  QADataset eval;
  std::vector<std::string> warnings;
};

/// Whole-question split stratified by topic. The overall train size is
/// round(N * train_fraction); each topic with n >= 2 questions keeps between
/// 1 and n - 1 of them in train, remainders going to the largest fractional
/// parts. A topic with a single question goes to train with a warning.
/// Paragraphs without questions are dropped from both sides.
SplitResult split_train_eval(const QADataset& dataset, double train_fraction, std::uint64_t seed);

// Fingerprint of the question set, used to check that reports are comparable.
std::string split_hash(const QADataset& dataset);

}  // namespace forumqa::qa
