#pragma once

#include <cstdint>
#include <string>
#include <unordered_map>
#include <vector>

#include <json.hpp>

#include "forumqa/qa/dataset.hpp"
#include "forumqa/segment/segmenter.hpp"
#include "forumqa/text/tokenizer.hpp"

namespace forumqa::retrieval {

struct Bm25Params {
  double k1 = 1.5;
  double b = 0.75;
};

struct ScoredParagraph {
  std::string paragraph_id;
  double score = 0.0;

  bool operator==(const ScoredParagraph&) const = default;
};

struct RetrievalResult {
  std::vector<ScoredParagraph> hits;  // score descending, then paragraph_id ascending
  std::size_t k = 0;
  bool empty_query = false;
};

struct Posting {
  std::uint32_t doc;  // index into paragraphs, which are sorted by paragraph_id
  std::uint32_t tf;
};

/// BM25 index over topic paragraphs, immutable after build. Queries go
/// through the same Analyzer as the paragraphs.
class SparseIndex {
 public:
  static SparseIndex build(std::vector<segment::TopicParagraph> paragraphs, const text::Analyzer& analyzer,
                           Bm25Params params = {});

  /// Top-k paragraphs for the query. Paragraphs sharing no term with the
  /// query score 0 and rank after all others. An empty query after analysis
  /// yields no hits and sets `empty_query`. Throws ParameterError for k = 0.
  RetrievalResult retrieve(std::string_view query, std::size_t k) const;

  // BM25 of one paragraph against already-analyzed query terms; each distinct
  // term counts once.
  double score(const std::vector<std::string>& query_terms, std::size_t doc) const;

  std::size_t size() const { return paragraphs_.size(); }
  double average_length() const { return avg_length_; }
  const std::vector<std::uint32_t>& lengths() const { return lengths_; }
  const std::vector<segment::TopicParagraph>& paragraphs() const { return paragraphs_; }
  const segment::TopicParagraph* paragraph(const std::string& paragraph_id) const;
  const std::vector<Posting>* postings(const std::string& term) const;
  const std::vector<std::string>& warnings() const { return warnings_; }
  const text::Analyzer& analyzer() const { return analyzer_; }
  const Bm25Params& params() const { return params_; }

  nlohmann::json to_json() const;
  // Throws ValidationError when the index was built with a different analysis
  // configuration than `analyzer`.
  static SparseIndex from_json(const nlohmann::json& j, const text::Analyzer& analyzer);
  void save(const std::string& path) const;
  static SparseIndex load(const std::string& path, const text::Analyzer& analyzer);

 private:
  explicit SparseIndex(const text::Analyzer& analyzer) : analyzer_(analyzer) {}
  void finish();

  text::Analyzer analyzer_;
  Bm25Params params_;
  std::vector<segment::TopicParagraph> paragraphs_;
  std::vector<std::uint32_t> lengths_;
  double avg_length_ = 0.0;
  std::vector<std::string> terms_;  // sorted
  std::vector<std::vector<Posting>> postings_;
  std::unordered_map<std::string, std::size_t> term_index_;
  std::unordered_map<std::string, std::size_t> paragraph_index_;
  std::vector<std::string> warnings_;
};

struct RecallReport {
  double recall = 0.0;
  std::size_t questions = 0;
  std::size_t hits = 0;
  std::vector<std::string> missed_qids;
  std::vector<std::string> unindexed_qids;  // gold paragraph absent from the index; counted as misses
};

/// Fraction of questions whose gold paragraph is among the top-k retrieved.
/// Throws ParameterError for k = 0. An empty dataset has recall 0.
RecallReport retriever_recall(const SparseIndex& index, const qa::QADataset& dataset, std::size_t k);

}  // namespace forumqa::retrieval
