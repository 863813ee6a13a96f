#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "forumqa/qa/dataset.hpp"
#include "forumqa/reader/reader.hpp"
#include "forumqa/retrieval/bm25_index.hpp"

namespace forumqa::evaluation {

/// Lowercases, strips punctuation, drops the articles a/an/the and splits on
/// whitespace.
std::vector<std::string> normalize_answer(std::string_view text);

// 1 iff the normalized prediction equals some normalized gold. `golds` must be non-empty.
int exact_match(std::string_view prediction, const std::vector<std::string>& golds);

struct TokenScores {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  std::size_t best_gold = 0;  // index of the gold answer with the highest F1; first on ties
};

/// Token multiset overlap against each gold; the best F1 wins. Two empty token
/// lists count as a perfect match. `golds` must be non-empty.
TokenScores token_f1(std::string_view prediction, const std::vector<std::string>& golds);

struct QuestionRecord {
  std::string qid;
  std::string prediction;
  int em = 0;
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  double confidence = 0.0;
  std::string best_gold_matched;
  bool no_prediction = false;

  bool operator==(const QuestionRecord&) const = default;
};

nlohmann::json to_json(const QuestionRecord& r);

struct MetricReport {
  std::string model;
  std::vector<QuestionRecord> questions;
  // Means over `questions`.
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  double em = 0.0;
  double confidence = 0.0;
  double retriever_recall = 0.0;
  std::size_t no_prediction = 0;
  std::vector<std::string> skipped_qids;  // questions without gold answers
  nlohmann::json config = nlohmann::json::object();
  std::string split_hash;

  // Recomputes the means and the no-prediction count from `questions`.
  void aggregate();
  // Value of a column by its table name, e.g. "Precision" or "Confidence".
  double metric(std::string_view column) const;
};

// Table columns in rendering order; the first five follow the published layout.
const std::vector<std::string>& report_columns();

nlohmann::json to_json(const MetricReport& report);
MetricReport report_from_json(const nlohmann::json& j);
void save_report(const std::string& path, const MetricReport& report);
MetricReport load_report(const std::string& path);

// Fixed-width text table with one row per report.
std::string render_table(const std::vector<MetricReport>& reports);

struct EvalSettings {
  std::string model;  // defaults to the reader's name
  std::size_t retriever_k = 35;
  std::size_t reader_k = 10;
  std::size_t threads = 1;
  std::size_t retries = 2;  // extra attempts after a RetriableError
  nlohmann::json config = nlohmann::json::object();
};

/// Asks every answerable question of `dataset` through index + reader and
/// scores the top-1 prediction against all gold answers. Readers must tolerate
/// concurrent calls when threads > 1. The config snapshot always records
/// retriever_k, reader_k and the reader name.
MetricReport evaluate_dataset(const qa::QADataset& dataset, const retrieval::SparseIndex& index,
                              reader::Reader& reader, const EvalSettings& settings = {});

struct MetricChange {
  std::string metric;
  double a = 0.0;
  double b = 0.0;
  std::optional<double> percent;  // empty when a == 0

  // "+14.30%", "-3.00%", "+0.00%" or "undefined".
  std::string display() const;
};

struct Comparison {
  std::string model_a;
  std::string model_b;
  std::vector<MetricChange> rows;
};

/// Percent change 100 (b - a) / a for every report column, or only for
/// `metric` when given. Throws ValidationError when the reports were computed
/// on different splits and ParameterError for an unknown metric.
Comparison compare_runs(const MetricReport& a, const MetricReport& b, const std::string& metric = {});

nlohmann::json to_json(const Comparison& c);
std::string render_comparison(const Comparison& c);

}  // namespace forumqa::evaluation
