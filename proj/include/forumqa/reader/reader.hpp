#pragma once

#include <chrono>
#include <memory>
#include <optional>
#include <semaphore>
#include <string>
#include <vector>

#include <json.hpp>

#include "forumqa/qa/dataset.hpp"
#include "forumqa/retrieval/bm25_index.hpp"
#include "forumqa/text/tokenizer.hpp"

namespace forumqa::reader {

struct AnswerPrediction {
  std::string text;
  double score = 0.0;  // in [0, 1]
  std::string paragraph_id;
  std::size_t char_start = 0;  // Unicode scalar values
  std::size_t char_end = 0;
  double retrieval_score = 0.0;

  bool operator==(const AnswerPrediction&) const = default;
};

nlohmann::json to_json(const AnswerPrediction& p);

struct Passage {
  std::string id;
  std::string text;
};

struct ReaderRequest {
  std::string question;
  std::vector<Passage> passages;
  std::size_t top_k = 10;
  std::string qid;  // set during evaluation; readers may ignore it
};

struct ReaderResult {
  std::vector<AnswerPrediction> predictions;  // score non-increasing, at most top_k
  std::vector<std::string> warnings;
};

class Reader {
 public:
  virtual ~Reader() = default;
  virtual ReaderResult answer(const ReaderRequest& request) = 0;
  virtual std::string name() const = 0;
};

// True when `context` sliced at [char_start, char_end) equals `text`.
bool offsets_sound(const AnswerPrediction& prediction, std::string_view context);

/// Lexical stand-in reader. Candidates are windows of 1..window_sentences
/// consecutive sentences scored by |Q ∩ S| / |Q| over analyzed terms.
/// Ranking: score, then fewer words, then paragraph_id, then char_start;
/// overlapping spans within a paragraph are skipped greedily. Candidates with
/// score 0 are never returned.
class BaselineReader : public Reader {
 public:
  explicit BaselineReader(text::Analyzer analyzer, std::size_t window_sentences = 2);
  ReaderResult answer(const ReaderRequest& request) override;
  std::string name() const override { return "baseline"; }

 private:
  text::Analyzer analyzer_;
  std::size_t window_;
};

/// Client for the remote reader wire protocol (POST {endpoint}/answer).
/// Responses are untrusted: answers whose offsets do not reproduce their text
/// or name an unknown context are dropped with a warning; scores are clamped
/// to [0, 1]. Throws RetriableError on timeouts and connection failures and
/// ProtocolError on non-200 statuses or malformed bodies.
class RemoteReader : public Reader {
 public:
  RemoteReader(std::string endpoint, std::chrono::milliseconds timeout = std::chrono::seconds(30),
               std::ptrdiff_t max_in_flight = 4);
  ReaderResult answer(const ReaderRequest& request) override;
  std::string name() const override { return "remote"; }

 private:
  std::string base_;
  std::string path_;
  std::chrono::milliseconds timeout_;
  std::counting_semaphore<1024> in_flight_;
};

/// Returns the first gold answer of the question named by `qid` whenever its
/// paragraph is among the passages. Upper bound for evaluation plumbing.
class OracleReader : public Reader {
 public:
  explicit OracleReader(qa::QADataset gold) : gold_(std::move(gold)) {}
  ReaderResult answer(const ReaderRequest& request) override;
  std::string name() const override { return "oracle"; }

 private:
  qa::QADataset gold_;
};

struct AskResult {
  retrieval::RetrievalResult retrieval;
  ReaderResult reader;
};

/// Retrieves the top retriever_k paragraphs, hands them to the reader and
/// returns its top reader_k predictions annotated with retrieval scores.
/// Offsets are re-validated here whatever the reader.
AskResult ask(const retrieval::SparseIndex& index, Reader& reader, const std::string& question,
              std::size_t retriever_k = 35, std::size_t reader_k = 10, const std::string& qid = {});

enum class ReaderKind { kBaseline, kRemote, kOracle };
ReaderKind parse_reader_kind(std::string_view name);

}  // namespace forumqa::reader
