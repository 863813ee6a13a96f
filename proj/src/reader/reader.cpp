#include "forumqa/reader/reader.hpp"

#include <algorithm>
#include <map>
#include <set>

#include "forumqa/error.hpp"
#include "forumqa/ingest/cleaning.hpp"
#include "forumqa/util/utf8.hpp"

namespace forumqa::reader {

nlohmann::json to_json(const AnswerPrediction& p) {
  return {{"text", p.text},
          {"score", p.score},
          {"paragraph_id", p.paragraph_id},
          {"char_start", p.char_start},
          {"char_end", p.char_end},
          {"retrieval_score", p.retrieval_score}};
}

bool offsets_sound(const AnswerPrediction& prediction, std::string_view context) {
  if (prediction.char_start >= prediction.char_end) return false;
  const auto slice = utf8::substr(context, prediction.char_start, prediction.char_end);
  return slice && *slice == prediction.text;
}

BaselineReader::BaselineReader(text::Analyzer analyzer, std::size_t window_sentences)
    : analyzer_(std::move(analyzer)), window_(window_sentences) {
  if (window_ == 0) throw ParameterError("window_sentences must be at least 1");
}

ReaderResult BaselineReader::answer(const ReaderRequest& request) {
  if (request.top_k == 0) throw ParameterError("top_k must be at least 1");
  ReaderResult result;
  const auto q = analyzer_.analyze(request.question);
  const std::set<std::string> question(q.begin(), q.end());
  if (question.empty()) return result;

  struct Candidate {
    AnswerPrediction prediction;
    std::size_t words;
  };
  std::vector<Candidate> candidates;
  for (const auto& passage : request.passages) {
    const auto sentences = ingest::sentence_spans(passage.text);
    for (std::size_t i = 0; i < sentences.size(); ++i) {
      for (std::size_t w = 1; w <= window_ && i + w <= sentences.size(); ++w) {
        const std::size_t begin = sentences[i].begin;
        const std::size_t end = sentences[i + w - 1].end;
        const std::string_view span = std::string_view(passage.text).substr(begin, end - begin);
        const auto terms = analyzer_.analyze(span);
        std::size_t shared = 0;
        for (const auto& t : std::set<std::string>(terms.begin(), terms.end())) shared += question.count(t);
        if (shared == 0) continue;
        AnswerPrediction p;
        p.text = std::string(span);
        p.score = static_cast<double>(shared) / static_cast<double>(question.size());
        p.paragraph_id = passage.id;
        p.char_start = utf8::char_index(passage.text, begin);
        p.char_end = p.char_start + utf8::length(span);
        candidates.push_back({std::move(p), ingest::word_count(span)});
      }
    }
  }
  std::sort(candidates.begin(), candidates.end(), [](const Candidate& a, const Candidate& b) {
    if (a.prediction.score != b.prediction.score) return a.prediction.score > b.prediction.score;
    if (a.words != b.words) return a.words < b.words;
    if (a.prediction.paragraph_id != b.prediction.paragraph_id) return a.prediction.paragraph_id < b.prediction.paragraph_id;
    return a.prediction.char_start < b.prediction.char_start;
  });
  for (const auto& c : candidates) {
    if (result.predictions.size() == request.top_k) break;
    const bool overlaps = std::any_of(result.predictions.begin(), result.predictions.end(), [&](const AnswerPrediction& p) {
      return p.paragraph_id == c.prediction.paragraph_id && p.char_start < c.prediction.char_end &&
             c.prediction.char_start < p.char_end;
    });
    if (!overlaps) result.predictions.push_back(c.prediction);
  }
  return result;
}

ReaderResult OracleReader::answer(const ReaderRequest& request) {
  ReaderResult result;
  const auto [paragraph, item] = gold_.find_question(request.qid);
  if (!item) {
    result.warnings.push_back("oracle has no gold entry for '" + request.qid + "'");
    return result;
  }
  for (const auto& passage : request.passages) {
    if (passage.id != paragraph->paragraph_id || item->answers.empty()) continue;
    const auto& gold = item->answers.front();
    result.predictions.push_back(
        {gold.text, 1.0, passage.id, gold.answer_start, gold.answer_start + utf8::length(gold.text), 0.0});
    break;
  }
  return result;
}

AskResult ask(const retrieval::SparseIndex& index, Reader& reader, const std::string& question, std::size_t retriever_k,
              std::size_t reader_k, const std::string& qid) {
  if (reader_k == 0) throw ParameterError("reader_k must be at least 1");
  AskResult out;
  out.retrieval = index.retrieve(question, retriever_k);
  if (out.retrieval.hits.empty()) {
    if (out.retrieval.empty_query) out.reader.warnings.push_back("question has no searchable terms");
    return out;
  }
  ReaderRequest request;
  request.question = question;
  request.top_k = reader_k;
  request.qid = qid;
  std::map<std::string, double> retrieval_scores;
  for (const auto& hit : out.retrieval.hits) {
    request.passages.push_back({hit.paragraph_id, index.paragraph(hit.paragraph_id)->context});
    retrieval_scores[hit.paragraph_id] = hit.score;
  }
  auto answered = reader.answer(request);
  out.reader.warnings = std::move(answered.warnings);
  for (auto& p : answered.predictions) {
    const auto it = retrieval_scores.find(p.paragraph_id);
    if (it == retrieval_scores.end() || !offsets_sound(p, index.paragraph(p.paragraph_id)->context)) {
      out.reader.warnings.push_back("dropped answer with unsound offsets in '" + p.paragraph_id + "'");
      continue;
    }
    p.score = std::clamp(p.score, 0.0, 1.0);
    p.retrieval_score = it->second;
    out.reader.predictions.push_back(std::move(p));
  }
  std::stable_sort(out.reader.predictions.begin(), out.reader.predictions.end(),
                   [](const AnswerPrediction& a, const AnswerPrediction& b) { return a.score > b.score; });
  if (out.reader.predictions.size() > reader_k) out.reader.predictions.resize(reader_k);
  return out;
}

ReaderKind parse_reader_kind(std::string_view name) {
  if (name == "baseline") return ReaderKind::kBaseline;
  if (name == "remote") return ReaderKind::kRemote;
  if (name == "oracle") return ReaderKind::kOracle;
  throw ParameterError("unknown reader '" + std::string(name) + "' (expected baseline, remote or oracle)");
}

}  // namespace forumqa::reader
