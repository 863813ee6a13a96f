#include "forumqa/retrieval/bm25_index.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

#include "forumqa/error.hpp"
#include "forumqa/util/fileio.hpp"

namespace forumqa::retrieval {

SparseIndex SparseIndex::build(std::vector<segment::TopicParagraph> paragraphs, const text::Analyzer& analyzer,
                               Bm25Params params) {
  SparseIndex index(analyzer);
  index.params_ = params;
  std::sort(paragraphs.begin(), paragraphs.end(),
            [](const auto& a, const auto& b) { return a.paragraph_id < b.paragraph_id; });
  for (std::size_t i = 1; i < paragraphs.size(); ++i)
    if (paragraphs[i].paragraph_id == paragraphs[i - 1].paragraph_id)
      throw ValidationError("duplicate paragraph id '" + paragraphs[i].paragraph_id + "'");
  index.paragraphs_ = std::move(paragraphs);

  std::map<std::string, std::vector<Posting>> postings;
  for (std::size_t d = 0; d < index.paragraphs_.size(); ++d) {
    const auto tokens = analyzer.analyze(index.paragraphs_[d].context);
    index.lengths_.push_back(static_cast<std::uint32_t>(tokens.size()));
    if (tokens.empty()) index.warnings_.push_back("paragraph " + index.paragraphs_[d].paragraph_id + " has no indexable terms");
    std::map<std::string, std::uint32_t> tf;
    for (const auto& t : tokens) ++tf[t];
    for (const auto& [term, n] : tf) postings[term].push_back({static_cast<std::uint32_t>(d), n});
  }
  for (auto& [term, list] : postings) {
    index.terms_.push_back(term);
    index.postings_.push_back(std::move(list));
  }
  index.finish();
  return index;
}

void SparseIndex::finish() {
  double total = 0;
  for (auto n : lengths_) total += n;
  avg_length_ = lengths_.empty() ? 0.0 : total / static_cast<double>(lengths_.size());
  term_index_.clear();
  for (std::size_t i = 0; i < terms_.size(); ++i) term_index_[terms_[i]] = i;
  paragraph_index_.clear();
  for (std::size_t i = 0; i < paragraphs_.size(); ++i) paragraph_index_[paragraphs_[i].paragraph_id] = i;
}

const segment::TopicParagraph* SparseIndex::paragraph(const std::string& paragraph_id) const {
  const auto it = paragraph_index_.find(paragraph_id);
  return it == paragraph_index_.end() ? nullptr : &paragraphs_[it->second];
}

const std::vector<Posting>* SparseIndex::postings(const std::string& term) const {
  const auto it = term_index_.find(term);
  return it == term_index_.end() ? nullptr : &postings_[it->second];
}

double SparseIndex::score(const std::vector<std::string>& query_terms, std::size_t doc) const {
  const double N = static_cast<double>(paragraphs_.size());
  const double norm = avg_length_ > 0 ? static_cast<double>(lengths_.at(doc)) / avg_length_ : 0.0;
  double s = 0.0;
  for (const auto& term : std::set<std::string>(query_terms.begin(), query_terms.end())) {
    const auto* list = postings(term);
    if (!list) continue;
    const auto it = std::lower_bound(list->begin(), list->end(), doc,
                                     [](const Posting& p, std::size_t d) { return p.doc < d; });
    if (it == list->end() || it->doc != doc) continue;
    const double n = static_cast<double>(list->size());
    const double idf = std::log(1.0 + (N - n + 0.5) / (n + 0.5));
    const double tf = it->tf;
    s += idf * tf * (params_.k1 + 1) / (tf + params_.k1 * (1 - params_.b + params_.b * norm));
  }
  return s;
}

RetrievalResult SparseIndex::retrieve(std::string_view query, std::size_t k) const {
  if (k == 0) throw ParameterError("k must be at least 1");
  RetrievalResult result;
  result.k = k;
  const auto terms = analyzer_.analyze(query);
  if (terms.empty()) {
    result.empty_query = true;
    return result;
  }
  std::vector<ScoredParagraph> all;
  all.reserve(paragraphs_.size());
  for (std::size_t d = 0; d < paragraphs_.size(); ++d) all.push_back({paragraphs_[d].paragraph_id, score(terms, d)});
  const std::size_t n = std::min(k, all.size());
  // Paragraph order is already id order, so a stable sort on score alone
  // applies the tie-break.
  std::stable_sort(all.begin(), all.end(), [](const auto& a, const auto& b) { return a.score > b.score; });
  all.resize(n);
  result.hits = std::move(all);
  return result;
}

nlohmann::json SparseIndex::to_json() const {
  nlohmann::json paragraphs = nlohmann::json::array();
  for (const auto& p : paragraphs_) paragraphs.push_back(segment::to_json(p));
  nlohmann::json postings = nlohmann::json::object();
  for (std::size_t i = 0; i < terms_.size(); ++i) {
    nlohmann::json list = nlohmann::json::array();
    for (const auto& p : postings_[i]) list.push_back({p.doc, p.tf});
    postings[terms_[i]] = std::move(list);
  }
  return {{"config_hash", analyzer_.config_hash()},
          {"bm25", {{"k1", params_.k1}, {"b", params_.b}}},
          {"paragraphs", paragraphs},
          {"lengths", lengths_},
          {"average_length", avg_length_},
          {"postings", postings},
          {"warnings", warnings_}};
}

SparseIndex SparseIndex::from_json(const nlohmann::json& j, const text::Analyzer& analyzer) {
  try {
    const auto hash = j.at("config_hash").get<std::string>();
    if (hash != analyzer.config_hash())
      throw ValidationError("index was built with a different text analysis configuration (" + hash.substr(0, 12) +
                            " vs " + analyzer.config_hash().substr(0, 12) + ")");
    SparseIndex index(analyzer);
    index.params_ = {j.at("bm25").at("k1").get<double>(), j.at("bm25").at("b").get<double>()};
    for (const auto& p : j.at("paragraphs")) index.paragraphs_.push_back(segment::paragraph_from_json(p));
    index.lengths_ = j.at("lengths").get<std::vector<std::uint32_t>>();
    for (const auto& [term, list] : j.at("postings").items()) {
      index.terms_.push_back(term);
      std::vector<Posting> postings;
      for (const auto& p : list) postings.push_back({p.at(0).get<std::uint32_t>(), p.at(1).get<std::uint32_t>()});
      index.postings_.push_back(std::move(postings));
    }
    index.warnings_ = j.at("warnings").get<std::vector<std::string>>();
    if (index.lengths_.size() != index.paragraphs_.size()) throw ValidationError("index lengths do not match paragraphs");
    index.finish();
    return index;
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("bad index file: ") + e.what());
  }
}

void SparseIndex::save(const std::string& path) const { fileio::write_file_atomic(path, fileio::dump_stable(to_json())); }

SparseIndex SparseIndex::load(const std::string& path, const text::Analyzer& analyzer) {
  return from_json(fileio::read_json(path), analyzer);
}

RecallReport retriever_recall(const SparseIndex& index, const qa::QADataset& dataset, std::size_t k) {
  if (k == 0) throw ParameterError("k must be at least 1");
  RecallReport report;
  for (const auto& article : dataset.data) {
    for (const auto& p : article.paragraphs) {
      const bool indexed = index.paragraph(p.paragraph_id) != nullptr;
      for (const auto& q : p.qas) {
        ++report.questions;
        if (!indexed) {
          report.unindexed_qids.push_back(q.qid);
          report.missed_qids.push_back(q.qid);
          continue;
        }
        const auto result = index.retrieve(q.question, k);
        const bool hit = std::any_of(result.hits.begin(), result.hits.end(),
                                     [&](const ScoredParagraph& s) { return s.paragraph_id == p.paragraph_id; });
        if (hit) {
          ++report.hits;
        } else {
          report.missed_qids.push_back(q.qid);
        }
      }
    }
  }
  if (report.questions > 0) report.recall = static_cast<double>(report.hits) / static_cast<double>(report.questions);
  return report;
}

}  // namespace forumqa::retrieval
