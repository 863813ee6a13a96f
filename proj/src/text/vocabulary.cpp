#include "forumqa/text/vocabulary.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

#include "forumqa/error.hpp"
#include "forumqa/util/fileio.hpp"
#include "forumqa/util/hash.hpp"

namespace forumqa::text {

Vocabulary::Vocabulary(std::vector<std::string> terms, std::vector<std::size_t> df)
    : terms_(std::move(terms)), df_(std::move(df)) {
  if (terms_.size() != df_.size()) throw ValidationError("vocabulary: term and df lists differ in length");
  for (std::size_t i = 0; i < terms_.size(); ++i) {
    if (i > 0 && !(terms_[i - 1] < terms_[i])) throw ValidationError("vocabulary terms must be sorted and unique");
    index_.emplace(terms_[i], static_cast<TermId>(i));
  }
}

std::optional<TermId> Vocabulary::id_of(std::string_view term) const {
  auto it = index_.find(std::string(term));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

std::string Vocabulary::to_tsv() const {
  std::string out;
  for (std::size_t i = 0; i < terms_.size(); ++i) {
    out += terms_[i];
    out += '\t';
    out += std::to_string(i);
    out += '\t';
    out += std::to_string(df_[i]);
    out += '\n';
  }
  return out;
}

Vocabulary Vocabulary::from_tsv(std::string_view tsv) {
  std::vector<std::string> terms;
  std::vector<std::size_t> df;
  std::size_t start = 0;
  std::size_t lineno = 0;
  while (start < tsv.size()) {
    std::size_t nl = tsv.find('\n', start);
    if (nl == std::string_view::npos) nl = tsv.size();
    const std::string_view line = tsv.substr(start, nl - start);
    start = nl + 1;
    ++lineno;
    if (line.empty()) continue;
    const auto t1 = line.find('\t');
    const auto t2 = t1 == std::string_view::npos ? t1 : line.find('\t', t1 + 1);
    if (t2 == std::string_view::npos) throw ValidationError("vocabulary line " + std::to_string(lineno) + " malformed");
    try {
      const auto id = std::stoull(std::string(line.substr(t1 + 1, t2 - t1 - 1)));
      if (id != terms.size()) throw ValidationError("vocabulary ids not dense at line " + std::to_string(lineno));
      terms.emplace_back(line.substr(0, t1));
      df.push_back(std::stoull(std::string(line.substr(t2 + 1))));
    } catch (const std::logic_error&) {
      throw ValidationError("vocabulary line " + std::to_string(lineno) + " malformed");
    }
  }
  return Vocabulary(std::move(terms), std::move(df));
}

void Vocabulary::save(const std::string& path) const { fileio::write_file_atomic(path, to_tsv()); }

Vocabulary Vocabulary::load(const std::string& path) { return from_tsv(fileio::read_file(path)); }

std::string Vocabulary::hash() const {
  std::string joined;
  for (const auto& t : terms_) {
    joined += t;
    joined.push_back('\n');
  }
  return hash::sha256_hex(joined);
}

Vocabulary build_vocabulary(const std::vector<std::vector<std::string>>& docs, std::size_t min_df,
                            double max_df_fraction) {
  if (min_df < 1) throw ParameterError("min_df must be at least 1");
  if (!(max_df_fraction > 0.0 && max_df_fraction <= 1.0)) throw ParameterError("max_df_fraction must be in (0, 1]");

  std::map<std::string, std::size_t> df;
  for (const auto& doc : docs) {
    std::set<std::string_view> unique(doc.begin(), doc.end());
    for (auto term : unique) ++df[std::string(term)];
  }
  const double max_df = max_df_fraction * static_cast<double>(docs.size());
  std::vector<std::string> terms;
  std::vector<std::size_t> counts;
  for (auto& [term, n] : df) {
    // Small tolerance so e.g. 0.5 * 2 admits df = 1 despite rounding.
    if (n >= min_df && static_cast<double>(n) <= max_df + 1e-9) {
      terms.push_back(term);
      counts.push_back(n);
    }
  }
  return Vocabulary(std::move(terms), std::move(counts));
}

BowDocument vectorize(std::string doc_id, const std::vector<std::string>& tokens, const Vocabulary& vocab) {
  BowDocument doc{std::move(doc_id), {}};
  doc.token_ids.reserve(tokens.size());
  for (const auto& t : tokens)
    if (auto id = vocab.id_of(t)) doc.token_ids.push_back(*id);
  return doc;
}

void write_bow(const std::string& path, const std::vector<BowDocument>& docs) {
  std::vector<nlohmann::json> rows;
  rows.reserve(docs.size());
  for (const auto& d : docs) rows.push_back({{"doc_id", d.doc_id}, {"token_ids", d.token_ids}});
  fileio::write_jsonl_atomic(path, rows);
}

std::vector<BowDocument> read_bow(const std::string& path) {
  std::vector<BowDocument> docs;
  for (const auto& row : fileio::read_jsonl(path)) {
    try {
      docs.push_back({row.at("doc_id").get<std::string>(), row.at("token_ids").get<std::vector<TermId>>()});
    } catch (const nlohmann::json::exception& e) {
      throw ValidationError(path + ": bad BoW record: " + e.what());
    }
  }
  return docs;
}

}  // namespace forumqa::text
