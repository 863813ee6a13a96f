#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace forumqa::text {

using TermId = std::uint32_t;

/// Bijective term <-> id map with document frequencies; ids are dense and
/// assigned in lexicographic term order.
class Vocabulary {
 public:
  Vocabulary() = default;
  // `terms` must be sorted and unique; `df` is parallel to it.
  Vocabulary(std::vector<std::string> terms, std::vector<std::size_t> df);

  std::size_t size() const { return terms_.size(); }
  std::optional<TermId> id_of(std::string_view term) const;
  const std::string& term(TermId id) const { return terms_.at(id); }
  std::size_t df(TermId id) const { return df_.at(id); }
  const std::vector<std::string>& terms() const { return terms_; }

  // `term<TAB>id<TAB>df` lines.
  std::string to_tsv() const;
  static Vocabulary from_tsv(std::string_view tsv);
  void save(const std::string& path) const;
  static Vocabulary load(const std::string& path);

  // Fingerprint of the term list, embedded in models built over it.
  std::string hash() const;

  bool operator==(const Vocabulary& other) const { return terms_ == other.terms_ && df_ == other.df_; }

 private:
  std::vector<std::string> terms_;
  std::vector<std::size_t> df_;
  std::unordered_map<std::string, TermId> index_;
};

/// Keeps terms whose document frequency lies in [min_df, max_df_fraction * D].
/// Throws ParameterError for min_df < 1 or max_df_fraction outside (0, 1].
Vocabulary build_vocabulary(const std::vector<std::vector<std::string>>& docs, std::size_t min_df,
                            double max_df_fraction);

struct BowDocument {
  std::string doc_id;
  std::vector<TermId> token_ids;

  bool operator==(const BowDocument&) const = default;
};

// Out-of-vocabulary tokens are dropped; order is preserved.
BowDocument vectorize(std::string doc_id, const std::vector<std::string>& tokens, const Vocabulary& vocab);

// JSON Lines of {"doc_id":..., "token_ids":[...]}.
void write_bow(const std::string& path, const std::vector<BowDocument>& docs);
std::vector<BowDocument> read_bow(const std::string& path);

}  // namespace forumqa::text
