#include "forumqa/lda/aspects.hpp"

#include <algorithm>
#include <numeric>
#include <set>
#include <unordered_map>

#include "forumqa/error.hpp"
#include "forumqa/util/utf8.hpp"

namespace forumqa::lda {

namespace {

bool is_apostrophe(char32_t cp) { return cp == U'\'' || cp == 0x2019; }

// Stretches of text not interrupted by punctuation.
std::vector<std::string> phrase_runs(std::string_view text) {
  std::vector<std::string> runs(1);
  std::size_t pos = 0;
  while (pos < text.size()) {
    const std::size_t start = pos;
    const char32_t cp = utf8::decode(text, pos);
    if (utf8::is_punct(cp) && !is_apostrophe(cp)) {
      if (!runs.back().empty()) runs.emplace_back();
      continue;
    }
    runs.back().append(text.substr(start, pos - start));
  }
  return runs;
}

}  // namespace

SurfaceStats SurfaceStats::collect(const std::vector<std::string>& texts, const text::Analyzer& analyzer) {
  SurfaceStats stats;
  for (const auto& t : texts) {
    for (const auto& run : phrase_runs(t)) {
      const auto words = text::split_words(run);
      for (std::size_t i = 0; i < words.size(); ++i) {
        if (!analyzer.stopwords().contains(words[i])) stats.add_surface(analyzer.stem(words[i]), words[i]);
        if (i + 1 < words.size()) stats.add_bigram(words[i], words[i + 1]);
      }
    }
  }
  return stats;
}

void SurfaceStats::add_surface(const std::string& stem, const std::string& surface, std::size_t count) {
  surfaces_[stem][surface] += count;
}

void SurfaceStats::add_bigram(const std::string& first, const std::string& second, std::size_t count) {
  bigrams_[first + " " + second] += count;
}

std::string SurfaceStats::display(const std::string& stem) const {
  const auto it = surfaces_.find(stem);
  if (it == surfaces_.end() || it->second.empty()) return stem;
  const std::string* best = nullptr;
  std::size_t best_count = 0;
  for (const auto& [surface, count] : it->second) {
    if (count > best_count) {
      best = &surface;
      best_count = count;
    }
  }
  return *best;
}

std::vector<TopicAspects> extract_aspects(const TopicModel& model, const text::Vocabulary& vocab,
                                          const SurfaceStats& surfaces, const text::Analyzer& analyzer,
                                          const AspectOptions& options) {
  const std::size_t A = options.per_topic;
  const std::size_t V = vocab.size();
  if (A == 0) throw ParameterError("aspects per topic must be at least 1");
  if (A > V) throw ParameterError("aspects per topic (" + std::to_string(A) + ") exceeds vocabulary size (" +
                                  std::to_string(V) + ")");
  if (model.vocab_size != V) throw ValidationError("topic model was fitted over a different vocabulary");

  struct Candidate {
    std::string text;
    std::size_t count;
    std::vector<TermId> content;  // non-stopword members
  };
  std::vector<Candidate> candidates;
  for (const auto& [bigram, count] : surfaces.bigrams()) {
    if (count < options.bigram_threshold) continue;
    const auto space = bigram.find(' ');
    Candidate c{bigram, count, {}};
    bool usable = true;
    for (const std::string& word : {bigram.substr(0, space), bigram.substr(space + 1)}) {
      if (analyzer.stopwords().contains(word)) continue;
      const auto id = vocab.id_of(analyzer.stem(word));
      if (!id) {
        usable = false;
        break;
      }
      c.content.push_back(*id);
    }
    if (!usable || c.content.empty()) continue;
    if (c.content.size() == 2 && c.content[0] == c.content[1]) continue;
    candidates.push_back(std::move(c));
  }
  std::stable_sort(candidates.begin(), candidates.end(),
                   [](const Candidate& a, const Candidate& b) { return a.count > b.count; });

  std::vector<TopicAspects> out;
  for (std::size_t k = 0; k < model.num_topics(); ++k) {
    const auto& phi = model.phi.at(k);
    std::vector<TermId> ranked(V);
    std::iota(ranked.begin(), ranked.end(), 0);
    std::stable_sort(ranked.begin(), ranked.end(), [&](TermId a, TermId b) { return phi[a] > phi[b]; });
    std::unordered_map<TermId, std::size_t> rank;
    for (std::size_t r = 0; r < V; ++r) rank[ranked[r]] = r;

    // Slot per ranked term; a merged bigram occupies its best member's slot.
    std::vector<std::string> slots(V);
    std::vector<bool> alive(V, true);
    for (std::size_t r = 0; r < V; ++r) slots[r] = surfaces.display(vocab.term(ranked[r]));
    std::size_t remaining = V;
    std::set<TermId> merged;
    for (const auto& c : candidates) {
      const bool eligible = std::all_of(c.content.begin(), c.content.end(), [&](TermId id) {
        return rank[id] < 3 * A && !merged.count(id);
      });
      if (!eligible) continue;
      if (remaining - (c.content.size() - 1) < A) continue;
      std::size_t best = V;
      for (TermId id : c.content) best = std::min(best, rank[id]);
      for (TermId id : c.content) {
        alive[rank[id]] = false;
        merged.insert(id);
      }
      alive[best] = true;
      slots[best] = c.text;
      remaining -= c.content.size() - 1;
    }

    TopicAspects ta{static_cast<Topic>(k), {}};
    std::set<std::string> seen;
    for (std::size_t r = 0; r < V && ta.aspects.size() < A; ++r)
      if (alive[r] && seen.insert(slots[r]).second) ta.aspects.push_back(slots[r]);
    if (ta.aspects.size() < A) throw ValidationError("topic " + std::to_string(k) + " yields too few distinct aspects");
    out.push_back(std::move(ta));
  }
  return out;
}

nlohmann::json aspects_to_json(const std::vector<TopicAspects>& aspects) {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& t : aspects) arr.push_back({{"topic_id", t.topic_id}, {"aspects", t.aspects}});
  return arr;
}

std::vector<TopicAspects> aspects_from_json(const nlohmann::json& j) {
  std::vector<TopicAspects> out;
  try {
    for (const auto& t : j) out.push_back({t.at("topic_id").get<Topic>(), t.at("aspects").get<std::vector<std::string>>()});
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("bad aspects document: ") + e.what());
  }
  return out;
}

}  // namespace forumqa::lda
