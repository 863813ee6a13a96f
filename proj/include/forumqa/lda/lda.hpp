#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include <json.hpp>

#include "forumqa/text/vocabulary.hpp"

namespace forumqa::lda {

using text::TermId;
using Topic = std::uint32_t;

struct LdaConfig {
  std::size_t K = 35;
  std::optional<double> alpha;  // unset: 50 / K
  double beta = 0.01;
  std::size_t iterations = 1000;
  std::size_t burn_in = 200;
  std::uint64_t seed = 1;

  double effective_alpha() const { return alpha ? *alpha : 50.0 / static_cast<double>(K); }
  // Throws ParameterError.
  void validate() const;

  nlohmann::json to_json() const;
  static LdaConfig from_json(const nlohmann::json& j);
};

/// Collapsed Gibbs sampler state over a fixed corpus. One chain is strictly
/// sequential; independent instances may run on separate threads.
class GibbsSampler {
 public:
  // Random initial assignments drawn from the seeded generator.
  GibbsSampler(std::vector<std::vector<TermId>> docs, std::size_t vocab_size, std::size_t K, double alpha, double beta,
               std::uint64_t seed);
  // Explicit initial assignments, one topic per token.
  GibbsSampler(std::vector<std::vector<TermId>> docs, std::size_t vocab_size, std::size_t K, double alpha, double beta,
               std::vector<std::vector<Topic>> assignments, std::uint64_t seed);

  /// Unnormalized full conditional of token (d, i), computed with the token's
  /// own assignment removed from the counts. Does not modify state.
  std::vector<double> conditional_weights(std::size_t d, std::size_t i) const;

  // Resamples one token; returns its new topic.
  Topic step(std::size_t d, std::size_t i);
  // One pass over every token in document order.
  void sweep();

  std::size_t num_topics() const { return K_; }
  std::size_t vocab_size() const { return V_; }
  const std::vector<std::vector<TermId>>& docs() const { return docs_; }
  const std::vector<std::vector<Topic>>& assignments() const { return z_; }
  std::uint32_t n_dk(std::size_t d, std::size_t k) const { return n_dk_[d * K_ + k]; }
  std::uint32_t n_kw(std::size_t k, TermId w) const { return n_kw_[k * V_ + w]; }
  std::uint32_t n_k(std::size_t k) const { return n_k_[k]; }
  std::size_t total_tokens() const { return total_; }

  // Recomputes counts from assignments and compares; used by tests.
  bool counts_consistent() const;

 private:
  void init_counts();
  double uniform01();

  std::vector<std::vector<TermId>> docs_;
  std::size_t V_;
  std::size_t K_;
  double alpha_;
  double beta_;
  std::vector<std::vector<Topic>> z_;
  std::vector<std::uint32_t> n_dk_;
  std::vector<std::uint32_t> n_kw_;
  std::vector<std::uint32_t> n_k_;
  std::size_t total_ = 0;
  std::mt19937_64 rng_;
  mutable std::vector<double> scratch_;
};

struct TopicModel {
  LdaConfig config;
  std::string vocab_hash;
  std::size_t vocab_size = 0;
  std::vector<std::string> doc_ids;          // documents that were fitted
  std::vector<std::string> skipped_doc_ids;  // documents with no tokens
  std::vector<std::vector<TermId>> docs;
  std::vector<std::vector<Topic>> assignments;  // final chain state
  std::vector<std::vector<double>> theta;       // D x K, averaged over post-burn-in sweeps
  std::vector<std::vector<double>> phi;         // K x V, averaged over post-burn-in sweeps

  std::size_t num_topics() const { return config.K; }
  std::optional<std::size_t> doc_index(const std::string& doc_id) const;

  /// argmax_k theta[d][k], ties toward the smallest k. Throws NotFoundError
  /// for a document that was not fitted.
  Topic dominant_topic(const std::string& doc_id) const;

  // Topic-word counts recomputed from the final assignments.
  std::vector<std::vector<std::uint32_t>> topic_word_counts() const;

  nlohmann::json to_json() const;
  static TopicModel from_json(const nlohmann::json& j);
};

// argmax with ties toward the smallest index; empty input -> 0.
Topic argmax_topic(std::span<const double> weights);

struct FitOptions {
  // Called after every sweep with the 1-based sweep number.
  std::function<void(std::size_t, const GibbsSampler&)> on_sweep;
  // Initial assignments for the non-empty documents, in input order.
  std::optional<std::vector<std::vector<Topic>>> initial_assignments;
};

/// Runs `iterations` sweeps from a seeded initialization and estimates
///   theta_dk = (n_dk + alpha) / (N_d + K alpha)
///   phi_kw   = (n_kw + beta)  / (n_k + V beta)
/// averaged over the sweeps after `burn_in`. Documents without tokens are
/// excluded and listed in `skipped_doc_ids`. Throws EmptyCorpusError when no
/// document has tokens.
TopicModel fit_lda(const std::vector<text::BowDocument>& bow, const text::Vocabulary& vocab, const LdaConfig& config,
                   const FitOptions& options = {});

}  // namespace forumqa::lda
