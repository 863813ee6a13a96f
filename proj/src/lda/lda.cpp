#include "forumqa/lda/lda.hpp"

#include <algorithm>

#include "forumqa/error.hpp"

namespace forumqa::lda {

void LdaConfig::validate() const {
  if (K < 1) throw ParameterError("K must be at least 1");
  if (!(effective_alpha() > 0.0)) throw ParameterError("alpha must be positive");
  if (!(beta > 0.0)) throw ParameterError("beta must be positive");
  if (burn_in >= iterations) throw ParameterError("burn_in must be smaller than iterations");
}

nlohmann::json LdaConfig::to_json() const {
  return {{"K", K}, {"alpha", effective_alpha()}, {"beta", beta},
          {"iterations", iterations}, {"burn_in", burn_in}, {"seed", seed}};
}

LdaConfig LdaConfig::from_json(const nlohmann::json& j) {
  LdaConfig c;
  c.K = j.value("K", c.K);
  if (j.contains("alpha") && !j.at("alpha").is_null()) c.alpha = j.at("alpha").get<double>();
  c.beta = j.value("beta", c.beta);
  c.iterations = j.value("iterations", c.iterations);
  c.burn_in = j.value("burn_in", c.burn_in);
  c.seed = j.value("seed", c.seed);
  return c;
}

GibbsSampler::GibbsSampler(std::vector<std::vector<TermId>> docs, std::size_t vocab_size, std::size_t K, double alpha,
                           double beta, std::uint64_t seed)
    : docs_(std::move(docs)), V_(vocab_size), K_(K), alpha_(alpha), beta_(beta), rng_(seed) {
  z_.resize(docs_.size());
  for (std::size_t d = 0; d < docs_.size(); ++d) {
    z_[d].resize(docs_[d].size());
    for (auto& z : z_[d]) z = static_cast<Topic>(std::min<std::size_t>(K_ - 1, static_cast<std::size_t>(uniform01() * static_cast<double>(K_))));
  }
  init_counts();
}

GibbsSampler::GibbsSampler(std::vector<std::vector<TermId>> docs, std::size_t vocab_size, std::size_t K, double alpha,
                           double beta, std::vector<std::vector<Topic>> assignments, std::uint64_t seed)
    : docs_(std::move(docs)), V_(vocab_size), K_(K), alpha_(alpha), beta_(beta), z_(std::move(assignments)), rng_(seed) {
  if (z_.size() != docs_.size()) throw ParameterError("initial assignments: document count mismatch");
  for (std::size_t d = 0; d < docs_.size(); ++d) {
    if (z_[d].size() != docs_[d].size()) throw ParameterError("initial assignments: token count mismatch");
    for (Topic z : z_[d])
      if (z >= K_) throw ParameterError("initial assignments: topic out of range");
  }
  init_counts();
}

void GibbsSampler::init_counts() {
  if (K_ < 1) throw ParameterError("K must be at least 1");
  n_dk_.assign(docs_.size() * K_, 0);
  n_kw_.assign(K_ * V_, 0);
  n_k_.assign(K_, 0);
  total_ = 0;
  for (std::size_t d = 0; d < docs_.size(); ++d) {
    for (std::size_t i = 0; i < docs_[d].size(); ++i) {
      const TermId w = docs_[d][i];
      if (w >= V_) throw ParameterError("term id " + std::to_string(w) + " outside vocabulary");
      const Topic k = z_[d][i];
      ++n_dk_[d * K_ + k];
      ++n_kw_[k * V_ + w];
      ++n_k_[k];
      ++total_;
    }
  }
  scratch_.resize(K_);
}

double GibbsSampler::uniform01() { return static_cast<double>(rng_() >> 11) * 0x1.0p-53; }

std::vector<double> GibbsSampler::conditional_weights(std::size_t d, std::size_t i) const {
  const TermId w = docs_.at(d).at(i);
  const Topic current = z_[d][i];
  const double vbeta = static_cast<double>(V_) * beta_;
  std::vector<double> weights(K_);
  for (std::size_t k = 0; k < K_; ++k) {
    const double own = k == current ? 1.0 : 0.0;
    weights[k] = (n_dk_[d * K_ + k] - own + alpha_) * (n_kw_[k * V_ + w] - own + beta_) / (n_k_[k] - own + vbeta);
  }
  return weights;
}

Topic GibbsSampler::step(std::size_t d, std::size_t i) {
  const TermId w = docs_[d][i];
  Topic& z = z_[d][i];
  --n_dk_[d * K_ + z];
  --n_kw_[z * V_ + w];
  --n_k_[z];

  const double vbeta = static_cast<double>(V_) * beta_;
  double total = 0.0;
  for (std::size_t k = 0; k < K_; ++k) {
    total += (n_dk_[d * K_ + k] + alpha_) * (n_kw_[k * V_ + w] + beta_) / (n_k_[k] + vbeta);
    scratch_[k] = total;
  }
  const double u = uniform01() * total;
  std::size_t k = static_cast<std::size_t>(std::upper_bound(scratch_.begin(), scratch_.end(), u) - scratch_.begin());
  if (k >= K_) k = K_ - 1;

  z = static_cast<Topic>(k);
  ++n_dk_[d * K_ + k];
  ++n_kw_[k * V_ + w];
  ++n_k_[k];
  return z;
}

void GibbsSampler::sweep() {
  for (std::size_t d = 0; d < docs_.size(); ++d)
    for (std::size_t i = 0; i < docs_[d].size(); ++i) step(d, i);
}

bool GibbsSampler::counts_consistent() const {
  std::vector<std::uint32_t> dk(docs_.size() * K_, 0), kw(K_ * V_, 0), k_tot(K_, 0);
  std::size_t total = 0;
  for (std::size_t d = 0; d < docs_.size(); ++d) {
    if (z_[d].size() != docs_[d].size()) return false;
    for (std::size_t i = 0; i < docs_[d].size(); ++i) {
      ++dk[d * K_ + z_[d][i]];
      ++kw[z_[d][i] * V_ + docs_[d][i]];
      ++k_tot[z_[d][i]];
      ++total;
    }
  }
  return dk == n_dk_ && kw == n_kw_ && k_tot == n_k_ && total == total_;
}

Topic argmax_topic(std::span<const double> weights) {
  Topic best = 0;
  for (std::size_t k = 1; k < weights.size(); ++k)
    if (weights[k] > weights[best]) best = static_cast<Topic>(k);
  return best;
}

std::optional<std::size_t> TopicModel::doc_index(const std::string& doc_id) const {
  const auto it = std::find(doc_ids.begin(), doc_ids.end(), doc_id);
  if (it == doc_ids.end()) return std::nullopt;
  return static_cast<std::size_t>(it - doc_ids.begin());
}

Topic TopicModel::dominant_topic(const std::string& doc_id) const {
  const auto d = doc_index(doc_id);
  if (!d) throw NotFoundError("document '" + doc_id + "' was not part of the fitted corpus");
  return argmax_topic(theta[*d]);
}

std::vector<std::vector<std::uint32_t>> TopicModel::topic_word_counts() const {
  std::vector<std::vector<std::uint32_t>> counts(config.K, std::vector<std::uint32_t>(vocab_size, 0));
  for (std::size_t d = 0; d < docs.size(); ++d)
    for (std::size_t i = 0; i < docs[d].size(); ++i) ++counts[assignments[d][i]][docs[d][i]];
  return counts;
}

nlohmann::json TopicModel::to_json() const {
  return {{"config", config.to_json()},
          {"vocab_hash", vocab_hash},
          {"vocab_size", vocab_size},
          {"doc_ids", doc_ids},
          {"skipped_doc_ids", skipped_doc_ids},
          {"docs", docs},
          {"assignments", assignments},
          {"theta", theta},
          {"phi", phi}};
}

TopicModel TopicModel::from_json(const nlohmann::json& j) {
  try {
    TopicModel m;
    m.config = LdaConfig::from_json(j.at("config"));
    m.vocab_hash = j.at("vocab_hash").get<std::string>();
    m.vocab_size = j.at("vocab_size").get<std::size_t>();
    m.doc_ids = j.at("doc_ids").get<std::vector<std::string>>();
    m.skipped_doc_ids = j.at("skipped_doc_ids").get<std::vector<std::string>>();
    m.docs = j.at("docs").get<std::vector<std::vector<TermId>>>();
    m.assignments = j.at("assignments").get<std::vector<std::vector<Topic>>>();
    m.theta = j.at("theta").get<std::vector<std::vector<double>>>();
    m.phi = j.at("phi").get<std::vector<std::vector<double>>>();
    if (m.theta.size() != m.doc_ids.size() || m.phi.size() != m.config.K || m.docs.size() != m.doc_ids.size())
      throw ValidationError("topic model dimensions are inconsistent");
    return m;
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("bad topic model: ") + e.what());
  }
}

TopicModel fit_lda(const std::vector<text::BowDocument>& bow, const text::Vocabulary& vocab, const LdaConfig& config,
                   const FitOptions& options) {
  config.validate();
  TopicModel model;
  model.config = config;
  model.config.alpha = config.effective_alpha();
  model.vocab_hash = vocab.hash();
  model.vocab_size = vocab.size();

  std::vector<std::vector<TermId>> docs;
  for (const auto& doc : bow) {
    if (doc.token_ids.empty()) {
      model.skipped_doc_ids.push_back(doc.doc_id);
    } else {
      model.doc_ids.push_back(doc.doc_id);
      docs.push_back(doc.token_ids);
    }
  }
  if (docs.empty()) throw EmptyCorpusError("no document has any in-vocabulary token");

  const std::size_t K = config.K;
  const std::size_t V = vocab.size();
  const double alpha = config.effective_alpha();
  GibbsSampler sampler = options.initial_assignments
                             ? GibbsSampler(docs, V, K, alpha, config.beta, *options.initial_assignments, config.seed)
                             : GibbsSampler(docs, V, K, alpha, config.beta, config.seed);

  const std::size_t D = docs.size();
  std::vector<double> theta_sum(D * K, 0.0), phi_sum(K * V, 0.0);
  const double vbeta = static_cast<double>(V) * config.beta;
  for (std::size_t sweep = 1; sweep <= config.iterations; ++sweep) {
    sampler.sweep();
    if (options.on_sweep) options.on_sweep(sweep, sampler);
    if (sweep <= config.burn_in) continue;
    for (std::size_t d = 0; d < D; ++d) {
      const double denom = static_cast<double>(docs[d].size()) + static_cast<double>(K) * alpha;
      for (std::size_t k = 0; k < K; ++k) theta_sum[d * K + k] += (sampler.n_dk(d, k) + alpha) / denom;
    }
    for (std::size_t k = 0; k < K; ++k) {
      const double denom = sampler.n_k(k) + vbeta;
      for (std::size_t w = 0; w < V; ++w)
        phi_sum[k * V + w] += (sampler.n_kw(k, static_cast<TermId>(w)) + config.beta) / denom;
    }
  }

  // Average, then renormalize so rows sum to one despite accumulated rounding.
  auto finish = [](const std::vector<double>& sums, std::size_t rows, std::size_t cols) {
    std::vector<std::vector<double>> out(rows, std::vector<double>(cols));
    for (std::size_t r = 0; r < rows; ++r) {
      double total = 0.0;
      for (std::size_t c = 0; c < cols; ++c) total += sums[r * cols + c];
      for (std::size_t c = 0; c < cols; ++c) out[r][c] = sums[r * cols + c] / total;
    }
    return out;
  };
  model.theta = finish(theta_sum, D, K);
  model.phi = finish(phi_sum, K, V);
  model.docs = std::move(docs);
  model.assignments = sampler.assignments();
  return model;
}

}  // namespace forumqa::lda
