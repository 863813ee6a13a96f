#include <gtest/gtest.h>

#include <cmath>
#include <numeric>
#include <random>

#include "forumqa/error.hpp"
#include "forumqa/lda/aspects.hpp"
#include "forumqa/lda/lda.hpp"
#include "lda_oracle.hpp"
#include "test_paths.hpp"

namespace forumqa::lda {
namespace {

text::Vocabulary numbered_vocab(std::size_t V) {
  std::vector<std::string> terms;
  for (std::size_t i = 0; i < V; ++i) terms.push_back("w" + std::string(1, static_cast<char>('a' + i / 26)) +
                                                      std::string(1, static_cast<char>('a' + i % 26)));
  return text::Vocabulary(terms, std::vector<std::size_t>(V, 1));
}

std::vector<text::BowDocument> random_bow(std::size_t D, std::size_t V, std::size_t max_len, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<std::size_t> len(1, max_len);
  std::uniform_int_distribution<TermId> word(0, static_cast<TermId>(V - 1));
  std::vector<text::BowDocument> docs;
  for (std::size_t d = 0; d < D; ++d) {
    text::BowDocument doc{"d" + std::to_string(d), {}};
    for (std::size_t i = len(rng); i > 0; --i) doc.token_ids.push_back(word(rng));
    docs.push_back(doc);
  }
  return docs;
}

LdaConfig small_config(std::size_t K, std::size_t iterations = 200, std::size_t burn_in = 50) {
  LdaConfig c;
  c.K = K;
  c.iterations = iterations;
  c.burn_in = burn_in;
  c.seed = 11;
  return c;
}

TEST(LdaConfigTest, Defaults) {
  const LdaConfig c;
  EXPECT_EQ(c.K, 35u);
  EXPECT_DOUBLE_EQ(c.effective_alpha(), 50.0 / 35.0);
  EXPECT_DOUBLE_EQ(c.beta, 0.01);
  EXPECT_EQ(c.iterations, 1000u);
  EXPECT_EQ(c.burn_in, 200u);
}

TEST(LdaConfigTest, RejectsInvalid) {
  LdaConfig c;
  c.K = 0;
  EXPECT_THROW(c.validate(), ParameterError);
  c = LdaConfig{};
  c.alpha = 0.0;
  EXPECT_THROW(c.validate(), ParameterError);
  c = LdaConfig{};
  c.beta = -1;
  EXPECT_THROW(c.validate(), ParameterError);
  c = LdaConfig{};
  c.burn_in = c.iterations;
  EXPECT_THROW(c.validate(), ParameterError);
}

TEST(FitLdaTest, TwoSingleWordDocumentsSeparate) {
  const auto vocab = numbered_vocab(2);
  const std::vector<text::BowDocument> bow = {{"a", std::vector<TermId>(20, 0)}, {"b", std::vector<TermId>(20, 1)}};
  auto config = small_config(2);
  config.alpha = 0.1;
  const auto model = fit_lda(bow, vocab, config);
  const auto ta = argmax_topic(model.theta[0]);
  const auto tb = argmax_topic(model.theta[1]);
  EXPECT_GE(model.theta[0][ta], 0.9);
  EXPECT_GE(model.theta[1][tb], 0.9);
  EXPECT_NE(ta, tb);
}

TEST(FitLdaTest, SingleTopicIsSmoothedEmpiricalDistribution) {
  const auto vocab = numbered_vocab(4);
  const auto bow = random_bow(6, 4, 10, 3);
  const auto config = small_config(1, 20, 5);
  const auto model = fit_lda(bow, vocab, config);
  std::vector<double> counts(4, 0);
  double total = 0;
  for (const auto& d : bow)
    for (TermId w : d.token_ids) ++counts[w], ++total;
  for (const auto& row : model.theta) EXPECT_NEAR(row[0], 1.0, 1e-12);
  for (std::size_t w = 0; w < 4; ++w) EXPECT_NEAR(model.phi[0][w], (counts[w] + 0.01) / (total + 4 * 0.01), 1e-12);
}

TEST(FitLdaTest, GibbsMatchesExactPosteriorOnTinyInstance) {
  const std::vector<std::vector<TermId>> docs = {{0, 1, 0}, {2, 2, 1}};
  const auto r = test::gibbs_vs_exact(docs, 3, 2, 0.5, 0.5, 99, 200000, 1000);
  EXPECT_LT(r.tv, 0.05);
}

TEST(FitLdaTest, EmptyCorpusAndEmptyDocuments) {
  const auto vocab = numbered_vocab(3);
  EXPECT_THROW(fit_lda({}, vocab, small_config(2)), EmptyCorpusError);
  EXPECT_THROW(fit_lda({{"x", {}}}, vocab, small_config(2)), EmptyCorpusError);
  const auto model = fit_lda({{"x", {}}, {"y", {0, 1}}, {"z", {}}}, vocab, small_config(2, 10, 2));
  EXPECT_EQ(model.doc_ids, (std::vector<std::string>{"y"}));
  EXPECT_EQ(model.skipped_doc_ids, (std::vector<std::string>{"x", "z"}));
}

TEST(FitLdaTest, InvariantsHoldAfterEverySweep) {
  const auto vocab = numbered_vocab(30);
  const auto bow = random_bow(40, 30, 25, 5);
  std::vector<std::size_t> lengths;
  std::size_t total = 0;
  for (const auto& d : bow) lengths.push_back(d.token_ids.size()), total += d.token_ids.size();
  FitOptions options;
  std::size_t sweeps = 0;
  options.on_sweep = [&](std::size_t, const GibbsSampler& s) {
    ++sweeps;
    ASSERT_TRUE(s.counts_consistent());
    std::size_t nk_total = 0;
    for (std::size_t k = 0; k < s.num_topics(); ++k) nk_total += s.n_k(k);
    ASSERT_EQ(nk_total, total);
    for (std::size_t d = 0; d < lengths.size(); ++d) {
      std::size_t n = 0;
      for (std::size_t k = 0; k < s.num_topics(); ++k) n += s.n_dk(d, k);
      ASSERT_EQ(n, lengths[d]);
    }
  };
  const auto model = fit_lda(bow, vocab, small_config(5, 60, 10), options);
  EXPECT_EQ(sweeps, 60u);
  for (const auto& row : model.theta) EXPECT_NEAR(std::accumulate(row.begin(), row.end(), 0.0), 1.0, 1e-9);
  for (const auto& row : model.phi) EXPECT_NEAR(std::accumulate(row.begin(), row.end(), 0.0), 1.0, 1e-9);
}

TEST(FitLdaTest, SeedDeterminism) {
  const auto vocab = numbered_vocab(20);
  const auto bow = random_bow(15, 20, 12, 8);
  const auto a = fit_lda(bow, vocab, small_config(4, 30, 5));
  const auto b = fit_lda(bow, vocab, small_config(4, 30, 5));
  EXPECT_EQ(a.assignments, b.assignments);
  EXPECT_EQ(a.to_json().dump(), b.to_json().dump());
  auto other = small_config(4, 30, 5);
  other.seed = 12;
  EXPECT_NE(fit_lda(bow, vocab, other).assignments, a.assignments);
}

TEST(FitLdaTest, ModelJsonRoundTrip) {
  const auto vocab = numbered_vocab(10);
  const auto model = fit_lda(random_bow(5, 10, 8, 2), vocab, small_config(3, 10, 2));
  const auto back = TopicModel::from_json(nlohmann::json::parse(model.to_json().dump()));
  EXPECT_EQ(back.to_json(), model.to_json());
  EXPECT_EQ(back.dominant_topic("d0"), model.dominant_topic("d0"));
}

TEST(GibbsStepTest, EqualWeightsSampleUniformly) {
  // One token, one word: after removing it every topic looks the same.
  constexpr std::size_t K = 4;
  constexpr int kDraws = 10000;
  std::vector<int> hist(K, 0);
  for (int t = 0; t < kDraws; ++t) {
    GibbsSampler s({{0}}, 1, K, 0.5, 0.1, {{0}}, static_cast<std::uint64_t>(t));
    const auto w = s.conditional_weights(0, 0);
    ASSERT_TRUE(std::all_of(w.begin(), w.end(), [&](double x) { return x == w[0]; }));
    ++hist[s.step(0, 0)];
  }
  double chi2 = 0;
  for (int h : hist) chi2 += std::pow(h - kDraws / 4.0, 2) / (kDraws / 4.0);
  EXPECT_LT(chi2, 11.345);  // chi-square 0.99 quantile, 3 degrees of freedom
}

TEST(GibbsStepTest, SingleTopicAlwaysZero) {
  GibbsSampler s({{0, 1, 2}}, 3, 1, 0.5, 0.1, 5);
  for (int i = 0; i < 100; ++i) EXPECT_EQ(s.step(0, static_cast<std::size_t>(i % 3)), 0u);
}

TEST(GibbsStepTest, HandComputedWeights) {
  // Doc [w0, w1, w0], z = [0, 1, 1], alpha = 0.5, beta = 0.1, V = 2.
  // Removing token 0 leaves n_d = (0, 2), n_k = (0, 2), n_kw[1] = (1, 1):
  //   k=0: (0 + .5)(0 + .1)/(0 + .2) = 0.25
  //   k=1: (2 + .5)(1 + .1)/(2 + .2) = 1.25
  const std::vector<std::vector<TermId>> docs = {{0, 1, 0}};
  const std::vector<std::vector<Topic>> z = {{0, 1, 1}};
  const auto w = GibbsSampler(docs, 2, 2, 0.5, 0.1, z, 1).conditional_weights(0, 0);
  EXPECT_NEAR(w[0], 0.25, 1e-12);
  EXPECT_NEAR(w[1], 1.25, 1e-12);

  constexpr int kDraws = 20000;
  int zeros = 0;
  for (int t = 0; t < kDraws; ++t) {
    GibbsSampler s(docs, 2, 2, 0.5, 0.1, z, static_cast<std::uint64_t>(t));
    const Topic k = s.step(0, 0);
    if (k == 0) ++zeros;
    ASSERT_TRUE(s.counts_consistent());
  }
  const double p = 1.0 / 6.0;
  const double sigma = std::sqrt(kDraws * p * (1 - p));
  EXPECT_NEAR(zeros, kDraws * p, 3 * sigma);
}

TEST(DominantTopicTest, Argmax) {
  EXPECT_EQ(argmax_topic(std::vector<double>{0.1, 0.8, 0.1}), 1u);
  EXPECT_EQ(argmax_topic(std::vector<double>{0.25, 0.25, 0.25, 0.25}), 0u);
  EXPECT_EQ(argmax_topic(std::vector<double>{0.2, 0.4, 0.4}), 1u);
}

TEST(DominantTopicTest, InvariantUnderMonotoneRescaling) {
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> u(0, 1);
  for (int t = 0; t < 200; ++t) {
    std::vector<double> theta(6);
    for (auto& x : theta) x = std::round(u(rng) * 8) / 8;  // coarse values force ties
    std::vector<double> a, b;
    for (double x : theta) a.push_back(3 * x + 1), b.push_back(std::exp(x));
    EXPECT_EQ(argmax_topic(theta), argmax_topic(a));
    EXPECT_EQ(argmax_topic(theta), argmax_topic(b));
  }
}

TEST(DominantTopicTest, SingleWordDocumentFollowsItsWord) {
  // Four anchor documents pinned to topics 0..3 by initialization and sharp
  // priors; the probe document holds only the word anchored in topic 3.
  const auto vocab = numbered_vocab(4);
  std::vector<text::BowDocument> bow;
  std::vector<std::vector<Topic>> init;
  for (TermId k = 0; k < 4; ++k) {
    bow.push_back({"anchor" + std::to_string(k), std::vector<TermId>(40, k)});
    init.push_back(std::vector<Topic>(40, k));
  }
  bow.push_back({"probe", {3}});
  init.push_back({0});
  auto config = small_config(4, 50, 10);
  config.alpha = 0.01;
  config.beta = 0.001;
  FitOptions options;
  options.initial_assignments = init;
  const auto model = fit_lda(bow, vocab, config, options);
  EXPECT_EQ(model.dominant_topic("probe"), 3u);
  EXPECT_EQ(argmax_topic(model.phi[3]), 3u);
  EXPECT_THROW(model.dominant_topic("nope"), NotFoundError);
}

// Hand-built model over stems; phi rows are given directly.
struct AspectFixture {
  text::Analyzer analyzer{text::StopwordList::load(test::data_file("stopwords_en.txt"))};
  text::Vocabulary vocab{{"afraid", "coffe", "drink", "hallucin", "hous", "leav", "memori", "sleep"},
                         std::vector<std::size_t>(8, 1)};
  TopicModel model;
  SurfaceStats surfaces;

  AspectFixture() {
    model.config.K = 2;
    model.vocab_size = 8;
    //              afraid coffe drink hallucin hous leav memori sleep
    model.phi = {{0.25, 0.01, 0.02, 0.30, 0.05, 0.04, 0.20, 0.13},
                 {0.02, 0.30, 0.25, 0.01, 0.10, 0.12, 0.03, 0.17}};
    surfaces = SurfaceStats::collect({"Hallucinations and hallucination. Hallucinations. I am afraid of my memory.",
                                      "Drinking coffee, drinks, drinking."},
                                     analyzer);
    surfaces.add_bigram("afraid", "of", 30);
    surfaces.add_bigram("leave", "house", 10);
  }
};

TEST(ExtractAspectsTest, LeadingStemsAreDestemmedAndBigramsMerge) {
  AspectFixture f;
  const auto aspects = extract_aspects(f.model, f.vocab, f.surfaces, f.analyzer, {3, 25});
  ASSERT_EQ(aspects.size(), 2u);
  EXPECT_EQ(aspects[0].aspects, (std::vector<std::string>{"hallucinations", "afraid of", "memory"}));
  EXPECT_EQ(aspects[1].aspects, (std::vector<std::string>{"coffee", "drinking", "sleep"}));
}

TEST(ExtractAspectsTest, BigramBelowThresholdIsIgnored) {
  AspectFixture f;
  const auto aspects = extract_aspects(f.model, f.vocab, f.surfaces, f.analyzer, {3, 32});
  EXPECT_EQ(aspects[0].aspects, (std::vector<std::string>{"hallucinations", "afraid", "memory"}));
}

TEST(ExtractAspectsTest, BothContentMembersMustRankHigh) {
  AspectFixture f;
  f.surfaces.add_bigram("leave", "house", 100);
  // In topic 1 "leav" and "hous" rank 4th and 5th, inside the top 3 * 2.
  auto aspects = extract_aspects(f.model, f.vocab, f.surfaces, f.analyzer, {2, 25});
  EXPECT_EQ(aspects[1].aspects, (std::vector<std::string>{"coffee", "drinking"}));
  aspects = extract_aspects(f.model, f.vocab, f.surfaces, f.analyzer, {3, 25});
  EXPECT_EQ(aspects[1].aspects, (std::vector<std::string>{"coffee", "drinking", "sleep"}));
  EXPECT_EQ(extract_aspects(f.model, f.vocab, f.surfaces, f.analyzer, {5, 25})[1].aspects,
            (std::vector<std::string>{"coffee", "drinking", "sleep", "leave house", "memory"}));
}

TEST(ExtractAspectsTest, OnePerTopicIsArgmax) {
  AspectFixture f;
  const auto aspects = extract_aspects(f.model, f.vocab, f.surfaces, f.analyzer, {1, 1000});
  EXPECT_EQ(aspects[0].aspects, (std::vector<std::string>{"hallucinations"}));
  EXPECT_EQ(aspects[1].aspects, (std::vector<std::string>{"coffee"}));
}

TEST(ExtractAspectsTest, ExactCountNoDuplicatesAndErrors) {
  AspectFixture f;
  for (std::size_t a = 1; a <= 8; ++a) {
    for (const auto& t : extract_aspects(f.model, f.vocab, f.surfaces, f.analyzer, {a, 1})) {
      ASSERT_EQ(t.aspects.size(), a);
      std::set<std::string> unique(t.aspects.begin(), t.aspects.end());
      EXPECT_EQ(unique.size(), a);
    }
  }
  EXPECT_THROW(extract_aspects(f.model, f.vocab, f.surfaces, f.analyzer, {9, 25}), ParameterError);
  EXPECT_THROW(extract_aspects(f.model, f.vocab, f.surfaces, f.analyzer, {0, 25}), ParameterError);
}

TEST(ExtractAspectsTest, DefaultConfigurationGivesAboutThreeHundredAspects) {
  const LdaConfig config;
  const AspectOptions options;
  const double total = static_cast<double>(config.K * options.per_topic);
  EXPECT_EQ(total, 315);
  EXPECT_LE(std::abs(total - 300) / 300, 0.10);
}

}  // namespace
}  // namespace forumqa::lda
