#include <gtest/gtest.h>

#include <random>

#include "bm25_fixture.hpp"
#include "forumqa/error.hpp"
#include "forumqa/retrieval/bm25_index.hpp"
#include "forumqa/util/fileio.hpp"
#include "test_paths.hpp"

namespace forumqa::retrieval {
namespace {

text::Analyzer analyzer() { return text::Analyzer(text::StopwordList::load(test::data_file("stopwords_en.txt"))); }

TEST(BuildIndexTest, CountsAndLengths) {
  const auto index = SparseIndex::build(test::bm25_paragraphs(), analyzer());
  EXPECT_EQ(index.size(), 4u);
  EXPECT_EQ(index.lengths(), (std::vector<std::uint32_t>{3, 2, 4, 1}));
  EXPECT_DOUBLE_EQ(index.average_length(), 2.5);
  const auto* sleep = index.postings("sleep");
  ASSERT_TRUE(sleep);
  ASSERT_EQ(sleep->size(), 2u);
  EXPECT_EQ((*sleep)[0].doc, 1u);
  EXPECT_EQ((*sleep)[1].tf, 3u);
}

TEST(BuildIndexTest, StopwordOnlyParagraphIsIndexedWithWarning) {
  auto ps = test::bm25_paragraphs();
  ps.push_back({"p5", 2, "The and of it.", {}, 4});
  const auto index = SparseIndex::build(ps, analyzer());
  EXPECT_EQ(index.size(), 5u);
  ASSERT_EQ(index.warnings().size(), 1u);
  EXPECT_NE(index.warnings()[0].find("p5"), std::string::npos);
  EXPECT_EQ(index.lengths()[4], 0u);
}

TEST(BuildIndexTest, EmptyInputGivesEmptyResults) {
  const auto index = SparseIndex::build({}, analyzer());
  EXPECT_EQ(index.size(), 0u);
  EXPECT_TRUE(index.retrieve("coffee", 5).hits.empty());
}

TEST(BuildIndexTest, RebuildIsByteIdenticalAndRoundTrips) {
  const auto a = SparseIndex::build(test::bm25_paragraphs(), analyzer());
  const auto b = SparseIndex::build(test::bm25_paragraphs(), analyzer());
  EXPECT_EQ(fileio::dump_stable(a.to_json()), fileio::dump_stable(b.to_json()));
  const auto path = test::temp_path("index.json");
  a.save(path);
  const auto loaded = SparseIndex::load(path, analyzer());
  EXPECT_EQ(fileio::dump_stable(loaded.to_json()), fileio::dump_stable(a.to_json()));
  EXPECT_EQ(loaded.retrieve("coffee sleep", 4).hits, a.retrieve("coffee sleep", 4).hits);
}

TEST(BuildIndexTest, ConfigMismatchIsRejected) {
  const auto index = SparseIndex::build(test::bm25_paragraphs(), analyzer());
  const text::Analyzer other(text::StopwordList({"tea"}));
  EXPECT_THROW(SparseIndex::from_json(index.to_json(), other), ValidationError);
}

TEST(RetrieveTest, HandComputedScores) {
  const auto index = SparseIndex::build(test::bm25_paragraphs(), analyzer());
  const auto result = index.retrieve("coffee sleep", 10);
  const auto expected = test::bm25_expected_coffee_sleep();
  ASSERT_EQ(result.hits.size(), expected.size());
  for (std::size_t i = 0; i < expected.size(); ++i) {
    EXPECT_EQ(result.hits[i].paragraph_id, expected[i].id);
    EXPECT_NEAR(result.hits[i].score, expected[i].score, 1e-9);
  }
}

TEST(RetrieveTest, RepeatedQueryTermsCountOnce) {
  const auto index = SparseIndex::build(test::bm25_paragraphs(), analyzer());
  EXPECT_EQ(index.retrieve("coffee coffee sleep", 4).hits, index.retrieve("coffee sleep", 4).hits);
}

TEST(RetrieveTest, UniqueTermRanksFirst) {
  const auto index = SparseIndex::build(test::bm25_paragraphs(), analyzer());
  const auto result = index.retrieve("coffee", 1);
  ASSERT_EQ(result.hits.size(), 1u);
  EXPECT_EQ(result.hits[0].paragraph_id, "p1");
  EXPECT_EQ(result.k, 1u);
}

TEST(RetrieveTest, EmptyQueryAndBadK) {
  const auto index = SparseIndex::build(test::bm25_paragraphs(), analyzer());
  const auto result = index.retrieve("the of and!!", 5);
  EXPECT_TRUE(result.empty_query);
  EXPECT_TRUE(result.hits.empty());
  EXPECT_THROW(index.retrieve("coffee", 0), ParameterError);
}

TEST(RetrieveTest, TiesBreakByParagraphId) {
  const std::vector<segment::TopicParagraph> ps = {{"b", 0, "Same words here.", {}, 3},
                                                   {"a", 0, "Same words here.", {}, 3},
                                                   {"c", 0, "Other text.", {}, 2}};
  const auto index = SparseIndex::build(ps, analyzer());
  const auto hits = index.retrieve("same words", 3).hits;
  EXPECT_EQ(hits[0].paragraph_id, "a");
  EXPECT_EQ(hits[1].paragraph_id, "b");
  EXPECT_EQ(hits[2].paragraph_id, "c");
  EXPECT_EQ(hits[0].score, hits[1].score);
}

std::vector<segment::TopicParagraph> random_paragraphs(std::mt19937& rng, std::size_t n) {
  static const char* kWords[] = {"voices", "sleep", "coffee", "doctor", "house", "quiet", "tired", "family", "walk", "tea"};
  std::vector<segment::TopicParagraph> ps;
  for (std::size_t i = 0; i < n; ++i) {
    std::string ctx;
    for (std::size_t w = 0, len = 3 + rng() % 15; w < len; ++w) ctx += std::string(kWords[rng() % 10]) + " ";
    ps.push_back({"p" + std::to_string(100 + i), 0, ctx, {}, 0});
  }
  return ps;
}

TEST(RetrieveTest, PrefixPropertyAndOrdering) {
  std::mt19937 rng(9);
  const auto index = SparseIndex::build(random_paragraphs(rng, 25), analyzer());
  for (const char* q : {"coffee tea", "tired family walk", "voices"}) {
    const auto full = index.retrieve(q, 25).hits;
    EXPECT_EQ(full.size(), 25u);
    for (std::size_t i = 1; i < full.size(); ++i) {
      EXPECT_GE(full[i - 1].score, full[i].score);
      if (full[i - 1].score == full[i].score) EXPECT_LT(full[i - 1].paragraph_id, full[i].paragraph_id);
    }
    for (std::size_t k = 1; k <= 25; ++k) {
      const auto hits = index.retrieve(q, k).hits;
      ASSERT_EQ(hits.size(), k);
      EXPECT_TRUE(std::equal(hits.begin(), hits.end(), full.begin()));
    }
  }
}

qa::QADataset dataset_over(const std::vector<segment::TopicParagraph>& ps,
                           const std::vector<std::pair<std::string, std::string>>& questions) {
  auto ds = qa::dataset_from_paragraphs(ps);
  for (const auto& [pid, question] : questions) {
    const auto qid = qa::add_question(ds, pid, {"", question, "a", "t", false, {}});
    qa::add_answer(ds, qid, 0, 1);
  }
  return ds;
}

TEST(RecallTest, KnownRanks) {
  const auto ps = test::bm25_paragraphs();
  const auto index = SparseIndex::build(ps, analyzer());
  // Gold ranks for each question by construction: 1, 2, 3, 1.
  const auto ds = dataset_over(ps, {{"p1", "Why coffee?"}, {"p3", "coffee or sleep?"}, {"p2", "coffee sleep?"},
                                    {"p4", "voices?"}});
  EXPECT_DOUBLE_EQ(retriever_recall(index, ds, 1).recall, 0.5);
  EXPECT_DOUBLE_EQ(retriever_recall(index, ds, 2).recall, 0.75);
  EXPECT_DOUBLE_EQ(retriever_recall(index, ds, 3).recall, 1.0);
  EXPECT_DOUBLE_EQ(retriever_recall(index, ds, 4).recall, 1.0);
  EXPECT_EQ(retriever_recall(index, ds, 1).missed_qids.size(), 2u);
  EXPECT_THROW(retriever_recall(index, ds, 0), ParameterError);
}

TEST(RecallTest, UnindexedGoldIsAMiss) {
  const auto ps = test::bm25_paragraphs();
  const auto index = SparseIndex::build({ps[0], ps[1]}, analyzer());
  const auto ds = dataset_over(ps, {{"p1", "coffee?"}, {"p4", "voices?"}});
  const auto report = retriever_recall(index, ds, 2);
  EXPECT_DOUBLE_EQ(report.recall, 0.5);
  EXPECT_EQ(report.unindexed_qids, (std::vector<std::string>{"p4-q0"}));
}

TEST(RecallTest, MonotoneAndFullAtN) {
  std::mt19937 rng(17);
  for (int trial = 0; trial < 5; ++trial) {
    const auto ps = random_paragraphs(rng, 12);
    const auto index = SparseIndex::build(ps, analyzer());
    std::vector<std::pair<std::string, std::string>> qs;
    for (int i = 0; i < 20; ++i) qs.push_back({ps[rng() % 12].paragraph_id, random_paragraphs(rng, 1)[0].context});
    const auto ds = dataset_over(ps, qs);
    double previous = 0;
    for (std::size_t k = 1; k <= 12; ++k) {
      const double r = retriever_recall(index, ds, k).recall;
      EXPECT_GE(r, previous);
      EXPECT_GE(r, 0.0);
      EXPECT_LE(r, 1.0);
      previous = r;
    }
    EXPECT_DOUBLE_EQ(previous, 1.0);
  }
}

}  // namespace
}  // namespace forumqa::retrieval
