#include <gtest/gtest.h>

#include <algorithm>
#include <map>
#include <random>

#include "forumqa/error.hpp"
#include "forumqa/evaluation/metrics.hpp"
#include "forumqa/util/utf8.hpp"
#include "synthetic_dataset.hpp"
#include "test_paths.hpp"

namespace forumqa::evaluation {
namespace {

using Tokens = std::vector<std::string>;

TEST(NormalizeAnswerTest, Rules) {
  EXPECT_EQ(normalize_answer("He is afraid to leave the house."), (Tokens{"he", "is", "afraid", "to", "leave", "house"}));
  EXPECT_TRUE(normalize_answer("").empty());
  EXPECT_TRUE(normalize_answer("The THE, the!").empty());
  EXPECT_EQ(normalize_answer("An apple a day"), (Tokens{"apple", "day"}));
  EXPECT_EQ(normalize_answer("don't  stop\tNOW"), (Tokens{"dont", "stop", "now"}));
  EXPECT_EQ(normalize_answer("theory anthem"), (Tokens{"theory", "anthem"}));
}

TEST(ExactMatchTest, Examples) {
  EXPECT_EQ(exact_match("He is afraid of leaving the house", {"He is afraid to leave the house"}), 0);
  EXPECT_EQ(exact_match("He is afraid to leave the house", {"He is afraid to leave the house"}), 1);
  EXPECT_EQ(exact_match("second", {"first", "Second.", "third"}), 1);
  EXPECT_EQ(exact_match("the house", {"House"}), 1);
}

TEST(TokenF1Test, Examples) {
  const auto s = token_f1("He is afraid of leaving the house", {"He is afraid to leave the house"});
  EXPECT_NEAR(s.precision, 4.0 / 6.0, 1e-12);
  EXPECT_NEAR(s.recall, 4.0 / 6.0, 1e-12);
  EXPECT_NEAR(s.f1, 2.0 / 3.0, 1e-12);

  const auto same = token_f1("Coffee keeps me awake", {"Coffee keeps me awake"});
  EXPECT_EQ(same.precision, 1.0);
  EXPECT_EQ(same.recall, 1.0);
  EXPECT_EQ(same.f1, 1.0);

  const auto disjoint = token_f1("coffee tea", {"voices sleep"});
  EXPECT_EQ(disjoint.precision, 0.0);
  EXPECT_EQ(disjoint.recall, 0.0);
  EXPECT_EQ(disjoint.f1, 0.0);
}

TEST(TokenF1Test, MultisetCountingAndBestGold) {
  // "a" is an article, so "coffee coffee tea" vs "coffee tea tea": common = {coffee, tea}.
  const auto s = token_f1("coffee coffee tea", {"coffee tea tea"});
  EXPECT_NEAR(s.precision, 2.0 / 3.0, 1e-12);
  EXPECT_NEAR(s.recall, 2.0 / 3.0, 1e-12);
  const auto best = token_f1("leave the house", {"voices", "leave house now", "leave house"});
  EXPECT_EQ(best.best_gold, 2u);
  EXPECT_EQ(best.f1, 1.0);
  EXPECT_EQ(token_f1("the", {"a"}).f1, 1.0);
  EXPECT_EQ(token_f1("the", {"house"}).f1, 0.0);
}

// Independent oracle: multiset intersection via sorted sequences.
double oracle_f1(const std::string& pred, const std::string& gold) {
  auto p = normalize_answer(pred);
  auto g = normalize_answer(gold);
  if (p.empty() || g.empty()) return p.empty() && g.empty() ? 1.0 : 0.0;
  std::sort(p.begin(), p.end());
  std::sort(g.begin(), g.end());
  Tokens common;
  std::set_intersection(p.begin(), p.end(), g.begin(), g.end(), std::back_inserter(common));
  if (common.empty()) return 0.0;
  const double prec = static_cast<double>(common.size()) / p.size();
  const double rec = static_cast<double>(common.size()) / g.size();
  return 2 * prec * rec / (prec + rec);
}

std::string random_answer(std::mt19937_64& rng) {
  static const std::vector<std::string> words = {"the", "a", "coffee", "Tea", "tea,", "voices", "house.", "He", "is",
                                                 "afraid", "leave", "sleep!", "an", "night"};
  std::uniform_int_distribution<std::size_t> len(0, 6), pick(0, words.size() - 1);
  std::string s;
  for (std::size_t i = 0, n = len(rng); i < n; ++i) s += (i ? " " : "") + words[pick(rng)];
  return s;
}

TEST(TokenF1Test, PropertiesOnRandomAnswers) {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 2000; ++trial) {
    const auto pred = random_answer(rng);
    std::vector<std::string> golds = {random_answer(rng)};
    const auto s = token_f1(pred, golds);
    const int em = exact_match(pred, golds);
    EXPECT_NEAR(s.f1, oracle_f1(pred, golds[0]), 1e-12) << pred << " | " << golds[0];
    for (double v : {s.precision, s.recall, s.f1}) {
      EXPECT_GE(v, 0.0);
      EXPECT_LE(v, 1.0);
    }
    EXPECT_LE(em, s.f1);
    if (!normalize_answer(pred).empty()) {
      const auto self = token_f1(pred, {pred});
      EXPECT_EQ(self.precision, 1.0);
      EXPECT_EQ(self.recall, 1.0);
      EXPECT_EQ(self.f1, 1.0);
    }
    golds.push_back(random_answer(rng));
    EXPECT_GE(token_f1(pred, golds).f1, s.f1);
    EXPECT_GE(exact_match(pred, golds), em);
  }
}

// Returns a fixed span per qid, located in the first passage that contains it.
class ScriptedReader : public reader::Reader {
 public:
  explicit ScriptedReader(std::map<std::string, std::string> spans) : spans_(std::move(spans)) {}
  reader::ReaderResult answer(const reader::ReaderRequest& r) override {
    reader::ReaderResult result;
    auto it = spans_.find(r.qid);
    if (it == spans_.end()) return result;
    for (const auto& p : r.passages) {
      const auto at = p.text.find(it->second);
      if (at == std::string::npos) continue;
      const auto start = utf8::char_index(p.text, at);
      result.predictions.push_back({it->second, 0.5, p.id, start, start + utf8::length(it->second), 0});
      break;
    }
    return result;
  }
  std::string name() const override { return "scripted"; }

 private:
  std::map<std::string, std::string> spans_;
};

text::Analyzer analyzer() { return text::Analyzer(text::StopwordList::load(test::data_file("stopwords_en.txt"))); }

struct HandCase {
  std::vector<std::string> golds;
  std::string prediction;  // empty: reader returns nothing
};

TEST(EvaluateDatasetTest, TenHandScoredQuestions) {
  const std::string context =
      "He is afraid to leave the house. He is afraid of leaving the house. Coffee keeps me awake at night. "
      "Voices talk loudly. My family helps me every day.";
  const std::vector<HandCase> cases = {
      {{"He is afraid to leave the house"}, "He is afraid to leave the house"},
      {{"He is afraid to leave the house"}, "He is afraid of leaving the house"},
      {{"Coffee keeps me awake"}, "Coffee keeps me awake at night"},
      {{"Voices talk loudly"}, "family helps"},
      {{"My family helps me"}, "family"},
      {{"every day", "My family helps me every day"}, "every day."},
      {{"Voices talk loudly"}, ""},
      {{"awake at night"}, "at night"},
      {{"the house"}, "house"},
      {{"Voices"}, "Voices talk loudly"},
  };
  qa::QADataset ds;
  ds.data.push_back({"topic-0", {{"topic-0-0", 0, context, {}}}});
  std::map<std::string, std::string> spans;
  for (std::size_t i = 0; i < cases.size(); ++i) {
    const auto qid = qa::add_question(ds, "topic-0-0", {"", "Question " + std::to_string(i) + "?", "x", "t", false, {}});
    for (const auto& g : cases[i].golds) {
      std::size_t at = context.find(g);
      if (i == 5 && g == "every day") at = context.rfind(g);
      qa::add_answer(ds, qid, at, at + g.size());
    }
    if (!cases[i].prediction.empty()) spans[qid] = cases[i].prediction;
  }
  const auto index = retrieval::SparseIndex::build({{"topic-0-0", 0, context, {}, 26}}, analyzer());
  ScriptedReader reader(spans);
  const auto report = evaluate_dataset(ds, index, reader);

  ASSERT_EQ(report.questions.size(), 10u);
  EXPECT_NEAR(report.em, 0.3, 1e-12);
  EXPECT_NEAR(report.precision, 2.0 / 3.0, 1e-12);
  EXPECT_NEAR(report.recall, 79.0 / 120.0, 1e-12);
  EXPECT_NEAR(report.f1, 37.0 / 60.0, 1e-12);
  EXPECT_NEAR(report.confidence, 0.45, 1e-12);
  EXPECT_EQ(report.no_prediction, 1u);
  EXPECT_TRUE(report.questions[6].no_prediction);
  EXPECT_EQ(report.questions[6].f1, 0.0);
  EXPECT_EQ(report.questions[5].best_gold_matched, "every day");
  EXPECT_EQ(report.retriever_recall, 1.0);
  EXPECT_EQ(report.model, "scripted");
  EXPECT_EQ(report.config.at("retriever_k"), 35);
  EXPECT_EQ(report.config.at("reader_k"), 10);
  EXPECT_EQ(report.split_hash, qa::split_hash(ds));

  for (const auto& q : report.questions) EXPECT_LE(q.em, q.f1);

  EvalSettings parallel;
  parallel.threads = 4;
  const auto again = evaluate_dataset(ds, index, reader, parallel);
  EXPECT_EQ(again.questions, report.questions);
  EXPECT_EQ(to_json(again), to_json(report));
}

TEST(EvaluateDatasetTest, OracleScoresPerfectly) {
  const auto ds = test::synthetic_dataset(3, 4);
  std::vector<segment::TopicParagraph> paragraphs;
  for (const auto& a : ds.data)
    for (const auto& p : a.paragraphs) paragraphs.push_back({p.paragraph_id, p.topic_id, p.context, {}, 8});
  const auto index = retrieval::SparseIndex::build(paragraphs, analyzer());
  reader::OracleReader oracle(ds);
  const auto report = evaluate_dataset(ds, index, oracle);
  EXPECT_EQ(report.em, 1.0);
  EXPECT_EQ(report.f1, 1.0);
  EXPECT_EQ(report.precision, 1.0);
  EXPECT_EQ(report.recall, 1.0);
}

TEST(EvaluateDatasetTest, SilentReaderScoresZero) {
  const auto ds = test::synthetic_dataset(2, 3);
  std::vector<segment::TopicParagraph> paragraphs;
  for (const auto& a : ds.data)
    for (const auto& p : a.paragraphs) paragraphs.push_back({p.paragraph_id, p.topic_id, p.context, {}, 6});
  const auto index = retrieval::SparseIndex::build(paragraphs, analyzer());
  ScriptedReader silent({});
  EvalSettings settings;
  settings.model = "silent";
  settings.retriever_k = 1;
  settings.config = {{"seed", 3}};
  const auto report = evaluate_dataset(ds, index, silent, settings);
  EXPECT_EQ(report.em + report.f1 + report.precision + report.recall, 0.0);
  EXPECT_EQ(report.no_prediction, 6u);
  EXPECT_EQ(report.model, "silent");
  EXPECT_EQ(report.config.at("seed"), 3);
  EXPECT_EQ(report.config.at("retriever_k"), 1);
}

TEST(EvaluateDatasetTest, QuestionsWithoutAnswersAreSkipped) {
  auto ds = test::synthetic_dataset(1, 2);
  const auto extra = qa::add_question(ds, "topic-0-0", {"", "Unanswered?", "x", "t", false, {}});
  const auto index = retrieval::SparseIndex::build(
      {{"topic-0-0", 0, ds.data[0].paragraphs[0].context, {}, 4}}, analyzer());
  reader::OracleReader oracle(ds);
  const auto report = evaluate_dataset(ds, index, oracle);
  EXPECT_EQ(report.questions.size(), 2u);
  EXPECT_EQ(report.skipped_qids, std::vector<std::string>{extra});
}

TEST(MetricReportTest, JsonRoundTripAndTable) {
  MetricReport r;
  r.model = "BioBERT";
  r.questions = {{"q1", "x", 1, 1.0, 1.0, 1.0, 0.9, "x", false}, {"q2", "", 0, 0, 0, 0, 0, "", true}};
  r.aggregate();
  r.retriever_recall = 0.75;
  r.split_hash = "abc";
  r.config = {{"retriever_k", 35}};
  const auto back = report_from_json(to_json(r));
  EXPECT_EQ(to_json(back), to_json(r));
  EXPECT_EQ(back.no_prediction, 1u);
  EXPECT_EQ(back.em, 0.5);

  const auto table = render_table({r});
  const auto header = table.substr(0, table.find('\n'));
  const auto p = header.find("Precision"), f = header.find("F1"), rc = header.find("Recall"), em = header.find("EM");
  EXPECT_EQ(header.rfind("Models", 0), 0u);
  EXPECT_LT(p, f);
  EXPECT_LT(f, rc);
  EXPECT_LT(rc, em);
  EXPECT_NE(table.find("BioBERT"), std::string::npos);
  EXPECT_NE(table.find("0.500"), std::string::npos);
  EXPECT_THROW(report_from_json({{"model", "x"}}), ValidationError);
}

MetricReport published(std::string model, double precision, double f1, double recall, double em) {
  MetricReport r;
  r.model = std::move(model);
  r.precision = precision;
  r.f1 = f1;
  r.recall = recall;
  r.em = em;
  r.split_hash = "same";
  return r;
}

TEST(CompareRunsTest, PercentChange) {
  const auto a = published("BioBERT", 0.790, 0.5, 0.5, 0.0);
  const auto b = published("BioBERT fine-tuned", 0.903, 0.885, 0.916, 0.617);
  const auto c = compare_runs(a, b, "Precision");
  ASSERT_EQ(c.rows.size(), 1u);
  EXPECT_EQ(c.rows[0].display(), "+14.30%");
  EXPECT_NEAR(*c.rows[0].percent, 100.0 * 0.113 / 0.790, 1e-9);

  const auto all = compare_runs(a, b);
  ASSERT_EQ(all.rows.size(), report_columns().size());
  EXPECT_EQ(all.rows[3].metric, "EM");
  EXPECT_EQ(all.rows[3].display(), "undefined");
  EXPECT_TRUE(to_json(all)["rows"][3]["percent_change"].is_null());
  EXPECT_EQ(compare_runs(b, a, "Precision").rows[0].display(), "-12.51%");

  for (const auto& row : compare_runs(b, b).rows)
    if (row.a != 0.0) EXPECT_EQ(row.display(), "+0.00%");
}

TEST(CompareRunsTest, Errors) {
  auto a = published("A", 0.5, 0.5, 0.5, 0.5);
  auto b = published("B", 0.6, 0.6, 0.6, 0.6);
  b.split_hash = "other";
  EXPECT_THROW(compare_runs(a, b), ValidationError);
  b.split_hash = a.split_hash;
  EXPECT_THROW(compare_runs(a, b, "Accuracy"), ParameterError);
  EXPECT_NE(render_comparison(compare_runs(a, b)).find("+20.00%"), std::string::npos);
}

}  // namespace
}  // namespace forumqa::evaluation
