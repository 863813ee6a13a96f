#include <gtest/gtest.h>

#include <set>

#include "forumqa/error.hpp"
#include "forumqa/qa/authoring.hpp"
#include "forumqa/qa/dataset.hpp"
#include "forumqa/util/fileio.hpp"
#include "synthetic_dataset.hpp"
#include "test_paths.hpp"

namespace forumqa::qa {
namespace {

QADataset golden() { return load_dataset(test::fixture("golden_squad.json")); }

QADataset one_paragraph(const std::string& context) {
  QADataset ds;
  ds.data.push_back({"topic-0", {{"topic-0-0", 0, context, {}}}});
  return ds;
}

TEST(TemplateTest, RendersPaperQuestions) {
  const auto templates = TemplateSet::load(test::data_file("templates.json"));
  EXPECT_EQ(templates.render("afraid of").question, "What is a schizophrenic afraid of?");
  EXPECT_EQ(templates.render("drinking").question, "What does a schizophrenic stop with?");
  EXPECT_EQ(templates.render("Hallucinations").question, "What helps with Hallucinations?");
  EXPECT_FALSE(templates.render("drinking").needs_review);
}

TEST(TemplateTest, FallbackIsFlagged) {
  const TemplateSet templates(std::vector<QuestionTemplate>{{"afraid of", "What is a schizophrenic afraid of?"}});
  const auto r = templates.render("gardening");
  EXPECT_EQ(r.question, "What about gardening?");
  EXPECT_EQ(r.question_type, "default");
  EXPECT_TRUE(r.needs_review);
  // Full match only.
  EXPECT_TRUE(templates.render("very afraid of").needs_review);
}

TEST(TemplateTest, RejectsBadTemplates) {
  EXPECT_THROW(TemplateSet(std::vector<QuestionTemplate>{{"(", "Why?"}}), ValidationError);
  EXPECT_THROW(TemplateSet(std::vector<QuestionTemplate>{{"x", "Not a question"}}), ValidationError);
  EXPECT_THROW(TemplateSet::from_json(nlohmann::json::parse(R"([{"aspect_pattern":"x"}])")), ValidationError);
}

TEST(ProposeQuestionsTest, OneDraftPerAspect) {
  const auto templates = TemplateSet::load(test::data_file("templates.json"));
  const segment::TopicParagraph p{"topic-3-1", 3, "text", {}, 1};
  const auto drafts = propose_questions(p, {3, {"afraid of", "drinking", "garden"}}, templates);
  ASSERT_EQ(drafts.size(), 3u);
  EXPECT_EQ(drafts[0].qid, "topic-3-1-q0");
  EXPECT_EQ(drafts[0].question, "What is a schizophrenic afraid of?");
  EXPECT_EQ(drafts[1].question, "What does a schizophrenic stop with?");
  EXPECT_TRUE(drafts[2].needs_review);
  EXPECT_TRUE(drafts[2].answers.empty());
  EXPECT_TRUE(propose_questions(p, {3, {}}, templates).empty());
}

TEST(AddAnswerTest, ExactSubstringAndNWay) {
  auto ds = one_paragraph("Posts say… He is afraid to leave the house. Others disagree.");
  const auto qid = add_question(ds, "topic-0-0", {"", "What is a schizophrenic afraid of?", "afraid of", "afraid of", false, {}});
  EXPECT_EQ(qid, "topic-0-0-q0");
  const auto id = add_answer(ds, qid, 11, 42);
  EXPECT_EQ(id, "topic-0-0-q0@11-42");
  EXPECT_EQ(ds.find_question(qid).second->answers[0].text, "He is afraid to leave the house");
  add_answer(ds, qid, 17, 42);
  EXPECT_EQ(ds.find_question(qid).second->answers.size(), 2u);
  EXPECT_TRUE(validate(ds).empty());
}

TEST(AddAnswerTest, RejectsBadSpans) {
  auto ds = one_paragraph("Short context here.");
  const auto qid = add_question(ds, "topic-0-0", {"", "Q?", "a", "t", false, {}});
  EXPECT_THROW(add_answer(ds, qid, 10, 5), ValidationError);
  EXPECT_THROW(add_answer(ds, qid, 3, 3), ValidationError);
  EXPECT_THROW(add_answer(ds, qid, 0, 100), ValidationError);
  EXPECT_THROW(add_answer(ds, qid, 5, 6), ValidationError);  // the space
  EXPECT_THROW(add_answer(ds, "nope", 0, 5), NotFoundError);
  add_answer(ds, qid, 0, 5);
  EXPECT_THROW(add_answer(ds, qid, 0, 5), ValidationError);
  EXPECT_THROW(add_question(ds, "topic-0-0", {"", "  ", "a", "t", false, {}}), ValidationError);
  EXPECT_THROW(add_question(ds, "topic-9-9", {"", "Q?", "a", "t", false, {}}), NotFoundError);
}

TEST(AddAnswerTest, OffsetsCountCodePoints) {
  auto ds = one_paragraph("Tea 🍵 and café: calm");
  const auto qid = add_question(ds, "topic-0-0", {"", "Q?", "a", "t", false, {}});
  add_answer(ds, qid, 16, 20);
  EXPECT_EQ(ds.find_question(qid).second->answers[0].text, "calm");
  add_answer(ds, qid, 4, 5);
  EXPECT_EQ(ds.find_question(qid).second->answers[1].text, "🍵");
}

TEST(AddAnswerTest, RemoveAnswer) {
  auto ds = one_paragraph("One two three.");
  const auto qid = add_question(ds, "topic-0-0", {"", "Q?", "a", "t", false, {}});
  const auto id = add_answer(ds, qid, 0, 3);
  remove_answer(ds, id);
  EXPECT_TRUE(ds.find_question(qid).second->answers.empty());
  EXPECT_THROW(remove_answer(ds, id), NotFoundError);
}

TEST(AddQuestionTest, QidsStayUniqueAfterRemovals) {
  auto ds = one_paragraph("Text.");
  add_question(ds, "topic-0-0", {"", "A?", "a", "t", false, {}});
  add_question(ds, "topic-0-0", {"", "B?", "a", "t", false, {}});
  ds.data[0].paragraphs[0].qas.erase(ds.data[0].paragraphs[0].qas.begin());
  EXPECT_EQ(add_question(ds, "topic-0-0", {"", "C?", "a", "t", false, {}}), "topic-0-0-q2");
}

TEST(ValidateTest, GoldenIsClean) { EXPECT_TRUE(validate(golden()).empty()); }

TEST(ValidateTest, OffByOneNamesTheQuestion) {
  auto ds = golden();
  ds.data[1].paragraphs[0].qas[1].answers[0].answer_start += 1;
  const auto report = validate(ds);
  ASSERT_EQ(report.size(), 1u);
  EXPECT_EQ(report[0].qid, ds.data[1].paragraphs[0].qas[1].qid);
}

TEST(ValidateTest, ReportsEveryKindOfViolation) {
  auto ds = golden();
  auto& qas = ds.data[0].paragraphs[0].qas;
  qas[1].qid = qas[0].qid;
  qas[2].question = " ";
  ds.data[0].paragraphs[1].qas[0].answers.clear();
  ds.data[0].paragraphs[1].qas[1].answers[0].answer_start = 100000;
  const auto report = validate(ds);
  std::set<std::string> reasons;
  for (const auto& v : report) reasons.insert(v.reason.substr(0, 12));
  EXPECT_EQ(report.size(), 4u);
  EXPECT_TRUE(reasons.count("duplicate qi"));
  EXPECT_TRUE(reasons.count("empty questi"));
  EXPECT_TRUE(reasons.count("no answers"));
}

TEST(ValidateTest, AspectMembershipAndTypeCount) {
  auto ds = golden();
  AspectSets aspects = {{0, {"afraid of", "sleep", "trips", "memory", "doctor"}},
                        {1, {"drinking", "hallucinations"}},
                        {2, {"family"}}};
  auto report = validate(ds, &aspects);
  ASSERT_EQ(report.size(), 1u);
  EXPECT_EQ(report[0].qid, "topic-2-0-q1");
  ds.data[2].paragraphs[0].qas[0].question_type = "t1";
  ds.data[2].paragraphs[0].qas[1].question_type = "t2";
  report = validate(ds);
  ASSERT_EQ(report.size(), 1u);
  EXPECT_EQ(report[0].qid, "");
}

TEST(SerializationTest, GoldenRoundTripIsByteIdentical) {
  const std::string bytes = fileio::read_file(test::fixture("golden_squad.json"));
  EXPECT_EQ(fileio::dump_stable(to_json(dataset_from_json(nlohmann::json::parse(bytes)))), bytes);
  const auto path = test::temp_path("golden_copy.json");
  save_dataset(path, golden());
  EXPECT_EQ(fileio::read_file(path), bytes);
  EXPECT_EQ(load_dataset(path), golden());
}

TEST(SerializationTest, StructuralErrors) {
  EXPECT_THROW(dataset_from_json(nlohmann::json::parse(R"({"data":[]})")), ValidationError);
  EXPECT_THROW(dataset_from_json(nlohmann::json::parse(R"({"version":"1.1","data":[{"title":"x"}]})")), ValidationError);
}

TEST(StatsTest, EmptyAndSmallFixture) {
  const auto empty = dataset_stats({});
  EXPECT_EQ(empty.contexts, 0u);
  EXPECT_EQ(empty.questions, 0u);
  EXPECT_EQ(empty.qa_pairs, 0u);
  const auto s = dataset_stats(test::synthetic_dataset(2, 2), 10);
  EXPECT_EQ(s.contexts, 2u);
  EXPECT_EQ(s.questions, 4u);
  EXPECT_EQ(s.qa_pairs, 4u);
  EXPECT_EQ(s.posts, 10u);
  EXPECT_EQ(s.topic_paragraphs, 2u);
  const auto g = dataset_stats(golden());
  EXPECT_EQ(g.questions, 9u);
  EXPECT_EQ(g.qa_pairs, 12u);
  EXPECT_EQ(g.question_types, 3u);
  const auto j = g.to_json();
  for (const char* row : {"Posts", "Max seq words", "Topics paragraph", "Types of questions", "Question and Answer"})
    EXPECT_TRUE(j.contains(row)) << row;
}

TEST(SplitTest, PaperScaleArithmetic) {
  const auto ds = test::synthetic_dataset(35, 30);
  ASSERT_EQ(ds.question_count(), 1050u);
  const auto split = split_train_eval(ds, 0.7, 1);
  EXPECT_EQ(split.train.question_count(), 735u);
  EXPECT_EQ(split.eval.question_count(), 315u);
}

TEST(SplitTest, UnevenTopicsStillHitTheRoundedTotal) {
  auto ds = test::synthetic_dataset(7, 4);  // 28 questions, 0.7 -> 19.6 -> 20
  auto split = split_train_eval(ds, 0.7, 5);
  EXPECT_EQ(split.train.question_count(), 20u);
  EXPECT_EQ(split.eval.question_count(), 8u);
  // The per-topic bound wins when the rounded total is out of reach.
  split = split_train_eval(test::synthetic_dataset(7, 3), 0.7, 5);
  EXPECT_EQ(split.train.question_count(), 14u);
  for (const auto& article : split.eval.data) EXPECT_FALSE(article.paragraphs.empty());
}

TEST(SplitTest, TwoQuestionTopicSplitsEvenly) {
  const auto split = split_train_eval(test::synthetic_dataset(1, 2), 0.5, 3);
  EXPECT_EQ(split.train.question_count(), 1u);
  EXPECT_EQ(split.eval.question_count(), 1u);
}

TEST(SplitTest, SingleQuestionTopicGoesToTrainWithWarning) {
  auto ds = test::synthetic_dataset(3, 4);
  ds.data[1].paragraphs[0].qas.resize(1);
  const auto split = split_train_eval(ds, 0.7, 3);
  ASSERT_EQ(split.warnings.size(), 1u);
  EXPECT_NE(split.warnings[0].find("topic 1"), std::string::npos);
  EXPECT_TRUE(split.train.find_paragraph("topic-1-0"));
  EXPECT_FALSE(split.eval.find_paragraph("topic-1-0"));
}

TEST(SplitTest, DeterministicDisjointAndComplete) {
  auto ds = test::synthetic_dataset(5, 9);
  add_answer(ds, "topic-0-0-q0", 0, 4);  // a second answer travels with its question
  const auto a = split_train_eval(ds, 0.7, 42);
  const auto b = split_train_eval(ds, 0.7, 42);
  EXPECT_EQ(a.train, b.train);
  EXPECT_EQ(a.eval, b.eval);
  EXPECT_NE(split_train_eval(ds, 0.7, 43).eval.qids(), a.eval.qids());
  const auto train_ids = a.train.qids();
  std::set<std::string> train(train_ids.begin(), train_ids.end());
  std::set<std::string> all;
  for (const auto& q : a.train.qids()) all.insert(q);
  for (const auto& q : a.eval.qids()) {
    EXPECT_FALSE(train.count(q));
    all.insert(q);
  }
  EXPECT_EQ(all.size(), ds.question_count());
  const auto [p, q] = (a.train.find_question("topic-0-0-q0").second ? a.train : a.eval).find_question("topic-0-0-q0");
  EXPECT_EQ(q->answers.size(), 2u);
  EXPECT_THROW(split_train_eval(ds, 1.0, 1), ParameterError);
  EXPECT_THROW(split_train_eval(ds, 0.0, 1), ParameterError);
}

TEST(ImportAnnotationsTest, PlacesAnswersInParagraphs) {
  const std::vector<segment::TopicParagraph> paragraphs = {
      {"topic-0-0", 0, "Café first. He is afraid to leave the house.", {"p1", "p2"}, 9},
      {"topic-1-0", 1, "I stopped drinking coffee.", {"p3"}, 4}};
  auto ds = dataset_from_paragraphs(paragraphs);
  const std::vector<lda::TopicAspects> aspects = {{0, {"afraid of", "house"}}, {1, {"drinking"}}};
  const TemplateSet templates(std::vector<QuestionTemplate>{{"afraid of", "What is a schizophrenic afraid of?"}});
  const std::vector<AnnotationRecord> records = {
      {"p2", "What is a schizophrenic afraid of?", "He is afraid to leave the house", ""},
      {"p2", "What is a schizophrenic afraid of?", "afraid to leave", ""},
      {"p3", "What does a schizophrenic stop with?", "coffee", "drinking"},
      {"p3", "What does a schizophrenic stop with?", "coffee", "drinking"},
      {"p1", "Anything?", "not there", "house"},
      {"p3", "Unrelated?", "stopped", ""}};
  const auto report = import_annotations(ds, paragraphs, records, aspects, templates);
  EXPECT_EQ(report.questions_added, 2u);
  EXPECT_EQ(report.answers_added, 3u);
  EXPECT_EQ(report.skipped.size(), 3u);
  const auto [p, q] = ds.find_question("topic-0-0-q0");
  ASSERT_TRUE(q);
  EXPECT_EQ(q->aspect, "afraid of");
  EXPECT_EQ(q->question_type, "afraid of");
  EXPECT_EQ(q->answers[0].answer_start, 12u);
  EXPECT_EQ(ds.find_question("topic-1-0-q0").second->question_type, "default");
  EXPECT_TRUE(validate(ds).empty());
}

}  // namespace
}  // namespace forumqa::qa
