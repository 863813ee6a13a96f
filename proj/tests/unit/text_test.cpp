#include <gtest/gtest.h>

#include <fstream>

#include "forumqa/error.hpp"
#include "forumqa/text/porter_stemmer.hpp"
#include "forumqa/text/tokenizer.hpp"
#include "forumqa/text/vocabulary.hpp"
#include "forumqa/util/fileio.hpp"
#include "test_paths.hpp"

namespace forumqa::text {
namespace {

StopwordList default_stopwords() { return StopwordList::load(test::data_file("stopwords_en.txt")); }

TEST(TokenizeTest, DropsPunctuationNumbersAndStopwords) {
  const auto stop = default_stopwords();
  EXPECT_EQ(tokenize("I stopped 3 coffees!!", stop), (std::vector<std::string>{"stopped", "coffees"}));
  EXPECT_TRUE(tokenize("", stop).empty());
  EXPECT_TRUE(tokenize("The THE the", stop).empty());
}

TEST(TokenizeTest, SplitsOnApostrophesAndUnicodePunctuation) {
  EXPECT_EQ(split_words("Don't—stop “caffè” now… 42 mp3"),
            (std::vector<std::string>{"don", "t", "stop", "caffè", "now", "mp3"}));
}

TEST(TokenizeTest, SkipsPseudonymousAuthorReferences) {
  EXPECT_EQ(split_words("thanks u_542d8c1666b64cf6, see u_542d8c1666b64cf6"), (std::vector<std::string>{"thanks", "see"}));
  EXPECT_EQ(split_words("u_542d8c1666b64cf6x u_12"), (std::vector<std::string>{"u", "542d8c1666b64cf6x", "u"}));
  EXPECT_EQ(split_words("menu_542d8c1666b64cf6"), (std::vector<std::string>{"menu", "542d8c1666b64cf6"}));
}

TEST(PorterStemTest, PaperExamples) {
  EXPECT_EQ(porter_stem("apple"), "appl");
  EXPECT_EQ(porter_stem("apples"), "appl");
  EXPECT_EQ(porter_stem("run"), "run");
}

TEST(PorterStemTest, AgreesWithReferenceVocabularySample) {
  std::ifstream in(test::data_file("porter_sample.tsv"));
  ASSERT_TRUE(in);
  std::string line;
  int checked = 0;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    const auto tab = line.find('\t');
    const std::string word = line.substr(0, tab);
    EXPECT_EQ(porter_stem(word), line.substr(tab + 1)) << word;
    ++checked;
  }
  EXPECT_EQ(checked, 100);
}

TEST(PorterStemTest, Deterministic) {
  for (const char* w : {"hallucinations", "generalizations", "a", "is", "sky"})
    EXPECT_EQ(porter_stem(w), porter_stem(std::string(w)));
}

TEST(AnalyzerTest, StemsAfterTokenizing) {
  const Analyzer analyzer(default_stopwords());
  EXPECT_EQ(analyzer.analyze("Apples and APPLE hallucinations"),
            (std::vector<std::string>{"appl", "appl", "hallucin"}));
  EXPECT_EQ(analyzer.analyze("caffè"), (std::vector<std::string>{"caffè"}));
}

TEST(AnalyzerTest, ConfigHashTracksStopwords) {
  const Analyzer a(StopwordList({"the"}));
  const Analyzer b(StopwordList({"the"}));
  const Analyzer c(StopwordList({"the", "a"}));
  EXPECT_EQ(a.config_hash(), b.config_hash());
  EXPECT_NE(a.config_hash(), c.config_hash());
}

const std::vector<std::vector<std::string>> kTwoDocs = {{"a", "b"}, {"b", "c"}};

TEST(BuildVocabularyTest, CountsDocumentFrequency) {
  const auto v = build_vocabulary(kTwoDocs, 1, 1.0);
  EXPECT_EQ(v.size(), 3u);
  EXPECT_EQ(v.terms(), (std::vector<std::string>{"a", "b", "c"}));
  EXPECT_EQ(v.df(*v.id_of("b")), 2u);
}

TEST(BuildVocabularyTest, MinDfPrunes) {
  const auto v = build_vocabulary(kTwoDocs, 2, 1.0);
  EXPECT_EQ(v.terms(), (std::vector<std::string>{"b"}));
}

TEST(BuildVocabularyTest, MaxDfPrunes) {
  const auto v = build_vocabulary(kTwoDocs, 1, 0.5);
  EXPECT_EQ(v.terms(), (std::vector<std::string>{"a", "c"}));
}

TEST(BuildVocabularyTest, EdgeCases) {
  EXPECT_EQ(build_vocabulary({}, 1, 1.0).size(), 0u);
  EXPECT_THROW(build_vocabulary(kTwoDocs, 0, 1.0), ParameterError);
  EXPECT_THROW(build_vocabulary(kTwoDocs, 1, 0.0), ParameterError);
  EXPECT_THROW(build_vocabulary(kTwoDocs, 1, 1.5), ParameterError);
}

TEST(VectorizeTest, DropsOovAndKeepsOrder) {
  const Vocabulary v({"appl", "drink"}, {3, 1});
  EXPECT_EQ(vectorize("d", {"appl", "appl", "drink"}, v).token_ids.size(), 3u);
  EXPECT_TRUE(vectorize("d", {"x", "y"}, v).token_ids.empty());
  const auto mixed = vectorize("d", {"x", "drink", "zz", "appl"}, v);
  ASSERT_EQ(mixed.token_ids.size(), 2u);
  EXPECT_EQ(v.term(mixed.token_ids[0]), "drink");
  EXPECT_EQ(v.term(mixed.token_ids[1]), "appl");
}

TEST(VocabularyFileTest, TsvFormatAndRoundTrip) {
  const auto v = build_vocabulary(kTwoDocs, 1, 1.0);
  EXPECT_EQ(v.to_tsv(), "a\t0\t1\nb\t1\t2\nc\t2\t1\n");
  EXPECT_EQ(Vocabulary::from_tsv(v.to_tsv()), v);
  EXPECT_THROW(Vocabulary::from_tsv("a\t1\t1\n"), ValidationError);
}

TEST(BowFileTest, DeterministicBytes) {
  const std::vector<BowDocument> docs = {{"p1", {0, 2, 2}}, {"p2", {}}};
  const auto p1 = test::temp_path("bow1.jsonl");
  const auto p2 = test::temp_path("bow2.jsonl");
  write_bow(p1, docs);
  write_bow(p2, read_bow(p1));
  EXPECT_EQ(fileio::read_file(p1), fileio::read_file(p2));
  EXPECT_EQ(fileio::read_file(p1), "{\"doc_id\":\"p1\",\"token_ids\":[0,2,2]}\n{\"doc_id\":\"p2\",\"token_ids\":[]}\n");
}

TEST(PipelineDeterminismTest, NoStopwordsPunctuationOrNumbersSurvive) {
  const Analyzer analyzer(default_stopwords());
  const std::vector<std::string> texts = {"The 2 voices, they said: 'stop!'", "I can't sleep at 3am... 100%"};
  std::vector<std::vector<std::string>> docs;
  for (const auto& t : texts) docs.push_back(analyzer.analyze(t));
  const auto vocab = build_vocabulary(docs, 1, 1.0);
  for (const auto& term : vocab.terms()) {
    EXPECT_FALSE(analyzer.stopwords().contains(term)) << term;
    EXPECT_TRUE(std::none_of(term.begin(), term.end(), [](char c) { return std::ispunct(static_cast<unsigned char>(c)); }));
    EXPECT_FALSE(std::all_of(term.begin(), term.end(), [](char c) { return std::isdigit(static_cast<unsigned char>(c)); }));
  }
}

}  // namespace
}  // namespace forumqa::text
