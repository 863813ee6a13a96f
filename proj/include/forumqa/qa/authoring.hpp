#pragma once

#include <regex>
#include <string>
#include <vector>

#include <json.hpp>

#include "forumqa/lda/aspects.hpp"
#include "forumqa/qa/dataset.hpp"
#include "forumqa/segment/segmenter.hpp"

namespace forumqa::qa {

struct QuestionTemplate {
  std::string aspect_pattern;     // regex, matched case-insensitively against the whole aspect
  std::string question_template;  // "{aspect}" is replaced by the aspect
};

struct RenderedQuestion {
  std::string question;
  std::string question_type;  // the matching template's pattern, or "default"
  bool needs_review = false;  // rendered by the fallback template
};

class TemplateSet {
 public:
  TemplateSet() = default;
  // Throws ValidationError for a bad pattern or a template that does not end in '?'.
  explicit TemplateSet(std::vector<QuestionTemplate> templates);

  // JSON list of {aspect_pattern, question_template}.
  static TemplateSet from_json(const nlohmann::json& j);
  static TemplateSet load(const std::string& path);

  // First matching template wins; unmatched aspects get "What about {aspect}?".
  RenderedQuestion render(const std::string& aspect) const;

  const std::vector<QuestionTemplate>& templates() const { return templates_; }

 private:
  std::vector<QuestionTemplate> templates_;
  std::vector<std::regex> patterns_;
};

// One unanswered draft per aspect, qids "{paragraph_id}-q{n}".
std::vector<QAItem> propose_questions(const segment::TopicParagraph& paragraph, const lda::TopicAspects& aspects,
                                      const TemplateSet& templates);

/// A recorded human annotation: the answer is given as text and located in
/// a paragraph that contains the post.
struct AnnotationRecord {
  std::string post_id;
  std::string question;
  std::string answer;
  std::string aspect;  // optional; inferred from the question when empty
};

std::vector<AnnotationRecord> read_annotation_records(const std::string& path);

struct ImportReport {
  std::size_t questions_added = 0;
  std::size_t answers_added = 0;
  std::vector<std::string> skipped;  // one reason per rejected record
};

/// Places each record in the first paragraph (in `paragraphs` order) that
/// holds the post and contains the answer text, reusing a question with the
/// same text in that paragraph or adding a new one. An aspect left empty is
/// inferred as the first topic aspect occurring in the question.
ImportReport import_annotations(QADataset& dataset, const std::vector<segment::TopicParagraph>& paragraphs,
                                const std::vector<AnnotationRecord>& records, const std::vector<lda::TopicAspects>& aspects,
                                const TemplateSet& templates);

}  // namespace forumqa::qa
