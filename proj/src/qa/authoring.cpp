#include "forumqa/qa/authoring.hpp"

#include <algorithm>
#include <cctype>

#include "forumqa/error.hpp"
#include "forumqa/util/fileio.hpp"
#include "forumqa/util/utf8.hpp"

namespace forumqa::qa {

namespace {

constexpr std::string_view kFallback = "What about {aspect}?";

std::string fill(std::string_view tmpl, const std::string& aspect) {
  std::string out;
  std::size_t pos = 0;
  while (true) {
    const auto slot = tmpl.find("{aspect}", pos);
    out.append(tmpl.substr(pos, slot == std::string_view::npos ? std::string_view::npos : slot - pos));
    if (slot == std::string_view::npos) return out;
    out += aspect;
    pos = slot + 8;
  }
}

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
  return s;
}

}  // namespace

TemplateSet::TemplateSet(std::vector<QuestionTemplate> templates) : templates_(std::move(templates)) {
  for (const auto& t : templates_) {
    try {
      patterns_.emplace_back(t.aspect_pattern, std::regex::ECMAScript | std::regex::icase);
    } catch (const std::regex_error& e) {
      throw ValidationError("bad aspect pattern '" + t.aspect_pattern + "': " + e.what());
    }
    const auto trimmed_end = t.question_template.find_last_not_of(" \t\n");
    if (trimmed_end == std::string::npos || t.question_template[trimmed_end] != '?')
      throw ValidationError("question template '" + t.question_template + "' must end with '?'");
  }
}

TemplateSet TemplateSet::from_json(const nlohmann::json& j) {
  std::vector<QuestionTemplate> templates;
  try {
    for (const auto& t : j)
      templates.push_back({t.at("aspect_pattern").get<std::string>(), t.at("question_template").get<std::string>()});
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("bad template file: ") + e.what());
  }
  return TemplateSet(std::move(templates));
}

TemplateSet TemplateSet::load(const std::string& path) { return from_json(fileio::read_json(path)); }

RenderedQuestion TemplateSet::render(const std::string& aspect) const {
  for (std::size_t i = 0; i < templates_.size(); ++i)
    if (std::regex_match(aspect, patterns_[i])) return {fill(templates_[i].question_template, aspect), templates_[i].aspect_pattern, false};
  return {fill(kFallback, aspect), "default", true};
}

std::vector<QAItem> propose_questions(const segment::TopicParagraph& paragraph, const lda::TopicAspects& aspects,
                                      const TemplateSet& templates) {
  std::vector<QAItem> drafts;
  for (const auto& aspect : aspects.aspects) {
    const auto r = templates.render(aspect);
    drafts.push_back({paragraph.paragraph_id + "-q" + std::to_string(drafts.size()), r.question, aspect, r.question_type,
                      r.needs_review, {}});
  }
  return drafts;
}

std::vector<AnnotationRecord> read_annotation_records(const std::string& path) {
  std::vector<AnnotationRecord> out;
  for (const auto& row : fileio::read_jsonl(path)) {
    try {
      out.push_back({row.at("post_id").get<std::string>(), row.at("question").get<std::string>(),
                     row.at("answer").get<std::string>(), row.value("aspect", "")});
    } catch (const nlohmann::json::exception& e) {
      throw ValidationError(path + ": bad annotation record: " + e.what());
    }
  }
  return out;
}

ImportReport import_annotations(QADataset& dataset, const std::vector<segment::TopicParagraph>& paragraphs,
                                const std::vector<AnnotationRecord>& records, const std::vector<lda::TopicAspects>& aspects,
                                const TemplateSet& templates) {
  std::map<Topic, const std::vector<std::string>*> topic_aspects;
  for (const auto& t : aspects) topic_aspects[t.topic_id] = &t.aspects;

  ImportReport report;
  for (std::size_t r = 0; r < records.size(); ++r) {
    const auto& rec = records[r];
    const std::string where = "record " + std::to_string(r + 1) + " (post " + rec.post_id + "): ";
    if (rec.answer.empty() || rec.question.empty()) {
      report.skipped.push_back(where + "empty question or answer");
      continue;
    }
    const segment::TopicParagraph* home = nullptr;
    std::size_t byte = 0;
    for (const auto& p : paragraphs) {
      if (std::find(p.member_post_ids.begin(), p.member_post_ids.end(), rec.post_id) == p.member_post_ids.end()) continue;
      const auto at = p.context.find(rec.answer);
      if (at == std::string::npos) continue;
      home = &p;
      byte = at;
      break;
    }
    if (!home) {
      report.skipped.push_back(where + "answer text not found in any paragraph holding the post");
      continue;
    }
    if (!dataset.find_paragraph(home->paragraph_id)) {
      report.skipped.push_back(where + "paragraph " + home->paragraph_id + " is not in the dataset");
      continue;
    }

    std::string aspect = rec.aspect;
    if (aspect.empty()) {
      const auto it = topic_aspects.find(home->topic_id);
      const std::string q = lower(rec.question);
      if (it != topic_aspects.end())
        for (const auto& a : *it->second)
          if (q.find(lower(a)) != std::string::npos) {
            aspect = a;
            break;
          }
      if (aspect.empty()) {
        report.skipped.push_back(where + "no aspect given and none occurs in the question");
        continue;
      }
    }

    QAParagraph* para = dataset.find_paragraph(home->paragraph_id);
    std::string qid;
    for (const auto& q : para->qas)
      if (q.question == rec.question) qid = q.qid;
    const bool fresh = qid.empty();
    if (fresh) {
      const auto rendered = templates.render(aspect);
      qid = add_question(dataset, home->paragraph_id, {"", rec.question, aspect, rendered.question_type, false, {}});
    }
    const std::size_t start = utf8::char_index(home->context, byte);
    const std::size_t end = start + utf8::length(rec.answer);
    try {
      add_answer(dataset, qid, start, end);
      ++report.answers_added;
      if (fresh) ++report.questions_added;
    } catch (const ValidationError& e) {
      report.skipped.push_back(where + e.what());
      if (fresh) para->qas.pop_back();
    }
  }
  return report;
}

}  // namespace forumqa::qa
