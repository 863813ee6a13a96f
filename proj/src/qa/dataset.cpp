#include "forumqa/qa/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include "forumqa/error.hpp"
#include "forumqa/ingest/cleaning.hpp"
#include "forumqa/util/fileio.hpp"
#include "forumqa/util/hash.hpp"
#include "forumqa/util/utf8.hpp"

namespace forumqa::qa {

QAParagraph* QADataset::find_paragraph(const std::string& paragraph_id) {
  for (auto& article : data)
    for (auto& p : article.paragraphs)
      if (p.paragraph_id == paragraph_id) return &p;
  return nullptr;
}

const QAParagraph* QADataset::find_paragraph(const std::string& paragraph_id) const {
  return const_cast<QADataset*>(this)->find_paragraph(paragraph_id);
}

std::pair<QAParagraph*, QAItem*> QADataset::find_question(const std::string& qid) {
  for (auto& article : data)
    for (auto& p : article.paragraphs)
      for (auto& q : p.qas)
        if (q.qid == qid) return {&p, &q};
  return {nullptr, nullptr};
}

std::pair<const QAParagraph*, const QAItem*> QADataset::find_question(const std::string& qid) const {
  return const_cast<QADataset*>(this)->find_question(qid);
}

std::size_t QADataset::question_count() const {
  std::size_t n = 0;
  for (const auto& a : data)
    for (const auto& p : a.paragraphs) n += p.qas.size();
  return n;
}

std::size_t QADataset::answer_count() const {
  std::size_t n = 0;
  for (const auto& a : data)
    for (const auto& p : a.paragraphs)
      for (const auto& q : p.qas) n += q.answers.size();
  return n;
}

std::vector<std::string> QADataset::qids() const {
  std::vector<std::string> out;
  for (const auto& a : data)
    for (const auto& p : a.paragraphs)
      for (const auto& q : p.qas) out.push_back(q.qid);
  return out;
}

QADataset dataset_from_paragraphs(const std::vector<segment::TopicParagraph>& paragraphs) {
  std::map<Topic, QAArticle> articles;
  for (const auto& p : paragraphs) {
    auto& article = articles[p.topic_id];
    article.title = "topic-" + std::to_string(p.topic_id);
    article.paragraphs.push_back({p.paragraph_id, p.topic_id, p.context, {}});
  }
  QADataset ds;
  for (auto& [topic, article] : articles) ds.data.push_back(std::move(article));
  return ds;
}

nlohmann::json to_json(const QADataset& dataset) {
  nlohmann::json data = nlohmann::json::array();
  for (const auto& article : dataset.data) {
    nlohmann::json paragraphs = nlohmann::json::array();
    for (const auto& p : article.paragraphs) {
      nlohmann::json qas = nlohmann::json::array();
      for (const auto& q : p.qas) {
        nlohmann::json answers = nlohmann::json::array();
        for (const auto& a : q.answers)
          answers.push_back({{"answer_id", a.answer_id}, {"answer_start", a.answer_start}, {"text", a.text}});
        qas.push_back({{"id", q.qid},
                       {"question", q.question},
                       {"aspect", q.aspect},
                       {"question_type", q.question_type},
                       {"needs_review", q.needs_review},
                       {"answers", answers}});
      }
      paragraphs.push_back({{"paragraph_id", p.paragraph_id}, {"topic_id", p.topic_id}, {"context", p.context}, {"qas", qas}});
    }
    data.push_back({{"title", article.title}, {"paragraphs", paragraphs}});
  }
  return {{"version", dataset.version}, {"data", data}};
}

QADataset dataset_from_json(const nlohmann::json& j) {
  try {
    QADataset ds;
    ds.version = j.at("version").get<std::string>();
    for (const auto& ja : j.at("data")) {
      QAArticle article;
      article.title = ja.at("title").get<std::string>();
      for (const auto& jp : ja.at("paragraphs")) {
        QAParagraph p;
        p.paragraph_id = jp.at("paragraph_id").get<std::string>();
        p.topic_id = jp.at("topic_id").get<Topic>();
        p.context = jp.at("context").get<std::string>();
        for (const auto& jq : jp.at("qas")) {
          QAItem q;
          q.qid = jq.at("id").get<std::string>();
          q.question = jq.at("question").get<std::string>();
          q.aspect = jq.value("aspect", "");
          q.question_type = jq.value("question_type", "");
          q.needs_review = jq.value("needs_review", false);
          for (const auto& jans : jq.at("answers")) {
            QAAnswer a;
            a.text = jans.at("text").get<std::string>();
            a.answer_start = jans.at("answer_start").get<std::size_t>();
            a.answer_id = jans.value("answer_id", "");
            q.answers.push_back(std::move(a));
          }
          p.qas.push_back(std::move(q));
        }
        article.paragraphs.push_back(std::move(p));
      }
      ds.data.push_back(std::move(article));
    }
    return ds;
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("not a QA dataset: ") + e.what());
  }
}

void save_dataset(const std::string& path, const QADataset& dataset) {
  fileio::write_file_atomic(path, fileio::dump_stable(to_json(dataset)));
}

QADataset load_dataset(const std::string& path) { return dataset_from_json(fileio::read_json(path)); }

std::string answer_id(const std::string& qid, std::size_t start, std::size_t end) {
  return qid + "@" + std::to_string(start) + "-" + std::to_string(end);
}

std::string add_question(QADataset& dataset, const std::string& paragraph_id, QAItem item) {
  QAParagraph* p = dataset.find_paragraph(paragraph_id);
  if (!p) throw NotFoundError("unknown paragraph '" + paragraph_id + "'");
  if (item.question.find_first_not_of(" \t\n") == std::string::npos) throw ValidationError("question is empty");
  std::size_t next = 0;
  const std::string prefix = paragraph_id + "-q";
  for (const auto& q : p->qas) {
    if (q.qid.rfind(prefix, 0) != 0) continue;
    try {
      next = std::max<std::size_t>(next, std::stoull(q.qid.substr(prefix.size())) + 1);
    } catch (const std::logic_error&) {
    }
  }
  item.qid = prefix + std::to_string(next);
  item.answers.clear();
  p->qas.push_back(std::move(item));
  return p->qas.back().qid;
}

std::string add_answer(QADataset& dataset, const std::string& qid, std::size_t start, std::size_t end) {
  auto [p, q] = dataset.find_question(qid);
  if (!q) throw NotFoundError("unknown question '" + qid + "'");
  if (start >= end) throw ValidationError("span start must be before end");
  const auto text = utf8::substr(p->context, start, end);
  if (!text) {
    throw ValidationError("span [" + std::to_string(start) + ", " + std::to_string(end) + ") is outside the context (" +
                          std::to_string(utf8::length(p->context)) + " characters)");
  }
  if (ingest::word_count(*text) == 0) throw ValidationError("span covers only whitespace");
  const std::string id = answer_id(qid, start, end);
  for (const auto& a : q->answers)
    if (a.answer_id == id || (a.answer_start == start && a.text == *text))
      throw ValidationError("span already annotated for " + qid);
  q->answers.push_back({id, *text, start});
  return id;
}

void remove_answer(QADataset& dataset, const std::string& id) {
  for (auto& article : dataset.data)
    for (auto& p : article.paragraphs)
      for (auto& q : p.qas) {
        const auto it = std::find_if(q.answers.begin(), q.answers.end(), [&](const QAAnswer& a) { return a.answer_id == id; });
        if (it != q.answers.end()) {
          q.answers.erase(it);
          return;
        }
      }
  throw NotFoundError("unknown answer '" + id + "'");
}

std::vector<Violation> validate(const QADataset& dataset, const AspectSets* aspects) {
  std::vector<Violation> out;
  std::set<std::string> seen;
  std::set<std::string> types;
  for (const auto& article : dataset.data) {
    for (const auto& p : article.paragraphs) {
      const std::size_t length = utf8::length(p.context);
      for (const auto& q : p.qas) {
        if (!seen.insert(q.qid).second) out.push_back({q.qid, "duplicate qid"});
        if (q.question.find_first_not_of(" \t\n") == std::string::npos) out.push_back({q.qid, "empty question"});
        if (q.answers.empty()) out.push_back({q.qid, "no answers"});
        if (!q.question_type.empty()) types.insert(q.question_type);
        if (aspects) {
          const auto it = aspects->find(p.topic_id);
          if (it == aspects->end() || !it->second.count(q.aspect))
            out.push_back({q.qid, "aspect '" + q.aspect + "' is not an aspect of topic " + std::to_string(p.topic_id)});
        }
        for (const auto& a : q.answers) {
          const std::size_t n = utf8::length(a.text);
          if (a.text.empty()) {
            out.push_back({q.qid, "empty answer text"});
            continue;
          }
          if (a.answer_start + n > length) {
            out.push_back({q.qid, "answer_start " + std::to_string(a.answer_start) + " runs past the context end"});
            continue;
          }
          if (utf8::substr(p.context, a.answer_start, a.answer_start + n) != a.text)
            out.push_back({q.qid, "answer_start " + std::to_string(a.answer_start) + " does not locate '" + a.text + "'"});
        }
      }
    }
  }
  if (types.size() > dataset.data.size()) {
    out.push_back({"", std::to_string(types.size()) + " question types exceed " + std::to_string(dataset.data.size()) +
                           " topics"});
  }
  return out;
}

nlohmann::json DatasetStats::to_json() const {
  return {{"Posts", posts},
          {"Max seq words", max_seq_words},
          {"Topics paragraph", topic_paragraphs},
          {"Contexts", contexts},
          {"Types of questions", question_types},
          {"Questions", questions},
          {"Question and Answer", qa_pairs}};
}

std::string DatasetStats::to_table() const {
  std::ostringstream out;
  auto row = [&out](const char* name, std::size_t value) {
    out << name << std::string(22 - std::string(name).size(), ' ') << value << '\n';
  };
  row("Posts", posts);
  row("Max seq words", max_seq_words);
  row("Topics paragraph", topic_paragraphs);
  row("Contexts", contexts);
  row("Types of questions", question_types);
  row("Questions", questions);
  row("Question and Answer", qa_pairs);
  return out.str();
}

DatasetStats dataset_stats(const QADataset& dataset, std::size_t posts) {
  DatasetStats s;
  s.posts = posts;
  std::set<Topic> topics;
  std::set<std::string> types;
  for (const auto& article : dataset.data) {
    for (const auto& p : article.paragraphs) {
      ++s.contexts;
      topics.insert(p.topic_id);
      s.max_seq_words = std::max(s.max_seq_words, ingest::word_count(p.context));
      for (const auto& q : p.qas) {
        ++s.questions;
        s.qa_pairs += q.answers.size();
        types.insert(q.question_type.empty() ? q.question : q.question_type);
      }
    }
  }
  s.topic_paragraphs = topics.size();
  s.question_types = types.size();
  return s;
}

namespace {

struct QuestionRef {
  std::size_t article;
  std::size_t paragraph;
  std::size_t qa;
};

// Fisher-Yates with an explicit bounded draw so results do not depend on the
// standard library's distribution implementations.
template <typename T>
void shuffle(std::vector<T>& items, std::mt19937_64& rng) {
  for (std::size_t i = items.size(); i > 1; --i) {
    const std::uint64_t bound = i;
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % bound;
    std::uint64_t r;
    do r = rng();
    while (r >= limit);
    std::swap(items[i - 1], items[r % bound]);
  }
}

QADataset subset(const QADataset& dataset, const std::set<std::tuple<std::size_t, std::size_t, std::size_t>>& keep) {
  QADataset out;
  out.version = dataset.version;
  for (std::size_t a = 0; a < dataset.data.size(); ++a) {
    QAArticle article{dataset.data[a].title, {}};
    for (std::size_t p = 0; p < dataset.data[a].paragraphs.size(); ++p) {
      const auto& src = dataset.data[a].paragraphs[p];
      QAParagraph para{src.paragraph_id, src.topic_id, src.context, {}};
      for (std::size_t q = 0; q < src.qas.size(); ++q)
        if (keep.count({a, p, q})) para.qas.push_back(src.qas[q]);
      if (!para.qas.empty()) article.paragraphs.push_back(std::move(para));
    }
    if (!article.paragraphs.empty()) out.data.push_back(std::move(article));
  }
  return out;
}

}  // namespace

SplitResult split_train_eval(const QADataset& dataset, double train_fraction, std::uint64_t seed) {
  if (!(train_fraction > 0.0 && train_fraction < 1.0)) throw ParameterError("train_fraction must be in (0, 1)");

  std::map<Topic, std::vector<QuestionRef>> by_topic;
  std::size_t total = 0;
  for (std::size_t a = 0; a < dataset.data.size(); ++a)
    for (std::size_t p = 0; p < dataset.data[a].paragraphs.size(); ++p)
      for (std::size_t q = 0; q < dataset.data[a].paragraphs[p].qas.size(); ++q) {
        by_topic[dataset.data[a].paragraphs[p].topic_id].push_back({a, p, q});
        ++total;
      }

  SplitResult result;
  struct Quota {
    Topic topic;
    std::size_t n;
    std::size_t train;
    double frac;
  };
  std::vector<Quota> quotas;
  std::size_t assigned = 0;
  for (const auto& [topic, refs] : by_topic) {
    const std::size_t n = refs.size();
    const double ideal = static_cast<double>(n) * train_fraction;
    std::size_t train = n;
    if (n == 1) {
      result.warnings.push_back("topic " + std::to_string(topic) + " has a single question; assigned to train");
    } else {
      train = std::clamp<std::size_t>(static_cast<std::size_t>(std::floor(ideal)), 1, n - 1);
    }
    quotas.push_back({topic, n, train, ideal - static_cast<double>(train)});
    assigned += train;
  }

  // Largest-remainder adjustment toward round(total * fraction).
  const auto target = static_cast<std::size_t>(std::llround(static_cast<double>(total) * train_fraction));
  while (assigned != target) {
    Quota* pick = nullptr;
    for (auto& q : quotas) {
      if (q.n < 2) continue;
      if (assigned < target && q.train < q.n - 1 && (!pick || q.frac > pick->frac)) pick = &q;
      if (assigned > target && q.train > 1 && (!pick || q.frac < pick->frac)) pick = &q;
    }
    if (!pick) break;
    if (assigned < target) {
      ++pick->train;
      ++assigned;
      pick->frac -= 1.0;
    } else {
      --pick->train;
      --assigned;
      pick->frac += 1.0;
    }
  }

  std::mt19937_64 rng(seed);
  std::set<std::tuple<std::size_t, std::size_t, std::size_t>> train, eval;
  for (const auto& q : quotas) {
    auto refs = by_topic[q.topic];
    shuffle(refs, rng);
    for (std::size_t i = 0; i < refs.size(); ++i)
      (i < q.train ? train : eval).insert({refs[i].article, refs[i].paragraph, refs[i].qa});
  }
  result.train = subset(dataset, train);
  result.eval = subset(dataset, eval);
  return result;
}

std::string split_hash(const QADataset& dataset) {
  auto ids = dataset.qids();
  std::sort(ids.begin(), ids.end());
  std::string joined;
  for (const auto& id : ids) joined += id + "\n";
  return hash::sha256_hex(joined);
}

}  // namespace forumqa::qa
