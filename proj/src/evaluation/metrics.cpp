#include "forumqa/evaluation/metrics.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <map>
#include <mutex>
#include <thread>

#include "forumqa/error.hpp"
#include "forumqa/util/fileio.hpp"
#include "forumqa/util/utf8.hpp"

namespace forumqa::evaluation {

namespace {

char32_t to_lower(char32_t cp) {
  if (cp >= 'A' && cp <= 'Z') return cp - 'A' + 'a';
  if ((cp >= 0xC0 && cp <= 0xDE && cp != 0xD7)) return cp + 0x20;
  return cp;
}

TokenScores overlap(const std::vector<std::string>& pred, const std::vector<std::string>& gold) {
  if (pred.empty() || gold.empty()) {
    const double v = pred.empty() && gold.empty() ? 1.0 : 0.0;
    return {v, v, v, 0};
  }
  std::map<std::string_view, std::size_t> counts;
  for (const auto& t : gold) ++counts[t];
  std::size_t common = 0;
  for (const auto& t : pred) {
    auto it = counts.find(t);
    if (it != counts.end() && it->second > 0) {
      --it->second;
      ++common;
    }
  }
  if (common == 0) return {};
  const double p = static_cast<double>(common) / static_cast<double>(pred.size());
  const double r = static_cast<double>(common) / static_cast<double>(gold.size());
  return {p, r, 2 * p * r / (p + r), 0};
}

double mean(const std::vector<QuestionRecord>& records, double QuestionRecord::*field) {
  if (records.empty()) return 0.0;
  double sum = 0.0;
  for (const auto& r : records) sum += r.*field;
  return sum / static_cast<double>(records.size());
}

std::string fixed(double v, int digits) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

}  // namespace

std::vector<std::string> normalize_answer(std::string_view text) {
  std::vector<std::string> tokens;
  std::string current;
  auto flush = [&] {
    if (!current.empty() && current != "a" && current != "an" && current != "the") tokens.push_back(current);
    current.clear();
  };
  std::size_t pos = 0;
  while (pos < text.size()) {
    const char32_t cp = utf8::decode(text, pos);
    if (utf8::is_space(cp)) {
      flush();
    } else if (!utf8::is_punct(cp)) {
      utf8::append(current, to_lower(cp));
    }
  }
  flush();
  return tokens;
}

int exact_match(std::string_view prediction, const std::vector<std::string>& golds) {
  const auto pred = normalize_answer(prediction);
  for (const auto& g : golds)
    if (normalize_answer(g) == pred) return 1;
  return 0;
}

TokenScores token_f1(std::string_view prediction, const std::vector<std::string>& golds) {
  const auto pred = normalize_answer(prediction);
  TokenScores best;
  for (std::size_t i = 0; i < golds.size(); ++i) {
    auto s = overlap(pred, normalize_answer(golds[i]));
    if (i == 0 || s.f1 > best.f1) {
      best = s;
      best.best_gold = i;
    }
  }
  return best;
}

nlohmann::json to_json(const QuestionRecord& r) {
  return {{"qid", r.qid},
          {"prediction", r.prediction},
          {"em", r.em},
          {"precision", r.precision},
          {"recall", r.recall},
          {"f1", r.f1},
          {"confidence", r.confidence},
          {"best_gold_matched", r.best_gold_matched},
          {"no_prediction", r.no_prediction}};
}

void MetricReport::aggregate() {
  precision = mean(questions, &QuestionRecord::precision);
  recall = mean(questions, &QuestionRecord::recall);
  f1 = mean(questions, &QuestionRecord::f1);
  confidence = mean(questions, &QuestionRecord::confidence);
  em = 0.0;
  no_prediction = 0;
  for (const auto& q : questions) {
    em += q.em;
    no_prediction += q.no_prediction ? 1 : 0;
  }
  if (!questions.empty()) em /= static_cast<double>(questions.size());
}

const std::vector<std::string>& report_columns() {
  static const std::vector<std::string> columns = {"Precision", "F1", "Recall", "EM", "Confidence",
                                                   "Retriever recall"};
  return columns;
}

double MetricReport::metric(std::string_view column) const {
  if (column == "Precision") return precision;
  if (column == "F1") return f1;
  if (column == "Recall") return recall;
  if (column == "EM") return em;
  if (column == "Confidence") return confidence;
  if (column == "Retriever recall") return retriever_recall;
  throw ParameterError("unknown metric '" + std::string(column) + "'");
}

nlohmann::json to_json(const MetricReport& report) {
  nlohmann::json questions = nlohmann::json::array();
  for (const auto& q : report.questions) questions.push_back(to_json(q));
  nlohmann::json columns = nlohmann::json::object();
  for (const auto& c : report_columns()) columns[c] = report.metric(c);
  return {{"model", report.model},
          {"metrics", columns},
          {"questions", questions},
          {"question_count", report.questions.size()},
          {"no_prediction", report.no_prediction},
          {"skipped_qids", report.skipped_qids},
          {"config", report.config},
          {"split_hash", report.split_hash}};
}

MetricReport report_from_json(const nlohmann::json& j) {
  try {
    MetricReport r;
    r.model = j.at("model").get<std::string>();
    const auto& m = j.at("metrics");
    r.precision = m.at("Precision").get<double>();
    r.f1 = m.at("F1").get<double>();
    r.recall = m.at("Recall").get<double>();
    r.em = m.at("EM").get<double>();
    r.confidence = m.value("Confidence", 0.0);
    r.retriever_recall = m.value("Retriever recall", 0.0);
    for (const auto& q : j.value("questions", nlohmann::json::array())) {
      QuestionRecord rec;
      rec.qid = q.at("qid").get<std::string>();
      rec.prediction = q.value("prediction", "");
      rec.em = q.at("em").get<int>();
      rec.precision = q.at("precision").get<double>();
      rec.recall = q.at("recall").get<double>();
      rec.f1 = q.at("f1").get<double>();
      rec.confidence = q.value("confidence", 0.0);
      rec.best_gold_matched = q.value("best_gold_matched", "");
      rec.no_prediction = q.value("no_prediction", false);
      r.questions.push_back(std::move(rec));
    }
    r.no_prediction = j.value("no_prediction", std::size_t{0});
    r.skipped_qids = j.value("skipped_qids", std::vector<std::string>{});
    r.config = j.value("config", nlohmann::json::object());
    r.split_hash = j.value("split_hash", "");
    return r;
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("malformed metric report: ") + e.what());
  }
}

void save_report(const std::string& path, const MetricReport& report) {
  fileio::write_file_atomic(path, fileio::dump_stable(to_json(report)));
}

MetricReport load_report(const std::string& path) { return report_from_json(fileio::read_json(path)); }

std::string render_table(const std::vector<MetricReport>& reports) {
  std::vector<std::string> header = {"Models"};
  for (const auto& c : report_columns()) header.push_back(c);
  std::vector<std::vector<std::string>> rows = {header};
  for (const auto& r : reports) {
    std::vector<std::string> row = {r.model};
    for (const auto& c : report_columns()) row.push_back(fixed(r.metric(c), 3));
    rows.push_back(std::move(row));
  }
  std::vector<std::size_t> widths(header.size(), 0);
  for (const auto& row : rows)
    for (std::size_t i = 0; i < row.size(); ++i) widths[i] = std::max(widths[i], utf8::length(row[i]));
  std::string out;
  for (std::size_t r = 0; r < rows.size(); ++r) {
    std::string line;
    for (std::size_t i = 0; i < rows[r].size(); ++i) {
      if (i) line += "  ";
      line += rows[r][i];
      if (i + 1 < rows[r].size()) line.append(widths[i] - utf8::length(rows[r][i]), ' ');
    }
    out += line + "\n";
    if (r == 0) {
      std::size_t total = 0;
      for (auto w : widths) total += w;
      out += std::string(total + 2 * (widths.size() - 1), '-') + "\n";
    }
  }
  return out;
}

MetricReport evaluate_dataset(const qa::QADataset& dataset, const retrieval::SparseIndex& index,
                              reader::Reader& reader, const EvalSettings& settings) {
  if (settings.retriever_k == 0 || settings.reader_k == 0) throw ParameterError("retriever_k and reader_k must be positive");

  struct Job {
    const qa::QAItem* item;
  };
  MetricReport report;
  report.model = settings.model.empty() ? reader.name() : settings.model;
  std::vector<Job> jobs;
  for (const auto& article : dataset.data)
    for (const auto& para : article.paragraphs)
      for (const auto& qa : para.qas) {
        if (qa.answers.empty()) {
          report.skipped_qids.push_back(qa.qid);
        } else {
          jobs.push_back({&qa});
        }
      }

  std::vector<QuestionRecord> records(jobs.size());
  auto run = [&](std::size_t i) {
    const auto& item = *jobs[i].item;
    reader::AskResult result;
    for (std::size_t attempt = 0;; ++attempt) {
      try {
        result = reader::ask(index, reader, item.question, settings.retriever_k, settings.reader_k, item.qid);
        break;
      } catch (const RetriableError&) {
        if (attempt >= settings.retries) throw;
        std::this_thread::sleep_for(std::chrono::milliseconds(100 << attempt));
      }
    }
    std::vector<std::string> golds;
    for (const auto& a : item.answers) golds.push_back(a.text);
    QuestionRecord rec;
    rec.qid = item.qid;
    if (result.reader.predictions.empty()) {
      rec.no_prediction = true;
    } else {
      const auto& top = result.reader.predictions.front();
      const auto scores = token_f1(top.text, golds);
      rec.prediction = top.text;
      rec.em = exact_match(top.text, golds);
      rec.precision = scores.precision;
      rec.recall = scores.recall;
      rec.f1 = scores.f1;
      rec.confidence = top.score;
      rec.best_gold_matched = golds[scores.best_gold];
    }
    records[i] = std::move(rec);
  };

  const std::size_t threads = std::clamp<std::size_t>(settings.threads, 1, std::max<std::size_t>(1, jobs.size()));
  if (threads == 1) {
    for (std::size_t i = 0; i < jobs.size(); ++i) run(i);
  } else {
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    std::vector<std::thread> pool;
    for (std::size_t t = 0; t < threads; ++t)
      pool.emplace_back([&] {
        for (std::size_t i; (i = next++) < jobs.size();) {
          try {
            run(i);
          } catch (...) {
            std::lock_guard lock(failure_mutex);
            if (!failure) failure = std::current_exception();
            next = jobs.size();
          }
        }
      });
    for (auto& t : pool) t.join();
    if (failure) std::rethrow_exception(failure);
  }

  report.questions = std::move(records);
  report.aggregate();
  report.retriever_recall =
      jobs.empty() ? 0.0 : retrieval::retriever_recall(index, dataset, settings.retriever_k).recall;
  report.config = settings.config.is_object() ? settings.config : nlohmann::json::object();
  report.config["retriever_k"] = settings.retriever_k;
  report.config["reader_k"] = settings.reader_k;
  report.config["reader"] = reader.name();
  report.split_hash = qa::split_hash(dataset);
  return report;
}

std::string MetricChange::display() const {
  if (!percent) return "undefined";
  const double v = std::abs(*percent) < 5e-10 ? 0.0 : *percent;
  return (v < 0 ? "" : "+") + fixed(v, 2) + "%";
}

Comparison compare_runs(const MetricReport& a, const MetricReport& b, const std::string& metric) {
  if (a.split_hash != b.split_hash)
    throw ValidationError("reports were computed on different evaluation splits (" + a.split_hash + " vs " +
                          b.split_hash + ")");
  Comparison c{a.model, b.model, {}};
  std::vector<std::string> columns = report_columns();
  if (!metric.empty()) {
    a.metric(metric);
    columns = {metric};
  }
  for (const auto& col : columns) {
    MetricChange row{col, a.metric(col), b.metric(col), std::nullopt};
    if (row.a != 0.0) row.percent = 100.0 * (row.b - row.a) / row.a;
    c.rows.push_back(row);
  }
  return c;
}

nlohmann::json to_json(const Comparison& c) {
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& r : c.rows) {
    rows.push_back({{"metric", r.metric},
                    {"a", r.a},
                    {"b", r.b},
                    {"percent_change", r.percent ? nlohmann::json(*r.percent) : nlohmann::json(nullptr)},
                    {"display", r.display()}});
  }
  return {{"model_a", c.model_a}, {"model_b", c.model_b}, {"rows", rows}};
}

std::string render_comparison(const Comparison& c) {
  std::string out = "Metric            " + c.model_a + " -> " + c.model_b + "\n";
  for (const auto& r : c.rows) {
    std::string name = r.metric;
    name.resize(std::max<std::size_t>(name.size(), 16), ' ');
    out += name + "  " + fixed(r.a, 3) + " -> " + fixed(r.b, 3) + "  " + r.display() + "\n";
  }
  return out;
}

}  // namespace forumqa::evaluation
