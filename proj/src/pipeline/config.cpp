#include "forumqa/pipeline/config.hpp"

#include <filesystem>
#include <set>

#include "forumqa/error.hpp"
#include "forumqa/util/fileio.hpp"

namespace forumqa::pipeline {

namespace fs = std::filesystem;

namespace {

void check_keys(const nlohmann::json& j, const std::string& section, const std::set<std::string>& allowed) {
  if (!j.is_object()) throw ValidationError("config: '" + section + "' must be an object");
  for (const auto& [key, _] : j.items())
    if (!allowed.count(key)) throw ValidationError("config: unknown key '" + key + "' in '" + section + "'");
}

template <typename T>
void read(const nlohmann::json& j, const char* key, T& out) {
  if (j.contains(key)) out = j.at(key).get<T>();
}

}  // namespace

std::string data_dir() {
  if (const char* env = std::getenv("FORUMQA_DATA_DIR")) return env;
  return FORUMQA_DATA_DIR;
}

PipelineConfig PipelineConfig::from_json(const nlohmann::json& j, const std::string& base_dir) {
  PipelineConfig c;
  c.base_dir = base_dir;
  check_keys(j, "config",
             {"workdir", "ingest", "preprocess", "lda", "aspects", "segment", "dataset", "index", "reader", "ask",
              "eval", "service"});
  try {
    read(j, "workdir", c.workdir);
    if (j.contains("ingest")) {
      const auto& s = j.at("ingest");
      check_keys(s, "ingest", {"input", "format", "pseudonym_key", "repeat_threshold"});
      read(s, "input", c.ingest.input);
      read(s, "format", c.ingest.format);
      read(s, "pseudonym_key", c.ingest.pseudonym_key);
      read(s, "repeat_threshold", c.ingest.repeat_threshold);
    }
    if (j.contains("preprocess")) {
      const auto& s = j.at("preprocess");
      check_keys(s, "preprocess", {"stopwords", "min_df", "max_df"});
      read(s, "stopwords", c.preprocess.stopwords);
      read(s, "min_df", c.preprocess.min_df);
      read(s, "max_df", c.preprocess.max_df);
    }
    if (j.contains("lda")) {
      check_keys(j.at("lda"), "lda", {"K", "alpha", "beta", "iterations", "burn_in", "seed"});
      c.lda = lda::LdaConfig::from_json(j.at("lda"));
    }
    if (j.contains("aspects")) {
      const auto& s = j.at("aspects");
      check_keys(s, "aspects", {"per_topic", "bigram_threshold"});
      read(s, "per_topic", c.aspects.per_topic);
      read(s, "bigram_threshold", c.aspects.bigram_threshold);
    }
    if (j.contains("segment")) {
      const auto& s = j.at("segment");
      check_keys(s, "segment", {"max_words", "overlap_words"});
      read(s, "max_words", c.segment.max_words);
      read(s, "overlap_words", c.segment.overlap_words);
    }
    if (j.contains("dataset")) {
      const auto& s = j.at("dataset");
      check_keys(s, "dataset", {"templates", "annotations", "train_fraction", "split_seed"});
      read(s, "templates", c.dataset.templates);
      read(s, "annotations", c.dataset.annotations);
      read(s, "train_fraction", c.dataset.train_fraction);
      read(s, "split_seed", c.dataset.split_seed);
    }
    if (j.contains("index")) {
      const auto& s = j.at("index");
      check_keys(s, "index", {"k1", "b"});
      read(s, "k1", c.index.k1);
      read(s, "b", c.index.b);
    }
    if (j.contains("reader")) {
      const auto& s = j.at("reader");
      check_keys(s, "reader", {"kind", "endpoint", "timeout_ms", "max_in_flight", "window_sentences"});
      read(s, "kind", c.reader.kind);
      read(s, "endpoint", c.reader.endpoint);
      read(s, "timeout_ms", c.reader.timeout_ms);
      read(s, "max_in_flight", c.reader.max_in_flight);
      read(s, "window_sentences", c.reader.window_sentences);
    }
    if (j.contains("ask")) {
      const auto& s = j.at("ask");
      check_keys(s, "ask", {"retriever_k", "reader_k"});
      read(s, "retriever_k", c.ask.retriever_k);
      read(s, "reader_k", c.ask.reader_k);
    }
    if (j.contains("eval")) {
      const auto& s = j.at("eval");
      check_keys(s, "eval", {"model", "threads"});
      read(s, "model", c.eval.model);
      read(s, "threads", c.eval.threads);
    }
    if (j.contains("service")) c.service = j.at("service");
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("config: ") + e.what());
  }
  try {
    c.lda.validate();
  } catch (const ParameterError& e) {
    throw ValidationError(std::string("config: lda: ") + e.what());
  }
  if (c.preprocess.min_df < 1) throw ValidationError("config: preprocess.min_df must be at least 1");
  if (!(c.preprocess.max_df > 0 && c.preprocess.max_df <= 1)) throw ValidationError("config: preprocess.max_df must be in (0, 1]");
  if (!(c.dataset.train_fraction > 0 && c.dataset.train_fraction < 1))
    throw ValidationError("config: dataset.train_fraction must be in (0, 1)");
  if (c.ask.retriever_k == 0 || c.ask.reader_k == 0) throw ValidationError("config: ask.retriever_k and ask.reader_k must be positive");
  if (c.segment.max_words == 0 || c.segment.overlap_words >= c.segment.max_words)
    throw ValidationError("config: segment.overlap_words must be smaller than a positive segment.max_words");
  return c;
}

PipelineConfig PipelineConfig::load(const std::string& path) {
  const auto dir = fs::path(path).parent_path();
  return from_json(fileio::read_json(path), dir.empty() ? "." : dir.string());
}

nlohmann::json PipelineConfig::to_json() const {
  return {{"workdir", workdir},
          {"ingest",
           {{"input", ingest.input},
            {"format", ingest.format},
            {"pseudonym_key", ingest.pseudonym_key},
            {"repeat_threshold", ingest.repeat_threshold}}},
          {"preprocess", {{"stopwords", preprocess.stopwords}, {"min_df", preprocess.min_df}, {"max_df", preprocess.max_df}}},
          {"lda", lda.to_json()},
          {"aspects", {{"per_topic", aspects.per_topic}, {"bigram_threshold", aspects.bigram_threshold}}},
          {"segment", {{"max_words", segment.max_words}, {"overlap_words", segment.overlap_words}}},
          {"dataset",
           {{"templates", dataset.templates},
            {"annotations", dataset.annotations},
            {"train_fraction", dataset.train_fraction},
            {"split_seed", dataset.split_seed}}},
          {"index", {{"k1", index.k1}, {"b", index.b}}},
          {"reader",
           {{"kind", reader.kind},
            {"endpoint", reader.endpoint},
            {"timeout_ms", reader.timeout_ms},
            {"max_in_flight", reader.max_in_flight},
            {"window_sentences", reader.window_sentences}}},
          {"ask", {{"retriever_k", ask.retriever_k}, {"reader_k", ask.reader_k}}},
          {"eval", {{"model", eval.model}, {"threads", eval.threads}}},
          {"service", service}};
}

std::string PipelineConfig::resolve(const std::string& path) const {
  if (path.empty() || fs::path(path).is_absolute()) return path;
  return (fs::path(base_dir) / path).lexically_normal().string();
}

std::string PipelineConfig::artifact(const std::string& name) const {
  return (fs::path(resolve(workdir)) / name).string();
}

std::string PipelineConfig::stopwords_path() const {
  return preprocess.stopwords.empty() ? data_dir() + "/stopwords_en.txt" : resolve(preprocess.stopwords);
}

std::string PipelineConfig::templates_path() const {
  return dataset.templates.empty() ? data_dir() + "/templates.json" : resolve(dataset.templates);
}

}  // namespace forumqa::pipeline
