#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "forumqa/lda/aspects.hpp"
#include "forumqa/lda/lda.hpp"
#include "forumqa/retrieval/bm25_index.hpp"
#include "forumqa/segment/segmenter.hpp"

namespace forumqa::pipeline {

struct IngestSettings {
  std::string input;  // saved forum export
  std::string format = "jsonl";
  std::string pseudonym_key = "forumqa-default-key";
  std::size_t repeat_threshold = 3;
};

struct PreprocessSettings {
  std::string stopwords;  // empty: bundled list
  std::size_t min_df = 5;
  double max_df = 0.5;
};

struct DatasetSettings {
  std::string templates;    // empty: bundled templates
  std::string annotations;  // optional JSONL of recorded annotations
  double train_fraction = 0.7;
  std::uint64_t split_seed = 1;
};

struct ReaderSettings {
  std::string kind = "baseline";
  std::string endpoint;
  std::size_t timeout_ms = 30000;
  std::size_t max_in_flight = 4;
  std::size_t window_sentences = 2;
};

struct AskSettings {
  std::size_t retriever_k = 35;
  std::size_t reader_k = 10;
};

struct EvalSettings {
  std::string model;  // report row label; empty: reader kind
  std::size_t threads = 1;
};

/// Every stage parameter plus artifact locations. Relative paths resolve
/// against `base_dir`, the directory of the config file.
struct PipelineConfig {
  std::string base_dir = ".";
  std::string workdir = "work";
  IngestSettings ingest;
  PreprocessSettings preprocess;
  lda::LdaConfig lda;
  lda::AspectOptions aspects;
  segment::SegmentOptions segment;
  DatasetSettings dataset;
  retrieval::Bm25Params index;
  ReaderSettings reader;
  AskSettings ask;
  EvalSettings eval;
  nlohmann::json service = nlohmann::json::object();  // passed to the neural reader service untouched

  /// Unknown keys and ill-typed values raise ValidationError.
  static PipelineConfig from_json(const nlohmann::json& j, const std::string& base_dir = ".");
  static PipelineConfig load(const std::string& path);
  nlohmann::json to_json() const;

  std::string resolve(const std::string& path) const;
  // Path of a named artifact inside the work directory.
  std::string artifact(const std::string& name) const;
  std::string stopwords_path() const;
  std::string templates_path() const;
};

// Location of the bundled data files.
std::string data_dir();

}  // namespace forumqa::pipeline
