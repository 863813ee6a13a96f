#pragma once

#include <filesystem>
#include <string>

#include <json.hpp>

#include "forumqa/pipeline/config.hpp"
#include "test_paths.hpp"

namespace forumqa::test {

// Config over the bundled synthetic corpus with a fresh work directory.
inline pipeline::PipelineConfig synthetic_config(const std::string& name, nlohmann::json overrides = {}) {
  const auto dir = temp_path(name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  auto j = nlohmann::json::parse(R"({
    "ingest": {"format": "csv"},
    "preprocess": {"min_df": 2},
    "reader": {"kind": "oracle"}
  })");
  j["workdir"] = dir + "/work";
  j["ingest"]["input"] = data_file("synthetic/forum_posts.csv");
  j["dataset"]["annotations"] = data_file("synthetic/annotations.jsonl");
  if (!overrides.is_null()) j.merge_patch(overrides);
  return pipeline::PipelineConfig::from_json(j, dir);
}

}  // namespace forumqa::test
