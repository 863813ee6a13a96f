#pragma once

#include <chrono>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "forumqa/pipeline/config.hpp"
#include "forumqa/reader/reader.hpp"

namespace forumqa::pipeline {

enum class Stage { kIngest, kPreprocess, kLda, kSegment, kDataset, kIndex, kEval };

const std::vector<Stage>& all_stages();
std::string stage_name(Stage stage);
// Throws ParameterError for an unknown name.
Stage parse_stage(std::string_view name);
// Stages whose artifacts `stage` reads.
const std::vector<Stage>& dependencies(Stage stage);
// Artifact file names, relative to the work directory.
const std::vector<std::string>& stage_outputs(Stage stage);

struct StageManifest {
  std::string stage;
  std::string config_hash;
  std::map<std::string, std::string> inputs;   // path -> sha256
  std::map<std::string, std::string> outputs;  // artifact name -> sha256
  double wall_ms = 0.0;
  nlohmann::json details = nlohmann::json::object();

  nlohmann::json to_json() const;
  static StageManifest from_json(const nlohmann::json& j);
};

/// Runs stages over one work directory. Each finished stage leaves a
/// manifest under {workdir}/.forumqa recording a cumulative config hash (its
/// own parameters, the contents of its external inputs and its upstream
/// hashes) and the sha256 of every output. A stage only runs when each
/// upstream manifest matches the current config and its outputs are intact;
/// otherwise StaleArtifactError names the upstream stage.
class Pipeline {
 public:
  explicit Pipeline(PipelineConfig config);

  const PipelineConfig& config() const { return config_; }
  std::string config_hash(Stage stage) const;

  std::optional<StageManifest> manifest(Stage stage) const;
  // Throws StaleArtifactError unless `stage` ran under the current config and
  // its outputs are unchanged.
  void check_fresh(Stage stage) const;
  void check_upstream(Stage stage) const;

  StageManifest run(Stage stage);
  std::vector<StageManifest> run_all();

  // Progress and warning lines.
  std::function<void(const std::string&)> on_message;

 private:
  nlohmann::json run_stage_body(Stage stage, std::vector<std::string>& inputs);
  void message(const std::string& line) const;

  PipelineConfig config_;
};

std::string manifest_path(const PipelineConfig& config, Stage stage);
std::string log_path(const PipelineConfig& config);

// Reader selected by the config; the oracle reads gold answers from `gold`.
std::unique_ptr<reader::Reader> make_reader(const PipelineConfig& config, const qa::QADataset* gold = nullptr);

}  // namespace forumqa::pipeline
