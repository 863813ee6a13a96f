#include "forumqa/pipeline/stages.hpp"

#include <algorithm>
#include <filesystem>

#include "forumqa/error.hpp"
#include "forumqa/evaluation/metrics.hpp"
#include "forumqa/ingest/corpus.hpp"
#include "forumqa/lda/aspects.hpp"
#include "forumqa/qa/authoring.hpp"
#include "forumqa/qa/dataset.hpp"
#include "forumqa/retrieval/bm25_index.hpp"
#include "forumqa/segment/segmenter.hpp"
#include "forumqa/text/vocabulary.hpp"
#include "forumqa/util/fileio.hpp"
#include "forumqa/util/hash.hpp"

namespace forumqa::pipeline {

namespace fs = std::filesystem;

namespace {

struct StageInfo {
  Stage stage;
  const char* name;
  std::vector<Stage> deps;
  std::vector<std::string> outputs;
};

const std::vector<StageInfo>& stage_table() {
  static const std::vector<StageInfo> table = {
      {Stage::kIngest, "ingest", {}, {"corpus.jsonl"}},
      {Stage::kPreprocess, "preprocess", {Stage::kIngest}, {"bow.jsonl", "vocab.tsv"}},
      {Stage::kLda, "lda", {Stage::kIngest, Stage::kPreprocess}, {"model.json", "aspects.json"}},
      {Stage::kSegment, "segment", {Stage::kIngest, Stage::kLda}, {"paragraphs.jsonl", "paragraph_stats.json"}},
      {Stage::kDataset,
       "dataset",
       {Stage::kIngest, Stage::kLda, Stage::kSegment},
       {"drafts.json", "dataset.json", "train.json", "eval.json", "dataset_stats.json"}},
      {Stage::kIndex, "index", {Stage::kPreprocess, Stage::kSegment}, {"index.json"}},
      {Stage::kEval, "eval", {Stage::kDataset, Stage::kIndex}, {"report.json", "report.txt"}},
  };
  return table;
}

const StageInfo& info(Stage stage) {
  for (const auto& s : stage_table())
    if (s.stage == stage) return s;
  throw ParameterError("unknown stage");
}

std::string sha_or_empty(const std::string& path) { return path.empty() ? std::string() : hash::file_sha256(path); }

text::Analyzer make_analyzer(const PipelineConfig& c) {
  return text::Analyzer(text::StopwordList::load(c.stopwords_path()));
}

void write_json(const std::string& path, const nlohmann::json& j) { fileio::write_file_atomic(path, fileio::dump_stable(j)); }

}  // namespace

const std::vector<Stage>& all_stages() {
  static const std::vector<Stage> stages = [] {
    std::vector<Stage> v;
    for (const auto& s : stage_table()) v.push_back(s.stage);
    return v;
  }();
  return stages;
}

std::string stage_name(Stage stage) { return info(stage).name; }

Stage parse_stage(std::string_view name) {
  for (const auto& s : stage_table())
    if (name == s.name) return s.stage;
  throw ParameterError("unknown stage '" + std::string(name) + "'");
}

const std::vector<Stage>& dependencies(Stage stage) { return info(stage).deps; }
const std::vector<std::string>& stage_outputs(Stage stage) { return info(stage).outputs; }

nlohmann::json StageManifest::to_json() const {
  return {{"stage", stage}, {"config_hash", config_hash}, {"inputs", inputs},
          {"outputs", outputs}, {"wall_ms", wall_ms},        {"details", details}};
}

StageManifest StageManifest::from_json(const nlohmann::json& j) {
  try {
    StageManifest m;
    m.stage = j.at("stage").get<std::string>();
    m.config_hash = j.at("config_hash").get<std::string>();
    m.inputs = j.at("inputs").get<std::map<std::string, std::string>>();
    m.outputs = j.at("outputs").get<std::map<std::string, std::string>>();
    m.wall_ms = j.value("wall_ms", 0.0);
    m.details = j.value("details", nlohmann::json::object());
    return m;
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("malformed stage manifest: ") + e.what());
  }
}

std::string manifest_path(const PipelineConfig& config, Stage stage) {
  return config.artifact(".forumqa/" + stage_name(stage) + ".json");
}

std::string log_path(const PipelineConfig& config) { return config.artifact("pipeline.log"); }

std::unique_ptr<reader::Reader> make_reader(const PipelineConfig& config, const qa::QADataset* gold) {
  switch (reader::parse_reader_kind(config.reader.kind)) {
    case reader::ReaderKind::kBaseline:
      return std::make_unique<reader::BaselineReader>(make_analyzer(config), config.reader.window_sentences);
    case reader::ReaderKind::kRemote:
      return std::make_unique<reader::RemoteReader>(config.reader.endpoint,
                                                    std::chrono::milliseconds(config.reader.timeout_ms),
                                                    static_cast<std::ptrdiff_t>(config.reader.max_in_flight));
    case reader::ReaderKind::kOracle:
      if (!gold) throw ParameterError("the oracle reader needs a gold dataset");
      return std::make_unique<reader::OracleReader>(*gold);
  }
  throw ParameterError("unknown reader kind");
}

Pipeline::Pipeline(PipelineConfig config) : config_(std::move(config)) {}

void Pipeline::message(const std::string& line) const {
  if (on_message) on_message(line);
}

std::string Pipeline::config_hash(Stage stage) const {
  const auto& c = config_;
  nlohmann::json params;
  switch (stage) {
    case Stage::kIngest:
      params = {{"format", c.ingest.format},
                {"pseudonym_key", c.ingest.pseudonym_key},
                {"repeat_threshold", c.ingest.repeat_threshold},
                {"input_sha256", c.ingest.input.empty() ? "" : sha_or_empty(c.resolve(c.ingest.input))}};
      break;
    case Stage::kPreprocess:
      params = {{"min_df", c.preprocess.min_df},
                {"max_df", c.preprocess.max_df},
                {"analyzer", make_analyzer(c).config_hash()}};
      break;
    case Stage::kLda:
      params = {{"lda", c.lda.to_json()},
                {"per_topic", c.aspects.per_topic},
                {"bigram_threshold", c.aspects.bigram_threshold}};
      break;
    case Stage::kSegment:
      params = {{"max_words", c.segment.max_words}, {"overlap_words", c.segment.overlap_words}};
      break;
    case Stage::kDataset:
      params = {{"train_fraction", c.dataset.train_fraction},
                {"split_seed", c.dataset.split_seed},
                {"templates_sha256", sha_or_empty(c.templates_path())},
                {"annotations_sha256", sha_or_empty(c.resolve(c.dataset.annotations))}};
      break;
    case Stage::kIndex:
      params = {{"k1", c.index.k1}, {"b", c.index.b}, {"analyzer", make_analyzer(c).config_hash()}};
      break;
    case Stage::kEval: {
      const auto full = c.to_json();
      params = {{"reader", full.at("reader")}, {"ask", full.at("ask")}, {"eval", full.at("eval")}};
      break;
    }
  }
  std::string material = stage_name(stage) + "\n" + params.dump() + "\n";
  for (Stage dep : dependencies(stage)) material += config_hash(dep) + "\n";
  return hash::sha256_hex(material);
}

std::optional<StageManifest> Pipeline::manifest(Stage stage) const {
  const auto path = manifest_path(config_, stage);
  if (!fs::exists(path)) return std::nullopt;
  return StageManifest::from_json(fileio::read_json(path));
}

void Pipeline::check_fresh(Stage stage) const {
  const auto name = stage_name(stage);
  const auto m = manifest(stage);
  if (!m) throw StaleArtifactError(name, "stage has not been run in " + config_.resolve(config_.workdir));
  if (m->config_hash != config_hash(stage))
    throw StaleArtifactError(name, "configuration or inputs changed since it ran; rerun '" + name + "'");
  for (const auto& [artifact, sha] : m->outputs) {
    const auto path = config_.artifact(artifact);
    if (!fs::exists(path)) throw StaleArtifactError(name, artifact + " is missing");
    if (hash::file_sha256(path) != sha) throw StaleArtifactError(name, artifact + " was modified after the stage ran");
  }
}

void Pipeline::check_upstream(Stage stage) const {
  for (Stage dep : dependencies(stage)) check_fresh(dep);
}

StageManifest Pipeline::run(Stage stage) {
  check_upstream(stage);
  fs::create_directories(config_.artifact(".forumqa"));
  const auto started = std::chrono::steady_clock::now();
  std::vector<std::string> inputs;
  for (Stage dep : dependencies(stage))
    for (const auto& out : stage_outputs(dep)) inputs.push_back(config_.artifact(out));
  const auto details = run_stage_body(stage, inputs);

  StageManifest m;
  m.stage = stage_name(stage);
  m.config_hash = config_hash(stage);
  for (const auto& in : inputs) m.inputs[in] = hash::file_sha256(in);
  for (const auto& out : stage_outputs(stage)) m.outputs[out] = hash::file_sha256(config_.artifact(out));
  m.wall_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - started).count();
  m.details = details;
  write_json(manifest_path(config_, stage), m.to_json());

  nlohmann::json log = m.to_json();
  log.erase("details");
  log["finished_at"] = std::chrono::duration_cast<std::chrono::seconds>(
                           std::chrono::system_clock::now().time_since_epoch())
                           .count();
  fileio::append_line_durable(log_path(config_), log.dump());
  message(m.stage + ": done in " + std::to_string(static_cast<long long>(m.wall_ms)) + " ms");
  return m;
}

std::vector<StageManifest> Pipeline::run_all() {
  std::vector<StageManifest> out;
  for (Stage s : all_stages()) out.push_back(run(s));
  return out;
}

nlohmann::json Pipeline::run_stage_body(Stage stage, std::vector<std::string>& inputs) {
  const auto& c = config_;
  const auto path = [&](const std::string& name) { return c.artifact(name); };
  nlohmann::json details = nlohmann::json::object();

  switch (stage) {
    case Stage::kIngest: {
      if (c.ingest.input.empty()) throw ValidationError("config: ingest.input is not set");
      const auto input = c.resolve(c.ingest.input);
      inputs.push_back(input);
      ingest::IngestOptions opts;
      opts.pseudonym_key = c.ingest.pseudonym_key;
      opts.repeat_threshold = c.ingest.repeat_threshold;
      const auto result = ingest::parse_post_dump(fileio::read_file(input), ingest::parse_format(c.ingest.format), opts);
      ingest::write_corpus(path("corpus.jsonl"), result.posts);
      details = {{"posts", result.posts.size()},
                 {"records", result.stats.records},
                 {"malformed", result.stats.malformed},
                 {"duplicates", result.stats.duplicates},
                 {"empty_bodies", result.stats.empty_bodies}};
      if (result.stats.skipped()) message("ingest: skipped " + std::to_string(result.stats.skipped()) + " records");
      break;
    }
    case Stage::kPreprocess: {
      inputs.push_back(c.stopwords_path());
      const auto analyzer = make_analyzer(c);
      const auto posts = ingest::read_corpus(path("corpus.jsonl"));
      std::vector<std::vector<std::string>> tokens;
      tokens.reserve(posts.size());
      for (const auto& p : posts) tokens.push_back(analyzer.analyze(p.body));
      const auto vocab = text::build_vocabulary(tokens, c.preprocess.min_df, c.preprocess.max_df);
      std::vector<text::BowDocument> bow;
      bow.reserve(posts.size());
      for (std::size_t i = 0; i < posts.size(); ++i) bow.push_back(text::vectorize(posts[i].post_id, tokens[i], vocab));
      text::write_bow(path("bow.jsonl"), bow);
      vocab.save(path("vocab.tsv"));
      details = {{"documents", bow.size()}, {"vocabulary", vocab.size()}};
      break;
    }
    case Stage::kLda: {
      const auto analyzer = make_analyzer(c);
      const auto vocab = text::Vocabulary::load(path("vocab.tsv"));
      const auto bow = text::read_bow(path("bow.jsonl"));
      const auto model = lda::fit_lda(bow, vocab, c.lda);
      std::vector<std::string> texts;
      for (const auto& p : ingest::read_corpus(path("corpus.jsonl"))) texts.push_back(p.body);
      const auto surfaces = lda::SurfaceStats::collect(texts, analyzer);
      const auto aspects = lda::extract_aspects(model, vocab, surfaces, analyzer, c.aspects);
      write_json(path("model.json"), model.to_json());
      write_json(path("aspects.json"), lda::aspects_to_json(aspects));
      details = {{"topics", model.num_topics()},
                 {"documents", model.doc_ids.size()},
                 {"skipped_documents", model.skipped_doc_ids.size()},
                 {"aspects", aspects.size() * c.aspects.per_topic}};
      break;
    }
    case Stage::kSegment: {
      const auto posts = ingest::read_corpus(path("corpus.jsonl"));
      const auto model = lda::TopicModel::from_json(fileio::read_json(path("model.json")));
      const auto paragraphs = segment::segment(posts, model, c.segment);
      const auto stats = segment::paragraph_stats(paragraphs);
      segment::write_paragraphs(path("paragraphs.jsonl"), paragraphs);
      write_json(path("paragraph_stats.json"), stats.to_json());
      details = stats.to_json();
      break;
    }
    case Stage::kDataset: {
      const auto templates_file = c.templates_path();
      inputs.push_back(templates_file);
      const auto templates = qa::TemplateSet::load(templates_file);
      const auto paragraphs = segment::read_paragraphs(path("paragraphs.jsonl"));
      const auto aspects = lda::aspects_from_json(fileio::read_json(path("aspects.json")));
      const auto posts = ingest::read_corpus(path("corpus.jsonl"));
      std::map<lda::Topic, const lda::TopicAspects*> by_topic;
      qa::AspectSets aspect_sets;
      for (const auto& t : aspects) {
        by_topic[t.topic_id] = &t;
        aspect_sets[t.topic_id] = {t.aspects.begin(), t.aspects.end()};
      }

      auto drafts = qa::dataset_from_paragraphs(paragraphs);
      for (const auto& p : paragraphs) {
        const auto it = by_topic.find(p.topic_id);
        if (it == by_topic.end()) continue;
        for (auto& item : qa::propose_questions(p, *it->second, templates))
          drafts.find_paragraph(p.paragraph_id)->qas.push_back(std::move(item));
      }
      write_json(path("drafts.json"), qa::to_json(drafts));

      auto dataset = qa::dataset_from_paragraphs(paragraphs);
      qa::ImportReport report;
      if (!c.dataset.annotations.empty()) {
        const auto annotations = c.resolve(c.dataset.annotations);
        inputs.push_back(annotations);
        report = qa::import_annotations(dataset, paragraphs, qa::read_annotation_records(annotations), aspects, templates);
        for (const auto& s : report.skipped) message("dataset: " + s);
      }
      const auto violations = qa::validate(dataset, &aspect_sets);
      if (!violations.empty()) {
        std::string what = std::to_string(violations.size()) + " dataset violation(s):";
        for (std::size_t i = 0; i < std::min<std::size_t>(violations.size(), 10); ++i)
          what += "\n  " + (violations[i].qid.empty() ? std::string("dataset") : violations[i].qid) + ": " +
                  violations[i].reason;
        throw ValidationError(what);
      }
      const auto split = qa::split_train_eval(dataset, c.dataset.train_fraction, c.dataset.split_seed);
      for (const auto& w : split.warnings) message("dataset: " + w);
      const auto stats = qa::dataset_stats(dataset, posts.size());
      qa::save_dataset(path("dataset.json"), dataset);
      qa::save_dataset(path("train.json"), split.train);
      qa::save_dataset(path("eval.json"), split.eval);
      write_json(path("dataset_stats.json"), stats.to_json());
      details = {{"questions_added", report.questions_added},
                 {"answers_added", report.answers_added},
                 {"annotations_skipped", report.skipped.size()},
                 {"train_questions", split.train.question_count()},
                 {"eval_questions", split.eval.question_count()},
                 {"split_hash", qa::split_hash(split.eval)}};
      break;
    }
    case Stage::kIndex: {
      inputs.push_back(c.stopwords_path());
      const auto index =
          retrieval::SparseIndex::build(segment::read_paragraphs(path("paragraphs.jsonl")), make_analyzer(c), c.index);
      for (const auto& w : index.warnings()) message("index: " + w);
      index.save(path("index.json"));
      details = {{"paragraphs", index.size()}, {"average_length", index.average_length()}};
      break;
    }
    case Stage::kEval: {
      const auto eval_set = qa::load_dataset(path("eval.json"));
      const auto index = retrieval::SparseIndex::load(path("index.json"), make_analyzer(c));
      auto reader = make_reader(c, &eval_set);
      evaluation::EvalSettings settings;
      settings.model = c.eval.model;
      settings.retriever_k = c.ask.retriever_k;
      settings.reader_k = c.ask.reader_k;
      settings.threads = c.eval.threads;
      settings.config = {{"config_hash", config_hash(Stage::kEval)},
                         {"lda_K", c.lda.K},
                         {"max_words", c.segment.max_words},
                         {"train_fraction", c.dataset.train_fraction},
                         {"service", c.service}};
      const auto report = evaluation::evaluate_dataset(eval_set, index, *reader, settings);
      evaluation::save_report(path("report.json"), report);
      fileio::write_file_atomic(path("report.txt"), evaluation::render_table({report}));
      details = {{"questions", report.questions.size()}, {"EM", report.em}, {"F1", report.f1}};
      break;
    }
  }
  return details;
}

}  // namespace forumqa::pipeline
