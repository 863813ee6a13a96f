// forumqa command line: one verb per pipeline stage, plus run/serve.

#include <CLI11.hpp>
#include <algorithm>
#include <csignal>
#include <filesystem>
#include <iostream>
#include <optional>
#include <thread>

#include "forumqa/error.hpp"
#include "forumqa/evaluation/metrics.hpp"
#include "forumqa/ingest/corpus.hpp"
#include "forumqa/lda/aspects.hpp"
#include "forumqa/pipeline/annotation_store.hpp"
#include "forumqa/pipeline/config.hpp"
#include "forumqa/pipeline/server.hpp"
#include "forumqa/pipeline/stages.hpp"
#include "forumqa/qa/authoring.hpp"
#include "forumqa/qa/dataset.hpp"
#include "forumqa/reader/reader.hpp"
#include "forumqa/retrieval/bm25_index.hpp"
#include "forumqa/segment/segmenter.hpp"
#include "forumqa/text/vocabulary.hpp"
#include "forumqa/util/fileio.hpp"

namespace fs = std::filesystem;
using namespace forumqa;

namespace {

enum ExitCode { kOk = 0, kFailure = 1, kInvalid = 2, kStale = 3, kIo = 4 };

struct Globals {
  std::string config_path;
  std::optional<pipeline::PipelineConfig> config;

  const pipeline::PipelineConfig& cfg() {
    if (!config) config = config_path.empty() ? pipeline::PipelineConfig{} : pipeline::PipelineConfig::load(config_path);
    return *config;
  }
  bool has_config() const { return !config_path.empty(); }
  // Explicit value, else the named work-directory artifact when a config is given.
  std::string artifact(const std::string& explicit_path, const std::string& name) {
    if (!explicit_path.empty()) return explicit_path;
    if (!has_config()) throw ParameterError("missing path for " + name + " (pass it or use --config)");
    return cfg().artifact(name);
  }
  std::string stopwords(const std::string& explicit_path) {
    return explicit_path.empty() ? cfg().stopwords_path() : explicit_path;
  }
};

text::Analyzer analyzer_from(const std::string& stopwords) {
  return text::Analyzer(text::StopwordList::load(stopwords));
}

void print_json(const nlohmann::json& j) { std::cout << j.dump(2) << "\n"; }

void print_predictions(const reader::AskResult& out) {
  if (out.retrieval.empty_query) std::cerr << "warning: the question has no searchable terms\n";
  for (const auto& w : out.reader.warnings) std::cerr << "warning: " << w << "\n";
  std::size_t rank = 0;
  for (const auto& p : out.reader.predictions)
    std::cout << ++rank << ". [" << p.paragraph_id << " " << p.char_start << "-" << p.char_end << "] score "
              << p.score << " (retrieval " << p.retrieval_score << ")\n   " << p.text << "\n";
  if (out.reader.predictions.empty()) {
    std::cout << "no answer found\n";
    return;
  }
  // Distinct answer texts, best first.
  std::vector<std::string> seen;
  for (const auto& p : out.reader.predictions)
    if (std::find(seen.begin(), seen.end(), p.text) == seen.end()) seen.push_back(p.text);
  std::cout << "answers: ";
  for (std::size_t i = 0; i < seen.size(); ++i) std::cout << (i ? " / " : "") << seen[i];
  std::cout << "\n";
}

int run_cli(int argc, char** argv) {
  CLI::App app{"Topic-segmented forum QA dataset builder and retriever-reader pipeline"};
  app.require_subcommand(1);
  Globals g;
  app.add_option("--config", g.config_path, "Pipeline config (JSON)")->check(CLI::ExistingFile);

  // ingest
  auto* ingest = app.add_subcommand("ingest", "Parse a saved forum export into the canonical corpus");
  std::string in_format = "jsonl", in_path, out_path, pseudonym_key = ingest::IngestOptions{}.pseudonym_key;
  std::size_t repeat_threshold = 3;
  ingest->add_option("--format", in_format, "jsonl | csv | html")->check(CLI::IsMember({"jsonl", "csv", "html"}));
  ingest->add_option("--in", in_path)->required()->check(CLI::ExistingFile);
  ingest->add_option("--out", out_path)->required();
  ingest->add_option("--repeat-threshold", repeat_threshold);
  ingest->add_option("--pseudonym-key", pseudonym_key);

  // preprocess
  auto* preprocess = app.add_subcommand("preprocess", "Tokenize, stem and vectorize the corpus");
  std::string corpus_path, bow_path, vocab_path, stopwords_path;
  std::size_t min_df = 5;
  double max_df = 0.5;
  preprocess->add_option("--in", corpus_path)->required();
  preprocess->add_option("--out-bow", bow_path)->required();
  preprocess->add_option("--out-vocab", vocab_path)->required();
  preprocess->add_option("--stopwords", stopwords_path);
  preprocess->add_option("--min-df", min_df);
  preprocess->add_option("--max-df", max_df);

  // lda
  auto* lda_cmd = app.add_subcommand("lda", "Topic model");
  lda_cmd->require_subcommand(1);
  auto* lda_fit = lda_cmd->add_subcommand("fit", "Fit LDA by collapsed Gibbs sampling");
  lda::LdaConfig lda_config;
  std::optional<double> alpha;
  std::string model_path;
  lda_fit->add_option("--bow", bow_path)->required();
  lda_fit->add_option("--vocab", vocab_path)->required();
  lda_fit->add_option("--k", lda_config.K);
  lda_fit->add_option("--iters", lda_config.iterations);
  lda_fit->add_option("--burn-in", lda_config.burn_in);
  lda_fit->add_option("--alpha", alpha);
  lda_fit->add_option("--beta", lda_config.beta);
  lda_fit->add_option("--seed", lda_config.seed);
  lda_fit->add_option("--out", model_path)->required();
  auto* lda_aspects = lda_cmd->add_subcommand("aspects", "Extract ranked aspects per topic");
  lda::AspectOptions aspect_options;
  std::string aspects_out;
  lda_aspects->add_option("--model", model_path)->required();
  lda_aspects->add_option("--vocab", vocab_path)->required();
  lda_aspects->add_option("--corpus", corpus_path)->required();
  lda_aspects->add_option("--stopwords", stopwords_path);
  lda_aspects->add_option("--per-topic", aspect_options.per_topic);
  lda_aspects->add_option("--bigram-threshold", aspect_options.bigram_threshold);
  lda_aspects->add_option("--out", aspects_out);

  // segment
  auto* segment_cmd = app.add_subcommand("segment", "Group posts by topic into bounded paragraphs");
  segment::SegmentOptions segment_options;
  std::string paragraphs_path;
  segment_cmd->add_option("--corpus", corpus_path)->required();
  segment_cmd->add_option("--model", model_path)->required();
  segment_cmd->add_option("--max-words", segment_options.max_words);
  segment_cmd->add_option("--overlap", segment_options.overlap_words);
  segment_cmd->add_option("--out", paragraphs_path)->required();

  // dataset
  auto* dataset_cmd = app.add_subcommand("dataset", "SQuAD dataset authoring");
  dataset_cmd->require_subcommand(1);
  std::string dataset_path, aspects_path, templates_path, annotations_path, train_path, eval_path;
  double fraction = 0.7;
  std::uint64_t split_seed = 1;
  std::size_t posts = 0;
  auto* ds_propose = dataset_cmd->add_subcommand("propose", "Draft one question per aspect and paragraph");
  ds_propose->add_option("--paragraphs", paragraphs_path)->required();
  ds_propose->add_option("--aspects", aspects_path)->required();
  ds_propose->add_option("--templates", templates_path);
  ds_propose->add_option("--out", out_path)->required();
  auto* ds_import = dataset_cmd->add_subcommand("import", "Add recorded annotations to a dataset");
  ds_import->add_option("--dataset", dataset_path, "Existing dataset; a fresh one is made from the paragraphs otherwise");
  ds_import->add_option("--paragraphs", paragraphs_path)->required();
  ds_import->add_option("--aspects", aspects_path)->required();
  ds_import->add_option("--annotations", annotations_path)->required();
  ds_import->add_option("--templates", templates_path);
  ds_import->add_option("--out", out_path)->required();
  auto* ds_validate = dataset_cmd->add_subcommand("validate", "Check every dataset invariant");
  ds_validate->add_option("--dataset", dataset_path)->required();
  ds_validate->add_option("--aspects", aspects_path);
  auto* ds_stats = dataset_cmd->add_subcommand("stats", "Dataset statistics table");
  ds_stats->add_option("--dataset", dataset_path)->required();
  ds_stats->add_option("--posts", posts);
  bool as_json = false;
  ds_stats->add_flag("--json", as_json);
  auto* ds_split = dataset_cmd->add_subcommand("split", "Topic-stratified train/eval split");
  ds_split->add_option("--dataset", dataset_path)->required();
  ds_split->add_option("--fraction", fraction);
  ds_split->add_option("--seed", split_seed);
  ds_split->add_option("--train", train_path)->required();
  ds_split->add_option("--eval", eval_path)->required();

  // index
  auto* index_cmd = app.add_subcommand("index", "BM25 paragraph index");
  index_cmd->require_subcommand(1);
  std::string index_path, query;
  std::size_t k = 35;
  auto* idx_build = index_cmd->add_subcommand("build", "Index paragraphs");
  idx_build->add_option("--paragraphs", paragraphs_path);
  idx_build->add_option("--stopwords", stopwords_path);
  idx_build->add_option("--out", index_path);
  auto* idx_query = index_cmd->add_subcommand("query", "Top-k paragraphs for a query");
  idx_query->add_option("--index", index_path);
  idx_query->add_option("--stopwords", stopwords_path);
  idx_query->add_option("--q", query)->required();
  idx_query->add_option("--k", k);
  auto* idx_recall = index_cmd->add_subcommand("recall", "Retriever recall at k");
  idx_recall->add_option("--index", index_path);
  idx_recall->add_option("--stopwords", stopwords_path);
  idx_recall->add_option("--dataset", dataset_path);
  idx_recall->add_option("--k", k);

  // ask
  auto* ask_cmd = app.add_subcommand("ask", "Answer a question with retriever + reader");
  std::size_t retriever_k = 35, reader_k = 10;
  std::string reader_kind, endpoint;
  ask_cmd->add_option("--q", query)->required();
  ask_cmd->add_option("--retriever-top-k", retriever_k);
  ask_cmd->add_option("--reader-top-k", reader_k);
  ask_cmd->add_option("--reader", reader_kind)->check(CLI::IsMember({"baseline", "remote"}));
  ask_cmd->add_option("--endpoint", endpoint);
  ask_cmd->add_option("--index", index_path);
  ask_cmd->add_option("--stopwords", stopwords_path);

  // eval
  auto* eval_cmd = app.add_subcommand("eval", "Evaluation reports");
  eval_cmd->require_subcommand(1);
  auto* eval_run = eval_cmd->add_subcommand("run", "Score a reader on an evaluation split");
  std::string report_path, model_name;
  std::size_t threads = 1;
  eval_run->add_option("--dataset", dataset_path);
  eval_run->add_option("--index", index_path);
  eval_run->add_option("--stopwords", stopwords_path);
  eval_run->add_option("--reader", reader_kind)->check(CLI::IsMember({"baseline", "remote", "oracle"}));
  eval_run->add_option("--endpoint", endpoint);
  eval_run->add_option("--retriever-top-k", retriever_k);
  eval_run->add_option("--reader-top-k", reader_k);
  eval_run->add_option("--model", model_name, "Row label in the report table");
  eval_run->add_option("--threads", threads);
  eval_run->add_option("--out", report_path);
  auto* eval_compare = eval_cmd->add_subcommand("compare", "Percent change between two reports");
  std::string report_a, report_b, metric;
  eval_compare->add_option("A", report_a)->required()->check(CLI::ExistingFile);
  eval_compare->add_option("B", report_b)->required()->check(CLI::ExistingFile);
  eval_compare->add_option("--metric", metric, "Precision, F1, Recall, EM, Confidence or Retriever recall");
  eval_compare->add_flag("--json", as_json);

  // serve
  auto* serve_cmd = app.add_subcommand("serve", "Annotation API and ask endpoint");
  std::string host = "127.0.0.1";
  int port = 8080;
  serve_cmd->add_option("--host", host);
  serve_cmd->add_option("--port", port);

  // run
  auto* run_cmd = app.add_subcommand("run", "Run a pipeline stage (or all) from --config");
  std::string stage_arg;
  run_cmd->add_option("stage", stage_arg, "ingest | preprocess | lda | segment | dataset | index | eval | all")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kFailure;
  }

  if (*ingest) {
    ingest::IngestOptions opts;
    opts.pseudonym_key = pseudonym_key;
    opts.repeat_threshold = repeat_threshold;
    const auto result = ingest::parse_post_dump(fileio::read_file(in_path), ingest::parse_format(in_format), opts);
    ingest::write_corpus(out_path, result.posts);
    std::cerr << result.posts.size() << " posts; skipped " << result.stats.malformed << " malformed, "
              << result.stats.duplicates << " duplicate, " << result.stats.empty_bodies << " empty\n";
  } else if (*preprocess) {
    const auto analyzer = analyzer_from(g.stopwords(stopwords_path));
    const auto corpus = ingest::read_corpus(corpus_path);
    std::vector<std::vector<std::string>> tokens;
    for (const auto& p : corpus) tokens.push_back(analyzer.analyze(p.body));
    const auto vocab = text::build_vocabulary(tokens, min_df, max_df);
    std::vector<text::BowDocument> bow;
    for (std::size_t i = 0; i < corpus.size(); ++i) bow.push_back(text::vectorize(corpus[i].post_id, tokens[i], vocab));
    text::write_bow(bow_path, bow);
    vocab.save(vocab_path);
    std::cerr << bow.size() << " documents, vocabulary of " << vocab.size() << "\n";
  } else if (*lda_fit) {
    lda_config.alpha = alpha;
    const auto model = lda::fit_lda(text::read_bow(bow_path), text::Vocabulary::load(vocab_path), lda_config);
    fileio::write_file_atomic(model_path, fileio::dump_stable(model.to_json()));
    std::cerr << "fitted " << model.num_topics() << " topics over " << model.doc_ids.size() << " documents\n";
  } else if (*lda_aspects) {
    const auto analyzer = analyzer_from(g.stopwords(stopwords_path));
    const auto model = lda::TopicModel::from_json(fileio::read_json(model_path));
    std::vector<std::string> texts;
    for (const auto& p : ingest::read_corpus(corpus_path)) texts.push_back(p.body);
    const auto aspects = lda::extract_aspects(model, text::Vocabulary::load(vocab_path),
                                              lda::SurfaceStats::collect(texts, analyzer), analyzer, aspect_options);
    if (!aspects_out.empty()) fileio::write_file_atomic(aspects_out, fileio::dump_stable(lda::aspects_to_json(aspects)));
    for (const auto& t : aspects) {
      std::cout << "topic " << t.topic_id << ":";
      for (const auto& a : t.aspects) std::cout << " " << a << ";";
      std::cout << "\n";
    }
  } else if (*segment_cmd) {
    const auto model = lda::TopicModel::from_json(fileio::read_json(model_path));
    const auto paragraphs = segment::segment(ingest::read_corpus(corpus_path), model, segment_options);
    segment::write_paragraphs(paragraphs_path, paragraphs);
    std::cout << segment::paragraph_stats(paragraphs).to_json().dump(2) << "\n";
  } else if (*ds_propose) {
    const auto templates = qa::TemplateSet::load(templates_path.empty() ? g.cfg().templates_path() : templates_path);
    const auto paragraphs = segment::read_paragraphs(paragraphs_path);
    const auto aspects = lda::aspects_from_json(fileio::read_json(aspects_path));
    auto drafts = qa::dataset_from_paragraphs(paragraphs);
    for (const auto& p : paragraphs)
      for (const auto& t : aspects)
        if (t.topic_id == p.topic_id)
          for (auto& item : qa::propose_questions(p, t, templates))
            drafts.find_paragraph(p.paragraph_id)->qas.push_back(std::move(item));
    qa::save_dataset(out_path, drafts);
    std::cerr << drafts.question_count() << " draft questions\n";
  } else if (*ds_import) {
    const auto templates = qa::TemplateSet::load(templates_path.empty() ? g.cfg().templates_path() : templates_path);
    const auto paragraphs = segment::read_paragraphs(paragraphs_path);
    auto dataset = dataset_path.empty() ? qa::dataset_from_paragraphs(paragraphs) : qa::load_dataset(dataset_path);
    const auto report = qa::import_annotations(dataset, paragraphs, qa::read_annotation_records(annotations_path),
                                               lda::aspects_from_json(fileio::read_json(aspects_path)), templates);
    for (const auto& s : report.skipped) std::cerr << "skipped " << s << "\n";
    qa::save_dataset(out_path, dataset);
    std::cerr << report.questions_added << " questions, " << report.answers_added << " answers added\n";
  } else if (*ds_validate) {
    const auto dataset = qa::load_dataset(dataset_path);
    qa::AspectSets sets;
    if (!aspects_path.empty())
      for (const auto& t : lda::aspects_from_json(fileio::read_json(aspects_path)))
        sets[t.topic_id] = {t.aspects.begin(), t.aspects.end()};
    const auto violations = qa::validate(dataset, aspects_path.empty() ? nullptr : &sets);
    for (const auto& v : violations) std::cout << (v.qid.empty() ? "dataset" : v.qid) << ": " << v.reason << "\n";
    if (!violations.empty()) {
      std::cerr << violations.size() << " violation(s)\n";
      return kInvalid;
    }
    std::cerr << "ok: " << dataset.question_count() << " questions, " << dataset.answer_count() << " answers\n";
  } else if (*ds_stats) {
    const auto stats = qa::dataset_stats(qa::load_dataset(dataset_path), posts);
    if (as_json) print_json(stats.to_json());
    else std::cout << stats.to_table();
  } else if (*ds_split) {
    const auto split = qa::split_train_eval(qa::load_dataset(dataset_path), fraction, split_seed);
    for (const auto& w : split.warnings) std::cerr << "warning: " << w << "\n";
    qa::save_dataset(train_path, split.train);
    qa::save_dataset(eval_path, split.eval);
    std::cerr << split.train.question_count() << " train / " << split.eval.question_count() << " eval\n";
  } else if (*idx_build) {
    const auto analyzer = analyzer_from(g.stopwords(stopwords_path));
    retrieval::Bm25Params params;
    if (g.has_config()) params = g.cfg().index;
    const auto index =
        retrieval::SparseIndex::build(segment::read_paragraphs(g.artifact(paragraphs_path, "paragraphs.jsonl")), analyzer, params);
    for (const auto& w : index.warnings()) std::cerr << "warning: " << w << "\n";
    index.save(g.artifact(index_path, "index.json"));
    std::cerr << index.size() << " paragraphs indexed\n";
  } else if (*idx_query) {
    const auto index = retrieval::SparseIndex::load(g.artifact(index_path, "index.json"), analyzer_from(g.stopwords(stopwords_path)));
    const auto result = index.retrieve(query, k);
    if (result.empty_query) std::cerr << "warning: the query has no searchable terms\n";
    for (const auto& h : result.hits) std::cout << h.paragraph_id << "\t" << h.score << "\n";
  } else if (*idx_recall) {
    const auto index = retrieval::SparseIndex::load(g.artifact(index_path, "index.json"), analyzer_from(g.stopwords(stopwords_path)));
    const auto report = retrieval::retriever_recall(index, qa::load_dataset(g.artifact(dataset_path, "eval.json")), k);
    std::cout << "recall@" << k << " = " << report.recall << " (" << report.hits << "/" << report.questions << ")\n";
  } else if (*ask_cmd) {
    auto config = g.cfg();
    if (g.has_config() && index_path.empty()) pipeline::Pipeline(config).check_fresh(pipeline::Stage::kIndex);
    if (!ask_cmd->count("--retriever-top-k") && g.has_config()) retriever_k = config.ask.retriever_k;
    if (!ask_cmd->count("--reader-top-k") && g.has_config()) reader_k = config.ask.reader_k;
    if (!reader_kind.empty()) config.reader.kind = reader_kind;
    if (!endpoint.empty()) config.reader.endpoint = endpoint;
    if (!stopwords_path.empty()) config.preprocess.stopwords = fs::absolute(stopwords_path).string();
    const auto index = retrieval::SparseIndex::load(g.artifact(index_path, "index.json"), analyzer_from(config.stopwords_path()));
    auto reader = pipeline::make_reader(config);
    print_predictions(reader::ask(index, *reader, query, retriever_k, reader_k));
  } else if (*eval_run) {
    auto config = g.cfg();
    if (!reader_kind.empty()) config.reader.kind = reader_kind;
    if (!endpoint.empty()) config.reader.endpoint = endpoint;
    if (!stopwords_path.empty()) config.preprocess.stopwords = fs::absolute(stopwords_path).string();
    const auto eval_set = qa::load_dataset(g.artifact(dataset_path, "eval.json"));
    const auto index = retrieval::SparseIndex::load(g.artifact(index_path, "index.json"), analyzer_from(config.stopwords_path()));
    auto reader = pipeline::make_reader(config, &eval_set);
    evaluation::EvalSettings settings;
    settings.model = model_name;
    settings.retriever_k = eval_run->count("--retriever-top-k") || !g.has_config() ? retriever_k : config.ask.retriever_k;
    settings.reader_k = eval_run->count("--reader-top-k") || !g.has_config() ? reader_k : config.ask.reader_k;
    settings.threads = threads;
    const auto report = evaluation::evaluate_dataset(eval_set, index, *reader, settings);
    if (!report_path.empty()) evaluation::save_report(report_path, report);
    std::cout << evaluation::render_table({report});
  } else if (*eval_compare) {
    const auto c = evaluation::compare_runs(evaluation::load_report(report_a), evaluation::load_report(report_b), metric);
    if (as_json) print_json(evaluation::to_json(c));
    else std::cout << evaluation::render_comparison(c);
  } else if (*serve_cmd) {
    if (!g.has_config()) throw ParameterError("serve needs --config");
    const auto& config = g.cfg();
    pipeline::Pipeline pipe(config);
    for (auto s : {pipeline::Stage::kLda, pipeline::Stage::kSegment, pipeline::Stage::kIndex}) pipe.check_fresh(s);
    pipeline::ServiceState state;
    state.paragraphs = segment::read_paragraphs(config.artifact("paragraphs.jsonl"));
    state.aspects = lda::aspects_from_json(fileio::read_json(config.artifact("aspects.json")));
    state.templates = qa::TemplateSet::load(config.templates_path());
    qa::AspectSets sets;
    for (const auto& t : state.aspects) sets[t.topic_id] = {t.aspects.begin(), t.aspects.end()};
    const bool have_dataset = pipe.manifest(pipeline::Stage::kDataset).has_value();
    const auto initial = have_dataset ? qa::load_dataset(config.artifact("dataset.json"))
                                      : qa::dataset_from_paragraphs(state.paragraphs);
    pipeline::AnnotationStore store(config.artifact("annotation_store"), initial, sets);
    if (store.replayed()) std::cerr << "replayed " << store.replayed() << " logged annotation(s)\n";
    const auto index = retrieval::SparseIndex::load(config.artifact("index.json"), analyzer_from(config.stopwords_path()));
    const auto gold = store.snapshot();
    auto reader = pipeline::make_reader(config, &gold);
    state.store = &store;
    state.index = &index;
    state.reader = reader.get();
    state.retriever_k = config.ask.retriever_k;
    state.reader_k = config.ask.reader_k;

    sigset_t signals;
    sigemptyset(&signals);
    sigaddset(&signals, SIGINT);
    sigaddset(&signals, SIGTERM);
    pthread_sigmask(SIG_BLOCK, &signals, nullptr);
    pipeline::ApiServer server(std::move(state));
    const int bound = server.bind(host, port);
    std::thread waiter([&] {
      int sig = 0;
      sigwait(&signals, &sig);
      server.stop();
    });
    std::cerr << "serving on http://" << host << ":" << bound << "\n";
    server.listen();
    pthread_kill(waiter.native_handle(), SIGTERM);
    waiter.join();
    store.checkpoint();
  } else if (*run_cmd) {
    if (!g.has_config()) throw ParameterError("run needs --config");
    pipeline::Pipeline pipe(g.cfg());
    pipe.on_message = [](const std::string& line) { std::cerr << line << "\n"; };
    if (stage_arg == "all") {
      pipe.run_all();
      std::cout << fileio::read_file(g.cfg().artifact("report.txt"));
    } else {
      pipe.run(pipeline::parse_stage(stage_arg));
    }
  }
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run_cli(argc, argv);
  } catch (const StaleArtifactError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kStale;
  } catch (const ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kInvalid;
  } catch (const FormatError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kInvalid;
  } catch (const EmptyCorpusError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kInvalid;
  } catch (const IoError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kIo;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kFailure;
  }
}
