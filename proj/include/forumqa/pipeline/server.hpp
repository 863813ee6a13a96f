#pragma once

#include <memory>
#include <string>
#include <thread>
#include <vector>

#include "forumqa/lda/aspects.hpp"
#include "forumqa/pipeline/annotation_store.hpp"
#include "forumqa/qa/authoring.hpp"
#include "forumqa/reader/reader.hpp"
#include "forumqa/retrieval/bm25_index.hpp"
#include "forumqa/segment/segmenter.hpp"

namespace forumqa::pipeline {

struct ServiceState {
  std::vector<segment::TopicParagraph> paragraphs;
  std::vector<lda::TopicAspects> aspects;
  qa::TemplateSet templates;
  AnnotationStore* store = nullptr;
  const retrieval::SparseIndex* index = nullptr;  // /ask answers 503 without index and reader
  reader::Reader* reader = nullptr;
  std::size_t retriever_k = 35;
  std::size_t reader_k = 10;
};

/// JSON annotation API and ask endpoint:
///   GET /topics, GET /paragraphs?topic=k, GET /questions?paragraph=id,
///   POST /questions, POST /annotations, DELETE /annotations/{id},
///   GET /dataset/export, POST /ask.
/// Failures answer {"error": message} with 400 (bad request), 404 (unknown
/// id), 409 (concurrent writer), 422 (validation), 502/503 (reader).
class ApiServer {
 public:
  explicit ApiServer(ServiceState state);
  ~ApiServer();

  // Returns the bound port; 0 picks a free one. Throws IoError when the port is taken.
  int bind(const std::string& host, int port);
  // Serves until stop(); requires bind().
  void listen();
  // listen() on a background thread.
  void start();
  void stop();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

// Dataset with unanswered questions removed, as served by /dataset/export.
qa::QADataset answered_only(const qa::QADataset& dataset);

}  // namespace forumqa::pipeline
