#pragma once

#include <functional>
#include <mutex>
#include <shared_mutex>
#include <string>

#include <json.hpp>

#include "forumqa/qa/dataset.hpp"

namespace forumqa::pipeline {

/// Durable, single-writer home of the annotated dataset.
///
/// The directory holds a snapshot (dataset.json) and a write-ahead log
/// (wal.jsonl). Every mutation is validated, appended to the log and synced
/// before it is applied and acknowledged. Opening replays the log over the
/// snapshot; replay is idempotent, so a crash at any point loses no
/// acknowledged mutation and duplicates none. A second process opening the
/// same directory gets ConflictError, as does a writer that arrives while
/// another mutation is in progress.
class AnnotationStore {
 public:
  // `initial` seeds the snapshot when the directory has none.
  AnnotationStore(std::string dir, const qa::QADataset& initial, qa::AspectSets aspects = {});
  ~AnnotationStore();
  AnnotationStore(const AnnotationStore&) = delete;
  AnnotationStore& operator=(const AnnotationStore&) = delete;

  // Runs `fn` under a shared lock.
  void read(const std::function<void(const qa::QADataset&)>& fn) const;
  qa::QADataset snapshot() const;

  /// NotFoundError for an unknown paragraph; ValidationError for an empty
  /// question, a question already asked in the paragraph, or an aspect that
  /// is not one of the paragraph topic's aspects (when aspects were given).
  std::string add_question(const std::string& paragraph_id, const std::string& aspect, const std::string& question,
                           const std::string& question_type);
  // Errors as qa::add_answer.
  qa::QAAnswer add_answer(const std::string& qid, std::size_t start, std::size_t end);
  // NotFoundError for an unknown answer id.
  void remove_answer(const std::string& answer_id);

  // Writes the snapshot and truncates the log.
  void checkpoint();

  std::size_t replayed() const { return replayed_; }
  const std::string& dir() const { return dir_; }

 private:
  std::string snapshot_path() const;
  std::string wal_path() const;
  void apply(qa::QADataset& dataset, const nlohmann::json& record) const;
  void commit(const std::function<nlohmann::json(qa::QADataset&)>& mutate);

  std::string dir_;
  qa::AspectSets aspects_;
  qa::QADataset dataset_;
  mutable std::shared_mutex data_mutex_;
  std::mutex writer_mutex_;
  int lock_fd_ = -1;
  std::size_t seq_ = 0;
  std::size_t replayed_ = 0;
};

}  // namespace forumqa::pipeline
