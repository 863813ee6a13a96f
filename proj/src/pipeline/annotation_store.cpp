#include "forumqa/pipeline/annotation_store.hpp"

#include <fcntl.h>
#include <sys/file.h>
#include <unistd.h>

#include <algorithm>
#include <cstring>
#include <filesystem>
#include <fstream>

#include "forumqa/error.hpp"
#include "forumqa/util/fileio.hpp"

namespace forumqa::pipeline {

namespace fs = std::filesystem;

namespace {

// Log lines in order. A torn final line (crash mid-append) is ignored; a
// corrupt line anywhere else is an error.
std::vector<nlohmann::json> read_wal(const std::string& path) {
  std::vector<nlohmann::json> records;
  std::ifstream in(path, std::ios::binary);
  if (!in) return records;
  std::vector<std::string> lines;
  for (std::string line; std::getline(in, line);)
    if (!line.empty()) lines.push_back(line);
  for (std::size_t i = 0; i < lines.size(); ++i) {
    try {
      records.push_back(nlohmann::json::parse(lines[i]));
    } catch (const nlohmann::json::exception&) {
      if (i + 1 == lines.size()) break;
      throw ValidationError(path + ": corrupt log record at line " + std::to_string(i + 1));
    }
  }
  return records;
}

bool has_answer(const qa::QADataset& ds, const std::string& qid, const std::string& answer_id) {
  const auto [p, q] = ds.find_question(qid);
  return q && std::any_of(q->answers.begin(), q->answers.end(), [&](const auto& a) { return a.answer_id == answer_id; });
}

std::string qid_of(const std::string& answer_id) { return answer_id.substr(0, answer_id.rfind('@')); }

}  // namespace

AnnotationStore::AnnotationStore(std::string dir, const qa::QADataset& initial, qa::AspectSets aspects)
    : dir_(std::move(dir)), aspects_(std::move(aspects)) {
  fs::create_directories(dir_);
  const auto lock_path = dir_ + "/lock";
  lock_fd_ = ::open(lock_path.c_str(), O_RDWR | O_CREAT, 0644);
  if (lock_fd_ < 0) throw IoError("cannot open " + lock_path + ": " + std::strerror(errno));
  if (::flock(lock_fd_, LOCK_EX | LOCK_NB) != 0) {
    ::close(lock_fd_);
    throw ConflictError("annotation store " + dir_ + " is in use by another process");
  }
  try {
    dataset_ = fs::exists(snapshot_path()) ? qa::load_dataset(snapshot_path()) : initial;
    for (const auto& record : read_wal(wal_path())) {
      apply(dataset_, record);
      seq_ = std::max<std::size_t>(seq_, record.value("seq", std::size_t{0}));
      ++replayed_;
    }
    checkpoint();
  } catch (...) {
    ::close(lock_fd_);
    throw;
  }
}

AnnotationStore::~AnnotationStore() {
  if (lock_fd_ >= 0) ::close(lock_fd_);
}

std::string AnnotationStore::snapshot_path() const { return dir_ + "/dataset.json"; }
std::string AnnotationStore::wal_path() const { return dir_ + "/wal.jsonl"; }

void AnnotationStore::read(const std::function<void(const qa::QADataset&)>& fn) const {
  std::shared_lock lock(data_mutex_);
  fn(dataset_);
}

qa::QADataset AnnotationStore::snapshot() const {
  std::shared_lock lock(data_mutex_);
  return dataset_;
}

void AnnotationStore::apply(qa::QADataset& ds, const nlohmann::json& r) const {
  try {
    const auto op = r.at("op").get<std::string>();
    if (op == "add_question") {
      const auto qid = r.at("qid").get<std::string>();
      if (ds.find_question(qid).second) return;
      auto* p = ds.find_paragraph(r.at("paragraph_id").get<std::string>());
      if (!p) throw NotFoundError("log names unknown paragraph " + r.at("paragraph_id").get<std::string>());
      p->qas.push_back({qid, r.at("question").get<std::string>(), r.at("aspect").get<std::string>(),
                        r.at("question_type").get<std::string>(), false, {}});
    } else if (op == "add_answer") {
      const auto qid = r.at("qid").get<std::string>();
      if (has_answer(ds, qid, r.at("answer_id").get<std::string>())) return;
      qa::add_answer(ds, qid, r.at("start").get<std::size_t>(), r.at("end").get<std::size_t>());
    } else if (op == "remove_answer") {
      const auto id = r.at("answer_id").get<std::string>();
      if (has_answer(ds, qid_of(id), id)) qa::remove_answer(ds, id);
    } else {
      throw ValidationError("unknown log operation '" + op + "'");
    }
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("malformed log record: ") + e.what());
  }
}

void AnnotationStore::commit(const std::function<nlohmann::json(qa::QADataset&)>& mutate) {
  std::unique_lock writer(writer_mutex_, std::try_to_lock);
  if (!writer.owns_lock()) throw ConflictError("another annotation write is in progress");
  qa::QADataset next = snapshot();
  auto record = mutate(next);
  record["seq"] = seq_ + 1;
  fileio::append_line_durable(wal_path(), record.dump());
  ++seq_;
  std::unique_lock lock(data_mutex_);
  dataset_ = std::move(next);
}

std::string AnnotationStore::add_question(const std::string& paragraph_id, const std::string& aspect,
                                          const std::string& question, const std::string& question_type) {
  std::string qid;
  commit([&](qa::QADataset& ds) {
    const auto* p = ds.find_paragraph(paragraph_id);
    if (!p) throw NotFoundError("unknown paragraph " + paragraph_id);
    if (question.find_first_not_of(" \t\r\n") == std::string::npos) throw ValidationError("question is empty");
    for (const auto& q : p->qas)
      if (q.question == question) throw ValidationError("question already asked in " + paragraph_id + " as " + q.qid);
    if (!aspects_.empty()) {
      const auto it = aspects_.find(p->topic_id);
      if (it == aspects_.end() || !it->second.count(aspect))
        throw ValidationError("'" + aspect + "' is not an aspect of topic " + std::to_string(p->topic_id));
    }
    qid = qa::add_question(ds, paragraph_id, {"", question, aspect, question_type, false, {}});
    return nlohmann::json{{"op", "add_question"}, {"paragraph_id", paragraph_id}, {"qid", qid},
                          {"question", question}, {"aspect", aspect},             {"question_type", question_type}};
  });
  return qid;
}

qa::QAAnswer AnnotationStore::add_answer(const std::string& qid, std::size_t start, std::size_t end) {
  qa::QAAnswer answer;
  commit([&](qa::QADataset& ds) {
    const auto id = qa::add_answer(ds, qid, start, end);
    for (const auto& a : ds.find_question(qid).second->answers)
      if (a.answer_id == id) answer = a;
    return nlohmann::json{{"op", "add_answer"}, {"qid", qid}, {"start", start}, {"end", end}, {"answer_id", id}};
  });
  return answer;
}

void AnnotationStore::remove_answer(const std::string& answer_id) {
  commit([&](qa::QADataset& ds) {
    qa::remove_answer(ds, answer_id);
    return nlohmann::json{{"op", "remove_answer"}, {"answer_id", answer_id}};
  });
}

void AnnotationStore::checkpoint() {
  // Holding the writer lock keeps a concurrent append out of the truncated log.
  std::lock_guard writer(writer_mutex_);
  std::shared_lock lock(data_mutex_);
  qa::save_dataset(snapshot_path(), dataset_);
  fileio::write_file_atomic(wal_path(), "");
}

}  // namespace forumqa::pipeline
