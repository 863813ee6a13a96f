#include <httplib.h>

#include <algorithm>
#include <regex>

#include "forumqa/error.hpp"
#include "forumqa/reader/reader.hpp"
#include "forumqa/util/utf8.hpp"

namespace forumqa::reader {

namespace {

std::string excerpt(const std::string& body) {
  return body.size() <= 200 ? body : body.substr(0, 200) + "...";
}

class SemaphoreGuard {
 public:
  explicit SemaphoreGuard(std::counting_semaphore<1024>& s) : s_(s) { s_.acquire(); }
  ~SemaphoreGuard() { s_.release(); }
  SemaphoreGuard(const SemaphoreGuard&) = delete;
  SemaphoreGuard& operator=(const SemaphoreGuard&) = delete;

 private:
  std::counting_semaphore<1024>& s_;
};

}  // namespace

RemoteReader::RemoteReader(std::string endpoint, std::chrono::milliseconds timeout, std::ptrdiff_t max_in_flight)
    : timeout_(timeout), in_flight_(std::clamp<std::ptrdiff_t>(max_in_flight, 1, 1024)) {
  if (max_in_flight < 1) throw ParameterError("max_in_flight must be at least 1");
  static const std::regex kUrl(R"(^(https?://[^/]+)(/.*)?$)");
  std::smatch m;
  if (!std::regex_match(endpoint, m, kUrl)) throw ParameterError("endpoint must look like http://host:port[/prefix]");
  base_ = m[1].str();
  std::string prefix = m[2].matched ? m[2].str() : "";
  while (!prefix.empty() && prefix.back() == '/') prefix.pop_back();
  path_ = prefix + "/answer";
}

ReaderResult RemoteReader::answer(const ReaderRequest& request) {
  if (request.top_k == 0) throw ParameterError("top_k must be at least 1");
  nlohmann::json contexts = nlohmann::json::array();
  for (const auto& p : request.passages) contexts.push_back({{"id", p.id}, {"text", p.text}});
  const nlohmann::json body = {{"question", request.question}, {"top_k", request.top_k}, {"contexts", contexts}};

  httplib::Result res;
  {
    SemaphoreGuard guard(in_flight_);
    httplib::Client client(base_);
    const auto secs = std::chrono::duration_cast<std::chrono::seconds>(timeout_);
    const auto usecs = std::chrono::duration_cast<std::chrono::microseconds>(timeout_ - secs);
    client.set_connection_timeout(secs.count(), usecs.count());
    client.set_read_timeout(secs.count(), usecs.count());
    client.set_write_timeout(secs.count(), usecs.count());
    res = client.Post(path_, body.dump(), "application/json");
  }
  if (!res) {
    throw RetriableError("reader request to " + base_ + path_ + " failed: " + httplib::to_string(res.error()));
  }
  if (res->status != 200) {
    throw ProtocolError("reader returned HTTP " + std::to_string(res->status) + ": " + excerpt(res->body));
  }

  nlohmann::json reply;
  try {
    reply = nlohmann::json::parse(res->body);
  } catch (const nlohmann::json::exception&) {
    throw ProtocolError("reader response is not JSON: " + excerpt(res->body));
  }
  if (!reply.is_object() || !reply.contains("answers") || !reply.at("answers").is_array())
    throw ProtocolError("reader response lacks an answers list: " + excerpt(res->body));

  std::map<std::string, const std::string*> texts;
  for (const auto& p : request.passages) texts[p.id] = &p.text;

  ReaderResult result;
  for (const auto& a : reply.at("answers")) {
    AnswerPrediction p;
    try {
      p.paragraph_id = a.at("context_id").get<std::string>();
      p.text = a.at("text").get<std::string>();
      p.char_start = a.at("start").get<std::size_t>();
      p.char_end = a.at("end").get<std::size_t>();
      p.score = a.at("score").get<double>();
    } catch (const nlohmann::json::exception&) {
      throw ProtocolError("malformed answer in reader response: " + excerpt(a.dump()));
    }
    const auto it = texts.find(p.paragraph_id);
    if (it == texts.end()) {
      result.warnings.push_back("dropped answer for unknown context '" + p.paragraph_id + "'");
      continue;
    }
    if (!offsets_sound(p, *it->second)) {
      result.warnings.push_back("dropped answer '" + excerpt(p.text) + "': offsets [" + std::to_string(p.char_start) +
                                ", " + std::to_string(p.char_end) + ") do not match its text");
      continue;
    }
    p.score = std::clamp(p.score, 0.0, 1.0);
    result.predictions.push_back(std::move(p));
  }
  std::stable_sort(result.predictions.begin(), result.predictions.end(),
                   [](const AnswerPrediction& a, const AnswerPrediction& b) { return a.score > b.score; });
  if (result.predictions.size() > request.top_k) {
    result.warnings.push_back("reader returned more than top_k answers; extra answers ignored");
    result.predictions.resize(request.top_k);
  }
  if (result.predictions.empty() && !reply.at("answers").empty())
    result.warnings.push_back("every answer from the reader failed validation");
  return result;
}

}  // namespace forumqa::reader
