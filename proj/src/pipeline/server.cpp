#include "forumqa/pipeline/server.hpp"

#include <httplib.h>

#include <map>

#include "forumqa/error.hpp"
#include "forumqa/util/fileio.hpp"

namespace forumqa::pipeline {

namespace {

using Json = nlohmann::json;

void send(httplib::Response& res, int status, const Json& body) {
  res.status = status;
  res.set_content(body.dump(), "application/json");
}

void fail(httplib::Response& res, int status, const std::string& message) { send(res, status, {{"error", message}}); }

// Maps library errors onto status codes.
template <typename Fn>
void guarded(httplib::Response& res, Fn&& fn) {
  try {
    fn();
  } catch (const Json::exception& e) {
    fail(res, 400, std::string("bad request body: ") + e.what());
  } catch (const ParameterError& e) {
    fail(res, 400, e.what());
  } catch (const NotFoundError& e) {
    fail(res, 404, e.what());
  } catch (const ConflictError& e) {
    fail(res, 409, e.what());
  } catch (const ValidationError& e) {
    fail(res, 422, e.what());
  } catch (const ProtocolError& e) {
    fail(res, 502, e.what());
  } catch (const RetriableError& e) {
    fail(res, 503, e.what());
  } catch (const std::exception& e) {
    fail(res, 500, e.what());
  }
}

Json parse_body(const httplib::Request& req) {
  auto j = Json::parse(req.body);
  if (!j.is_object()) throw ParameterError("request body must be a JSON object");
  return j;
}

std::size_t parse_count(const std::string& text, const char* what) {
  std::size_t used = 0;
  unsigned long long v = 0;
  try {
    v = std::stoull(text, &used);
  } catch (const std::logic_error&) {
    used = 0;
  }
  if (used == 0 || used != text.size() || text[0] == '-') throw ParameterError(std::string("bad ") + what + " '" + text + "'");
  return static_cast<std::size_t>(v);
}

Json question_json(const qa::QAItem& q) {
  Json answers = Json::array();
  for (const auto& a : q.answers)
    answers.push_back({{"answer_id", a.answer_id}, {"text", a.text}, {"answer_start", a.answer_start}});
  return {{"qid", q.qid},
          {"question", q.question},
          {"aspect", q.aspect},
          {"question_type", q.question_type},
          {"needs_review", q.needs_review},
          {"answers", answers}};
}

}  // namespace

qa::QADataset answered_only(const qa::QADataset& dataset) {
  auto out = dataset;
  for (auto& article : out.data)
    for (auto& p : article.paragraphs) std::erase_if(p.qas, [](const qa::QAItem& q) { return q.answers.empty(); });
  return out;
}

struct ApiServer::Impl {
  ServiceState state;
  std::map<std::string, const segment::TopicParagraph*> by_id;
  std::map<lda::Topic, const lda::TopicAspects*> aspects_of;
  httplib::Server server;
  std::thread thread;
  bool bound = false;

  explicit Impl(ServiceState s) : state(std::move(s)) {
    for (const auto& p : state.paragraphs) by_id[p.paragraph_id] = &p;
    for (const auto& t : state.aspects) aspects_of[t.topic_id] = &t;
    routes();
  }

  void routes() {
    server.set_default_headers({{"Access-Control-Allow-Origin", "*"}});
    server.Options(R"(.*)", [](const httplib::Request&, httplib::Response& res) {
      res.set_header("Access-Control-Allow-Methods", "GET, POST, DELETE, OPTIONS");
      res.set_header("Access-Control-Allow-Headers", "Content-Type");
      res.status = 204;
    });

    server.Get("/topics", [this](const httplib::Request&, httplib::Response& res) {
      guarded(res, [&] {
        std::map<lda::Topic, std::size_t> counts;
        for (const auto& p : state.paragraphs) ++counts[p.topic_id];
        Json topics = Json::array();
        for (const auto& t : state.aspects)
          topics.push_back({{"topic_id", t.topic_id}, {"aspects", t.aspects}, {"paragraphs", counts[t.topic_id]}});
        send(res, 200, {{"topics", topics}});
      });
    });

    server.Get("/paragraphs", [this](const httplib::Request& req, httplib::Response& res) {
      guarded(res, [&] {
        const bool filtered = req.has_param("topic");
        const std::size_t topic = filtered ? parse_count(req.get_param_value("topic"), "topic") : 0;
        Json out = Json::array();
        for (const auto& p : state.paragraphs)
          if (!filtered || p.topic_id == topic) out.push_back(segment::to_json(p));
        send(res, 200, {{"paragraphs", out}});
      });
    });

    server.Get("/questions", [this](const httplib::Request& req, httplib::Response& res) {
      guarded(res, [&] {
        if (!req.has_param("paragraph")) throw ParameterError("missing 'paragraph' parameter");
        const auto id = req.get_param_value("paragraph");
        const auto it = by_id.find(id);
        if (it == by_id.end()) throw NotFoundError("unknown paragraph " + id);
        Json questions = Json::array();
        state.store->read([&](const qa::QADataset& ds) {
          if (const auto* p = ds.find_paragraph(id))
            for (const auto& q : p->qas) questions.push_back(question_json(q));
        });
        Json proposals = Json::array();
        if (const auto a = aspects_of.find(it->second->topic_id); a != aspects_of.end())
          for (const auto& aspect : a->second->aspects) {
            const auto r = state.templates.render(aspect);
            proposals.push_back({{"aspect", aspect},
                                 {"question", r.question},
                                 {"question_type", r.question_type},
                                 {"needs_review", r.needs_review}});
          }
        send(res, 200, {{"paragraph_id", id}, {"questions", questions}, {"proposals", proposals}});
      });
    });

    server.Post("/questions", [this](const httplib::Request& req, httplib::Response& res) {
      guarded(res, [&] {
        const auto body = parse_body(req);
        const auto pid = body.at("paragraph_id").get<std::string>();
        const auto aspect = body.at("aspect").get<std::string>();
        const auto question = body.at("question").get<std::string>();
        const auto type = state.templates.render(aspect).question_type;
        const auto qid = state.store->add_question(pid, aspect, question, type);
        send(res, 200, {{"qid", qid}, {"question_type", type}});
      });
    });

    server.Post("/annotations", [this](const httplib::Request& req, httplib::Response& res) {
      guarded(res, [&] {
        const auto body = parse_body(req);
        const auto qid = body.at("qid").get<std::string>();
        const auto start = body.at("start").get<std::int64_t>();
        const auto end = body.at("end").get<std::int64_t>();
        if (start < 0 || end < 0) throw ValidationError("span offsets must be non-negative");
        const auto a = state.store->add_answer(qid, static_cast<std::size_t>(start), static_cast<std::size_t>(end));
        send(res, 200, {{"answer_id", a.answer_id}, {"text", a.text}, {"answer_start", a.answer_start}});
      });
    });

    server.Delete(R"(/annotations/(.+))", [this](const httplib::Request& req, httplib::Response& res) {
      guarded(res, [&] {
        const std::string id = req.matches[1];
        state.store->remove_answer(id);
        send(res, 200, {{"deleted", id}});
      });
    });

    server.Get("/dataset/export", [this](const httplib::Request&, httplib::Response& res) {
      guarded(res, [&] {
        res.status = 200;
        res.set_content(fileio::dump_stable(qa::to_json(answered_only(state.store->snapshot()))), "application/json");
      });
    });

    server.Post("/ask", [this](const httplib::Request& req, httplib::Response& res) {
      guarded(res, [&] {
        if (!state.index || !state.reader) {
          fail(res, 503, "no index or reader configured");
          return;
        }
        const auto body = parse_body(req);
        const auto question = body.at("question").get<std::string>();
        const auto retriever_k = body.value("retriever_k", state.retriever_k);
        const auto reader_k = body.value("reader_k", state.reader_k);
        const auto out = reader::ask(*state.index, *state.reader, question, retriever_k, reader_k);
        Json predictions = Json::array();
        for (const auto& p : out.reader.predictions) predictions.push_back(reader::to_json(p));
        Json retrieved = Json::array();
        for (const auto& h : out.retrieval.hits) retrieved.push_back({{"paragraph_id", h.paragraph_id}, {"score", h.score}});
        send(res, 200,
             {{"predictions", predictions},
              {"retrieved", retrieved},
              {"retriever_k", retriever_k},
              {"reader_k", reader_k},
              {"empty_query", out.retrieval.empty_query},
              {"warnings", out.reader.warnings}});
      });
    });
  }
};

ApiServer::ApiServer(ServiceState state) : impl_(std::make_unique<Impl>(std::move(state))) {
  if (!impl_->state.store) throw ParameterError("the API server needs an annotation store");
}

ApiServer::~ApiServer() { stop(); }

int ApiServer::bind(const std::string& host, int port) {
  // No SO_REUSEPORT: a second server on a taken port must fail.
  impl_->server.set_socket_options([](socket_t sock) {
    int yes = 1;
    ::setsockopt(sock, SOL_SOCKET, SO_REUSEADDR, &yes, sizeof(yes));
  });
  int bound = port;
  if (port == 0) {
    bound = impl_->server.bind_to_any_port(host);
    if (bound < 0) throw IoError("cannot bind " + host);
  } else if (!impl_->server.bind_to_port(host, port)) {
    throw IoError("cannot bind " + host + ":" + std::to_string(port) + " (port in use?)");
  }
  impl_->bound = true;
  return bound;
}

void ApiServer::listen() {
  if (!impl_->bound) throw ParameterError("bind() before listen()");
  impl_->server.listen_after_bind();
}

void ApiServer::start() {
  if (!impl_->bound) throw ParameterError("bind() before start()");
  impl_->thread = std::thread([this] { impl_->server.listen_after_bind(); });
  impl_->server.wait_until_ready();
}

void ApiServer::stop() {
  if (!impl_) return;
  impl_->server.stop();
  if (impl_->thread.joinable()) impl_->thread.join();
}

}  // namespace forumqa::pipeline
