#include "activeva/service.hpp"

#include "activeva/error.hpp"

#include <httplib.h>

#include <cstdio>
#include <cstdlib>

namespace activeva {

namespace {

Reply error_reply(int status, const std::string& code, const std::string& message) {
  return {status, {{"schema_version", kServiceSchemaVersion}, {"code", code}, {"message", message}}};
}

Reply not_found(const std::string& id) { return error_reply(404, "session_not_found", "no session '" + id + "'"); }

Response parse_value(const io::json& v) {
  if (!v.is_string()) throw InvalidArgument("value must be \"yes\", \"no\" or \"dont_know\"");
  const auto s = v.get<std::string>();
  if (s == "yes") return Response::yes;
  if (s == "no") return Response::no;
  if (s == "dont_know") return Response::missing;
  throw InvalidArgument("value must be \"yes\", \"no\" or \"dont_know\"");
}

io::json question_json(const QuestionBank& bank, Eigen::Index j) {
  const Question& q = bank[j];
  return {{"id", q.id}, {"index", j + 1}, {"text", q.text.value_or(q.id)}};
}

}  // namespace

InterviewService::InterviewService(PosteriorModel model, std::optional<std::filesystem::path> transcript_dir)
    : model_(std::move(model)), transcript_dir_(std::move(transcript_dir)) {
  model_.validate();
  point_context_ = std::make_shared<const ScoringContext>(
      ScoringContext{model_.bank, model_.cause_labels, posterior_mean(model_), std::nullopt});
}

std::shared_ptr<const ScoringContext> InterviewService::context_for(const SessionConfig& config) {
  if (!config.is_predictive()) return point_context_;
  std::lock_guard lock(contexts_mutex_);
  auto& slot = draw_contexts_[{config.num_draws, config.seed}];
  if (!slot) slot = ScoringContext::from_model(model_, config);
  return slot;
}

std::shared_ptr<InterviewService::Entry> InterviewService::find(const std::string& id) const {
  std::lock_guard lock(sessions_mutex_);
  const auto it = sessions_.find(id);
  return it == sessions_.end() ? nullptr : it->second;
}

io::json InterviewService::progress(const std::string& id, const Session& session) const {
  io::json out = {{"schema_version", kServiceSchemaVersion},
                  {"session_id", id},
                  {"t", session.state().t},
                  {"status", session.stopped() ? "stopped" : "active"},
                  {"class_posterior_top3", io::top_causes_to_json(session.top_causes(3))}};
  const auto& transcript = session.transcript();
  if (!transcript.empty() && transcript.back().stop_fraction) {
    out["stop_fraction"] = *transcript.back().stop_fraction;
  }
  if (session.stopped()) {
    out["final_result"] = io::final_result_to_json(session.finalize());
  } else if (session.state().pending) {
    out["next_question"] = question_json(model_.bank, *session.state().pending);
  }
  return out;
}

void InterviewService::persist(const std::string& id, const Session& session) const {
  if (!transcript_dir_) return;
  io::write_text(*transcript_dir_ / (id + ".jsonl"), io::transcript_jsonl(session.transcript()));
}

Reply InterviewService::create_session(const io::json& overrides) {
  try {
    const io::json body = overrides.is_null() ? io::json::object() : overrides;
    const SessionConfig config = io::session_config_from_json(body, model_.num_causes(), model_.bank);
    auto entry = std::make_shared<Entry>(Session(context_for(config), config));
    std::string id;
    {
      std::lock_guard lock(sessions_mutex_);
      char buf[32];
      std::snprintf(buf, sizeof buf, "s%06llu", static_cast<unsigned long long>(next_id_++));
      id = buf;
      sessions_.emplace(id, entry);
    }
    std::lock_guard lock(entry->mutex);
    entry->session.next_question();
    if (entry->session.stopped()) persist(id, entry->session);
    return {201, progress(id, entry->session)};
  } catch (const InvalidArgument& e) {
    return error_reply(400, "invalid_config", e.what());
  }
}

Reply InterviewService::submit_response(const std::string& session_id, const io::json& body) {
  const auto entry = find(session_id);
  if (!entry) return not_found(session_id);
  std::lock_guard lock(entry->mutex);
  Session& session = entry->session;
  try {
    if (!body.is_object() || !body.contains("question_id") || !body.at("question_id").is_string()) {
      throw InvalidArgument("body must contain a string question_id");
    }
    const Response value = parse_value(body.value("value", io::json()));
    if (session.stopped()) {
      return error_reply(409, "already_stopped", "session has already stopped");
    }
    const auto& qid = body.at("question_id").get<std::string>();
    const auto j = model_.bank.index_of(qid);
    if (!j) return error_reply(400, "unknown_question", "no question '" + qid + "'");
    session.record_response(*j, value);
    if (!session.stopped()) session.next_question();
    if (session.stopped()) persist(session_id, session);
    return {200, progress(session_id, session)};
  } catch (const SessionError& e) {
    const std::string code = e.kind() == SessionError::Kind::already_stopped ? "already_stopped" : "out_of_order";
    return error_reply(409, code, e.what());
  } catch (const InvalidArgument& e) {
    return error_reply(400, "invalid_request", e.what());
  }
}

Reply InterviewService::get_state(const std::string& session_id) const {
  const auto entry = find(session_id);
  if (!entry) return not_found(session_id);
  std::lock_guard lock(entry->mutex);
  const Session& session = entry->session;
  io::json out = progress(session_id, session);
  io::json records = io::json::array();
  for (const auto& r : session.transcript()) records.push_back(io::transcript_record_to_json(r));
  out["transcript"] = std::move(records);
  out["config"] = io::session_config_to_json(session.config());
  return {200, std::move(out)};
}

Reply InterviewService::model_info() const {
  const SessionConfig defaults = SessionConfig::defaults(model_.num_causes(), model_.num_questions());
  return {200,
          {{"schema_version", kServiceSchemaVersion},
           {"num_causes", model_.num_causes()},
           {"num_questions", model_.num_questions()},
           {"cause_labels", model_.cause_labels},
           {"questions", io::bank_to_json(model_.bank)},
           {"default_config", io::session_config_to_json(defaults)}}};
}

void InterviewService::mount(httplib::Server& server) {
  auto send = [](httplib::Response& res, const Reply& reply) {
    res.status = reply.status;
    res.set_content(reply.body.dump(), "application/json");
  };
  auto parse_body = [](const httplib::Request& req) -> std::optional<io::json> {
    if (req.body.empty()) return io::json::object();
    auto j = io::json::parse(req.body, nullptr, false);
    if (j.is_discarded()) return std::nullopt;
    return j;
  };

  server.Post("/v1/sessions", [this, send, parse_body](const httplib::Request& req, httplib::Response& res) {
    const auto body = parse_body(req);
    if (!body) return send(res, error_reply(400, "invalid_json", "request body is not valid JSON"));
    send(res, create_session(*body));
  });
  server.Post(R"(/v1/sessions/([^/]+)/responses)",
              [this, send, parse_body](const httplib::Request& req, httplib::Response& res) {
                const auto body = parse_body(req);
                if (!body) return send(res, error_reply(400, "invalid_json", "request body is not valid JSON"));
                send(res, submit_response(req.matches[1], *body));
              });
  server.Get(R"(/v1/sessions/([^/]+))", [this, send](const httplib::Request& req, httplib::Response& res) {
    send(res, get_state(req.matches[1]));
  });
  server.Get("/v1/model/info", [this, send](const httplib::Request&, httplib::Response& res) {
    send(res, model_info());
  });
  server.set_error_handler([send](const httplib::Request&, httplib::Response& res) {
    if (res.body.empty()) send(res, error_reply(res.status, "not_found", "no such endpoint"));
  });
}

ServerOptions ServerOptions::from_env() {
  ServerOptions opts;
  if (const char* v = std::getenv("MODEL_PATH")) opts.model_path = v;
  if (const char* v = std::getenv("PORT")) opts.port = std::atoi(v);
  if (const char* v = std::getenv("TRANSCRIPT_DIR"); v && *v) opts.transcript_dir = v;
  return opts;
}

int run_server(const ServerOptions& options) {
  if (options.model_path.empty()) throw InvalidArgument("no model path given (set MODEL_PATH or --model)");
  InterviewService service(io::load_model(options.model_path), options.transcript_dir);
  httplib::Server server;
  service.mount(server);
  if (!server.bind_to_port(options.host, options.port)) {
    throw InvalidArgument("cannot bind " + options.host + ":" + std::to_string(options.port));
  }
  std::fprintf(stderr, "listening on %s:%d\n", options.host.c_str(), options.port);
  return server.listen_after_bind() ? 0 : 1;
}

}  // namespace activeva
