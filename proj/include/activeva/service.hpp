#pragma once

#include "activeva/io.hpp"
#include "activeva/model.hpp"
#include "activeva/session.hpp"

#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <tuple>

namespace httplib {
class Server;
}

namespace activeva {

inline constexpr int kServiceSchemaVersion = 1;

/// JSON body plus HTTP status, independent of the transport.
struct Reply {
  int status = 200;
  io::json body;
};

/// Interview sessions over one loaded model. Handlers are safe to call
/// concurrently; calls on one session are serialized.
class InterviewService {
 public:
  explicit InterviewService(PosteriorModel model, std::optional<std::filesystem::path> transcript_dir = std::nullopt);

  /// POST /v1/sessions; body holds SessionConfig overrides.
  Reply create_session(const io::json& overrides);
  /// POST /v1/sessions/{id}/responses; body {question_id, value}.
  Reply submit_response(const std::string& session_id, const io::json& body);
  /// GET /v1/sessions/{id}
  Reply get_state(const std::string& session_id) const;
  /// GET /v1/model/info
  Reply model_info() const;

  /// Registers the /v1 routes on `server`.
  void mount(httplib::Server& server);

  const PosteriorModel& model() const { return model_; }

 private:
  struct Entry {
    mutable std::mutex mutex;
    Session session;
    explicit Entry(Session s) : session(std::move(s)) {}
  };

  std::shared_ptr<const ScoringContext> context_for(const SessionConfig& config);
  std::shared_ptr<Entry> find(const std::string& id) const;
  io::json progress(const std::string& id, const Session& session) const;
  void persist(const std::string& id, const Session& session) const;

  const PosteriorModel model_;
  const std::optional<std::filesystem::path> transcript_dir_;
  std::shared_ptr<const ScoringContext> point_context_;

  mutable std::mutex sessions_mutex_;
  std::map<std::string, std::shared_ptr<Entry>> sessions_;
  std::uint64_t next_id_ = 1;

  std::mutex contexts_mutex_;
  std::map<std::tuple<int, std::uint64_t>, std::shared_ptr<const ScoringContext>> draw_contexts_;
};

struct ServerOptions {
  std::filesystem::path model_path;
  std::string host = "0.0.0.0";
  int port = 8080;
  std::optional<std::filesystem::path> transcript_dir;

  /// MODEL_PATH, PORT, TRANSCRIPT_DIR; unset variables keep the defaults.
  static ServerOptions from_env();
};

/// Loads the model and blocks serving HTTP until the process ends.
int run_server(const ServerOptions& options);

}  // namespace activeva
