#include "activeva/datagen.hpp"
#include "activeva/io.hpp"
#include "activeva/service.hpp"

#include "test_support.hpp"

#include <doctest.h>
#include <httplib.h>

#include <filesystem>
#include <set>
#include <thread>

using namespace activeva;
using Eigen::Index;
using nlohmann::json;

namespace {

PosteriorModel gated_model() {
  std::vector<Question> qs;
  for (int k = 0; k < 8; ++k) {
    qs.push_back(Question{"q" + std::to_string(k), std::nullopt, std::nullopt, std::nullopt,
                          k == 0 ? std::optional<std::string>("Was there a fever?") : std::nullopt});
  }
  qs.push_back(Question{"q0_long", std::nullopt, Index{0}, 1, std::nullopt});
  qs.push_back(Question{"q3_sub", std::nullopt, Index{3}, 0, std::nullopt});
  Rng rng(3);
  const auto p = testing::random_point(rng, 4, static_cast<Index>(qs.size()), 0.05, 0.95);
  TrainingDataset data = simulate_rows(p, 120, 4);
  data.bank = QuestionBank(qs);
  data.cause_labels = {"malaria", "pneumonia", "injury", "other"};
  return fit(data, Hyperparameters::uniform(4));
}

json answer(const std::string& qid, const std::string& value) { return {{"question_id", qid}, {"value", value}}; }

std::string next_id(const Reply& r) { return r.body.at("next_question").at("id").get<std::string>(); }

// Answers every pending question with the value from `log` (by question id).
Reply drive(InterviewService& svc, const std::string& sid, Reply r, const std::map<std::string, std::string>& log) {
  while (r.body.contains("next_question")) {
    const auto qid = next_id(r);
    r = svc.submit_response(sid, answer(qid, log.at(qid)));
    REQUIRE(r.status == 200);
  }
  return r;
}

std::map<std::string, std::string> random_log(Rng& rng, const QuestionBank& bank) {
  std::map<std::string, std::string> log;
  for (const auto& q : bank.questions()) {
    const double u = rng.uniform();
    log[q.id] = u < 0.1 ? "dont_know" : (u < 0.55 ? "yes" : "no");
  }
  return log;
}

Response to_response(const std::string& v) {
  return v == "yes" ? Response::yes : (v == "no" ? Response::no : Response::missing);
}

}  // namespace

TEST_CASE("create issues a root question first") {
  InterviewService svc(gated_model());
  const auto r = svc.create_session(json::object());
  CHECK(r.status == 201);
  CHECK(r.body.at("schema_version") == kServiceSchemaVersion);
  CHECK(r.body.at("t") == 0);
  CHECK(r.body.at("status") == "active");
  const auto qid = next_id(r);
  const auto j = svc.model().bank.index_of(qid);
  REQUIRE(j.has_value());
  CHECK_FALSE(svc.model().bank[*j].parent.has_value());
  CHECK(r.body.at("next_question").at("index") == *j + 1);
  CHECK(r.body.at("class_posterior_top3").size() == 3);

  const auto other = svc.create_session(json::object());
  CHECK(other.body.at("session_id") != r.body.at("session_id"));
}

TEST_CASE("question text falls back to the id") {
  InterviewService svc(gated_model());
  const auto r = svc.create_session(json::parse(R"({"strategy": "static"})"));
  CHECK(next_id(r) == "q0");
  CHECK(r.body.at("next_question").at("text") == "Was there a fever?");
  const auto sid = r.body.at("session_id").get<std::string>();
  const auto r2 = svc.submit_response(sid, answer("q0", "no"));
  CHECK(next_id(r2) == "q1");
  CHECK(r2.body.at("next_question").at("text") == "q1");
}

TEST_CASE("invalid overrides are rejected") {
  InterviewService svc(gated_model());
  for (const char* body : {R"({"rule": {"p1st": 1.5}})", R"({"strategy": "random"})", R"({"lambda": -2})",
                           R"({"B": 0})"}) {
    CAPTURE(body);
    const auto r = svc.create_session(json::parse(body));
    CHECK(r.status == 400);
    CHECK(r.body.at("code") == "invalid_config");
    CHECK(r.body.at("message").get<std::string>().size() > 0);
  }
}

TEST_CASE("response errors") {
  InterviewService svc(gated_model());
  const auto r = svc.create_session(json::parse(R"({"strategy": "static", "rule": {"rule": "fixed_length", "T": 2}})"));
  const auto sid = r.body.at("session_id").get<std::string>();

  CHECK(svc.submit_response("nope", answer("q0", "yes")).status == 404);
  CHECK(svc.get_state("nope").status == 404);
  CHECK(svc.get_state("nope").body.at("code") == "session_not_found");

  const auto wrong = svc.submit_response(sid, answer("q5", "yes"));
  CHECK(wrong.status == 409);
  CHECK(wrong.body.at("code") == "out_of_order");
  CHECK(svc.submit_response(sid, answer("zzz", "yes")).body.at("code") == "unknown_question");
  CHECK(svc.submit_response(sid, answer("q0", "maybe")).status == 400);
  CHECK(svc.submit_response(sid, json::parse(R"({"value": "yes"})")).status == 400);

  CHECK(svc.submit_response(sid, answer("q0", "yes")).status == 200);
  const auto last = svc.submit_response(sid, answer("q1", "no"));
  CHECK(last.body.at("status") == "stopped");
  CHECK(last.body.at("final_result").at("reason") == "max_length_reached");
  CHECK(last.body.at("final_result").at("length") == 2);
  const auto again = svc.submit_response(sid, answer("q2", "no"));
  CHECK(again.status == 409);
  CHECK(again.body.at("code") == "already_stopped");
}

TEST_CASE("dont_know issues the next question with the posterior unchanged") {
  InterviewService svc(gated_model());
  const auto r = svc.create_session(json::object());
  const auto sid = r.body.at("session_id").get<std::string>();
  const auto r2 = svc.submit_response(sid, answer(next_id(r), "dont_know"));
  CHECK(r2.status == 200);
  CHECK(r2.body.at("t") == 1);
  CHECK(r2.body.contains("next_question"));
  CHECK(r2.body.at("class_posterior_top3") == r.body.at("class_posterior_top3"));
}

TEST_CASE("predictive rule surfaces a criterion_met result") {
  InterviewService svc(gated_model());
  const auto r = svc.create_session(json::parse(R"({"B": 40, "rule": {"p1st": 0.5, "d": 0.5, "r": 0.5}})"));
  const auto sid = r.body.at("session_id").get<std::string>();
  std::map<std::string, std::string> log;
  for (const auto& q : svc.model().bank.questions()) log[q.id] = "yes";
  const auto end = drive(svc, sid, r, log);
  const auto& fin = end.body.at("final_result");
  CHECK(end.body.at("status") == "stopped");
  CHECK(end.body.contains("stop_fraction"));
  if (fin.at("reason") == "criterion_met") CHECK(end.body.at("stop_fraction").get<double>() >= 0.5);
  CHECK(fin.at("posterior").size() == 4);
  CHECK(fin.contains("cause_label"));
}

TEST_CASE("state snapshots") {
  InterviewService svc(gated_model());
  const auto r = svc.create_session(json::parse(R"({"strategy": "active_point"})"));
  const auto sid = r.body.at("session_id").get<std::string>();
  const auto fresh = svc.get_state(sid);
  CHECK(fresh.body.at("t") == 0);
  CHECK(fresh.body.at("transcript").empty());
  CHECK(fresh.body.at("config").at("strategy") == "active_point");

  auto cur = r;
  std::vector<std::string> asked;
  for (int k = 0; k < 3 && cur.body.contains("next_question"); ++k) {
    asked.push_back(next_id(cur));
    cur = svc.submit_response(sid, answer(asked.back(), "no"));
  }
  const auto st = svc.get_state(sid);
  REQUIRE(st.body.at("transcript").size() == asked.size());
  for (std::size_t k = 0; k < asked.size(); ++k) {
    CHECK(st.body.at("transcript")[k].at("t") == k + 1);
    CHECK(st.body.at("transcript")[k].at("question_id") == asked[k]);
  }
}

TEST_CASE("service transcripts match direct sessions") {
  const auto model = gated_model();
  InterviewService svc(model);
  Rng rng(5);
  for (int rep = 0; rep < 20; ++rep) {
    json overrides = {{"seed", rep}, {"B", 30}};
    if (rep % 3 == 1) overrides["strategy"] = "active_point";
    if (rep % 3 == 2) overrides["lambda"] = 0.5;
    const auto log = random_log(rng, model.bank);

    const auto r = svc.create_session(overrides);
    REQUIRE(r.status == 201);
    const auto sid = r.body.at("session_id").get<std::string>();
    const auto end = drive(svc, sid, r, log);

    const auto cfg = io::session_config_from_json(overrides, model.num_causes(), model.bank);
    Session direct = Session::start(model, cfg);
    while (!direct.stopped()) {
      const auto q = direct.next_question();
      if (!q) break;
      direct.record_response(*q, to_response(log.at(model.bank[*q].id)));
    }
    json records = json::array();
    for (const auto& rec : direct.transcript()) records.push_back(io::transcript_record_to_json(rec));
    CHECK(svc.get_state(sid).body.at("transcript") == records);
    CHECK(end.body.at("final_result") == io::final_result_to_json(direct.finalize()));
  }
}

TEST_CASE("completed transcripts are persisted") {
  const auto dir = std::filesystem::temp_directory_path() / "activeva_test_service";
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  InterviewService svc(gated_model(), dir);
  const auto r = svc.create_session(json::parse(R"({"rule": {"rule": "fixed_length", "T": 3}})"));
  const auto sid = r.body.at("session_id").get<std::string>();
  std::map<std::string, std::string> log;
  for (const auto& q : svc.model().bank.questions()) log[q.id] = "no";
  drive(svc, sid, r, log);
  const auto path = dir / (sid + ".jsonl");
  REQUIRE(std::filesystem::exists(path));
  const auto text = io::read_text(path);
  CHECK(std::count(text.begin(), text.end(), '\n') == 3);
}

TEST_CASE("concurrent sessions do not interfere") {
  const auto model = gated_model();
  InterviewService svc(model);
  Rng rng(6);
  std::vector<std::map<std::string, std::string>> logs;
  for (int k = 0; k < 8; ++k) logs.push_back(random_log(rng, model.bank));

  // sequential reference
  std::vector<json> expected;
  for (int k = 0; k < 8; ++k) {
    const auto r = svc.create_session({{"seed", k}, {"B", 20}});
    const auto sid = r.body.at("session_id").get<std::string>();
    expected.push_back(drive(svc, sid, r, logs[static_cast<std::size_t>(k)]).body.at("final_result"));
  }

  std::vector<json> got(8);
  std::vector<std::thread> workers;
  for (int k = 0; k < 8; ++k) {
    workers.emplace_back([&, k] {
      auto r = svc.create_session({{"seed", k}, {"B", 20}});
      const auto sid = r.body.at("session_id").get<std::string>();
      const auto& log = logs[static_cast<std::size_t>(k)];
      while (r.body.contains("next_question")) {
        const auto qid = r.body.at("next_question").at("id").get<std::string>();
        r = svc.submit_response(sid, answer(qid, log.at(qid)));
      }
      got[static_cast<std::size_t>(k)] = r.body.value("final_result", json());
    });
  }
  for (auto& w : workers) w.join();
  for (int k = 0; k < 8; ++k) CHECK(got[static_cast<std::size_t>(k)] == expected[static_cast<std::size_t>(k)]);
}

TEST_CASE("model info") {
  InterviewService svc(gated_model());
  const auto info = svc.model_info();
  CHECK(info.status == 200);
  CHECK(info.body.at("num_causes") == 4);
  CHECK(info.body.at("num_questions") == 10);
  CHECK(info.body.at("cause_labels")[0] == "malaria");
  CHECK(info.body.at("questions").size() == 10);
  CHECK(info.body.contains("default_config"));
}

TEST_CASE("http surface") {
  InterviewService svc(gated_model());
  httplib::Server server;
  svc.mount(server);
  const int port = server.bind_to_any_port("127.0.0.1");
  REQUIRE(port > 0);
  std::thread th([&] { server.listen_after_bind(); });
  server.wait_until_ready();

  httplib::Client client("127.0.0.1", port);
  auto res = client.Get("/v1/model/info");
  REQUIRE(res);
  CHECK(res->status == 200);
  CHECK(json::parse(res->body).at("num_causes") == 4);

  res = client.Post("/v1/sessions", R"({"strategy": "static", "rule": {"rule": "fixed_length", "T": 2}})",
                    "application/json");
  REQUIRE(res);
  CHECK(res->status == 201);
  const auto created = json::parse(res->body);
  const auto sid = created.at("session_id").get<std::string>();

  res = client.Post("/v1/sessions/" + sid + "/responses", answer("q0", "yes").dump(), "application/json");
  REQUIRE(res);
  CHECK(res->status == 200);
  res = client.Post("/v1/sessions/" + sid + "/responses", answer("q5", "yes").dump(), "application/json");
  REQUIRE(res);
  CHECK(res->status == 409);
  res = client.Post("/v1/sessions/" + sid + "/responses", "{not json", "application/json");
  REQUIRE(res);
  CHECK(res->status == 400);
  CHECK(json::parse(res->body).at("code") == "invalid_json");

  res = client.Get("/v1/sessions/" + sid);
  REQUIRE(res);
  CHECK(json::parse(res->body).at("transcript").size() == 1);
  res = client.Get("/v1/sessions/missing");
  REQUIRE(res);
  CHECK(res->status == 404);
  res = client.Get("/v1/nothing/here");
  REQUIRE(res);
  CHECK(res->status == 404);
  CHECK(json::parse(res->body).contains("code"));

  server.stop();
  th.join();
}
