#include "twostep/llm.h"

#include <gtest/gtest.h>

#include <httplib.h>
#include <nlohmann/json.hpp>

#include <atomic>
#include <filesystem>
#include <thread>

#include "twostep/errors.h"

namespace twostep {
namespace {

namespace fs = std::filesystem;

ChatRequest Sample(const std::string& text = "hello") {
  ChatRequest r;
  r.system = "You are a planner.";
  r.turns.push_back({"user", text});
  return r;
}

fs::path Scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("twostep-llm-" + name);
  fs::remove_all(p);
  return p;
}

TEST(DigestTest, IgnoresWhitespaceAndSampling) {
  ChatRequest a = Sample("find   the\n goal ");
  ChatRequest b = Sample("find the goal");
  b.temperature = 0.7;
  b.model_id = "other";
  EXPECT_EQ(RequestDigest(a), RequestDigest(b));
  EXPECT_NE(RequestDigest(a), RequestDigest(Sample("find a goal")));
  EXPECT_EQ(RequestDigest(a).size(), 64u);
  EXPECT_EQ(NormalizeWhitespace("  a \t b\n"), "a b");
}

TEST(FixtureTest, ReplaysRecordedLatencyAndMissesLoudly) {
  const fs::path dir = Scratch("fixture");
  WriteFixture(dir, Sample(), "answer", 1.25);
  FixtureBackend backend(dir);
  const ChatResponse r = backend.Complete(Sample());
  EXPECT_EQ(r.text, "answer");
  EXPECT_DOUBLE_EQ(r.latency, 1.25);
  EXPECT_EQ(r.backend, BackendKind::kFixture);
  try {
    backend.Complete(Sample("unknown"));
    FAIL();
  } catch (const FixtureMiss& e) {
    EXPECT_EQ(e.digest(), RequestDigest(Sample("unknown")));
  }
  fs::remove_all(dir);
}

TEST(RecordingTest, CallsUpstreamOnceThenReplays) {
  const fs::path dir = Scratch("record");
  int calls = 0;
  auto upstream = std::make_shared<CallbackBackend>(
      [&calls](const ChatRequest& r) {
        ++calls;
        return "echo " + r.turns.back().text;
      },
      0.5);
  RecordingBackend recorder(dir, upstream);
  EXPECT_EQ(recorder.Complete(Sample()).text, "echo hello");
  EXPECT_EQ(recorder.Complete(Sample()).text, "echo hello");
  EXPECT_EQ(calls, 1);
  FixtureBackend replay(dir);
  EXPECT_DOUBLE_EQ(replay.Complete(Sample()).latency, 0.5);
  fs::remove_all(dir);
}

TEST(MakeBackendTest, ParsesSpecs) {
  EXPECT_NE(MakeBackend("fixture:/tmp"), nullptr);
  EXPECT_THROW(MakeBackend("carrier-pigeon"), BackendUnavailable);
}

RemoteConfig FastRetries() {
  RemoteConfig c;
  c.endpoint = "http://example.invalid/v1/chat/completions";
  c.model = "m";
  c.initial_backoff_seconds = 0.001;
  return c;
}

std::string Reply(const std::string& content) {
  return nlohmann::json{{"choices", {{{"message", {{"content", content}}}}}}}.dump();
}

TEST(RemoteTest, RetriesTransientFailures) {
  int attempts = 0;
  RemoteBackend backend(FastRetries(), [&](const std::string&, const auto&, const std::string&) {
    ++attempts;
    return attempts < 3 ? HttpReply{503, ""} : HttpReply{200, Reply("ok")};
  });
  EXPECT_EQ(backend.Complete(Sample()).text, "ok");
  EXPECT_EQ(attempts, 3);
}

TEST(RemoteTest, PersistentRateLimitAndHardErrors) {
  int attempts = 0;
  RemoteBackend limited(FastRetries(), [&](const std::string&, const auto&, const std::string&) {
    ++attempts;
    return HttpReply{429, ""};
  });
  EXPECT_THROW(limited.Complete(Sample()), RateLimited);
  EXPECT_EQ(attempts, 3);

  attempts = 0;
  RemoteBackend bad_request(FastRetries(),
                            [&](const std::string&, const auto&, const std::string&) {
                              ++attempts;
                              return HttpReply{400, "no"};
                            });
  EXPECT_THROW(bad_request.Complete(Sample()), BackendUnavailable);
  EXPECT_EQ(attempts, 1);

  RemoteBackend malformed(FastRetries(), [](const std::string&, const auto&, const std::string&) {
    return HttpReply{200, "{}"};
  });
  EXPECT_THROW(malformed.Complete(Sample()), BackendUnavailable);
}

TEST(RemoteTest, EncodesMessages) {
  const auto body = nlohmann::json::parse(RemoteBackend::EncodeBody(Sample(), "model-x"));
  EXPECT_EQ(body["model"], "model-x");
  EXPECT_EQ(body["messages"][0]["role"], "system");
  EXPECT_EQ(body["messages"][1]["content"], "hello");
  EXPECT_EQ(body["temperature"], 0.0);
}

TEST(RemoteTest, TalksHttpToALocalServer) {
  httplib::Server server;
  std::atomic<int> hits{0};
  std::string seen_auth;
  server.Post("/v1/chat/completions", [&](const httplib::Request& req, httplib::Response& res) {
    seen_auth = req.get_header_value("Authorization");
    const auto body = nlohmann::json::parse(req.body);
    if (hits++ == 0) {
      res.status = 500;
      return;
    }
    res.set_content(Reply("pong: " + body["messages"][1]["content"].get<std::string>()),
                    "application/json");
  });
  const int port = server.bind_to_any_port("127.0.0.1");
  std::thread thread([&] { server.listen_after_bind(); });
  server.wait_until_ready();

  RemoteConfig config = FastRetries();
  config.endpoint = "http://127.0.0.1:" + std::to_string(port) + "/v1/chat/completions";
  config.api_key = "secret";
  config.timeout_seconds = 5;
  RemoteBackend backend(config);
  const ChatResponse r = backend.Complete(Sample("ping"));
  EXPECT_EQ(r.text, "pong: ping");
  EXPECT_EQ(r.backend, BackendKind::kRemote);
  EXPECT_EQ(hits.load(), 2);
  EXPECT_EQ(seen_auth, "Bearer secret");

  server.stop();
  thread.join();

  // Nothing listens any more: connection failures end as unavailable.
  EXPECT_THROW(backend.Complete(Sample("ping")), BackendUnavailable);
}

}  // namespace
}  // namespace twostep
