#ifndef TWOSTEP_LLM_H_
#define TWOSTEP_LLM_H_

#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <string_view>
#include <vector>

namespace twostep {

struct ChatTurn {
  std::string role;  // "user" or "assistant"
  std::string text;
};

struct ChatRequest {
  std::string system;
  std::vector<ChatTurn> turns;
  double temperature = 0.0;
  double top_p = 1.0;
  std::string model_id;
};

enum class BackendKind { kRemote, kFixture, kRecorded };
std::string_view ToString(BackendKind kind);

struct ChatResponse {
  std::string text;
  double latency = 0.0;
  BackendKind backend = BackendKind::kFixture;
};

// Collapses whitespace runs to one space and trims both ends.
std::string NormalizeWhitespace(std::string_view text);

// Hex SHA-256 over the whitespace-normalized system text and turns. Sampling
// parameters and the model id are not part of the key.
std::string RequestDigest(const ChatRequest& request);

class ChatBackend {
 public:
  virtual ~ChatBackend() = default;
  virtual ChatResponse Complete(const ChatRequest& request) = 0;
};

// Replays `<dir>/<digest>.json` files holding
// {"request_digest": ..., "response_text": ..., "latency_seconds": ...}.
// The recorded latency (0 when absent) is reported, so replays account LLM
// time exactly like the original run. Throws FixtureMiss.
class FixtureBackend : public ChatBackend {
 public:
  explicit FixtureBackend(std::filesystem::path dir);
  ChatResponse Complete(const ChatRequest& request) override;

 private:
  std::filesystem::path dir_;
};

// Answers with a caller-supplied function. Used for scripted responders and
// tests. Every call reports the same fixed latency.
class CallbackBackend : public ChatBackend {
 public:
  using Fn = std::function<std::string(const ChatRequest&)>;
  explicit CallbackBackend(Fn fn, double latency_seconds = 0.0)
      : fn_(std::move(fn)), latency_(latency_seconds) {}
  ChatResponse Complete(const ChatRequest& request) override;

 private:
  Fn fn_;
  double latency_;
};

// Writes one fixture file; returns its path.
std::filesystem::path WriteFixture(const std::filesystem::path& dir,
                                   const ChatRequest& request,
                                   std::string_view response_text,
                                   double latency_seconds = 0.0);

// Replays when a fixture exists, otherwise asks `upstream` and persists the
// answer for the next run.
class RecordingBackend : public ChatBackend {
 public:
  RecordingBackend(std::filesystem::path dir, std::shared_ptr<ChatBackend> upstream);
  ChatResponse Complete(const ChatRequest& request) override;

 private:
  std::filesystem::path dir_;
  std::shared_ptr<ChatBackend> upstream_;
  std::mutex mutex_;
};

struct HttpReply {
  // 0 when no response arrived (connection failure, timeout).
  int status = 0;
  std::string body;
};

using HttpTransport = std::function<HttpReply(
    const std::string& url, const std::map<std::string, std::string>& headers,
    const std::string& body)>;

struct RemoteConfig {
  std::string endpoint;  // full URL of the chat-completions route
  std::string api_key;
  std::string model;
  int max_attempts = 3;
  double initial_backoff_seconds = 1.0;
  double timeout_seconds = 120.0;

  // TWOSTEP_LLM_ENDPOINT, TWOSTEP_LLM_KEY, TWOSTEP_LLM_MODEL.
  static RemoteConfig FromEnv();
};

// Chat-completion over HTTP(S). Body:
//   {"model", "messages": [{"role", "content"}], "temperature", "top_p"}
// and the reply's choices[0].message.content is returned. Transient failures
// (no reply, 429, 5xx) are retried with exponential backoff. Throws
// RateLimited when 429 persists and BackendUnavailable otherwise.
class RemoteBackend : public ChatBackend {
 public:
  explicit RemoteBackend(RemoteConfig config, HttpTransport transport = {});
  ChatResponse Complete(const ChatRequest& request) override;

  static std::string EncodeBody(const ChatRequest& request, const std::string& model);

 private:
  RemoteConfig config_;
  HttpTransport transport_;
};

// Default transport backed by cpp-httplib.
HttpTransport MakeHttpTransport(double timeout_seconds);

// "fixture:<dir>", "record:<dir>" (remote upstream from the environment) or
// "remote". Throws BackendUnavailable for anything else.
std::shared_ptr<ChatBackend> MakeBackend(std::string_view spec);

}  // namespace twostep

#endif  // TWOSTEP_LLM_H_
