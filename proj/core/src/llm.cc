#include "twostep/llm.h"

#include <openssl/evp.h>

#include <cctype>
#include <chrono>
#include <cstdlib>
#include <thread>

#include <httplib.h>
#include <nlohmann/json.hpp>

#include "twostep/errors.h"
#include "twostep/pddl.h"

namespace twostep {

namespace fs = std::filesystem;
using nlohmann::json;

std::string_view ToString(BackendKind kind) {
  switch (kind) {
    case BackendKind::kRemote:
      return "remote";
    case BackendKind::kFixture:
      return "fixture";
    case BackendKind::kRecorded:
      return "recorded";
  }
  return "unknown";
}

std::string NormalizeWhitespace(std::string_view text) {
  std::string out;
  bool pending_space = false;
  for (char c : text) {
    if (std::isspace(static_cast<unsigned char>(c))) {
      pending_space = !out.empty();
      continue;
    }
    if (pending_space) out.push_back(' ');
    pending_space = false;
    out.push_back(c);
  }
  return out;
}

namespace {

std::string Sha256Hex(std::string_view data) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int length = 0;
  if (EVP_Digest(data.data(), data.size(), digest, &length, EVP_sha256(), nullptr) != 1) {
    throw Error("SHA-256 failed");
  }
  static constexpr char kHex[] = "0123456789abcdef";
  std::string hex;
  for (unsigned int i = 0; i < length; ++i) {
    hex.push_back(kHex[digest[i] >> 4]);
    hex.push_back(kHex[digest[i] & 0xf]);
  }
  return hex;
}

double Since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

}  // namespace

std::string RequestDigest(const ChatRequest& request) {
  // Unit/record separators cannot occur in normalized text boundaries.
  std::string key = "system\x1f" + NormalizeWhitespace(request.system);
  for (const auto& turn : request.turns) {
    key += "\x1e" + turn.role + "\x1f" + NormalizeWhitespace(turn.text);
  }
  return Sha256Hex(key);
}

FixtureBackend::FixtureBackend(fs::path dir) : dir_(std::move(dir)) {}

ChatResponse FixtureBackend::Complete(const ChatRequest& request) {
  const std::string digest = RequestDigest(request);
  const fs::path path = dir_ / (digest + ".json");
  if (!fs::exists(path)) throw FixtureMiss(digest);
  const json doc = json::parse(ReadTextFile(path));
  ChatResponse response;
  response.text = doc.at("response_text").get<std::string>();
  response.latency = doc.value("latency_seconds", 0.0);
  response.backend = BackendKind::kFixture;
  return response;
}

fs::path WriteFixture(const fs::path& dir, const ChatRequest& request,
                      std::string_view response_text, double latency_seconds) {
  const std::string digest = RequestDigest(request);
  json doc;
  doc["request_digest"] = digest;
  doc["response_text"] = response_text;
  doc["latency_seconds"] = latency_seconds;
  fs::create_directories(dir);
  const fs::path path = dir / (digest + ".json");
  WriteTextFile(path, doc.dump(2) + "\n");
  return path;
}

RecordingBackend::RecordingBackend(fs::path dir, std::shared_ptr<ChatBackend> upstream)
    : dir_(std::move(dir)), upstream_(std::move(upstream)) {}

ChatResponse RecordingBackend::Complete(const ChatRequest& request) {
  {
    std::lock_guard lock(mutex_);
    try {
      ChatResponse replay = FixtureBackend(dir_).Complete(request);
      replay.backend = BackendKind::kRecorded;
      return replay;
    } catch (const FixtureMiss&) {
    }
  }
  ChatResponse fresh = upstream_->Complete(request);
  std::lock_guard lock(mutex_);
  WriteFixture(dir_, request, fresh.text, fresh.latency);
  return fresh;
}

RemoteConfig RemoteConfig::FromEnv() {
  auto get = [](const char* name) {
    const char* value = std::getenv(name);
    return value ? std::string(value) : std::string();
  };
  RemoteConfig config;
  config.endpoint = get("TWOSTEP_LLM_ENDPOINT");
  config.api_key = get("TWOSTEP_LLM_KEY");
  config.model = get("TWOSTEP_LLM_MODEL");
  return config;
}

HttpTransport MakeHttpTransport(double timeout_seconds) {
  return [timeout_seconds](const std::string& url,
                           const std::map<std::string, std::string>& headers,
                           const std::string& body) {
    // scheme://host[:port]/path
    const auto scheme_end = url.find("://");
    if (scheme_end == std::string::npos) {
      throw BackendUnavailable("malformed endpoint URL: " + url);
    }
    const auto path_start = url.find('/', scheme_end + 3);
    const std::string base = url.substr(0, path_start);
    const std::string path =
        path_start == std::string::npos ? "/" : url.substr(path_start);

    httplib::Client client(base);
    const auto seconds = static_cast<time_t>(timeout_seconds);
    client.set_connection_timeout(seconds, 0);
    client.set_read_timeout(seconds, 0);
    client.set_write_timeout(seconds, 0);
    httplib::Headers h;
    for (const auto& [k, v] : headers) h.emplace(k, v);
    HttpReply reply;
    if (auto res = client.Post(path, h, body, "application/json")) {
      reply.status = res->status;
      reply.body = res->body;
    }
    return reply;
  };
}

RemoteBackend::RemoteBackend(RemoteConfig config, HttpTransport transport)
    : config_(std::move(config)), transport_(std::move(transport)) {
  if (!transport_) transport_ = MakeHttpTransport(config_.timeout_seconds);
}

std::string RemoteBackend::EncodeBody(const ChatRequest& request,
                                      const std::string& model) {
  json body;
  body["model"] = request.model_id.empty() ? model : request.model_id;
  json messages = json::array();
  messages.push_back({{"role", "system"}, {"content", request.system}});
  for (const auto& turn : request.turns) {
    messages.push_back({{"role", turn.role}, {"content", turn.text}});
  }
  body["messages"] = std::move(messages);
  body["temperature"] = request.temperature;
  body["top_p"] = request.top_p;
  return body.dump();
}

ChatResponse RemoteBackend::Complete(const ChatRequest& request) {
  if (config_.endpoint.empty()) {
    throw BackendUnavailable("TWOSTEP_LLM_ENDPOINT is not set");
  }
  std::map<std::string, std::string> headers;
  if (!config_.api_key.empty()) headers["Authorization"] = "Bearer " + config_.api_key;
  const std::string body = EncodeBody(request, config_.model);

  const auto start = std::chrono::steady_clock::now();
  HttpReply reply;
  double backoff = config_.initial_backoff_seconds;
  for (int attempt = 1; attempt <= config_.max_attempts; ++attempt) {
    reply = transport_(config_.endpoint, headers, body);
    const bool transient = reply.status == 0 || reply.status == 429 || reply.status >= 500;
    if (!transient) break;
    if (attempt < config_.max_attempts) {
      std::this_thread::sleep_for(std::chrono::duration<double>(backoff));
      backoff *= 2.0;
    }
  }
  if (reply.status == 429) {
    throw RateLimited("rate limited after " + std::to_string(config_.max_attempts) +
                      " attempts");
  }
  if (reply.status != 200) {
    throw BackendUnavailable("chat endpoint returned status " +
                             std::to_string(reply.status));
  }
  ChatResponse response;
  try {
    const json doc = json::parse(reply.body);
    response.text = doc.at("choices").at(0).at("message").at("content").get<std::string>();
  } catch (const json::exception& e) {
    throw BackendUnavailable(std::string("malformed chat response: ") + e.what());
  }
  response.latency = Since(start);
  response.backend = BackendKind::kRemote;
  return response;
}

std::shared_ptr<ChatBackend> MakeBackend(std::string_view spec) {
  if (spec.rfind("fixture:", 0) == 0) {
    return std::make_shared<FixtureBackend>(fs::path(spec.substr(8)));
  }
  if (spec.rfind("record:", 0) == 0) {
    return std::make_shared<RecordingBackend>(
        fs::path(spec.substr(7)),
        std::make_shared<RemoteBackend>(RemoteConfig::FromEnv()));
  }
  if (spec == "remote") {
    return std::make_shared<RemoteBackend>(RemoteConfig::FromEnv());
  }
  throw BackendUnavailable("unknown backend '" + std::string(spec) +
                           "' (expected fixture:<dir>, record:<dir> or remote)");
}

ChatResponse CallbackBackend::Complete(const ChatRequest& request) {
  ChatResponse response;
  response.text = fn_(request);
  response.latency = latency_;
  response.backend = BackendKind::kFixture;
  return response;
}

}  // namespace twostep
