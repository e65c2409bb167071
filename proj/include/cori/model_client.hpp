#pragma once

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <memory>
#include <mutex>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "cori/image.hpp"
#include "json.hpp"

namespace cori {

using PngBytes = std::shared_ptr<const std::vector<std::uint8_t>>;

struct ChatTurn {
  std::string role;  // "system", "user" or "assistant"
  std::string text;
  std::vector<PngBytes> images;
};

struct ChatRequest {
  std::string model;
  std::vector<ChatTurn> messages;
  std::optional<double> temperature;
};

class Transport {
 public:
  virtual ~Transport() = default;
  /// Returns the assistant text; throws TransportError.
  virtual std::string complete(const ChatRequest& request) = 0;
};

/// Chat-completions request body: role/content messages, image parts as
/// base64 PNG data URLs after the text part.
nlohmann::json chat_request_body(const ChatRequest& request);

/// choices[0].message.content; ParseError otherwise.
std::string chat_response_text(const nlohmann::json& body);

struct HttpTransportOptions {
  std::string base_url = "https://api.openai.com/v1";
  std::string api_key_env_var = "OPENAI_API_KEY";
  double timeout_s = 120.0;
  int max_attempts = 3;
  double initial_backoff_s = 1.0;
  std::size_t max_payload_bytes = 20u * 1024u * 1024u;
};

/// POST {base_url}/chat/completions. 429, 5xx and connection failures are
/// retried with exponential backoff; other statuses fail immediately.
class HttpTransport : public Transport {
 public:
  using Sleeper = std::function<void(std::chrono::duration<double>)>;

  explicit HttpTransport(HttpTransportOptions options, Sleeper sleeper = {});
  std::string complete(const ChatRequest& request) override;

 private:
  HttpTransportOptions options_;
  Sleeper sleeper_;
};

/// Replays canned responses in order. Safe to share between sessions so one
/// transcript can drive a whole pipeline run.
class MockTranscriptTransport : public Transport {
 public:
  static constexpr const char* kDelimiter = "%%% end-of-response %%%";

  explicit MockTranscriptTransport(std::vector<std::string> responses);
  /// Responses are separated by lines equal to kDelimiter; surrounding
  /// blank lines are trimmed; a blank tail after the last delimiter is ignored.
  static std::shared_ptr<MockTranscriptTransport> from_file(const std::filesystem::path& path);
  static std::vector<std::string> parse_transcript(const std::string& text);

  std::string complete(const ChatRequest& request) override;

  std::vector<ChatRequest> requests() const;
  std::size_t remaining() const;

 private:
  mutable std::mutex mutex_;
  std::vector<std::string> responses_;
  std::size_t next_ = 0;
  std::vector<ChatRequest> requests_;
};

/// Append-only multi-turn conversation. Images are PNG-encoded once when
/// attached and re-sent with every later request as part of the history.
class ChatSession {
 public:
  ChatSession(std::string model_id, std::shared_ptr<Transport> transport,
              std::optional<double> temperature = 0.0);

  /// Sends history plus a new user turn. Both turns are appended only when
  /// the transport succeeds.
  std::string send_turn(const std::string& text, std::span<const RgbImage* const> images = {});

  const std::string& model_id() const { return model_id_; }
  const std::vector<ChatTurn>& history() const { return history_; }

 private:
  std::string model_id_;
  std::shared_ptr<Transport> transport_;
  std::optional<double> temperature_;
  std::vector<ChatTurn> history_;
};

}  // namespace cori
