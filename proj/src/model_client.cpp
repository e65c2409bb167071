#include "cori/model_client.hpp"

#include <fmt/format.h>
#include <httplib.h>
#include <spdlog/spdlog.h>

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <regex>
#include <sstream>
#include <thread>

#include "cori/errors.hpp"

namespace cori {

nlohmann::json chat_request_body(const ChatRequest& request) {
  nlohmann::json messages = nlohmann::json::array();
  for (const auto& turn : request.messages) {
    if (turn.images.empty()) {
      messages.push_back({{"role", turn.role}, {"content", turn.text}});
      continue;
    }
    nlohmann::json parts = nlohmann::json::array();
    parts.push_back({{"type", "text"}, {"text", turn.text}});
    for (const auto& png : turn.images) {
      parts.push_back({{"type", "image_url"},
                       {"image_url", {{"url", "data:image/png;base64," + base64_encode(*png)}}}});
    }
    messages.push_back({{"role", turn.role}, {"content", parts}});
  }
  nlohmann::json body{{"model", request.model}, {"messages", messages}};
  if (request.temperature) body["temperature"] = *request.temperature;
  return body;
}

std::string chat_response_text(const nlohmann::json& body) {
  try {
    return body.at("choices").at(0).at("message").at("content").get<std::string>();
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(fmt::format("chat response has no choices[0].message.content: {}", e.what()));
  }
}

namespace {

std::size_t image_count(const ChatRequest& request) {
  std::size_t n = 0;
  for (const auto& t : request.messages) n += t.images.size();
  return n;
}

bool retryable(int status) { return status == 429 || status >= 500; }

}  // namespace

HttpTransport::HttpTransport(HttpTransportOptions options, Sleeper sleeper)
    : options_(std::move(options)), sleeper_(std::move(sleeper)) {
  if (!sleeper_) sleeper_ = [](std::chrono::duration<double> d) { std::this_thread::sleep_for(d); };
  if (options_.max_attempts < 1) throw std::invalid_argument("HttpTransport: max_attempts must be >= 1");
}

std::string HttpTransport::complete(const ChatRequest& request) {
  static const std::regex url_re(R"(^(https?://[^/]+)(/.*)?$)");
  std::smatch m;
  if (!std::regex_match(options_.base_url, m, url_re)) {
    throw std::invalid_argument(fmt::format("invalid api base url '{}'", options_.base_url));
  }
  std::string path = m[2].matched ? m[2].str() : "";
  while (!path.empty() && path.back() == '/') path.pop_back();
  path += "/chat/completions";

  const std::string body = chat_request_body(request).dump();
  if (body.size() > options_.max_payload_bytes) {
    throw TransportError(fmt::format("request payload of {} bytes exceeds the {} byte limit", body.size(),
                                     options_.max_payload_bytes));
  }

  httplib::Headers headers;
  if (!options_.api_key_env_var.empty()) {
    if (const char* key = std::getenv(options_.api_key_env_var.c_str()); key != nullptr && *key != '\0') {
      headers.emplace("Authorization", std::string("Bearer ") + key);
    }
  }

  httplib::Client client(m[1].str());
  const auto timeout = std::chrono::duration_cast<std::chrono::microseconds>(
      std::chrono::duration<double>(options_.timeout_s));
  client.set_connection_timeout(timeout);
  client.set_read_timeout(timeout);
  client.set_write_timeout(timeout);

  spdlog::info("chat request: model={} messages={} images={} payload_bytes={}", request.model,
               request.messages.size(), image_count(request), body.size());

  std::string last_error;
  int last_status = 0;
  for (int attempt = 1; attempt <= options_.max_attempts; ++attempt) {
    auto res = client.Post(path, headers, body, "application/json");
    if (res && res->status == 200) {
      try {
        return chat_response_text(nlohmann::json::parse(res->body));
      } catch (const nlohmann::json::exception& e) {
        throw ParseError(fmt::format("chat response is not JSON: {}", e.what()));
      }
    }
    if (res) {
      last_status = res->status;
      last_error = fmt::format("HTTP {}", res->status);
      if (!retryable(res->status)) {
        throw TransportError(fmt::format("chat request failed with HTTP {}", res->status), res->status);
      }
    } else {
      last_status = 0;
      last_error = httplib::to_string(res.error());
    }
    if (attempt < options_.max_attempts) {
      const double delay = options_.initial_backoff_s * std::pow(2.0, attempt - 1);
      spdlog::warn("chat request attempt {}/{} failed ({}); retrying in {:.2f} s", attempt, options_.max_attempts,
                   last_error, delay);
      sleeper_(std::chrono::duration<double>(delay));
    }
  }
  throw TransportError(
      fmt::format("chat request failed after {} attempts: {}", options_.max_attempts, last_error), last_status);
}

MockTranscriptTransport::MockTranscriptTransport(std::vector<std::string> responses)
    : responses_(std::move(responses)) {}

std::vector<std::string> MockTranscriptTransport::parse_transcript(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  std::string line;
  std::string block;
  auto trim = [](const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return std::string();
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
  };
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line == kDelimiter) {
      out.push_back(trim(block));
      block.clear();
    } else {
      block += line;
      block += '\n';
    }
  }
  if (const std::string tail = trim(block); !tail.empty()) out.push_back(tail);
  return out;
}

std::shared_ptr<MockTranscriptTransport> MockTranscriptTransport::from_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError(fmt::format("cannot open '{}'", path.string()));
  std::ostringstream ss;
  ss << in.rdbuf();
  return std::make_shared<MockTranscriptTransport>(parse_transcript(ss.str()));
}

std::string MockTranscriptTransport::complete(const ChatRequest& request) {
  std::lock_guard lock(mutex_);
  requests_.push_back(request);
  if (next_ >= responses_.size()) {
    throw TransportError(fmt::format("mock transcript exhausted after {} responses", responses_.size()));
  }
  spdlog::debug("mock reply {} of {} for model={} images={}", next_ + 1, responses_.size(), request.model,
                image_count(request));
  return responses_[next_++];
}

std::vector<ChatRequest> MockTranscriptTransport::requests() const {
  std::lock_guard lock(mutex_);
  return requests_;
}

std::size_t MockTranscriptTransport::remaining() const {
  std::lock_guard lock(mutex_);
  return responses_.size() - next_;
}

ChatSession::ChatSession(std::string model_id, std::shared_ptr<Transport> transport, std::optional<double> temperature)
    : model_id_(std::move(model_id)), transport_(std::move(transport)), temperature_(temperature) {
  if (!transport_) throw std::invalid_argument("ChatSession: null transport");
}

std::string ChatSession::send_turn(const std::string& text, std::span<const RgbImage* const> images) {
  ChatTurn user{"user", text, {}};
  for (const RgbImage* img : images) {
    user.images.push_back(std::make_shared<const std::vector<std::uint8_t>>(encode_png(*img)));
  }
  ChatRequest request{model_id_, history_, temperature_};
  request.messages.push_back(user);
  std::string reply = transport_->complete(request);
  history_.push_back(std::move(user));
  history_.push_back({"assistant", reply, {}});
  return reply;
}

}  // namespace cori
