#pragma once

#include <span>
#include <string>
#include <vector>

#include "urbanforge/errors.hpp"

namespace urbanforge {

struct ChatMessage {
  std::string role;  // "system" | "user" | "assistant"
  std::string content;
};

// Text-completion backend the planners talk to. Every call either returns
// the reply text, fails with kServiceUnavailable (transport), or fails with
// kParseError (a reply arrived but carried no text).
class CompletionClient {
 public:
  virtual ~CompletionClient() = default;

  virtual Expected<std::string> complete(std::span<const ChatMessage> messages) = 0;

  // How many re-asks propose() may spend on top of the first attempt.
  virtual int max_retries() const = 0;
};

struct CompletionOptions {
  std::string endpoint;  // full URL, e.g. http://host:1234/v1/chat/completions
  std::string api_key;   // optional; sent as a bearer token when non-empty
  std::string model;
  int timeout_seconds = 30;
  int max_retries = 2;
};

Status validate_completion_options(const CompletionOptions& options);

// Reads URBANFORGE_LLM_ENDPOINT, URBANFORGE_LLM_KEY, and URBANFORGE_LLM_MODEL.
// Endpoint and model are required; the key is optional.
Expected<CompletionOptions> completion_options_from_env();

// Chat-completions HTTP client. Requests pin temperature to 0 so one model,
// endpoint, and message list give a stable reply where the service honors it.
class HttpCompletionClient : public CompletionClient {
 public:
  explicit HttpCompletionClient(CompletionOptions options) : options_(std::move(options)) {}

  Expected<std::string> complete(std::span<const ChatMessage> messages) override;
  int max_retries() const override { return options_.max_retries; }

  const CompletionOptions& options() const { return options_; }

 private:
  CompletionOptions options_;
};

// Offline stand-in that replays a scripted list of replies (or errors) in
// order and records every request for inspection. Exhausting the script
// fails like an unreachable service.
class ScriptedCompletionClient : public CompletionClient {
 public:
  ScriptedCompletionClient() = default;
  explicit ScriptedCompletionClient(int retries) : retries_(retries) {}

  void push_reply(std::string text) { script_.emplace_back(std::move(text)); }
  void push_error(Error e) { script_.emplace_back(std::move(e)); }

  Expected<std::string> complete(std::span<const ChatMessage> messages) override;
  int max_retries() const override { return retries_; }

  const std::vector<std::vector<ChatMessage>>& requests() const { return requests_; }

 private:
  std::vector<Expected<std::string>> script_;
  std::size_t next_ = 0;
  int retries_ = 2;
  std::vector<std::vector<ChatMessage>> requests_;
};

}  // namespace urbanforge
