#include "urbanforge/completion.hpp"

#include <cstdlib>

#include <httplib.h>
#include <json.hpp>

namespace urbanforge {
namespace {

// Splits a full URL into the scheme://host[:port] base httplib wants and the
// request path.
struct SplitUrl {
  std::string base;
  std::string path;
};

Expected<SplitUrl> split_url(const std::string& endpoint) {
  const auto scheme_end = endpoint.find("://");
  if (scheme_end == std::string::npos) {
    return make_error(Errc::kInvalidConfig, "endpoint must start with http:// or https://");
  }
  const auto path_start = endpoint.find('/', scheme_end + 3);
  if (path_start == std::string::npos) {
    return SplitUrl{endpoint, "/v1/chat/completions"};
  }
  return SplitUrl{endpoint.substr(0, path_start), endpoint.substr(path_start)};
}

std::string env_or_empty(const char* name) {
  const char* value = std::getenv(name);
  return value != nullptr ? std::string(value) : std::string();
}

}  // namespace

Status validate_completion_options(const CompletionOptions& options) {
  if (options.endpoint.empty()) {
    return Status(Errc::kInvalidConfig, "completion endpoint is empty");
  }
  if (options.endpoint.find("://") == std::string::npos) {
    return Status(Errc::kInvalidConfig, "completion endpoint must be a full URL");
  }
  if (options.model.empty()) {
    return Status(Errc::kInvalidConfig, "completion model id is empty");
  }
  if (options.timeout_seconds <= 0) {
    return Status(Errc::kInvalidConfig, "completion timeout must be positive");
  }
  if (options.max_retries < 0) {
    return Status(Errc::kInvalidConfig, "completion retry count must be >= 0");
  }
  return Status();
}

Expected<CompletionOptions> completion_options_from_env() {
  CompletionOptions options;
  options.endpoint = env_or_empty("URBANFORGE_LLM_ENDPOINT");
  options.api_key = env_or_empty("URBANFORGE_LLM_KEY");
  options.model = env_or_empty("URBANFORGE_LLM_MODEL");
  if (options.endpoint.empty()) {
    return make_error(Errc::kInvalidConfig, "URBANFORGE_LLM_ENDPOINT is not set");
  }
  if (options.model.empty()) {
    return make_error(Errc::kInvalidConfig, "URBANFORGE_LLM_MODEL is not set");
  }
  if (auto st = validate_completion_options(options); !st.ok()) return st.error();
  return options;
}

Expected<std::string> HttpCompletionClient::complete(std::span<const ChatMessage> messages) {
  if (auto st = validate_completion_options(options_); !st.ok()) return st.error();
  auto url = split_url(options_.endpoint);
  if (!url.ok()) return url.error();

  nlohmann::ordered_json body;
  body["model"] = options_.model;
  auto& list = body["messages"] = nlohmann::ordered_json::array();
  for (const ChatMessage& m : messages) {
    list.push_back({{"role", m.role}, {"content", m.content}});
  }
  body["temperature"] = 0;

  httplib::Client client(url.value().base);
  client.set_connection_timeout(options_.timeout_seconds, 0);
  client.set_read_timeout(options_.timeout_seconds, 0);
  client.set_write_timeout(options_.timeout_seconds, 0);
  httplib::Headers headers;
  if (!options_.api_key.empty()) {
    headers.emplace("Authorization", "Bearer " + options_.api_key);
  }

  auto res = client.Post(url.value().path, headers, body.dump(), "application/json");
  if (!res) {
    return make_error(Errc::kServiceUnavailable,
                      "completion request to " + options_.endpoint + " failed: " +
                          httplib::to_string(res.error()));
  }
  if (res->status != 200) {
    return make_error(Errc::kServiceUnavailable,
                      "completion service returned status " + std::to_string(res->status));
  }

  auto doc = nlohmann::json::parse(res->body, nullptr, false);
  if (doc.is_discarded()) {
    return make_error(Errc::kParseError, "completion response is not valid JSON");
  }
  // Chat-completions shape first, plain {"content": ...} as a fallback.
  try {
    if (doc.contains("choices") && doc["choices"].is_array() && !doc["choices"].empty()) {
      const auto& message = doc["choices"].at(0).at("message");
      return message.at("content").get<std::string>();
    }
    if (doc.contains("content") && doc["content"].is_string()) {
      return doc["content"].get<std::string>();
    }
  } catch (const nlohmann::json::exception&) {
  }
  return make_error(Errc::kParseError, "completion response carries no message content");
}

Expected<std::string> ScriptedCompletionClient::complete(std::span<const ChatMessage> messages) {
  requests_.emplace_back(messages.begin(), messages.end());
  if (next_ >= script_.size()) {
    return make_error(Errc::kServiceUnavailable, "scripted completion client is exhausted");
  }
  return script_[next_++];
}

}  // namespace urbanforge
