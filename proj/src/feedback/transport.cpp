#include <cstdlib>
#include <regex>

#include <httplib.h>
#include <json.hpp>

#include "feedback/feedback.hpp"

namespace pacasm::feedback {

std::optional<TransportConfig> TransportConfig::from_env() {
  const char* endpoint = std::getenv("PACASM_LLM_ENDPOINT");
  if (!endpoint || !*endpoint) return std::nullopt;
  TransportConfig c;
  c.endpoint = endpoint;
  if (const char* key = std::getenv("PACASM_LLM_API_KEY")) c.api_key = key;
  if (const char* model = std::getenv("PACASM_LLM_MODEL"); model && *model) c.model = model;
  return c;
}

std::string HttpTransport::request_body(const PromptBundle& bundle) const {
  nlohmann::ordered_json j;
  j["model"] = config_.model;
  j["temperature"] = 0;
  j["messages"] = nlohmann::ordered_json::array({
      {{"role", "system"}, {"content", bundle.system}},
      {{"role", "user"}, {"content", bundle.user}},
  });
  return j.dump();
}

TransportReply HttpTransport::complete(const PromptBundle& bundle) {
  TransportReply reply;
  static const std::regex url(R"(^(https?)://([^/:]+)(?::(\d+))?(/.*)?$)");
  std::smatch m;
  if (!std::regex_match(config_.endpoint, m, url)) {
    reply.error = "endpoint is not an http(s) URL";
    return reply;
  }
  const std::string scheme_host = m[1].str() + "://" + m[2].str() + (m[3].matched ? ":" + m[3].str() : "");
  const std::string path = m[4].matched ? m[4].str() : "/";

  httplib::Client client(scheme_host);
  if (!client.is_valid()) {
    reply.error = "cannot create a client for the endpoint";
    return reply;
  }
  const auto secs = std::chrono::duration_cast<std::chrono::seconds>(config_.timeout);
  const auto usecs = std::chrono::duration_cast<std::chrono::microseconds>(config_.timeout - secs);
  client.set_connection_timeout(secs.count(), usecs.count());
  client.set_read_timeout(secs.count(), usecs.count());
  client.set_write_timeout(secs.count(), usecs.count());

  httplib::Headers headers;
  if (!config_.api_key.empty()) headers.emplace("Authorization", "Bearer " + config_.api_key);
  auto res = client.Post(path, headers, request_body(bundle), "application/json");
  if (!res) {
    reply.error = "request failed: " + httplib::to_string(res.error());
    return reply;
  }
  if (res->status != 200) {
    reply.error = "HTTP status " + std::to_string(res->status);
    return reply;
  }
  const auto j = nlohmann::json::parse(res->body, nullptr, false);
  if (j.is_discarded()) {
    reply.error = "response is not JSON";
    return reply;
  }
  try {
    reply.text = j.at("choices").at(0).at("message").at("content").get<std::string>();
    reply.ok = true;
  } catch (const nlohmann::json::exception&) {
    reply.error = "response has no choices[0].message.content";
  }
  return reply;
}

}  // namespace pacasm::feedback
