#include <cmath>
#include <thread>

#include <httplib.h>
#include <nlohmann/json.hpp>

#include "scarlet/oracles.hpp"

namespace scarlet {

using nlohmann::json;

std::pair<std::string, std::string> split_url(const std::string& url) {
  auto scheme = url.find("://");
  if (scheme == std::string::npos)
    throw Error(ErrorCode::InvalidConfig, "endpoint '" + url + "' has no scheme");
  auto slash = url.find('/', scheme + 3);
  if (slash == std::string::npos) return {url, "/"};
  return {url.substr(0, slash), url.substr(slash)};
}

std::string post_json_with_retry(const std::string& endpoint, const std::string& body,
                                 const HttpOptions& options) {
  auto [host, path] = split_url(endpoint);
  httplib::Client client(host);
  client.set_connection_timeout(options.timeout);
  client.set_read_timeout(options.timeout);
  client.set_write_timeout(options.timeout);
  if (!options.bearer_token.empty()) client.set_bearer_token_auth(options.bearer_token);

  std::string last_failure = "no attempt made";
  auto backoff = options.initial_backoff;
  int attempts = std::max(1, options.attempts);
  for (int attempt = 0; attempt < attempts; ++attempt) {
    if (attempt > 0) {
      std::this_thread::sleep_for(backoff);
      backoff *= 2;
    }
    auto res = client.Post(path, body, "application/json");
    if (!res) {
      last_failure = "transport error: " + httplib::to_string(res.error());
      continue;
    }
    if (res->status >= 200 && res->status < 300) return res->body;
    last_failure = "HTTP " + std::to_string(res->status);
    bool transient = res->status == 429 || res->status >= 500;
    if (!transient) break;
  }
  throw Error(ErrorCode::OracleUnavailable, endpoint + ": " + last_failure);
}

namespace {

json parse_object(const std::string& body) {
  json j = json::parse(body, nullptr, /*allow_exceptions=*/false);
  if (j.is_discarded() || !j.is_object())
    throw Error(ErrorCode::ProtocolError, "response is not a JSON object");
  return j;
}

}  // namespace

std::vector<double> http_score(const std::string& endpoint, std::span<const std::string> context,
                               const std::string& query, const std::string& target,
                               const HttpOptions& options) {
  json req = {{"context", json::array()}, {"query", query}, {"target", target}};
  for (const auto& c : context) req["context"].push_back(c);
  json res = parse_object(post_json_with_retry(endpoint, req.dump(), options));
  auto it = res.find("token_scores");
  if (it == res.end() || !it->is_array())
    throw Error(ErrorCode::ProtocolError, "response missing \"token_scores\" array");
  if (it->empty()) throw Error(ErrorCode::ProtocolError, "\"token_scores\" is empty");
  std::vector<double> scores;
  scores.reserve(it->size());
  for (const auto& v : *it) {
    if (!v.is_number()) throw Error(ErrorCode::ProtocolError, "non-numeric token score");
    double d = v.get<double>();
    if (!std::isfinite(d)) throw Error(ErrorCode::ProtocolError, "non-finite token score");
    scores.push_back(d);
  }
  return scores;
}

std::string http_generate(const std::string& endpoint, const std::string& prompt,
                          double temperature, int max_tokens, const HttpOptions& options) {
  if (prompt.empty()) throw Error(ErrorCode::InvalidInput, "prompt is empty");
  if (temperature < 0) throw Error(ErrorCode::InvalidInput, "temperature must be >= 0");
  if (max_tokens < 1) throw Error(ErrorCode::InvalidInput, "max_tokens must be >= 1");
  json req = {{"prompt", prompt}, {"temperature", temperature}, {"max_tokens", max_tokens}};
  json res = parse_object(post_json_with_retry(endpoint, req.dump(), options));
  auto it = res.find("text");
  if (it == res.end() || !it->is_string())
    throw Error(ErrorCode::ProtocolError, "response missing \"text\" string");
  return it->get<std::string>();
}

std::vector<double> HttpScorer::score_ground_truth(std::span<const Passage> context,
                                                   const QueryText& query,
                                                   const GenerationTarget& target) const {
  std::vector<std::string> texts;
  texts.reserve(context.size());
  for (const auto& p : context) texts.push_back(p.text);
  return http_score(endpoint_, texts, query.rendered, target.ground_truth, options_);
}

}  // namespace scarlet
