#include <httplib.h>
#include <nlohmann/json.hpp>

#include "scarlet/synthesis.hpp"

namespace scarlet {

namespace {

nlohmann::json get_json(const std::string& url, const httplib::Params& params,
                        const HttpOptions& options, const char* accept) {
  auto [host, path] = split_url(url);
  httplib::Client client(host);
  client.set_connection_timeout(options.timeout);
  client.set_read_timeout(options.timeout);
  httplib::Headers headers = {{"Accept", accept}, {"User-Agent", "scarlet/0.1"}};
  auto res = client.Get(path, params, headers);
  if (!res) throw Error(ErrorCode::OracleUnavailable, url + ": " + httplib::to_string(res.error()));
  if (res->status < 200 || res->status >= 300)
    throw Error(ErrorCode::OracleUnavailable, url + ": HTTP " + std::to_string(res->status));
  auto j = nlohmann::json::parse(res->body, nullptr, false);
  if (j.is_discarded()) throw Error(ErrorCode::ProtocolError, url + ": response is not JSON");
  return j;
}

}  // namespace

std::optional<std::string> SparqlGraphClient::resolve(const std::string& surface) const {
  httplib::Params params = {{"action", "wbsearchentities"}, {"search", surface},
                            {"language", "en"},            {"format", "json"},
                            {"limit", "1"}};
  auto j = get_json(search_url_, params, options_, "application/json");
  auto it = j.find("search");
  if (it == j.end() || !it->is_array() || it->empty()) return std::nullopt;
  const auto& top = it->front();
  if (!top.contains("id") || !top["id"].is_string()) return std::nullopt;
  return top["id"].get<std::string>();
}

std::vector<std::string> SparqlGraphClient::neighbors(const std::string& id,
                                                      std::size_t limit) const {
  httplib::Params params = {{"query", render_neighbor_query(id, limit)}, {"format", "json"}};
  auto j = get_json(sparql_url_, params, options_, "application/sparql-results+json");
  std::vector<std::string> labels;
  if (!j.contains("results") || !j["results"].contains("bindings"))
    throw Error(ErrorCode::ProtocolError, "SPARQL response without results.bindings");
  for (const auto& row : j["results"]["bindings"]) {
    if (!row.contains("objectLabel")) continue;
    const auto& cell = row["objectLabel"];
    if (cell.contains("value") && cell["value"].is_string())
      labels.push_back(cell["value"].get<std::string>());
  }
  return labels;
}

}  // namespace scarlet
