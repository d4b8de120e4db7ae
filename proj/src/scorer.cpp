// Eigen must be seen before httplib: <resolv.h> defines a `_res` macro.
#include "pip/classify.hpp"
#include "pip/error.hpp"

#include <httplib.h>

namespace pip {

ExternalScore score_external(const ExternalScorer& scorer, const std::string& text) {
  require(!scorer.base_url.empty(), ErrorCode::PreconditionFailed, "scorer endpoint not configured");
  httplib::Client client(scorer.base_url);
  const auto seconds = static_cast<time_t>(scorer.timeout_seconds);
  const auto micros = static_cast<time_t>((scorer.timeout_seconds - static_cast<double>(seconds)) * 1e6);
  client.set_connection_timeout(seconds, micros);
  client.set_read_timeout(seconds, micros);
  client.set_write_timeout(seconds, micros);

  const auto response = client.Post("/score", Json{{"text", text}}.dump(), "application/json");
  if (!response) {
    fail(ErrorCode::ScorerUnavailable, scorer.base_url + ": " + httplib::to_string(response.error()));
  }
  if (response->status < 200 || response->status >= 300) {
    fail(ErrorCode::ScorerUnavailable, scorer.base_url + " answered HTTP " + std::to_string(response->status));
  }
  const Json body = Json::parse(response->body, nullptr, false);
  if (body.is_discarded() || !body.is_object()) fail(ErrorCode::ScorerMalformedResponse, "body is not a JSON object");
  if (!body.contains("confidence") || !body.at("confidence").is_number()) {
    fail(ErrorCode::ScorerMalformedResponse, "response has no numeric confidence");
  }
  ExternalScore out;
  out.label.confidence = body.at("confidence").get<double>();
  if (!(out.label.confidence >= 0.0 && out.label.confidence <= 1.0)) {
    fail(ErrorCode::ScorerMalformedResponse, "confidence outside [0,1]");
  }
  if (body.contains("is_pip")) {
    if (!body.at("is_pip").is_boolean()) fail(ErrorCode::ScorerMalformedResponse, "is_pip is not a boolean");
    out.label.is_pip = body.at("is_pip").get<bool>();
  } else {
    out.label.is_pip = out.label.confidence > 0.5;
  }
  if (body.contains("category") && !body.at("category").is_null()) {
    if (!body.at("category").is_string()) fail(ErrorCode::ScorerMalformedResponse, "category is not a string");
    out.category = parse_category(body.at("category").get<std::string>());
    if (!out.category) fail(ErrorCode::ScorerMalformedResponse, "unknown category");
  }
  return out;
}

}  // namespace pip
