#include "pip/error.hpp"

#include <sstream>

namespace pip {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::PreconditionFailed: return "PreconditionFailed";
    case ErrorCode::EmptyCohort: return "EmptyCohort";
    case ErrorCode::EmptyCorpus: return "EmptyCorpus";
    case ErrorCode::DegenerateTrainingSet: return "DegenerateTrainingSet";
    case ErrorCode::VocabularyMismatch: return "VocabularyMismatch";
    case ErrorCode::TooFewSamples: return "TooFewSamples";
    case ErrorCode::ScorerUnavailable: return "ScorerUnavailable";
    case ErrorCode::ScorerMalformedResponse: return "ScorerMalformedResponse";
    case ErrorCode::FetchFailed: return "FetchFailed";
    case ErrorCode::RedirectLoop: return "RedirectLoop";
    case ErrorCode::InvalidEntity: return "InvalidEntity";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::InvalidManifest: return "InvalidManifest";
    case ErrorCode::RateLimited: return "RateLimited";
    case ErrorCode::NoProbeData: return "NoProbeData";
    case ErrorCode::NoUnavailable: return "NoUnavailable";
    case ErrorCode::EmptyStore: return "EmptyStore";
    case ErrorCode::NotFound: return "NotFound";
    case ErrorCode::Conflict: return "Conflict";
    case ErrorCode::IoError: return "IoError";
  }
  return "Unknown";
}

Error::Error(ErrorCode code, const std::string& message)
    : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

namespace {
std::string line_message(std::size_t line, const std::string& message) {
  std::ostringstream out;
  out << "line " << line << ": " << message;
  return out.str();
}

std::string retry_message(double seconds) {
  std::ostringstream out;
  out << "retry after " << seconds << "s";
  return out.str();
}
}  // namespace

ParseError::ParseError(std::size_t line, const std::string& message)
    : Error(ErrorCode::ParseError, line_message(line, message)), line_(line) {}

RateLimitedError::RateLimitedError(double retry_after_seconds)
    : Error(ErrorCode::RateLimited, retry_message(retry_after_seconds)),
      retry_after_(retry_after_seconds) {}

void fail(ErrorCode code, const std::string& message) { throw Error(code, message); }

}  // namespace pip
