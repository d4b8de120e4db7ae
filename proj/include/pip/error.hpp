#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>

namespace pip {

enum class ErrorCode {
  PreconditionFailed,
  EmptyCohort,
  EmptyCorpus,
  DegenerateTrainingSet,
  VocabularyMismatch,
  TooFewSamples,
  ScorerUnavailable,
  ScorerMalformedResponse,
  FetchFailed,
  RedirectLoop,
  InvalidEntity,
  ParseError,
  InvalidManifest,
  RateLimited,
  NoProbeData,
  NoUnavailable,
  EmptyStore,
  NotFound,
  Conflict,
  IoError,
};

std::string_view to_string(ErrorCode code) noexcept;

/// Every failure raised by the library carries one of the codes above so that
/// callers (CLI, HTTP layer) can map it onto exit codes or status codes.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message);

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

class ParseError : public Error {
 public:
  ParseError(std::size_t line, const std::string& message);

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

class RateLimitedError : public Error {
 public:
  explicit RateLimitedError(double retry_after_seconds);

  double retry_after() const noexcept { return retry_after_; }

 private:
  double retry_after_;
};

[[noreturn]] void fail(ErrorCode code, const std::string& message);

inline void require(bool condition, ErrorCode code, const char* message) {
  if (!condition) fail(code, message);
}

}  // namespace pip
