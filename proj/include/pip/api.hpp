#pragma once

#include <functional>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "pip/model.hpp"
#include "pip/pipeline.hpp"

namespace pip {

class Workspace;

struct ApiRequest {
  std::string method;  // "GET" or "POST"
  std::string path;    // decoded, without the query
  std::map<std::string, std::string> params;
  std::string body;
};

struct ApiResponse {
  int status = 200;
  Json body;
};

struct ApiOptions {
  /// Replaces the default TextClassifier::train call on /retrain.
  std::function<TextClassifier(const std::vector<LabeledText>&)> trainer;
};

/// Analyst endpoints over a workspace store:
///
///   GET  /queue?limit=N         unlabeled stored posts, most uncertain first
///   POST /labels                one LabelRecord
///   GET  /conflicts             targets whose labelers disagree
///   POST /conflicts/resolve     canonical label for a target
///   GET  /keywords              keyword set with the latest RCP
///   POST /keywords              {"action": "block"|"unblock"|"add", "key"}
///   GET  /clusters              campaign summaries
///   GET  /clusters/{id}         one campaign graph
///   GET  /stats                 corpus report, agreement, model version
///   POST /retrain               retrain on current labels; 409 while busy
///
/// Errors are {"error": message} with 400 (plus "fields" diagnostics), 404 or
/// 409.
class ApiService {
 public:
  explicit ApiService(Workspace& workspace, ApiOptions options = {});
  ~ApiService();
  ApiService(const ApiService&) = delete;
  ApiService& operator=(const ApiService&) = delete;

  /// Transport-free dispatch; safe to call from several threads.
  ApiResponse handle(const ApiRequest& request);

  /// Serves on a background thread; port 0 picks a free port. Returns it.
  int start(const std::string& host = "127.0.0.1", int port = 0);
  /// Serves on the calling thread until stop().
  void run(const std::string& host, int port);
  void stop();

  int model_version() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace pip
