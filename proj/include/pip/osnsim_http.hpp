#pragma once

#include <memory>
#include <string>

#include "pip/osnsim.hpp"

namespace pip::sim {

/// JSON endpoints over a Simulator: /search, /timeline, /profile,
/// /availability, /resolve, /intel (alias /report) and the admin /advance.
class SimServer {
 public:
  explicit SimServer(Simulator& sim);
  ~SimServer();
  SimServer(const SimServer&) = delete;
  SimServer& operator=(const SimServer&) = delete;

  /// Binds and serves on a background thread; port 0 picks a free port.
  /// Returns the bound port.
  int start(const std::string& host = "127.0.0.1", int port = 0);
  /// Serves on the calling thread until stop().
  void run(const std::string& host, int port);
  void stop();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

/// Client for a SimServer. HTTP 429 raises RateLimitedError carrying the
/// server's Retry-After; transport failures raise IoError.
class SimClient : public PostSource, public AvailabilitySource, public Fetcher, public IntelClient {
 public:
  explicit SimClient(const std::string& base_url, double timeout_seconds = 10.0);
  ~SimClient() override;

  std::vector<Post> search_hashtag(const std::string& tag, std::size_t limit) override;
  std::vector<Post> account_timeline(const std::string& account, std::size_t limit = kTimelineLimit) override;
  std::optional<Account> get_profile(const std::string& account) override;
  AvailabilityStatus check_availability(const std::string& post_id, Timestamp t) override;
  FetchResult fetch(const std::string& url) override;
  ThreatReport report(const std::string& url) override;

  Timestamp now();
  Timestamp advance(double days);

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace pip::sim
