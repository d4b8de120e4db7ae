// Eigen must be seen before httplib: <resolv.h> defines a `_res` macro.
#include "pip/error.hpp"
#include "pip/osnsim.hpp"
#include "pip/osnsim_http.hpp"

#include <cmath>
#include <thread>

#include <httplib.h>

namespace pip::sim {

namespace {

void reply(httplib::Response& res, int status, const Json& body) {
  res.status = status;
  res.set_content(body.dump(), "application/json");
}

void reply_error(httplib::Response& res, const Error& e) {
  int status = 500;
  switch (e.code()) {
    case ErrorCode::FetchFailed:
    case ErrorCode::NotFound: status = 404; break;
    case ErrorCode::PreconditionFailed:
    case ErrorCode::InvalidEntity: status = 400; break;
    case ErrorCode::RateLimited: status = 429; break;
    default: break;
  }
  Json body = {{"error", to_string(e.code())}, {"message", e.what()}};
  if (const auto* rl = dynamic_cast<const RateLimitedError*>(&e)) {
    body["retry_after"] = rl->retry_after();
    res.set_header("Retry-After", std::to_string(static_cast<long long>(std::ceil(rl->retry_after()))));
  }
  reply(res, status, body);
}

std::size_t limit_param(const httplib::Request& req, std::size_t fallback) {
  if (!req.has_param("limit")) return fallback;
  const std::string v = req.get_param_value("limit");
  try {
    std::size_t used = 0;
    const long long n = std::stoll(v, &used);
    if (used != v.size() || n < 0) throw std::invalid_argument(v);
    return static_cast<std::size_t>(n);
  } catch (const std::exception&) {
    fail(ErrorCode::PreconditionFailed, "limit must be a non-negative integer");
  }
}

std::string required_param(const httplib::Request& req, const char* name) {
  if (!req.has_param(name)) fail(ErrorCode::PreconditionFailed, std::string("missing parameter ") + name);
  return req.get_param_value(name);
}

template <class F>
httplib::Server::Handler guarded(F f) {
  return [f](const httplib::Request& req, httplib::Response& res) {
    try {
      f(req, res);
    } catch (const Error& e) {
      reply_error(res, e);
    } catch (const std::exception& e) {
      reply(res, 400, {{"error", "BadRequest"}, {"message", e.what()}});
    }
  };
}

}  // namespace

struct SimServer::Impl {
  Simulator& sim;
  httplib::Server server;
  std::thread thread;

  explicit Impl(Simulator& s) : sim(s) {
    server.Get("/search", guarded([this](const httplib::Request& req, httplib::Response& res) {
      const auto posts = sim.search_hashtag(required_param(req, "tag"), limit_param(req, 100));
      reply(res, 200, Json(posts));
    }));
    server.Get("/timeline", guarded([this](const httplib::Request& req, httplib::Response& res) {
      const auto posts = sim.account_timeline(required_param(req, "account"), limit_param(req, kTimelineLimit));
      reply(res, 200, Json(posts));
    }));
    server.Get("/profile", guarded([this](const httplib::Request& req, httplib::Response& res) {
      const auto account = sim.get_profile(required_param(req, "account"));
      if (!account) {
        reply(res, 404, {{"error", "NotFound"}, {"message", "no such account"}});
        return;
      }
      reply(res, 200, Json(*account));
    }));
    server.Get("/availability", guarded([this](const httplib::Request& req, httplib::Response& res) {
      const std::string post = required_param(req, "post");
      const Timestamp t = req.has_param("t") ? std::stoll(req.get_param_value("t")) : sim.now();
      reply(res, 200, {{"post", post}, {"t", t}, {"status", to_string(sim.check_availability(post, t))}});
    }));
    server.Get("/resolve", guarded([this](const httplib::Request& req, httplib::Response& res) {
      const FetchResult r = sim.fetch(required_param(req, "url"));
      Json body = {{"status", r.status}};
      if (!r.location.empty()) body["location"] = r.location;
      reply(res, 200, body);
    }));
    const auto intel = guarded([this](const httplib::Request& req, httplib::Response& res) {
      const ThreatReport r = sim.report(required_param(req, "url"));
      reply(res, 200, {{"reported", r.reported}, {"alarmed", r.alarmed}, {"malware", r.malware}, {"phishing", r.phishing}});
    });
    server.Get("/intel", intel);
    server.Get("/report", intel);
    server.Get("/now", guarded([this](const httplib::Request&, httplib::Response& res) {
      reply(res, 200, {{"now", sim.now()}});
    }));
    const auto advance = guarded([this](const httplib::Request& req, httplib::Response& res) {
      sim.advance(std::stod(required_param(req, "days")));
      reply(res, 200, {{"now", sim.now()}});
    });
    server.Get("/advance", advance);
    server.Post("/advance", advance);
  }
};

SimServer::SimServer(Simulator& sim) : impl_(std::make_unique<Impl>(sim)) {}

SimServer::~SimServer() { stop(); }

int SimServer::start(const std::string& host, int port) {
  const int bound = port == 0 ? impl_->server.bind_to_any_port(host) : (impl_->server.bind_to_port(host, port) ? port : -1);
  if (bound < 0) fail(ErrorCode::IoError, "cannot bind " + host + ":" + std::to_string(port));
  impl_->thread = std::thread([this] { impl_->server.listen_after_bind(); });
  impl_->server.wait_until_ready();
  return bound;
}

void SimServer::run(const std::string& host, int port) {
  if (!impl_->server.listen(host, port)) fail(ErrorCode::IoError, "cannot listen on " + host + ":" + std::to_string(port));
}

void SimServer::stop() {
  impl_->server.stop();
  if (impl_->thread.joinable()) impl_->thread.join();
}

struct SimClient::Impl {
  httplib::Client client;
  std::string base_url;

  Impl(const std::string& url, double timeout) : client(url), base_url(url) {
    const auto seconds = static_cast<time_t>(timeout);
    const auto micros = static_cast<time_t>((timeout - static_cast<double>(seconds)) * 1e6);
    client.set_connection_timeout(seconds, micros);
    client.set_read_timeout(seconds, micros);
  }

  // Returns the parsed body of a 2xx reply; 404 yields null.
  Json call(const std::string& method, const std::string& path, const httplib::Params& params) {
    const auto res = method == "POST" ? client.Post(path, params) : client.Get(path, params, httplib::Headers{});
    if (!res) fail(ErrorCode::IoError, base_url + path + ": " + httplib::to_string(res.error()));
    Json body = Json::parse(res->body, nullptr, false);
    if (res->status == 429) {
      double wait = body.is_object() ? body.value("retry_after", 0.0) : 0.0;
      if (res->has_header("Retry-After")) wait = std::max(wait, std::stod(res->get_header_value("Retry-After")));
      throw RateLimitedError(wait);
    }
    if (res->status == 404) {
      const std::string code = body.is_object() ? body.value("error", std::string()) : std::string();
      if (code == "FetchFailed") fail(ErrorCode::FetchFailed, body.value("message", std::string("not found")));
      return nullptr;
    }
    if (res->status < 200 || res->status >= 300) {
      fail(ErrorCode::IoError, base_url + path + " answered HTTP " + std::to_string(res->status));
    }
    if (body.is_discarded()) fail(ErrorCode::IoError, base_url + path + " returned malformed JSON");
    return body;
  }
};

SimClient::SimClient(const std::string& base_url, double timeout_seconds)
    : impl_(std::make_unique<Impl>(base_url, timeout_seconds)) {}

SimClient::~SimClient() = default;

std::vector<Post> SimClient::search_hashtag(const std::string& tag, std::size_t limit) {
  return impl_->call("GET", "/search", {{"tag", tag}, {"limit", std::to_string(limit)}}).get<std::vector<Post>>();
}

std::vector<Post> SimClient::account_timeline(const std::string& account, std::size_t limit) {
  return impl_->call("GET", "/timeline", {{"account", account}, {"limit", std::to_string(limit)}}).get<std::vector<Post>>();
}

std::optional<Account> SimClient::get_profile(const std::string& account) {
  const Json body = impl_->call("GET", "/profile", {{"account", account}});
  if (body.is_null()) return std::nullopt;
  return body.get<Account>();
}

AvailabilityStatus SimClient::check_availability(const std::string& post_id, Timestamp t) {
  const Json body = impl_->call("GET", "/availability", {{"post", post_id}, {"t", std::to_string(t)}});
  const auto status = parse_status(body.at("status").get<std::string>());
  if (!status) fail(ErrorCode::IoError, "unknown availability status");
  return *status;
}

FetchResult SimClient::fetch(const std::string& url) {
  const Json body = impl_->call("GET", "/resolve", {{"url", url}});
  if (body.is_null()) fail(ErrorCode::FetchFailed, "unknown URL " + url);
  return {body.at("status").get<int>(), body.value("location", std::string())};
}

ThreatReport SimClient::report(const std::string& url) {
  const Json body = impl_->call("GET", "/intel", {{"url", url}});
  if (body.is_null()) fail(ErrorCode::FetchFailed, "no intel for " + url);
  return {body.value("reported", false), body.value("alarmed", false), body.value("malware", false),
          body.value("phishing", false)};
}

Timestamp SimClient::now() { return impl_->call("GET", "/now", {}).at("now").get<Timestamp>(); }

Timestamp SimClient::advance(double days) {
  return impl_->call("POST", "/advance", {{"days", std::to_string(days)}}).at("now").get<Timestamp>();
}

}  // namespace pip::sim
