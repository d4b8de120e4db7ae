#include "pip/api.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <ctime>
#include <mutex>
#include <shared_mutex>
#include <thread>

#include "pip/campaigns.hpp"
#include "pip/error.hpp"
#include "pip/hunt.hpp"
#include "pip/monitor.hpp"
#include "pip/textnorm.hpp"
#include "pip/workspace.hpp"
// Eigen must be seen before httplib: <resolv.h> defines a `_res` macro.
#include "httplib.h"

namespace pip {

namespace {

ApiResponse error(int status, const std::string& message) { return {status, Json{{"error", message}}}; }

ApiResponse bad_fields(const Json& fields) {
  return {400, Json{{"error", "malformed body"}, {"fields", fields}}};
}

// Parses the body as an object; sets `out` to a 400 response on failure.
std::optional<Json> body_object(const ApiRequest& req, ApiResponse& out) {
  Json j;
  try {
    j = Json::parse(req.body);
  } catch (const Json::exception& e) {
    out = bad_fields(Json{{"body", std::string("invalid JSON: ") + e.what()}});
    return std::nullopt;
  }
  if (!j.is_object()) {
    out = bad_fields(Json{{"body", "expected an object"}});
    return std::nullopt;
  }
  return j;
}

void need_string(const Json& j, const char* key, Json& fields) {
  if (!j.contains(key)) {
    fields[key] = "required";
  } else if (!j.at(key).is_string() || j.at(key).get<std::string>().empty()) {
    fields[key] = "expected a non-empty string";
  }
}

// Reads the common label fields of /labels and /conflicts/resolve.
std::optional<LabelRecord> label_body(const Json& j, Json& fields) {
  need_string(j, "target", fields);
  need_string(j, "labeler_id", fields);
  if (!j.contains("is_pip")) {
    fields["is_pip"] = "required";
  } else if (!j.at("is_pip").is_boolean()) {
    fields["is_pip"] = "expected a boolean";
  }
  std::optional<Category> category;
  if (j.contains("category") && !j.at("category").is_null()) {
    if (!j.at("category").is_string()) {
      fields["category"] = "expected a category name or null";
    } else if (!(category = parse_category(j.at("category").get<std::string>()))) {
      fields["category"] = "unknown category";
    } else if (j.contains("is_pip") && j.at("is_pip").is_boolean() && !j.at("is_pip").get<bool>()) {
      fields["category"] = "only PIPs carry a category";
    }
  }
  if (j.contains("time") && !j.at("time").is_number_integer()) fields["time"] = "expected integer seconds";
  if (!fields.empty()) return std::nullopt;
  LabelRecord l;
  l.target = j.at("target").get<std::string>();
  l.is_pip = j.at("is_pip").get<bool>();
  l.category = category;
  l.labeler_id = j.at("labeler_id").get<std::string>();
  l.time = j.contains("time") ? j.at("time").get<Timestamp>() : static_cast<Timestamp>(std::time(nullptr));
  return l;
}

std::optional<std::size_t> size_param(const ApiRequest& req, const std::string& key) {
  const auto it = req.params.find(key);
  if (it == req.params.end()) return std::nullopt;
  std::size_t v = 0;
  const auto [p, ec] = std::from_chars(it->second.data(), it->second.data() + it->second.size(), v);
  if (ec != std::errc() || p != it->second.data() + it->second.size()) fail(ErrorCode::PreconditionFailed, key);
  return v;
}

Json keyword_json(const Keyword& k) {
  Json j = k;
  j["key"] = k.key();
  j["latest_rcp"] = nullptr;
  for (auto it = k.history.rbegin(); it != k.history.rend(); ++it) {
    if (it->rcp) {
      j["latest_rcp"] = *it->rcp;
      break;
    }
  }
  return j;
}

struct Clusters {
  PipGraph graph;
  std::vector<Campaign> campaigns;
};

Clusters compute_clusters(const Store& store) {
  const auto records = pip_records(store);
  Clusters c;
  c.graph = build_graph(records);
  c.campaigns = flood_fill(c.graph, pip_categories(records));
  return c;
}

}  // namespace

struct ApiService::Impl {
  Workspace& ws;
  ApiOptions options;
  mutable std::shared_mutex model_mutex;
  std::shared_ptr<const StoredClassifier> model;
  std::mutex keyword_mutex;
  std::atomic<bool> retraining{false};
  httplib::Server server;
  std::thread thread;

  Impl(Workspace& w, ApiOptions o) : ws(w), options(std::move(o)) {
    if (auto m = ws.load_classifier()) model = std::make_shared<const StoredClassifier>(std::move(*m));
    ws.store();
  }

  std::shared_ptr<const StoredClassifier> current() const {
    std::shared_lock lock(model_mutex);
    return model;
  }

  ApiResponse queue(const ApiRequest& req) {
    const std::size_t limit = size_param(req, "limit").value_or(50);
    const auto m = current();
    if (!m) return error(409, "no trained classifier; POST /retrain first");
    Store& store = ws.store();
    struct Item {
      double uncertainty;
      Json json;
    };
    std::vector<Item> items;
    for (const Post& p : store.posts()) {
      if (!store.labels_for(p.id).empty()) continue;
      const std::string text = p.full_text();
      const PipLabel score = m->classifier.classify(text);
      if (!score.is_pip && !(p.label && p.label->pip.is_pip)) continue;
      const auto category = m->classifier.categorize(text);
      Json j = {{"post_id", p.id},
                {"text", p.text},
                {"hashtags", p.hashtags},
                {"confidence", score.confidence},
                {"suggested_category", category ? Json(std::string(to_string(*category))) : Json(nullptr)},
                {"language", std::string(to_string(LanguageDetector::builtin().detect(tokenize(text)).code))}};
      items.push_back({std::abs(score.confidence - 0.5), std::move(j)});
    }
    // posts() is in id order, so a stable sort breaks ties by id.
    std::stable_sort(items.begin(), items.end(),
                     [](const Item& a, const Item& b) { return a.uncertainty < b.uncertainty; });
    Json out = Json::array();
    for (std::size_t i = 0; i < items.size() && i < limit; ++i) out.push_back(std::move(items[i].json));
    return {200, Json{{"model_version", m->version}, {"items", std::move(out)}}};
  }

  ApiResponse post_label(const ApiRequest& req) {
    ApiResponse bad;
    const auto j = body_object(req, bad);
    if (!j) return bad;
    Json fields = Json::object();
    auto label = label_body(*j, fields);
    if (!label) return bad_fields(fields);
    Store& store = ws.store();
    if (!store.post(label->target) && !store.account(label->target)) {
      return error(404, "unknown target " + label->target);
    }
    store.put_label(*label);
    return {201, Json(*label)};
  }

  ApiResponse conflicts() {
    Json out = Json::array();
    for (const auto& c : ws.store().conflicts()) out.push_back({{"target", c.target}, {"labels", c.labels}});
    return {200, out};
  }

  ApiResponse resolve(const ApiRequest& req) {
    ApiResponse bad;
    const auto j = body_object(req, bad);
    if (!j) return bad;
    Json fields = Json::object();
    auto label = label_body(*j, fields);
    if (!label) return bad_fields(fields);
    try {
      return {200, Json(ws.store().resolve_conflict(label->target, label->is_pip, label->category,
                                                    label->labeler_id, label->time))};
    } catch (const Error& e) {
      if (e.code() == ErrorCode::NotFound) return error(404, e.what());
      throw;
    }
  }

  ApiResponse keywords() {
    Json out = Json::array();
    for (const Keyword& k : ws.store().keywords()) out.push_back(keyword_json(k));
    return {200, out};
  }

  ApiResponse change_keyword(const ApiRequest& req) {
    ApiResponse bad;
    const auto j = body_object(req, bad);
    if (!j) return bad;
    Json fields = Json::object();
    need_string(*j, "action", fields);
    need_string(*j, "key", fields);
    std::string action;
    if (!fields.contains("action")) {
      action = j->at("action").get<std::string>();
      if (action != "block" && action != "unblock" && action != "add") fields["action"] = "expected block, unblock or add";
    }
    std::optional<Keyword> parsed;
    if (!fields.contains("key") && !(parsed = parse_keyword(j->at("key").get<std::string>()))) {
      fields["key"] = "expected hashtag:<value> or account:<value>";
    }
    if (!fields.empty()) return bad_fields(fields);

    std::lock_guard lock(keyword_mutex);
    Store& store = ws.store();
    KeywordSet set = KeywordSet::load(store);
    const std::string key = parsed->key();
    if (action == "add") {
      const bool added = set.add(*parsed);
      if (added) set.save(store);
      return {added ? 201 : 200, Json{{"added", added}, {"keyword", keyword_json(*set.find(key))}}};
    }
    if (!set.contains(key)) return error(404, "unknown keyword " + key);
    set.set_state(key, action == "block" ? KeywordState::Blocked : KeywordState::Active);
    set.save(store);
    return {200, keyword_json(*set.find(key))};
  }

  ApiResponse clusters() {
    const Clusters c = compute_clusters(ws.store());
    Json list = Json::array();
    for (const Campaign& campaign : c.campaigns) {
      const Json graph = component_graph_json(c.graph, campaign);
      list.push_back({{"id", campaign.component_id},
                      {"nodes", campaign.node_ids.size()},
                      {"edges", graph.at("edges").size()},
                      {"pips", campaign.pip_ids.size()},
                      {"stats", campaign.to_json().at("stats")}});
    }
    return {200, Json{{"clusters", std::move(list)}, {"summary", campaign_stats(c.campaigns).to_json()}}};
  }

  ApiResponse cluster(const std::string& id) {
    const Clusters c = compute_clusters(ws.store());
    for (const Campaign& campaign : c.campaigns) {
      if (campaign.component_id != id) continue;
      Json j = campaign.to_json();
      j["graph"] = component_graph_json(c.graph, campaign);
      return {200, j};
    }
    return error(404, "unknown cluster " + id);
  }

  ApiResponse stats() {
    Store& store = ws.store();
    const auto m = current();
    Json j = {{"model_version", m ? Json(m->version) : Json(nullptr)},
              {"labels", store.size(Collection::Labels)},
              {"conflicts", store.conflicts().size()}};
    const auto agreement = store.labeler_agreement();
    j["labeler_agreement"] = agreement ? Json(*agreement) : Json(nullptr);
    try {
      j["report"] = corpus_report(store).to_json();
    } catch (const Error& e) {
      if (e.code() != ErrorCode::EmptyStore) throw;
      j["report"] = nullptr;
    }
    return {200, j};
  }

  ApiResponse retrain() {
    bool expected = false;
    if (!retraining.compare_exchange_strong(expected, true)) return error(409, "retrain already running");
    struct Release {
      std::atomic<bool>& flag;
      ~Release() { flag = false; }
    } release{retraining};

    const auto data = ws.training_data();
    const auto previous = current();
    StoredClassifier next;
    next.version = previous ? previous->version + 1 : 1;
    next.classifier = options.trainer ? options.trainer(data)
                                      : TextClassifier::train(data, ws.config().train, ws.config().min_df);
    ws.save_classifier(next);
    const std::size_t labels = ws.store_labels().size();
    const int version = next.version;
    {
      std::unique_lock lock(model_mutex);
      model = std::make_shared<const StoredClassifier>(std::move(next));
    }
    return {200, Json{{"model_version", version}, {"training_texts", data.size()}, {"store_labels", labels}}};
  }

  ApiResponse dispatch(const ApiRequest& req) {
    const bool get = req.method == "GET";
    const bool post = req.method == "POST";
    if (req.path == "/queue" && get) return queue(req);
    if (req.path == "/labels" && post) return post_label(req);
    if (req.path == "/conflicts" && get) return conflicts();
    if (req.path == "/conflicts/resolve" && post) return resolve(req);
    if (req.path == "/keywords" && get) return keywords();
    if (req.path == "/keywords" && post) return change_keyword(req);
    if (req.path == "/clusters" && get) return clusters();
    if (req.path.rfind("/clusters/", 0) == 0 && get && req.path.size() > 10) return cluster(req.path.substr(10));
    if (req.path == "/stats" && get) return stats();
    if (req.path == "/retrain" && post) return retrain();
    return error(404, "no route " + req.method + " " + req.path);
  }
};

ApiService::ApiService(Workspace& workspace, ApiOptions options)
    : impl_(std::make_unique<Impl>(workspace, std::move(options))) {
  impl_->server.set_logger([](const httplib::Request&, const httplib::Response&) {});
  auto handler = [this](const httplib::Request& req, httplib::Response& res) {
    ApiRequest r;
    r.method = req.method;
    r.path = req.path;
    for (const auto& [k, v] : req.params) r.params[k] = v;
    r.body = req.body;
    const ApiResponse out = handle(r);
    res.status = out.status;
    res.set_content(out.body.dump(), "application/json");
  };
  impl_->server.Get(".*", handler);
  impl_->server.Post(".*", handler);
}

ApiService::~ApiService() { stop(); }

ApiResponse ApiService::handle(const ApiRequest& request) {
  try {
    return impl_->dispatch(request);
  } catch (const Error& e) {
    if (e.code() == ErrorCode::PreconditionFailed) return bad_fields(Json{{e.what(), "invalid parameter"}});
    if (e.code() == ErrorCode::InvalidEntity) return bad_fields(Json{{"body", e.what()}});
    if (e.code() == ErrorCode::NotFound) return error(404, e.what());
    return error(500, e.what());
  } catch (const std::exception& e) {
    return error(500, e.what());
  }
}

int ApiService::start(const std::string& host, int port) {
  const int bound = port == 0 ? impl_->server.bind_to_any_port(host) : (impl_->server.bind_to_port(host, port) ? port : -1);
  if (bound < 0) fail(ErrorCode::IoError, "cannot bind " + host + ":" + std::to_string(port));
  impl_->thread = std::thread([this] { impl_->server.listen_after_bind(); });
  impl_->server.wait_until_ready();
  return bound;
}

void ApiService::run(const std::string& host, int port) {
  if (!impl_->server.listen(host, port)) fail(ErrorCode::IoError, "cannot listen on " + host + ":" + std::to_string(port));
}

void ApiService::stop() {
  impl_->server.stop();
  if (impl_->thread.joinable()) impl_->thread.join();
}

int ApiService::model_version() const {
  const auto m = impl_->current();
  return m ? m->version : 0;
}

}  // namespace pip
