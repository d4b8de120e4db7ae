#include "pip/campaigns.hpp"

#include <algorithm>
#include <deque>
#include <set>

#include "pip/error.hpp"

namespace pip {

namespace {

std::string lower_ascii(std::string s) {
  for (auto& c : s) {
    if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
  }
  return s;
}

std::string strip_at(const std::string& s) { return !s.empty() && s.front() == '@' ? s.substr(1) : s; }

}  // namespace

std::string_view to_string(NodeKind k) noexcept { return k == NodeKind::Account ? "account" : "contact"; }

std::string account_node_id(const std::string& account_id) { return "account:" + account_id; }

std::string contact_node_id(const Contact& contact) {
  if (contact.kind == ContactKind::TwitterMention) return account_node_id(strip_at(contact.value));
  const std::string& value = contact.kind == ContactKind::URL && !contact.fqdn.empty() ? contact.fqdn : contact.value;
  return "contact:" + std::string(to_string(contact.kind)) + ":" + value;
}

void PipGraph::add_node(const GraphNode& node) {
  if (node.id.empty()) fail(ErrorCode::InvalidEntity, "graph node without id");
  auto [it, inserted] = nodes_.try_emplace(node.id, node);
  if (inserted) {
    it->second.pip_count = std::max<std::size_t>(node.pip_count, 1);
    adjacency_[node.id];
  } else {
    it->second.pip_count += std::max<std::size_t>(node.pip_count, 1);
  }
}

void PipGraph::add_edge(const std::string& a, const std::string& b, std::size_t shared) {
  if (a == b) fail(ErrorCode::InvalidEntity, "self-edge on " + a);
  if (!nodes_.count(a) || !nodes_.count(b)) fail(ErrorCode::InvalidEntity, "edge endpoint missing: " + a + " - " + b);
  auto key = a < b ? std::make_pair(a, b) : std::make_pair(b, a);
  auto [it, inserted] = edges_.try_emplace(key, 0);
  it->second += std::max<std::size_t>(shared, 1);
  if (inserted) {
    auto link = [](std::vector<std::string>& v, const std::string& id) {
      v.insert(std::lower_bound(v.begin(), v.end(), id), id);
    };
    link(adjacency_[a], b);
    link(adjacency_[b], a);
  }
}

void PipGraph::add_node_pip(const std::string& node_id, const std::string& pip_id) {
  node_pips_[node_id].push_back(pip_id);
}

std::vector<GraphEdge> PipGraph::edge_list() const {
  std::vector<GraphEdge> out;
  out.reserve(edges_.size());
  for (const auto& [k, n] : edges_) out.push_back({k.first, k.second, n});
  return out;
}

const GraphNode* PipGraph::node(const std::string& id) const {
  const auto it = nodes_.find(id);
  return it == nodes_.end() ? nullptr : &it->second;
}

std::vector<std::string> PipGraph::neighbours(const std::string& id) const {
  const auto it = adjacency_.find(id);
  return it == adjacency_.end() ? std::vector<std::string>{} : it->second;
}

namespace {

Json node_json(const GraphNode& n) {
  Json j{{"id", n.id}, {"kind", to_string(n.kind)}, {"pip_count", n.pip_count}};
  if (n.contact_kind) j["contact_kind"] = to_string(*n.contact_kind);
  return j;
}

Json edge_json(const std::string& a, const std::string& b, std::size_t n) {
  return Json{{"source", a}, {"target", b}, {"shared_pip_count", n}};
}

}  // namespace

Json PipGraph::to_json() const {
  Json nodes = Json::array();
  for (const auto& [id, n] : nodes_) {
    Json j = node_json(n);
    if (const auto it = node_pips_.find(id); it != node_pips_.end()) j["pips"] = it->second;
    nodes.push_back(std::move(j));
  }
  Json edges = Json::array();
  for (const auto& [k, n] : edges_) edges.push_back(edge_json(k.first, k.second, n));
  return Json{{"nodes", nodes}, {"edges", edges}};
}

PipGraph PipGraph::from_json(const Json& j) {
  PipGraph g;
  try {
    for (const auto& jn : j.at("nodes")) {
      GraphNode n;
      n.id = jn.at("id").get<std::string>();
      n.kind = jn.at("kind").get<std::string>() == "contact" ? NodeKind::Contact : NodeKind::Account;
      if (jn.contains("contact_kind")) n.contact_kind = parse_contact_kind(jn.at("contact_kind").get<std::string>());
      n.pip_count = jn.at("pip_count").get<std::size_t>();
      if (n.pip_count < 1) fail(ErrorCode::InvalidEntity, "node pip_count below 1: " + n.id);
      g.add_node(n);
      for (const auto& p : jn.value("pips", std::vector<std::string>{})) g.add_node_pip(n.id, p);
    }
    for (const auto& je : j.at("edges")) {
      g.add_edge(je.at("source").get<std::string>(), je.at("target").get<std::string>(),
                 je.at("shared_pip_count").get<std::size_t>());
    }
  } catch (const Json::exception& e) {
    fail(ErrorCode::InvalidEntity, std::string("graph JSON: ") + e.what());
  }
  return g;
}

PipGraph build_graph(const std::vector<PipRecord>& pips) {
  std::map<std::string, std::string> by_handle;
  for (const auto& r : pips) {
    if (r.author && !r.author->handle.empty()) by_handle.emplace(lower_ascii(strip_at(r.author->handle)), r.post.author_id);
  }

  PipGraph g;
  for (const auto& r : pips) {
    if (r.post.author_id.empty()) fail(ErrorCode::InvalidEntity, "PIP without author: " + r.post.id);
    std::map<std::string, GraphNode> referenced;
    referenced.emplace(account_node_id(r.post.author_id),
                       GraphNode{NodeKind::Account, account_node_id(r.post.author_id), std::nullopt, 1});
    for (const auto& c : r.contacts) {
      if (c.kind == ContactKind::TwitterMention) {
        const std::string handle = strip_at(c.value);
        const auto it = by_handle.find(lower_ascii(handle));
        const std::string id = account_node_id(it == by_handle.end() ? handle : it->second);
        referenced.emplace(id, GraphNode{NodeKind::Account, id, std::nullopt, 1});
        continue;
      }
      const std::string id = contact_node_id(c);
      referenced.emplace(id, GraphNode{NodeKind::Contact, id, c.kind, 1});
    }
    for (const auto& [id, n] : referenced) {
      g.add_node(n);
      g.add_node_pip(id, r.post.id);
    }
    for (auto a = referenced.begin(); a != referenced.end(); ++a) {
      for (auto b = std::next(a); b != referenced.end(); ++b) g.add_edge(a->first, b->first);
    }
  }
  return g;
}

std::vector<PipRecord> pip_records(const Store& store) {
  std::map<std::string, std::vector<Contact>> by_post;
  for (const auto& c : store.contacts()) {
    if (c.source == ContactSource::Post && !c.post_id.empty()) by_post[c.post_id].push_back(c);
  }
  std::vector<PipRecord> out;
  for (const auto& p : store.posts()) {
    if (!p.label || !p.label->pip.is_pip) continue;
    PipRecord r;
    r.post = p;
    r.author = store.account(p.author_id);
    if (const auto it = by_post.find(p.id); it != by_post.end()) r.contacts = it->second;
    out.push_back(std::move(r));
  }
  return out;
}

std::map<std::string, Category> pip_categories(const std::vector<PipRecord>& pips) {
  std::map<std::string, Category> out;
  for (const auto& r : pips) {
    if (r.post.label && r.post.label->category) out[r.post.id] = *r.post.label->category;
  }
  return out;
}

std::vector<Campaign> flood_fill(const PipGraph& graph, const std::map<std::string, Category>& categories) {
  std::vector<Campaign> out;
  std::set<std::string> seen;
  // Nodes are visited in id order, so each component starts at its smallest id.
  for (const auto& [start, unused] : graph.nodes()) {
    if (seen.count(start)) continue;
    Campaign c;
    c.component_id = start;
    std::deque<std::string> frontier{start};
    seen.insert(start);
    while (!frontier.empty()) {
      const std::string id = frontier.front();
      frontier.pop_front();
      c.node_ids.push_back(id);
      for (const auto& next : graph.adjacency().at(id)) {
        if (seen.insert(next).second) frontier.push_back(next);
      }
    }
    std::sort(c.node_ids.begin(), c.node_ids.end());
    std::set<std::string> pips;
    for (const auto& id : c.node_ids) {
      const GraphNode& n = graph.nodes().at(id);
      if (n.kind == NodeKind::Account) {
        ++c.stats.n_accounts;
      } else {
        ++c.stats.n_contacts;
        if (n.contact_kind) ++c.stats.contact_kinds[*n.contact_kind];
      }
      if (const auto it = graph.node_pips().find(id); it != graph.node_pips().end()) {
        pips.insert(it->second.begin(), it->second.end());
      }
    }
    c.pip_ids.assign(pips.begin(), pips.end());
    for (const auto& p : c.pip_ids) {
      if (const auto it = categories.find(p); it != categories.end()) ++c.stats.categories[it->second];
    }
    c.stats.is_singleton = c.stats.n_accounts == 1 && c.stats.n_contacts == 0;
    out.push_back(std::move(c));
  }
  return out;
}

Json Campaign::to_json() const {
  Json kinds = Json::object();
  for (const auto& [k, n] : stats.contact_kinds) kinds[std::string(to_string(k))] = n;
  Json cats = Json::object();
  for (const auto& [k, n] : stats.categories) cats[std::string(to_string(k))] = n;
  return Json{{"component_id", component_id},
              {"node_ids", node_ids},
              {"pip_ids", pip_ids},
              {"stats",
               {{"n_accounts", stats.n_accounts},
                {"n_contacts", stats.n_contacts},
                {"contact_kind_histogram", kinds},
                {"category_histogram", cats},
                {"is_singleton", stats.is_singleton}}}};
}

namespace {
double share(std::size_t n, std::size_t total) {
  return total == 0 ? 0.0 : static_cast<double>(n) / static_cast<double>(total);
}
}  // namespace

double CampaignSummary::singleton_fraction() const { return share(singletons, campaigns); }
double CampaignSummary::contacts_fraction(std::size_t i) const { return share(by_contacts.at(i), campaigns); }
double CampaignSummary::categories_fraction(std::size_t i) const { return share(by_categories.at(i), campaigns); }

Json CampaignSummary::to_json() const {
  return Json{{"campaigns", campaigns},
              {"singletons", singletons},
              {"singleton_fraction", singleton_fraction()},
              {"by_contacts", {{"0", by_contacts[0]}, {"1", by_contacts[1]}, {"2", by_contacts[2]}, {"3+", by_contacts[3]}}},
              {"by_categories",
               {{"0", by_categories[0]}, {"1", by_categories[1]}, {"2", by_categories[2]}, {"3+", by_categories[3]}}}};
}

CampaignSummary campaign_stats(const std::vector<Campaign>& campaigns) {
  CampaignSummary s;
  s.campaigns = campaigns.size();
  for (const auto& c : campaigns) {
    s.singletons += c.stats.is_singleton;
    ++s.by_contacts[std::min<std::size_t>(c.stats.n_contacts, 3)];
    ++s.by_categories[std::min<std::size_t>(c.stats.categories.size(), 3)];
  }
  return s;
}

Json component_graph_json(const PipGraph& graph, const Campaign& campaign) {
  const std::set<std::string> members(campaign.node_ids.begin(), campaign.node_ids.end());
  Json nodes = Json::array();
  for (const auto& id : campaign.node_ids) nodes.push_back(node_json(graph.nodes().at(id)));
  Json edges = Json::array();
  for (const auto& [k, n] : graph.edges()) {
    if (members.count(k.first)) edges.push_back(edge_json(k.first, k.second, n));
  }
  return Json{{"component_id", campaign.component_id}, {"nodes", nodes}, {"edges", edges}};
}

void save_campaigns(Store& store, const PipGraph& graph, const std::vector<Campaign>& campaigns) {
  for (const auto& c : campaigns) {
    Json j = c.to_json();
    j["graph"] = component_graph_json(graph, c);
    store.put_campaign(c.component_id, j);
  }
}

}  // namespace pip
