#pragma once

#include <array>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "pip/model.hpp"
#include "pip/store.hpp"

namespace pip {

enum class NodeKind { Account, Contact };
std::string_view to_string(NodeKind k) noexcept;

struct GraphNode {
  NodeKind kind = NodeKind::Account;
  std::string id;  // "account:<id>" or "contact:<Kind>:<value>"
  std::optional<ContactKind> contact_kind;
  std::size_t pip_count = 0;

  friend bool operator==(const GraphNode&, const GraphNode&) = default;
};

struct GraphEdge {
  std::string a;  // a < b
  std::string b;
  std::size_t shared_pip_count = 0;

  friend bool operator==(const GraphEdge&, const GraphEdge&) = default;
};

std::string account_node_id(const std::string& account_id);
/// URL contacts are keyed by FQDN; mentions map to account nodes.
std::string contact_node_id(const Contact& contact);

/// Undirected graph; nodes and edges keyed by id, so iteration is ordered.
class PipGraph {
 public:
  /// Increments pip_count of an existing node.
  void add_node(const GraphNode& node);
  /// Increments shared_pip_count; fails with InvalidEntity on a self-edge or a
  /// missing endpoint.
  void add_edge(const std::string& a, const std::string& b, std::size_t shared = 1);

  const std::map<std::string, GraphNode>& nodes() const noexcept { return nodes_; }
  const std::map<std::pair<std::string, std::string>, std::size_t>& edges() const noexcept { return edges_; }
  std::vector<GraphEdge> edge_list() const;
  const GraphNode* node(const std::string& id) const;
  /// Neighbour ids in id order.
  std::vector<std::string> neighbours(const std::string& id) const;
  const std::map<std::string, std::vector<std::string>>& adjacency() const noexcept { return adjacency_; }

  /// PIP ids referencing each node.
  const std::map<std::string, std::vector<std::string>>& node_pips() const noexcept { return node_pips_; }
  void add_node_pip(const std::string& node_id, const std::string& pip_id);

  Json to_json() const;
  static PipGraph from_json(const Json& j);

 private:
  std::map<std::string, GraphNode> nodes_;
  std::map<std::pair<std::string, std::string>, std::size_t> edges_;
  std::map<std::string, std::vector<std::string>> adjacency_;
  std::map<std::string, std::vector<std::string>> node_pips_;
};

struct PipRecord {
  Post post;
  /// Author profile when known; its handle lets mentions reach the account node.
  std::optional<Account> author;
  std::vector<Contact> contacts;
};

/// Account node per author, contact node per (kind, value); every pair of
/// nodes referenced by one PIP gets an edge.
PipGraph build_graph(const std::vector<PipRecord>& pips);

/// PIP posts from the store with their stored post contacts.
std::vector<PipRecord> pip_records(const Store& store);

struct CampaignStats {
  std::size_t n_accounts = 0;
  std::size_t n_contacts = 0;
  std::map<ContactKind, std::size_t> contact_kinds;
  std::map<Category, std::size_t> categories;  // PIPs per category
  bool is_singleton = false;

  friend bool operator==(const CampaignStats&, const CampaignStats&) = default;
};

struct Campaign {
  std::string component_id;  // smallest node id
  std::vector<std::string> node_ids;
  std::vector<std::string> pip_ids;
  CampaignStats stats;

  Json to_json() const;
  friend bool operator==(const Campaign&, const Campaign&) = default;
};

/// Connected components in component_id order. Categories come from
/// `categories` (pip id -> category) when given.
std::vector<Campaign> flood_fill(const PipGraph& graph, const std::map<std::string, Category>& categories = {});

/// Categories of labeled posts in the records.
std::map<std::string, Category> pip_categories(const std::vector<PipRecord>& pips);

struct CampaignSummary {
  std::size_t campaigns = 0;
  std::size_t singletons = 0;
  /// Campaigns by contact node count: 0, 1, 2, 3 or more.
  std::array<std::size_t, 4> by_contacts{};
  /// Campaigns by distinct category count: 0, 1, 2, 3 or more.
  std::array<std::size_t, 4> by_categories{};

  double singleton_fraction() const;
  /// Share of all campaigns in bucket i.
  double contacts_fraction(std::size_t i) const;
  double categories_fraction(std::size_t i) const;
  Json to_json() const;
};

CampaignSummary campaign_stats(const std::vector<Campaign>& campaigns);

/// {"nodes": [...], "edges": [...]} of one component, for visualization.
Json component_graph_json(const PipGraph& graph, const Campaign& campaign);

/// Stores every campaign under its component id.
void save_campaigns(Store& store, const PipGraph& graph, const std::vector<Campaign>& campaigns);

}  // namespace pip
