#include "pip/monitor.hpp"

#include <algorithm>
#include <cmath>
#include <ctime>
#include <fstream>
#include <set>
#include <sstream>

#include "pip/error.hpp"
#include "pip/synth.hpp"
#include "pip/textnorm.hpp"

namespace pip {

namespace {

constexpr Timestamp kWeek = 7 * kSecondsPerDay;

Timestamp floor_div(Timestamp a, Timestamp b) { return a >= 0 ? a / b : -((-a + b - 1) / b); }

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string percent(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f%%", 100.0 * v);
  return buf;
}

std::string csv_field(std::string_view s) {
  if (s.find_first_of(",\"\n") == std::string_view::npos) return std::string(s);
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

}  // namespace

std::string format_date(Timestamp t) {
  const std::time_t tt = static_cast<std::time_t>(t);
  std::tm tm{};
  gmtime_r(&tt, &tm);
  char buf[16];
  std::strftime(buf, sizeof buf, "%Y-%m-%d", &tm);
  return buf;
}

std::vector<EvasionCohort> weekly_cohorts(const std::vector<Post>& pips, std::optional<Timestamp> origin,
                                          std::size_t sample, std::uint64_t seed) {
  require(sample >= 1, ErrorCode::PreconditionFailed, "cohort sample must be at least 1");
  if (pips.empty()) return {};
  Timestamp start = origin.value_or(std::min_element(pips.begin(), pips.end(), [](const Post& a, const Post& b) {
                                      return a.created_at < b.created_at;
                                    })->created_at);
  std::map<Timestamp, std::vector<std::string>> windows;
  for (const auto& p : pips) {
    if (p.created_at < start) continue;
    windows[floor_div(p.created_at - start, kWeek)].push_back(p.id);
  }
  std::vector<EvasionCohort> out;
  synth::Rng rng(seed);
  for (auto& [index, ids] : windows) {
    std::sort(ids.begin(), ids.end());
    ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
    if (ids.size() > sample) {
      synth::shuffle(ids, rng);
      ids.resize(sample);
      std::sort(ids.begin(), ids.end());
    }
    EvasionCohort c;
    c.cohort_id = "PIP-" + std::to_string(out.size() + 1);
    c.window_start = start + index * kWeek;
    c.window_end = c.window_start + kWeek;
    c.post_ids = std::move(ids);
    out.push_back(std::move(c));
  }
  return out;
}

RevisitResult schedule_revisits(const EvasionCohort& cohort, AvailabilitySource& source, const RevisitPlan& plan) {
  require(!cohort.post_ids.empty(), ErrorCode::EmptyCohort, "cohort has no posts");
  require(plan.cadence_days >= 1, ErrorCode::PreconditionFailed, "revisit cadence must be at least one day");
  require(plan.ticks >= 1, ErrorCode::PreconditionFailed, "at least one revisit tick is needed");
  RevisitResult result;
  for (int k = 0; k < plan.ticks; ++k) {
    const Timestamp t = plan.first_probe + static_cast<Timestamp>(k) * plan.cadence_days * kSecondsPerDay;
    for (const auto& id : cohort.post_ids) {
      try {
        result.records.push_back({id, t, source.check_availability(id, t)});
      } catch (const Error& e) {
        result.warnings.push_back("probe of " + id + " at " + format_date(t) + " failed: " + e.what());
      }
    }
  }
  return result;
}

double evasion_rate(const EvasionCohort& cohort, const std::vector<RevisitRecord>& records, Timestamp revisit_date) {
  const std::set<std::string> members(cohort.post_ids.begin(), cohort.post_ids.end());
  const Timestamp day = floor_div(revisit_date, kSecondsPerDay);
  // With several probes of one post on that day, the last one counts.
  std::map<std::string, const RevisitRecord*> latest;
  for (const auto& r : records) {
    if (floor_div(r.probe_time, kSecondsPerDay) != day || !members.count(r.post_id)) continue;
    auto& slot = latest[r.post_id];
    if (!slot || slot->probe_time <= r.probe_time) slot = &r;
  }
  if (latest.empty()) fail(ErrorCode::NoProbeData, "no probes of " + cohort.cohort_id + " on " + format_date(revisit_date));
  std::size_t reachable = 0;
  for (const auto& [id, r] : latest) reachable += r->status == AvailabilityStatus::Reachable;
  return static_cast<double>(reachable) / static_cast<double>(latest.size());
}

std::map<AvailabilityStatus, double> unavailability_breakdown(const std::vector<RevisitRecord>& records) {
  std::map<AvailabilityStatus, double> out;
  for (auto s : kAllStatuses) {
    if (s != AvailabilityStatus::Reachable) out[s] = 0.0;
  }
  std::size_t total = 0;
  for (const auto& r : records) {
    if (r.status == AvailabilityStatus::Reachable) continue;
    out[r.status] += 1.0;
    ++total;
  }
  if (total == 0) fail(ErrorCode::NoUnavailable, "no unavailable record");
  for (auto& [s, v] : out) v /= static_cast<double>(total);
  return out;
}

std::vector<EngagementBucket> engagement_curve(const std::vector<Post>& pips, int max_days) {
  require(max_days >= 1, ErrorCode::PreconditionFailed, "max_days must be at least 1");
  struct Sum {
    std::size_t n = 0;
    double likes = 0, replies = 0, retweets = 0, quotes = 0;
  };
  std::map<int, Sum> sums;
  for (const auto& p : pips) {
    if (p.crawled_at < p.created_at) continue;
    const Timestamp te = (p.crawled_at - p.created_at) / kSecondsPerDay;
    if (te > max_days) continue;
    Sum& s = sums[static_cast<int>(te)];
    ++s.n;
    s.likes += static_cast<double>(p.engagement.likes);
    s.replies += static_cast<double>(p.engagement.replies);
    s.retweets += static_cast<double>(p.engagement.retweets);
    s.quotes += static_cast<double>(p.engagement.quotes);
  }
  std::vector<EngagementBucket> out;
  for (const auto& [d, s] : sums) {
    const double n = static_cast<double>(s.n);
    out.push_back({d, s.n, s.likes / n, s.replies / n, s.retweets / n, s.quotes / n});
  }
  return out;
}

std::vector<EvasionRow> evasion_table(const std::vector<EvasionCohort>& cohorts,
                                      const std::vector<RevisitRecord>& records,
                                      const std::vector<Timestamp>& revisit_dates) {
  std::vector<EvasionRow> out;
  for (const auto& c : cohorts) {
    EvasionRow row{c.cohort_id, c.window_start, c.window_end, c.post_ids.size(), {}};
    for (const Timestamp d : revisit_dates) {
      try {
        row.rates.push_back(evasion_rate(c, records, d));
      } catch (const Error& e) {
        if (e.code() != ErrorCode::NoProbeData) throw;
        row.rates.push_back(std::nullopt);
      }
    }
    out.push_back(std::move(row));
  }
  return out;
}

Json CorpusReport::to_json() const {
  Json cats = Json::object();
  for (const auto& [c, v] : category_shares) {
    cats[std::string(to_string(c))] = {{"count", category_counts.count(c) ? category_counts.at(c) : 0}, {"share", v}};
  }
  Json langs = Json::object();
  for (const auto& [l, v] : language_shares) langs[std::string(to_string(l))] = v;
  Json cdf = Json::array();
  for (const auto& p : account_cdf) cdf.push_back({{"pip_count", p.pip_count}, {"accounts_share", p.accounts_share}});
  Json top = Json::array();
  for (const auto& t : top_accounts) {
    top.push_back({{"k", t.k}, {"accounts_share", t.accounts_share}, {"pips_share", t.pips_share}});
  }
  Json prefs = Json::object();
  for (const auto& [c, kinds] : contact_preference) {
    Json k = Json::object();
    for (const auto& [kind, v] : kinds) k[std::string(to_string(kind))] = v;
    prefs[std::string(to_string(c))] = k;
  }
  Json j{{"pips", pips},
         {"posts", posts},
         {"accounts", accounts},
         {"categories", cats},
         {"uncategorised", uncategorised},
         {"languages", langs},
         {"account_cdf", cdf},
         {"top_accounts", top},
         {"contact_preference", prefs}};
  j["scanned_pip_ratio"] = scanned_pip_ratio ? Json(*scanned_pip_ratio) : Json(nullptr);
  j["pips_per_suspended_account"] = pips_per_suspended_account ? Json(*pips_per_suspended_account) : Json(nullptr);
  j["pips_per_surviving_account"] = pips_per_surviving_account ? Json(*pips_per_surviving_account) : Json(nullptr);
  return j;
}

CorpusReport corpus_report(const Store& store) {
  CorpusReport r;
  const auto posts = store.posts();
  r.posts = posts.size();
  std::vector<const Post*> pips;
  std::size_t labeled = 0;
  for (const auto& p : posts) {
    if (!p.label) continue;
    ++labeled;
    if (p.label->pip.is_pip) pips.push_back(&p);
  }
  if (pips.empty()) fail(ErrorCode::EmptyStore, "store holds no PIP");
  r.pips = pips.size();
  r.scanned_pip_ratio = static_cast<double>(pips.size()) / static_cast<double>(labeled);

  for (auto c : kAllCategories) r.category_counts[c] = 0;
  std::map<std::string, Category> category_of;
  std::size_t categorised = 0;
  for (const Post* p : pips) {
    if (p->label->category) {
      ++r.category_counts[*p->label->category];
      category_of[p->id] = *p->label->category;
      ++categorised;
    } else {
      ++r.uncategorised;
    }
  }
  for (const auto& [c, n] : r.category_counts) {
    r.category_shares[c] = categorised ? static_cast<double>(n) / static_cast<double>(categorised) : 0.0;
  }

  const auto& detector = LanguageDetector::builtin();
  std::map<Language, std::size_t> langs;
  for (const Post* p : pips) ++langs[detector.detect(tokenize(p->text)).code];
  for (const auto& [l, n] : langs) r.language_shares[l] = static_cast<double>(n) / static_cast<double>(pips.size());

  std::map<std::string, std::size_t> per_account;
  for (const Post* p : pips) ++per_account[p->author_id];
  r.accounts = per_account.size();
  std::vector<std::size_t> counts;
  for (const auto& [a, n] : per_account) counts.push_back(n);
  std::sort(counts.begin(), counts.end());
  const double n_accounts = static_cast<double>(counts.size());
  for (std::size_t i = 0; i < counts.size(); ++i) {
    if (i + 1 == counts.size() || counts[i + 1] != counts[i]) {
      r.account_cdf.push_back({counts[i], static_cast<double>(i + 1) / n_accounts});
    }
  }
  std::size_t running = 0;
  std::size_t next_k = 1;
  for (std::size_t i = 0; i < counts.size(); ++i) {
    running += counts[counts.size() - 1 - i];
    if (i + 1 == next_k) {
      r.top_accounts.push_back({next_k, static_cast<double>(next_k) / n_accounts,
                                static_cast<double>(running) / static_cast<double>(pips.size())});
      next_k *= 10;
    }
  }

  std::map<Category, std::map<ContactKind, std::size_t>> kinds;
  for (const auto& c : store.contacts()) {
    const auto it = category_of.find(c.post_id);
    if (c.source != ContactSource::Post || it == category_of.end()) continue;
    ++kinds[it->second][c.kind];
  }
  for (const auto& [cat, by_kind] : kinds) {
    std::size_t total = 0;
    for (const auto& [k, n] : by_kind) total += n;
    for (const auto& [k, n] : by_kind) r.contact_preference[cat][k] = static_cast<double>(n) / static_cast<double>(total);
  }

  std::map<std::string, const RevisitRecord*> last_probe;
  for (const auto& rv : store.revisits()) {
    auto& slot = last_probe[rv.post_id];
    if (!slot || slot->probe_time <= rv.probe_time) slot = &rv;
  }
  std::map<std::string, bool> suspended;  // probed accounts only
  for (const Post* p : pips) {
    const auto it = last_probe.find(p->id);
    if (it == last_probe.end()) continue;
    bool& s = suspended[p->author_id];
    s = s || it->second->status == AvailabilityStatus::SuspendedAccount;
  }
  std::size_t sus_n = 0, sus_pips = 0, ok_n = 0, ok_pips = 0;
  for (const auto& [a, s] : suspended) {
    (s ? sus_n : ok_n) += 1;
    (s ? sus_pips : ok_pips) += per_account.at(a);
  }
  if (sus_n) r.pips_per_suspended_account = static_cast<double>(sus_pips) / static_cast<double>(sus_n);
  if (ok_n) r.pips_per_surviving_account = static_cast<double>(ok_pips) / static_cast<double>(ok_n);
  return r;
}

StreamSnapshot scan_stream(const std::string& name, const std::vector<Post>& sample,
                           const std::function<bool(const Post&)>& is_pip) {
  StreamSnapshot s{name, sample.size(), 0};
  for (const auto& p : sample) s.pips += is_pip(p);
  return s;
}

std::string categories_csv(const CorpusReport& report) {
  std::vector<std::pair<Category, double>> rows(report.category_shares.begin(), report.category_shares.end());
  std::stable_sort(rows.begin(), rows.end(), [](const auto& a, const auto& b) { return a.second > b.second; });
  std::ostringstream out;
  out << "Category,PIPs,% PIPs,Share\n";
  for (const auto& [c, share] : rows) {
    out << to_string(c) << ',' << report.category_counts.at(c) << ',' << percent(share) << ',' << fmt(share) << '\n';
  }
  return out.str();
}

std::string evasion_csv(const std::vector<EvasionRow>& rows) {
  std::size_t columns = 4;
  for (const auto& r : rows) columns = std::max(columns, r.rates.size());
  std::ostringstream out;
  out << "Group,Tweeting Period";
  for (std::size_t i = 0; i < columns; ++i) out << ",RV-" << i + 1;
  out << '\n';
  for (const auto& r : rows) {
    out << csv_field(r.group) << ',' << format_date(r.window_start) << ".." << format_date(r.window_end - kSecondsPerDay);
    for (std::size_t i = 0; i < columns; ++i) {
      out << ',';
      if (i < r.rates.size() && r.rates[i]) out << percent(*r.rates[i]);
    }
    out << '\n';
  }
  return out.str();
}

std::string stream_csv(const std::vector<StreamSnapshot>& snapshots) {
  std::ostringstream out;
  out << "Stream Snapshot,Posts,% PIPs\n";
  for (const auto& s : snapshots) out << csv_field(s.name) << ',' << s.posts << ',' << percent(s.ratio()) << '\n';
  return out.str();
}

std::string contacts_csv(const CorpusReport& report) {
  std::ostringstream out;
  out << "Category";
  for (auto k : kAllContactKinds) out << ',' << to_string(k);
  out << '\n';
  for (const auto& [cat, kinds] : report.contact_preference) {
    out << to_string(cat);
    for (auto k : kAllContactKinds) {
      const auto it = kinds.find(k);
      out << ',' << percent(it == kinds.end() ? 0.0 : it->second);
    }
    out << '\n';
  }
  return out.str();
}

std::string engagement_csv(const std::vector<EngagementBucket>& buckets) {
  std::ostringstream out;
  out << "Elapse Days,PIPs,Likes,Replies,Retweets,Quotes\n";
  for (const auto& b : buckets) {
    out << b.elapse_days << ',' << b.count << ',' << fmt(b.mean_likes) << ',' << fmt(b.mean_replies) << ','
        << fmt(b.mean_retweets) << ',' << fmt(b.mean_quotes) << '\n';
  }
  return out.str();
}

std::string accounts_csv(const CorpusReport& report) {
  std::ostringstream out;
  out << "PIPs per Account,Accounts CDF\n";
  for (const auto& p : report.account_cdf) out << p.pip_count << ',' << fmt(p.accounts_share) << '\n';
  return out.str();
}

void append_revisits(const std::filesystem::path& log, const std::vector<RevisitRecord>& records) {
  if (log.has_parent_path()) std::filesystem::create_directories(log.parent_path());
  std::ofstream out(log, std::ios::app | std::ios::binary);
  if (!out) fail(ErrorCode::IoError, "cannot append to " + log.string());
  for (const auto& r : records) out << Json(r).dump() << '\n';
  out.flush();
  if (!out) fail(ErrorCode::IoError, "write failed on " + log.string());
}

std::vector<RevisitRecord> read_revisits(const std::filesystem::path& log) {
  std::vector<RevisitRecord> out;
  std::ifstream in(log, std::ios::binary);
  if (!in) return out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    try {
      out.push_back(Json::parse(line).get<RevisitRecord>());
    } catch (const Json::exception& e) {
      throw ParseError(line_no, std::string("revisit log: ") + e.what());
    }
  }
  return out;
}

}  // namespace pip
