#include "pip/hunt.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include "pip/error.hpp"
#include "pip/pipeline.hpp"
#include "pip/synth.hpp"

namespace pip {

KeywordSet::KeywordSet(const std::vector<Keyword>& keywords) {
  for (const auto& k : keywords) add(k);
}

bool KeywordSet::add(Keyword keyword) {
  validate(keyword);
  const std::string key = keyword.key();
  return keywords_.emplace(key, std::move(keyword)).second;
}

Keyword* KeywordSet::find(const std::string& key) {
  const auto it = keywords_.find(key);
  return it == keywords_.end() ? nullptr : &it->second;
}

const Keyword* KeywordSet::find(const std::string& key) const {
  const auto it = keywords_.find(key);
  return it == keywords_.end() ? nullptr : &it->second;
}

std::vector<Keyword> KeywordSet::active() const {
  std::vector<Keyword> out;
  for (const auto& [key, k] : keywords_) {
    if (k.active()) out.push_back(k);
  }
  return out;
}

std::size_t KeywordSet::active_count() const {
  std::size_t n = 0;
  for (const auto& [key, k] : keywords_) n += k.active();
  return n;
}

void KeywordSet::set_state(const std::string& key, KeywordState state) {
  Keyword* k = find(key);
  if (!k) fail(ErrorCode::NotFound, "no keyword " + key);
  if (k->state == state) return;
  k->state = state;
  k->blocked_rounds = 0;
}

KeywordSet KeywordSet::load(const Store& store) { return KeywordSet(store.keywords()); }

void KeywordSet::save(Store& store) const {
  for (const auto& [key, k] : keywords_) store.put_keyword(k);
}

std::vector<Keyword> parse_seed_keywords(std::string_view text) {
  std::vector<Keyword> out;
  std::size_t line_no = 0;
  std::size_t start = 0;
  while (start <= text.size()) {
    std::size_t end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(start, end - start);
    ++line_no;
    while (!line.empty() && (line.back() == '\r' || line.back() == ' ' || line.back() == '\t')) line.remove_suffix(1);
    while (!line.empty() && (line.front() == ' ' || line.front() == '\t')) line.remove_prefix(1);
    if (!line.empty() && !(line.size() >= 2 && line[0] == '#' && line[1] == ' ')) {
      const auto k = parse_keyword(line);
      if (!k) throw ParseError(line_no, "not a keyword: " + std::string(line));
      out.push_back(*k);
    }
    if (end == text.size()) break;
    start = end + 1;
  }
  return out;
}

std::vector<Keyword> load_seed_keywords(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::IoError, "cannot read seed keywords " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_seed_keywords(ss.str());
}

Json RoundReport::to_json() const {
  return Json{{"round_id", round_id},
              {"keywords_used", keywords_used},
              {"posts_scanned", posts_scanned},
              {"new_pips", new_pips},
              {"new_pip_accounts", new_pip_accounts},
              {"new_keywords", new_keywords},
              {"blocked_this_round", blocked_this_round},
              {"unblocked_this_round", unblocked_this_round},
              {"partial", partial},
              {"keywords_skipped", keywords_skipped}};
}

RoundReport RoundReport::from_json(const Json& j) {
  RoundReport r;
  r.round_id = j.at("round_id").get<int>();
  r.keywords_used = j.at("keywords_used").get<std::size_t>();
  r.posts_scanned = j.at("posts_scanned").get<std::size_t>();
  r.new_pips = j.at("new_pips").get<std::size_t>();
  r.new_pip_accounts = j.value("new_pip_accounts", std::size_t{0});
  r.new_keywords = j.value("new_keywords", std::vector<std::string>{});
  r.blocked_this_round = j.value("blocked_this_round", std::vector<std::string>{});
  r.unblocked_this_round = j.value("unblocked_this_round", std::vector<std::string>{});
  r.partial = j.value("partial", false);
  r.keywords_skipped = j.value("keywords_skipped", std::size_t{0});
  return r;
}

HuntClassifier HuntClassifier::from(const TextClassifier& classifier) {
  HuntClassifier h;
  h.binary = [&classifier](std::string_view text) { return classifier.classify(text); };
  if (classifier.has_category_model()) {
    h.category = [&classifier](std::string_view text) { return classifier.categorize(text); };
  }
  return h;
}

std::optional<double> compute_rcp(const KeywordRoundStats& stats) {
  if (stats.retrieved == 0) return std::nullopt;
  return static_cast<double>(stats.new_pips) / static_cast<double>(stats.retrieved);
}

std::vector<Keyword> sample_keywords(const KeywordSet& set, std::size_t budget, std::uint64_t seed) {
  require(budget >= 1, ErrorCode::PreconditionFailed, "keyword budget must be at least 1");
  std::vector<Keyword> pool = set.active();
  if (pool.size() <= budget) return pool;
  synth::Rng rng(seed);
  // Partial Fisher-Yates: the first `budget` slots are a uniform sample.
  for (std::size_t i = 0; i < budget; ++i) {
    const auto j = static_cast<std::size_t>(synth::uniform(rng, i, pool.size() - 1));
    std::swap(pool[i], pool[j]);
  }
  pool.resize(budget);
  return pool;
}

std::vector<Keyword> generate_keywords(const std::vector<Post>& new_pips, const std::vector<Account>& pip_accounts) {
  std::vector<Keyword> out;
  std::set<std::string> seen;
  auto emit = [&](KeywordKind kind, const std::string& value) {
    if (value.empty()) return;
    Keyword k;
    k.kind = kind;
    k.value = value;
    if (seen.insert(k.key()).second) out.push_back(std::move(k));
  };
  for (const auto& p : new_pips) {
    for (const auto& tag : p.hashtags) emit(KeywordKind::Hashtag, tag);
    emit(KeywordKind::Account, p.author_id);
  }
  for (const auto& a : pip_accounts) emit(KeywordKind::Account, a.id);
  return out;
}

FilterResult filter_keywords(KeywordSet& set, double threshold, int round_id, const std::vector<Keyword>& generated) {
  require(threshold > 0.0 && threshold <= 1.0, ErrorCode::PreconditionFailed, "threshold must be in (0,1]");
  std::set<std::string> extracted;
  for (const auto& k : generated) extracted.insert(k.key());

  FilterResult result;
  std::vector<std::string> to_block;
  for (const auto& [key, k] : set.all()) {
    if (k.active()) {
      if (!k.history.empty() && k.history.back().round_id == round_id && k.history.back().rcp &&
          *k.history.back().rcp < threshold) {
        to_block.push_back(key);
      }
    }
  }
  for (const auto& [key, kc] : set.all()) {
    Keyword& k = *set.find(key);
    if (k.active()) continue;
    ++k.blocked_rounds;
    if (k.blocked_rounds >= kUnblockAfterRounds && extracted.count(key)) {
      k.state = KeywordState::Active;
      k.blocked_rounds = 0;
      result.unblocked.push_back(key);
    }
  }
  for (const auto& key : to_block) {
    Keyword& k = *set.find(key);
    k.state = KeywordState::Blocked;
    k.blocked_rounds = 0;
    result.blocked.push_back(key);
  }
  return result;
}

RoundReport run_round(int round_id, KeywordSet& keywords, PostSource& source, const HuntClassifier& classifier,
                      Store& store, const HuntConfig& config) {
  require(keywords.active_count() > 0, ErrorCode::PreconditionFailed, "no active keyword to search");
  require(static_cast<bool>(classifier.binary), ErrorCode::PreconditionFailed, "classifier not set");

  RoundReport report;
  report.round_id = round_id;
  const auto sampled =
      sample_keywords(keywords, config.keyword_budget, config.seed ^ static_cast<std::uint64_t>(round_id));

  std::vector<Post> new_pips;
  std::vector<Account> pip_accounts;
  auto label_for = [&](const std::string& text, const PipLabel& pip, Timestamp time) {
    PostLabel l;
    l.pip = pip;
    if (classifier.category) l.category = classifier.category(text);
    l.labeler = config.labeler;
    l.time = time;
    return l;
  };

  for (std::size_t i = 0; i < sampled.size(); ++i) {
    const Keyword& kw = sampled[i];
    std::vector<Post> posts;
    std::optional<Account> profile;
    try {
      if (kw.kind == KeywordKind::Hashtag) {
        posts = source.search_hashtag(kw.value, config.search_limit);
      } else {
        posts = source.account_timeline(kw.value, config.timeline_limit);
        profile = source.get_profile(kw.value);
      }
    } catch (const RateLimitedError&) {
      // Whatever this keyword fetched before the refusal is dropped with it.
      report.partial = true;
      report.keywords_skipped = sampled.size() - i;
      break;
    }
    ++report.keywords_used;

    KeywordRoundStats stats;
    stats.round_id = round_id;
    stats.retrieved = posts.size();
    for (auto& p : posts) {
      ++report.posts_scanned;
      const std::string text = p.full_text();
      const PipLabel pip = classifier.binary(text);
      if (!pip.is_pip) continue;
      p.label = label_for(text, pip, p.crawled_at);
      if (store.insert_if_novel(p)) {
        ++stats.new_pips;
        new_pips.push_back(p);
      }
    }
    if (profile) {
      const PipLabel pip = classifier.binary(profile->profile_text);
      if (pip.is_pip) {
        const bool known = store.account(profile->id).has_value();
        profile->profile_label = label_for(profile->profile_text, pip, posts.empty() ? 0 : posts.front().crawled_at);
        store.put_account(*profile);
        if (!known) {
          ++report.new_pip_accounts;
          pip_accounts.push_back(*profile);
        }
      }
    }
    stats.rcp = compute_rcp(stats);
    report.new_pips += stats.new_pips;
    if (Keyword* k = keywords.find(kw.key())) k->history.push_back(stats);
  }

  const auto generated = generate_keywords(new_pips, pip_accounts);
  for (const auto& k : generated) {
    if (keywords.add(k)) report.new_keywords.push_back(k.key());
  }
  const FilterResult f = filter_keywords(keywords, config.rcp_threshold, round_id, generated);
  report.blocked_this_round = f.blocked;
  report.unblocked_this_round = f.unblocked;
  keywords.save(store);
  return report;
}

void append_round_report(const std::filesystem::path& log, const RoundReport& report) {
  if (log.has_parent_path()) std::filesystem::create_directories(log.parent_path());
  std::ofstream out(log, std::ios::app | std::ios::binary);
  if (!out) fail(ErrorCode::IoError, "cannot append to " + log.string());
  out << report.to_json().dump() << '\n';
  out.flush();
  if (!out) fail(ErrorCode::IoError, "write failed on " + log.string());
}

std::vector<RoundReport> read_round_reports(const std::filesystem::path& log) {
  std::vector<RoundReport> out;
  std::ifstream in(log, std::ios::binary);
  if (!in) return out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    try {
      out.push_back(RoundReport::from_json(Json::parse(line)));
    } catch (const Json::exception& e) {
      throw ParseError(line_no, std::string("round log: ") + e.what());
    }
  }
  return out;
}

}  // namespace pip
