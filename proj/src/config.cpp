#include "pip/config.hpp"

#include <charconv>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

#include "pip/error.hpp"

namespace pip {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

// Strips a trailing comment that is not inside quotes.
std::string_view strip_comment(std::string_view s) {
  bool quoted = false;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i] == '"' && (i == 0 || s[i - 1] != '\\')) quoted = !quoted;
    if (s[i] == '#' && !quoted) return s.substr(0, i);
  }
  return s;
}

std::string unquote(std::string_view v, std::size_t line) {
  if (v.size() >= 2 && v.front() == '"' && v.back() == '"') {
    std::string out;
    for (std::size_t i = 1; i + 1 < v.size(); ++i) {
      if (v[i] == '\\' && i + 2 < v.size()) {
        ++i;
        out += v[i] == 'n' ? '\n' : v[i];
      } else {
        out += v[i];
      }
    }
    return out;
  }
  if (!v.empty() && v.front() == '"') throw ParseError(line, "unterminated string");
  return std::string(v);
}

template <class T>
T number(const std::string& v, std::size_t line, const std::string& key) {
  T out{};
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || ptr != v.data() + v.size()) throw ParseError(line, key + ": not a number: " + v);
  return out;
}

std::string quote(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"' || c == '\\') out += '\\';
    if (c == '\n') {
      out += "\\n";
      continue;
    }
    out += c;
  }
  return out + "\"";
}

std::string num(double v) {
  std::ostringstream o;
  o.precision(17);
  o << v;
  return o.str();
}

using Setter = std::function<void(PipelineConfig&, const std::string&, std::size_t)>;

const std::map<std::string, Setter>& setters() {
  static const std::map<std::string, Setter> table = [] {
    std::map<std::string, Setter> t;
    auto path = [&](const char* key, std::filesystem::path PipelineConfig::*m) {
      t[key] = [m](PipelineConfig& c, const std::string& v, std::size_t) { c.*m = v; };
    };
    path("workspace", &PipelineConfig::workspace);
    path("store_dir", &PipelineConfig::store_dir);
    path("seeds", &PipelineConfig::seeds);
    path("manifest", &PipelineConfig::manifest);
    t["sim_url"] = [](PipelineConfig& c, const std::string& v, std::size_t) { c.sim_url = v; };
    t["seed"] = [](PipelineConfig& c, const std::string& v, std::size_t l) { c.seed = number<std::uint64_t>(v, l, "seed"); };
    t["api_port"] = [](PipelineConfig& c, const std::string& v, std::size_t l) { c.api_port = number<int>(v, l, "api_port"); };

    t["hunt.rcp_threshold"] = [](PipelineConfig& c, const std::string& v, std::size_t l) {
      c.hunt.rcp_threshold = number<double>(v, l, "hunt.rcp_threshold");
    };
    t["hunt.keyword_budget"] = [](PipelineConfig& c, const std::string& v, std::size_t l) {
      c.hunt.keyword_budget = number<std::size_t>(v, l, "hunt.keyword_budget");
    };
    t["hunt.timeline_limit"] = [](PipelineConfig& c, const std::string& v, std::size_t l) {
      c.hunt.timeline_limit = number<std::size_t>(v, l, "hunt.timeline_limit");
    };
    t["hunt.search_limit"] = [](PipelineConfig& c, const std::string& v, std::size_t l) {
      c.hunt.search_limit = number<std::size_t>(v, l, "hunt.search_limit");
    };
    t["hunt.seed"] = [](PipelineConfig& c, const std::string& v, std::size_t l) {
      c.hunt.seed = number<std::uint64_t>(v, l, "hunt.seed");
    };
    t["hunt.labeler"] = [](PipelineConfig& c, const std::string& v, std::size_t) { c.hunt.labeler = v; };

    t["revisit.cadence_days"] = [](PipelineConfig& c, const std::string& v, std::size_t l) {
      c.revisit_cadence_days = number<int>(v, l, "revisit.cadence_days");
    };
    t["revisit.ticks"] = [](PipelineConfig& c, const std::string& v, std::size_t l) {
      c.revisit_ticks = number<int>(v, l, "revisit.ticks");
    };
    t["revisit.cohort_sample"] = [](PipelineConfig& c, const std::string& v, std::size_t l) {
      c.cohort_sample = number<std::size_t>(v, l, "revisit.cohort_sample");
    };

    t["train.learning_rate"] = [](PipelineConfig& c, const std::string& v, std::size_t l) {
      c.train.learning_rate = number<double>(v, l, "train.learning_rate");
    };
    t["train.l2"] = [](PipelineConfig& c, const std::string& v, std::size_t l) { c.train.l2 = number<double>(v, l, "train.l2"); };
    t["train.epochs"] = [](PipelineConfig& c, const std::string& v, std::size_t l) {
      c.train.epochs = number<int>(v, l, "train.epochs");
    };
    t["train.seed"] = [](PipelineConfig& c, const std::string& v, std::size_t l) {
      c.train.seed = number<std::uint64_t>(v, l, "train.seed");
    };
    t["train.threshold"] = [](PipelineConfig& c, const std::string& v, std::size_t l) {
      c.train.threshold = number<double>(v, l, "train.threshold");
    };
    t["train.min_df"] = [](PipelineConfig& c, const std::string& v, std::size_t l) {
      c.min_df = number<std::size_t>(v, l, "train.min_df");
    };
    t["train.kfold"] = [](PipelineConfig& c, const std::string& v, std::size_t l) {
      c.kfold = number<std::size_t>(v, l, "train.kfold");
    };
    t["train.ground_truth_pips"] = [](PipelineConfig& c, const std::string& v, std::size_t l) {
      c.ground_truth_pips = number<std::size_t>(v, l, "train.ground_truth_pips");
    };
    t["train.ground_truth_benign"] = [](PipelineConfig& c, const std::string& v, std::size_t l) {
      c.ground_truth_benign = number<std::size_t>(v, l, "train.ground_truth_benign");
    };
    t["train.tagger_sentences"] = [](PipelineConfig& c, const std::string& v, std::size_t l) {
      c.tagger_sentences = number<std::size_t>(v, l, "train.tagger_sentences");
    };

    t["rate.requests"] = [](PipelineConfig& c, const std::string& v, std::size_t l) {
      if (!c.rate) c.rate = sim::RateBudget{};
      c.rate->requests = number<std::size_t>(v, l, "rate.requests");
    };
    t["rate.window_seconds"] = [](PipelineConfig& c, const std::string& v, std::size_t l) {
      if (!c.rate) c.rate = sim::RateBudget{};
      c.rate->window_seconds = number<double>(v, l, "rate.window_seconds");
    };
    return t;
  }();
  return table;
}

[[noreturn]] void invalid(const std::string& key, const std::string& why) {
  fail(ErrorCode::PreconditionFailed, "config " + key + ": " + why);
}

}  // namespace

void PipelineConfig::validate() const {
  if (!(hunt.rcp_threshold > 0.0 && hunt.rcp_threshold <= 1.0)) invalid("hunt.rcp_threshold", "must be in (0,1]");
  if (hunt.keyword_budget < 1) invalid("hunt.keyword_budget", "must be at least 1");
  if (hunt.timeline_limit < 1) invalid("hunt.timeline_limit", "must be at least 1");
  if (hunt.search_limit < 1) invalid("hunt.search_limit", "must be at least 1");
  if (hunt.labeler.empty()) invalid("hunt.labeler", "must not be empty");
  if (revisit_cadence_days < 1) invalid("revisit.cadence_days", "must be at least 1");
  if (revisit_ticks < 1) invalid("revisit.ticks", "must be at least 1");
  if (cohort_sample < 1) invalid("revisit.cohort_sample", "must be at least 1");
  if (!(train.learning_rate > 0.0)) invalid("train.learning_rate", "must be positive");
  if (!(train.l2 >= 0.0)) invalid("train.l2", "must be non-negative");
  if (train.epochs < 1) invalid("train.epochs", "must be at least 1");
  if (!(train.threshold > 0.0 && train.threshold < 1.0)) invalid("train.threshold", "must be in (0,1)");
  if (min_df < 1) invalid("train.min_df", "must be at least 1");
  if (kfold < 2) invalid("train.kfold", "must be at least 2");
  if (ground_truth_pips < 1 || ground_truth_benign < 1) invalid("train.ground_truth_*", "both classes are needed");
  if (tagger_sentences < 1) invalid("train.tagger_sentences", "must be at least 1");
  if (rate && rate->requests < 1) invalid("rate.requests", "must be at least 1");
  if (rate && !(rate->window_seconds > 0.0)) invalid("rate.window_seconds", "must be positive");
  if (api_port < 0 || api_port > 65535) invalid("api_port", "must be a TCP port");
}

std::filesystem::path PipelineConfig::resolve(const std::filesystem::path& p) const {
  return (p.is_absolute() ? p : workspace / p).lexically_normal();
}

std::string PipelineConfig::to_text() const {
  std::ostringstream o;
  o << "workspace = " << quote(workspace.string()) << '\n'
    << "store_dir = " << quote(store_dir.string()) << '\n'
    << "seeds = " << quote(seeds.string()) << '\n'
    << "manifest = " << quote(manifest.string()) << '\n'
    << "sim_url = " << quote(sim_url) << '\n'
    << "seed = " << seed << '\n'
    << "api_port = " << api_port << "\n\n"
    << "[hunt]\n"
    << "rcp_threshold = " << num(hunt.rcp_threshold) << '\n'
    << "keyword_budget = " << hunt.keyword_budget << '\n'
    << "timeline_limit = " << hunt.timeline_limit << '\n'
    << "search_limit = " << hunt.search_limit << '\n'
    << "seed = " << hunt.seed << '\n'
    << "labeler = " << quote(hunt.labeler) << "\n\n"
    << "[revisit]\n"
    << "cadence_days = " << revisit_cadence_days << '\n'
    << "ticks = " << revisit_ticks << '\n'
    << "cohort_sample = " << cohort_sample << "\n\n"
    << "[train]\n"
    << "learning_rate = " << num(train.learning_rate) << '\n'
    << "l2 = " << num(train.l2) << '\n'
    << "epochs = " << train.epochs << '\n'
    << "seed = " << train.seed << '\n'
    << "threshold = " << num(train.threshold) << '\n'
    << "min_df = " << min_df << '\n'
    << "kfold = " << kfold << '\n'
    << "ground_truth_pips = " << ground_truth_pips << '\n'
    << "ground_truth_benign = " << ground_truth_benign << '\n'
    << "tagger_sentences = " << tagger_sentences << '\n';
  if (rate) {
    o << "\n[rate]\n"
      << "requests = " << rate->requests << '\n'
      << "window_seconds = " << num(rate->window_seconds) << '\n';
  }
  return o.str();
}

Json PipelineConfig::to_json() const {
  Json j{{"workspace", workspace.string()},
         {"store_dir", store_dir.string()},
         {"seeds", seeds.string()},
         {"manifest", manifest.string()},
         {"sim_url", sim_url},
         {"seed", seed},
         {"api_port", api_port},
         {"hunt",
          {{"rcp_threshold", hunt.rcp_threshold},
           {"keyword_budget", hunt.keyword_budget},
           {"timeline_limit", hunt.timeline_limit},
           {"search_limit", hunt.search_limit},
           {"seed", hunt.seed},
           {"labeler", hunt.labeler}}},
         {"revisit", {{"cadence_days", revisit_cadence_days}, {"ticks", revisit_ticks}, {"cohort_sample", cohort_sample}}},
         {"train",
          {{"learning_rate", train.learning_rate},
           {"l2", train.l2},
           {"epochs", train.epochs},
           {"seed", train.seed},
           {"threshold", train.threshold},
           {"min_df", min_df},
           {"kfold", kfold},
           {"ground_truth_pips", ground_truth_pips},
           {"ground_truth_benign", ground_truth_benign},
           {"tagger_sentences", tagger_sentences}}}};
  if (rate) j["rate"] = {{"requests", rate->requests}, {"window_seconds", rate->window_seconds}};
  return j;
}

PipelineConfig parse_config(std::string_view text) {
  PipelineConfig c;
  std::string section;
  std::size_t line_no = 0;
  std::istringstream in{std::string(text)};
  std::string raw;
  while (std::getline(in, raw)) {
    ++line_no;
    const std::string_view line = trim(strip_comment(raw));
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']' || line.size() < 3) throw ParseError(line_no, "malformed section header");
      section = std::string(trim(line.substr(1, line.size() - 2)));
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) throw ParseError(line_no, "expected key = value");
    const std::string key = std::string(trim(line.substr(0, eq)));
    if (key.empty()) throw ParseError(line_no, "empty key");
    const std::string full = section.empty() ? key : section + "." + key;
    const auto it = setters().find(full);
    if (it == setters().end()) throw ParseError(line_no, "unknown key " + full);
    it->second(c, unquote(trim(line.substr(eq + 1)), line_no), line_no);
  }
  c.validate();
  return c;
}

PipelineConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::IoError, "cannot read config " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  PipelineConfig c = parse_config(ss.str());
  if (c.workspace.is_relative()) c.workspace = path.parent_path() / c.workspace;
  return c;
}

}  // namespace pip
