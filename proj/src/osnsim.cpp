#include "pip/osnsim.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>
#include <unordered_set>

#include "pip/error.hpp"
#include "pip/resources_data.hpp"
#include "pip/synth.hpp"
#include "pip/textnorm.hpp"
#include "tsv.hpp"

namespace pip::sim {

using synth::Rng;
using synth::pick;
using synth::uniform;
using synth::unit;

std::string_view to_string(ContactStyle s) noexcept {
  switch (s) {
    case ContactStyle::Inline: return "inline";
    case ContactStyle::ImUrl: return "im_url";
    case ContactStyle::ShortUrl: return "short_url";
    case ContactStyle::Url: return "url";
    case ContactStyle::Mention: return "mention";
  }
  return "inline";
}

std::optional<ContactStyle> parse_contact_style(std::string_view s) {
  for (auto style : {ContactStyle::Inline, ContactStyle::ImUrl, ContactStyle::ShortUrl, ContactStyle::Url,
                     ContactStyle::Mention}) {
    if (to_string(style) == s) return style;
  }
  return std::nullopt;
}

std::map<AvailabilityStatus, double> HazardSpec::default_removal_mix() {
  const double rest = 1.0 - kSuspensionShare;
  const double page = kPageNonexistentShare / rest;
  const double other = (1.0 - page) / 3.0;
  return {
      {AvailabilityStatus::PageNonexistent, page},
      {AvailabilityStatus::DeletedByAuthor, other},
      {AvailabilityStatus::AccountNonexistent, other},
      {AvailabilityStatus::RulesViolation, other},
  };
}

HazardSpec HazardSpec::calibrated(double survival, double days, double suspension_share) {
  if (!(survival > 0.0 && survival <= 1.0) || !(days > 0.0) || !(suspension_share >= 0.0 && suspension_share <= 1.0)) {
    fail(ErrorCode::InvalidManifest, "hazard calibration needs survival in (0,1], days > 0, share in [0,1]");
  }
  const double rate = -std::log(survival) / days;
  HazardSpec h;
  h.suspension_per_day = 1.0 - std::exp(-rate * suspension_share);
  h.removal_per_day = 1.0 - std::exp(-rate * (1.0 - suspension_share));
  return h;
}

// ---------------------------------------------------------------- manifest

namespace {

[[noreturn]] void invalid(const std::string& message) { fail(ErrorCode::InvalidManifest, message); }

bool in_unit(double x) { return x >= 0.0 && x <= 1.0; }

void check_contact(const CampaignSpec& c, const ContactSpec& s) {
  const std::string where = "campaign " + c.id + " contact " + s.value + ": ";
  if (s.value.empty()) invalid(where + "empty value");
  switch (s.style) {
    case ContactStyle::Inline:
      if (s.kind != ContactKind::QQ && s.kind != ContactKind::WeChat && s.kind != ContactKind::Telegram &&
          s.kind != ContactKind::Other) {
        invalid(where + "inline contacts must be QQ, WeChat, Telegram or Other");
      }
      if (!valid_contact_id(s.kind, s.value)) invalid(where + "not a valid id");
      break;
    case ContactStyle::ImUrl:
      if (s.kind != ContactKind::Telegram && s.kind != ContactKind::WhatsApp && s.kind != ContactKind::LINE) {
        invalid(where + "IM URLs exist for Telegram, WhatsApp and LINE");
      }
      break;
    case ContactStyle::ShortUrl:
      if (s.kind != ContactKind::Telegram && s.kind != ContactKind::WhatsApp && s.kind != ContactKind::LINE &&
          s.kind != ContactKind::URL) {
        invalid(where + "short links point at Telegram, WhatsApp, LINE or a web page");
      }
      if (!s.short_url.empty() && !is_shortener(s.short_url)) invalid(where + "short_url is not a known shortener");
      break;
    case ContactStyle::Url:
      if (s.kind != ContactKind::URL) invalid(where + "url style needs kind URL");
      break;
    case ContactStyle::Mention:
      if (s.kind != ContactKind::TwitterMention) invalid(where + "mention style needs kind TwitterMention");
      break;
  }
  if (s.kind == ContactKind::WhatsApp &&
      !std::all_of(s.value.begin(), s.value.end(), [](char ch) { return ch >= '0' && ch <= '9'; })) {
    invalid(where + "WhatsApp values are phone numbers");
  }
  if (s.kind == ContactKind::URL && s.value.find('/') != std::string::npos) invalid(where + "URL values are bare fqdns");
}

}  // namespace

std::size_t SimCorpusManifest::pip_count() const {
  std::size_t n = 0;
  for (const auto& c : campaigns) n += c.n_posts;
  return n;
}

void SimCorpusManifest::validate() const {
  if (span_days < 1) invalid("span_days must be at least 1");
  if (campaigns.empty() && benign.n_posts == 0) invalid("manifest generates no posts");
  std::set<std::string> ids;
  for (const auto& c : campaigns) {
    if (c.id.empty()) invalid("campaign without id");
    if (!ids.insert(c.id).second) invalid("duplicate campaign id " + c.id);
    if (c.n_accounts < 1) invalid("campaign " + c.id + " needs at least one account");
    if (c.n_posts < c.n_accounts) invalid("campaign " + c.id + " has fewer posts than accounts");
    if (c.contacts.empty()) invalid("campaign " + c.id + " has no contacts");
    if (!in_unit(c.poll_share) || !in_unit(c.profile_share) || !in_unit(c.mention_share)) invalid("campaign " + c.id + " shares must be in [0,1]");
    for (const auto& tag : c.hashtags) {
      if (tag.empty() || tag.front() == '#' || tag.find(' ') != std::string::npos) {
        invalid("campaign " + c.id + " has malformed hashtag '" + tag + "'");
      }
    }
    for (const auto& s : c.contacts) check_contact(c, s);
  }
  if (benign.n_posts > 0) {
    if (benign.n_accounts < 1 || benign.n_accounts > benign.n_posts) invalid("benign accounts must be in [1, n_posts]");
    if (benign.languages.empty()) invalid("benign language mix is empty");
    for (const auto& [lang, w] : benign.languages) {
      if (!(w > 0.0)) invalid("benign language weights must be positive");
    }
  }
  if (!(hashtag_counts.pip_mean >= 1.0)) invalid("PIP hashtag mean must be at least 1");
  if (!(hashtag_counts.benign_mean >= 0.0)) invalid("benign hashtag mean must be non-negative");
  if (!(hashtag_counts.benign_zero_share >= 0.0 && hashtag_counts.benign_zero_share < 1.0)) {
    invalid("benign zero share must be in [0,1)");
  }
  if (hashtag_counts.benign_mean > 0.0 &&
      hashtag_counts.benign_mean < 1.0 - hashtag_counts.benign_zero_share) {
    invalid("benign hashtag mean is below what the zero share allows");
  }
  if (!(hazard.suspension_per_day >= 0.0 && hazard.suspension_per_day < 1.0) ||
      !(hazard.removal_per_day >= 0.0 && hazard.removal_per_day < 1.0)) {
    invalid("hazards must be in [0,1)");
  }
  double mix = 0.0;
  for (const auto& [status, w] : hazard.removal_mix) {
    if (status == AvailabilityStatus::Reachable || status == AvailabilityStatus::SuspendedAccount || w < 0.0) {
      invalid("removal mix may only weight post-level reasons");
    }
    mix += w;
  }
  if (hazard.removal_per_day > 0.0 && !(mix > 0.0)) invalid("removal mix is empty");
  for (const auto& r : redirects) {
    if (url_fqdn(r.from).empty() || url_fqdn(r.to).empty()) invalid("redirect endpoints must be http(s) URLs");
  }
  for (const auto& t : threats) {
    if (t.url.empty()) invalid("threat without url");
  }
  if (rate_budget.requests < 1 || !(rate_budget.window_seconds > 0.0)) invalid("rate budget must be positive");
}

void to_json(Json& j, const SimCorpusManifest& m) {
  Json campaigns = Json::array();
  for (const auto& c : m.campaigns) {
    Json contacts = Json::array();
    for (const auto& s : c.contacts) {
      Json cj = {{"kind", to_string(s.kind)}, {"value", s.value}, {"style", to_string(s.style)}};
      if (!s.short_url.empty()) cj["short_url"] = s.short_url;
      contacts.push_back(std::move(cj));
    }
    campaigns.push_back({{"id", c.id},
                         {"category", to_string(c.category)},
                         {"language", to_string(c.language)},
                         {"n_accounts", c.n_accounts},
                         {"n_posts", c.n_posts},
                         {"hashtags", c.hashtags},
                         {"contacts", std::move(contacts)},
                         {"jargon", c.jargon},
                         {"poll_share", c.poll_share},
                         {"mention_share", c.mention_share},
                         {"profile_share", c.profile_share},
                         {"pool_hashtags", c.pool_hashtags}});
  }
  Json langs = Json::array();
  for (const auto& [lang, w] : m.benign.languages) langs.push_back({{"language", to_string(lang)}, {"weight", w}});
  Json mix = Json::object();
  for (const auto& [status, w] : m.hazard.removal_mix) mix[std::string(to_string(status))] = w;
  Json redirects = Json::array();
  for (const auto& r : m.redirects) redirects.push_back({{"from", r.from}, {"to", r.to}});
  Json threats = Json::array();
  for (const auto& t : m.threats) threats.push_back({{"url", t.url}, {"malware", t.malware}, {"phishing", t.phishing}});
  j = Json{{"seed", m.seed},
           {"epoch", m.epoch},
           {"span_days", m.span_days},
           {"campaigns", std::move(campaigns)},
           {"benign", {{"n_posts", m.benign.n_posts}, {"n_accounts", m.benign.n_accounts}, {"languages", langs}}},
           {"hashtag_counts",
            {{"pip_mean", m.hashtag_counts.pip_mean},
             {"benign_mean", m.hashtag_counts.benign_mean},
             {"benign_zero_share", m.hashtag_counts.benign_zero_share}}},
           {"hazard",
            {{"suspension_per_day", m.hazard.suspension_per_day},
             {"removal_per_day", m.hazard.removal_per_day},
             {"removal_mix", std::move(mix)}}},
           {"redirects", std::move(redirects)},
           {"threats", std::move(threats)},
           {"rate_budget", {{"requests", m.rate_budget.requests}, {"window_seconds", m.rate_budget.window_seconds}}}};
}

void from_json(const Json& j, SimCorpusManifest& m) {
  m = SimCorpusManifest{};
  if (!j.is_object()) invalid("manifest must be a JSON object");
  m.seed = j.value("seed", m.seed);
  m.epoch = j.value("epoch", m.epoch);
  m.span_days = j.value("span_days", m.span_days);
  for (const auto& cj : j.value("campaigns", Json::array())) {
    CampaignSpec c;
    c.id = cj.at("id").get<std::string>();
    const auto cat = parse_category(cj.at("category").get<std::string>());
    if (!cat) invalid("campaign " + c.id + ": unknown category");
    c.category = *cat;
    const auto lang = parse_language(cj.at("language").get<std::string>());
    if (!lang) invalid("campaign " + c.id + ": unknown language");
    c.language = *lang;
    c.n_accounts = cj.value("n_accounts", c.n_accounts);
    c.n_posts = cj.at("n_posts").get<std::size_t>();
    c.hashtags = cj.value("hashtags", std::vector<std::string>{});
    c.jargon = cj.value("jargon", std::vector<std::string>{});
    c.poll_share = cj.value("poll_share", c.poll_share);
    c.mention_share = cj.value("mention_share", c.mention_share);
    c.profile_share = cj.value("profile_share", c.profile_share);
    c.pool_hashtags = cj.value("pool_hashtags", c.pool_hashtags);
    for (const auto& sj : cj.value("contacts", Json::array())) {
      ContactSpec s;
      const auto kind = parse_contact_kind(sj.at("kind").get<std::string>());
      if (!kind) invalid("campaign " + c.id + ": unknown contact kind");
      s.kind = *kind;
      s.value = sj.at("value").get<std::string>();
      const auto style = parse_contact_style(sj.value("style", std::string("inline")));
      if (!style) invalid("campaign " + c.id + ": unknown contact style");
      s.style = *style;
      s.short_url = sj.value("short_url", std::string());
      c.contacts.push_back(std::move(s));
    }
    m.campaigns.push_back(std::move(c));
  }
  if (j.contains("benign")) {
    const auto& b = j.at("benign");
    m.benign.n_posts = b.value("n_posts", std::size_t{0});
    m.benign.n_accounts = b.value("n_accounts", std::size_t{1});
    if (b.contains("languages")) {
      m.benign.languages.clear();
      for (const auto& lj : b.at("languages")) {
        const auto lang = parse_language(lj.at("language").get<std::string>());
        if (!lang) invalid("benign: unknown language");
        m.benign.languages.emplace_back(*lang, lj.at("weight").get<double>());
      }
    }
  }
  if (j.contains("hashtag_counts")) {
    const auto& h = j.at("hashtag_counts");
    m.hashtag_counts.pip_mean = h.value("pip_mean", m.hashtag_counts.pip_mean);
    m.hashtag_counts.benign_mean = h.value("benign_mean", m.hashtag_counts.benign_mean);
    m.hashtag_counts.benign_zero_share = h.value("benign_zero_share", m.hashtag_counts.benign_zero_share);
  }
  if (j.contains("hazard")) {
    const auto& h = j.at("hazard");
    if (h.contains("calibrate")) {
      const auto& c = h.at("calibrate");
      m.hazard = HazardSpec::calibrated(c.at("survival").get<double>(), c.at("days").get<double>(),
                                        c.value("suspension_share", kSuspensionShare));
    } else {
      m.hazard.suspension_per_day = h.value("suspension_per_day", 0.0);
      m.hazard.removal_per_day = h.value("removal_per_day", 0.0);
    }
    if (h.contains("removal_mix")) {
      m.hazard.removal_mix.clear();
      for (const auto& [name, w] : h.at("removal_mix").items()) {
        const auto status = parse_status(name);
        if (!status) invalid("hazard: unknown status " + name);
        m.hazard.removal_mix[*status] = w.get<double>();
      }
    }
  }
  for (const auto& rj : j.value("redirects", Json::array())) {
    m.redirects.push_back({rj.at("from").get<std::string>(), rj.at("to").get<std::string>()});
  }
  for (const auto& tj : j.value("threats", Json::array())) {
    m.threats.push_back({tj.at("url").get<std::string>(), tj.value("malware", false), tj.value("phishing", false)});
  }
  if (j.contains("rate_budget")) {
    m.rate_budget.requests = j.at("rate_budget").value("requests", m.rate_budget.requests);
    m.rate_budget.window_seconds = j.at("rate_budget").value("window_seconds", m.rate_budget.window_seconds);
  }
}

SimCorpusManifest parse_manifest(std::string_view json_text) {
  SimCorpusManifest m;
  try {
    m = Json::parse(json_text).get<SimCorpusManifest>();
  } catch (const Json::exception& e) {
    invalid(std::string("malformed manifest: ") + e.what());
  }
  m.validate();
  return m;
}

SimCorpusManifest load_manifest(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::IoError, "cannot read manifest " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_manifest(ss.str());
}

std::vector<std::size_t> apportion(std::size_t total, const std::vector<double>& weights) {
  require(!weights.empty(), ErrorCode::PreconditionFailed, "apportion needs weights");
  double sum = 0.0;
  for (double w : weights) {
    require(w >= 0.0, ErrorCode::PreconditionFailed, "apportion weights must be non-negative");
    sum += w;
  }
  require(sum > 0.0, ErrorCode::PreconditionFailed, "apportion weights sum to zero");
  std::vector<std::size_t> out(weights.size());
  std::vector<std::pair<double, std::size_t>> remainders;
  std::size_t assigned = 0;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    const double exact = static_cast<double>(total) * weights[i] / sum;
    out[i] = static_cast<std::size_t>(std::floor(exact));
    assigned += out[i];
    remainders.emplace_back(exact - std::floor(exact), i);
  }
  std::stable_sort(remainders.begin(), remainders.end(),
                   [](const auto& a, const auto& b) { return a.first > b.first; });
  for (std::size_t k = 0; assigned < total; ++k, ++assigned) ++out[remainders[k % remainders.size()].second];
  return out;
}

std::vector<std::pair<Category, double>> reference_category_shares() {
  return {
      {Category::Pornography, 44.47},     {Category::IllegalDrug, 11.45},
      {Category::Gambling, 9.50},         {Category::MoneyLaundering, 8.96},
      {Category::DataTheftLeakage, 8.85}, {Category::Crowdturfing, 5.10},
      {Category::Harassment, 4.08},       {Category::WeaponSales, 2.50},
      {Category::ForgeryFakeDocuments, 2.28}, {Category::Surrogacy, 1.50},
      {Category::Others, 1.31},
  };
}

std::vector<std::pair<Language, double>> reference_language_shares() {
  return {
      {Language::en, 40.65}, {Language::zh, 35.48}, {Language::ja, 8.92}, {Language::th, 2.64},
      {Language::it, 2.59},  {Language::de, 2.35},  {Language::es, 2.15}, {Language::ru, 1.81},
      {Language::ko, 1.75},  {Language::fr, 1.65},
  };
}

namespace {

std::string random_phone(Rng& rng) {
  std::string s(1, static_cast<char>('1' + uniform(rng, 0, 8)));
  const auto len = uniform(rng, 10, 12);
  while (s.size() < len) s.push_back(static_cast<char>('0' + uniform(rng, 0, 9)));
  return s;
}

std::string random_word(Rng& rng, std::size_t lo, std::size_t hi) {
  std::string s;
  const auto len = uniform(rng, lo, hi);
  while (s.size() < len) s.push_back(static_cast<char>('a' + uniform(rng, 0, 25)));
  return s;
}

ContactSpec reference_contact(Language lang, Rng& rng) {
  ContactSpec s;
  const double r = unit(rng);
  if (lang == Language::zh) {
    if (r < 0.45) s = {ContactKind::WeChat, synth::random_contact_id(ContactKind::WeChat, rng), ContactStyle::Inline, {}};
    else if (r < 0.75) s = {ContactKind::QQ, synth::random_contact_id(ContactKind::QQ, rng), ContactStyle::Inline, {}};
    else s = {ContactKind::Telegram, synth::random_contact_id(ContactKind::Telegram, rng),
              unit(rng) < 0.5 ? ContactStyle::Inline : ContactStyle::ImUrl, {}};
  } else if (lang == Language::ja || lang == Language::th || lang == Language::ko) {
    if (r < 0.6) s = {ContactKind::LINE, synth::random_contact_id(ContactKind::WeChat, rng),
                      unit(rng) < 0.5 ? ContactStyle::ImUrl : ContactStyle::ShortUrl, {}};
    else s = {ContactKind::Telegram, synth::random_contact_id(ContactKind::Telegram, rng), ContactStyle::ImUrl, {}};
  } else {
    if (r < 0.4) s = {ContactKind::Telegram, synth::random_contact_id(ContactKind::Telegram, rng),
                      unit(rng) < 0.5 ? ContactStyle::Inline : ContactStyle::ImUrl, {}};
    else if (r < 0.7) s = {ContactKind::WhatsApp, random_phone(rng),
                           unit(rng) < 0.6 ? ContactStyle::ImUrl : ContactStyle::ShortUrl, {}};
    else s = {ContactKind::URL, random_word(rng, 5, 9) + (unit(rng) < 0.5 ? ".com" : ".xyz"), ContactStyle::Url, {}};
  }
  return s;
}

}  // namespace

SimCorpusManifest reference_mix_manifest(std::size_t n_pips, std::size_t n_benign, std::uint64_t seed) {
  SimCorpusManifest m;
  m.seed = seed;
  m.span_days = 30;
  m.hazard = HazardSpec::calibrated(0.90, 60.0);
  Rng rng(seed ^ 0x6d616e6966657374ULL);

  const auto cats = reference_category_shares();
  const auto langs = reference_language_shares();
  std::vector<double> cat_w, lang_w;
  for (const auto& [c, w] : cats) cat_w.push_back(w);
  for (const auto& [l, w] : langs) lang_w.push_back(w);
  const auto per_cat = apportion(n_pips, cat_w);

  const auto& lexicon = JargonLexicon::builtin();
  std::size_t campaign_no = 0;
  for (std::size_t ci = 0; ci < cats.size(); ++ci) {
    if (per_cat[ci] == 0) continue;
    const auto per_lang = apportion(per_cat[ci], lang_w);
    std::vector<std::string> jargon;
    for (const auto& e : lexicon.entries()) {
      if (e.category == cats[ci].first) jargon.push_back(e.term);
    }
    for (std::size_t li = 0; li < langs.size(); ++li) {
      const std::size_t n = per_lang[li];
      if (n == 0) continue;
      const std::size_t n_campaigns = (n + 29) / 30;
      const auto sizes = apportion(n, std::vector<double>(n_campaigns, 1.0));
      for (std::size_t size : sizes) {
        ++campaign_no;
        CampaignSpec c;
        c.id = "c" + std::to_string(campaign_no);
        c.category = cats[ci].first;
        c.language = langs[li].first;
        c.n_posts = size;
        c.n_accounts = std::clamp<std::size_t>((size + 7) / 8, 1, size);
        const std::size_t n_tags = uniform(rng, 2, 3);
        for (std::size_t t = 0; t < n_tags; ++t) c.hashtags.push_back(random_word(rng, 4, 8) + std::to_string(campaign_no));
        const std::size_t n_contacts = unit(rng) < 0.3 ? 2 : 1;
        for (std::size_t k = 0; k < n_contacts; ++k) c.contacts.push_back(reference_contact(c.language, rng));
        if (c.language == Language::zh && !jargon.empty() && unit(rng) < 0.5) c.jargon.push_back(pick(rng, jargon));
        m.campaigns.push_back(std::move(c));
      }
    }
  }
  for (const auto& c : m.campaigns) {
    for (const auto& s : c.contacts) {
      if (s.kind == ContactKind::URL && unit(rng) < 0.2) m.threats.push_back({s.value, unit(rng) < 0.5, true});
    }
  }
  m.benign.n_posts = n_benign;
  m.benign.n_accounts = std::max<std::size_t>(1, n_benign / 4);
  m.benign.languages = langs;
  m.validate();
  return m;
}

// ---------------------------------------------------------------- corpus

namespace {

struct TemplateRow {
  std::string role;
  std::string category;  // name or "*"
  std::string language;  // code or "*"
  std::string text;
};

struct Bank {
  std::vector<TemplateRow> templates;
  std::map<std::pair<std::string, std::string>, std::vector<std::string>> terms;  // (category|place, lang)
  std::map<std::string, std::vector<std::string>> pools;

  static const Bank& builtin() {
    static const Bank bank = [] {
      Bank b;
      for (auto line : tsv::split_lines(resources::templates_tsv)) {
        if (line.empty() || line.front() == '#') continue;
        const auto f = tsv::split_tabs(line);
        if (f.size() != 4) fail(ErrorCode::ParseError, "templates.tsv: expected 4 fields");
        b.templates.push_back({std::string(f[0]), std::string(f[1]), std::string(f[2]), std::string(f[3])});
      }
      for (auto line : tsv::split_lines(resources::category_terms_tsv)) {
        if (line.empty() || line.front() == '#') continue;
        const auto f = tsv::split_tabs(line);
        if (f.size() != 3) fail(ErrorCode::ParseError, "category_terms.tsv: expected 3 fields");
        b.terms[{std::string(f[0]), std::string(f[1])}].emplace_back(f[2]);
      }
      for (auto line : tsv::split_lines(resources::hashtags_tsv)) {
        if (line.empty() || line.front() == '#') continue;
        const auto f = tsv::split_tabs(line);
        if (f.size() != 3) fail(ErrorCode::ParseError, "hashtags.tsv: expected 3 fields");
        b.pools[std::string(f[0])].emplace_back(f[2]);
      }
      return b;
    }();
    return bank;
  }

  // Most specific match first: (category, lang), (*, lang), (*, *), (category, en).
  std::vector<const TemplateRow*> candidates(std::string_view role, std::string_view category,
                                             std::string_view lang) const {
    const std::pair<std::string_view, std::string_view> order[] = {
        {category, lang}, {"*", lang}, {"*", "*"}, {category, "en"}, {"*", "en"}};
    for (const auto& [cat, lg] : order) {
      std::vector<const TemplateRow*> out;
      for (const auto& t : templates) {
        if (t.role == role && t.category == cat && t.language == lg) out.push_back(&t);
      }
      if (!out.empty()) return out;
    }
    fail(ErrorCode::InvalidManifest, "no template for role " + std::string(role));
  }

  const std::vector<std::string>& term_list(const std::string& key, Language lang) const {
    auto it = terms.find({key, std::string(to_string(lang))});
    if (it == terms.end()) it = terms.find({key, "en"});
    if (it == terms.end()) fail(ErrorCode::InvalidManifest, "no terms for " + key);
    return it->second;
  }

  const std::vector<std::string>& pool(const std::string& name) const {
    static const std::vector<std::string> empty;
    const auto it = pools.find(name);
    return it == pools.end() ? empty : it->second;
  }
};

void replace_all(std::string& s, std::string_view slot, const std::string& value) {
  for (std::size_t pos = s.find(slot); pos != std::string::npos; pos = s.find(slot, pos + value.size())) {
    s.replace(pos, slot.size(), value);
  }
}

std::string collapse_spaces(const std::string& s) {
  std::string out;
  for (char ch : s) {
    if (ch == ' ' && (out.empty() || out.back() == ' ')) continue;
    out.push_back(ch);
  }
  while (!out.empty() && out.back() == ' ') out.pop_back();
  return out;
}

std::string price(Language lang, Rng& rng) {
  const std::string n = std::to_string(uniform(rng, 2, 99) * 10);
  switch (lang) {
    case Language::zh: return n + "元";
    case Language::ja: return n + "円";
    case Language::th: return n + " บาท";
    case Language::ko: return n + "원";
    case Language::ru: return n + " руб";
    case Language::es:
    case Language::it:
    case Language::de:
    case Language::fr: return n + "€";
    default: return "$" + n;
  }
}

std::uint64_t fnv1a(std::string_view s) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char ch : s) {
    h ^= ch;
    h *= 1099511628211ULL;
  }
  return h;
}

std::string short_code(std::string_view seed_text) {
  static constexpr char kAlphabet[] = "abcdefghijkmnopqrstuvwxyzABCDEFGHJKLMNPQRSTUVWXYZ23456789";
  std::uint64_t h = fnv1a(seed_text);
  std::string code;
  for (int i = 0; i < 7; ++i) {
    code.push_back(kAlphabet[h % (sizeof(kAlphabet) - 1)]);
    h /= sizeof(kAlphabet) - 1;
  }
  return code;
}

std::string im_url(ContactKind kind, const std::string& value) {
  switch (kind) {
    case ContactKind::Telegram: return "https://t.me/" + value;
    case ContactKind::WhatsApp: return "https://wa.me/" + value;
    case ContactKind::LINE: return "https://line.me/ti/p/" + value;
    default: return "https://" + value + "/";
  }
}

std::string short_link(const ContactSpec& s, const std::string& campaign_id) {
  if (!s.short_url.empty()) return s.short_url;
  const std::string code = short_code(campaign_id + "|" + s.value);
  switch (s.kind) {
    case ContactKind::LINE: return "http://lin.ee/" + code;
    case ContactKind::WhatsApp: return "https://wa.link/" + code;
    default: return "https://bit.ly/" + code;
  }
}

struct Generator {
  const SimCorpusManifest& m;
  const Bank& bank = Bank::builtin();
  Rng rng;
  SimCorpus corpus;
  std::set<std::string> handles;
  std::set<std::string> landing;
  std::map<std::string, std::string> redirect_map;
  std::size_t next_account = 1;

  explicit Generator(const SimCorpusManifest& manifest) : m(manifest), rng(manifest.seed) {}

  std::string new_handle() {
    while (true) {
      std::string h = random_word(rng, 4, 7) + std::to_string(uniform(rng, 10, 9999));
      if (handles.insert(h).second) return h;
    }
  }

  Account new_account() {
    Account a;
    a.id = "u-" + std::to_string(next_account++);
    a.handle = new_handle();
    a.registered_at = m.epoch - static_cast<Timestamp>(uniform(rng, 30, 1500)) * kSecondsPerDay;
    return a;
  }

  Timestamp created_time() {
    return m.epoch + static_cast<Timestamp>(uniform(rng, 0, static_cast<std::uint64_t>(m.span_days) * kSecondsPerDay - 1));
  }

  std::string fill(std::string text, Category category, Language lang, const std::string& contact,
                   const std::vector<std::string>& jargon) {
    const std::string cat(to_string(category));
    const std::string product = pick(rng, bank.term_list(cat, lang));
    replace_all(text, "{product}", product);
    if (text.find("{jargon}") != std::string::npos) {
      std::vector<std::string> choices = jargon;
      if (choices.empty()) {
        for (const auto& e : JargonLexicon::builtin().entries()) {
          if (e.category == category) choices.push_back(e.term);
        }
      }
      replace_all(text, "{jargon}", choices.empty() ? product : pick(rng, choices));
    } else if (!jargon.empty()) {
      text = pick(rng, jargon) + " " + text;
    }
    if (text.find("{place}") != std::string::npos) replace_all(text, "{place}", pick(rng, bank.term_list("place", lang)));
    if (text.find("{price}") != std::string::npos) replace_all(text, "{price}", price(lang, rng));
    replace_all(text, "{contact}", contact);
    return collapse_spaces(text);
  }

  // Text for one contact, registering landing pages and short links. Mentions
  // are appended to `mentions`.
  std::string render_contact(const CampaignSpec& c, const ContactSpec& s, std::vector<std::string>& mentions) {
    switch (s.style) {
      case ContactStyle::Inline: return synth::contact_phrase(s.kind, s.value, rng);
      case ContactStyle::ImUrl: {
        const std::string url = im_url(s.kind, s.value);
        landing.insert(url);
        return " " + url + " ";
      }
      case ContactStyle::ShortUrl: {
        const std::string from = short_link(s, c.id);
        const std::string to = im_url(s.kind, s.value);
        redirect_map.emplace(canonical_url(from), to);
        landing.insert(to);
        return " " + from + " ";
      }
      case ContactStyle::Url: {
        static const std::vector<std::string> kPaths = {"", "vip", "join", "home", "shop"};
        const std::string url = "https://" + s.value + "/" + pick(rng, kPaths);
        landing.insert(url);
        return " " + url + " ";
      }
      case ContactStyle::Mention:
        mentions.push_back(s.value);
        return " @" + s.value + " ";
    }
    return s.value;
  }

  std::size_t geometric_count(double mean) {
    const double p = 1.0 / mean;
    std::size_t k = 1;
    while (k < 200 && unit(rng) >= p) ++k;
    return k;
  }

  std::size_t poisson(double lambda) {
    const double limit = std::exp(-lambda);
    std::size_t k = 0;
    double prod = unit(rng);
    while (prod > limit && k < 200) {
      ++k;
      prod *= unit(rng);
    }
    return k;
  }

  template <class T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) std::swap(v[i - 1], v[static_cast<std::size_t>(uniform(rng, 0, i - 1))]);
  }

  std::vector<std::string> draw_tags(std::size_t k, std::vector<std::string> required, std::vector<std::string> pool) {
    std::vector<std::string> out;
    std::unordered_set<std::string> seen;
    shuffle(required);
    for (auto& t : required) {
      if (out.size() >= k) break;
      if (seen.insert(t).second) out.push_back(t);
    }
    shuffle(pool);
    for (auto& t : pool) {
      if (out.size() >= k) break;
      if (seen.insert(t).second) out.push_back(t);
    }
    return out;
  }

  static std::string with_tags(std::string text, const std::vector<std::string>& tags) {
    for (const auto& t : tags) text += " #" + t;
    return text;
  }

  void campaign(const CampaignSpec& c) {
    std::vector<std::size_t> accounts;
    for (std::size_t a = 0; a < c.n_accounts; ++a) {
      Account acc = new_account();
      const bool promotes = unit(rng) < c.profile_share;
      std::vector<std::string> ignored;
      if (promotes) {
        const auto& tpl = pick(rng, bank.candidates("profile_pip", "*", to_string(c.language)))->text;
        const std::string contact = render_contact(c, pick(rng, c.contacts), ignored);
        acc.profile_text = fill(tpl, c.category, c.language, contact, {});
      } else {
        acc.profile_text = pick(rng, bank.candidates("profile_benign", "*", to_string(c.language)))->text;
      }
      accounts.push_back(corpus.accounts.size());
      corpus.accounts.push_back(std::move(acc));
      corpus.account_labels.push_back({corpus.accounts.back().id, c.id, promotes});
    }
    std::vector<std::string> pool = bank.pool(std::string(to_string(c.category)));
    const auto& popular = bank.pool("popular");
    pool.insert(pool.end(), popular.begin(), popular.end());
    const auto templates = bank.candidates("pip", to_string(c.category), to_string(c.language));

    for (std::size_t i = 0; i < c.n_posts; ++i) {
      Post p;
      p.id = "p-" + std::to_string(corpus.posts.size() + 1);
      const Account& author = corpus.accounts[accounts[i % accounts.size()]];
      p.author_id = author.id;
      p.created_at = created_time();
      const std::string contact = render_contact(c, pick(rng, c.contacts), p.mentions);
      const std::string promo = fill(pick(rng, templates)->text, c.category, c.language, contact, c.jargon);
      if (c.n_accounts > 1 && unit(rng) < c.mention_share) {
        const Account& other = corpus.accounts[accounts[(i + 1) % accounts.size()]];
        p.mentions.push_back(other.handle);
      }

      std::size_t k = geometric_count(m.hashtag_counts.pip_mean);
      if (!c.pool_hashtags) k = std::min(k, std::max<std::size_t>(c.hashtags.size(), 1));
      std::vector<std::string> required;
      if (!c.hashtags.empty()) {
        const std::size_t n_own = uniform(rng, 1, std::min(k, c.hashtags.size()));
        std::vector<std::string> own = c.hashtags;
        shuffle(own);
        own.resize(n_own);
        required = std::move(own);
      }
      p.hashtags = draw_tags(k, std::move(required), c.pool_hashtags ? pool : std::vector<std::string>{});

      std::string body;
      if (unit(rng) < c.poll_share) {
        body = pick(rng, bank.candidates("poll_text", "*", to_string(c.language)))->text;
        p.poll_options = {promo, pick(rng, bank.term_list(std::string(to_string(c.category)), c.language))};
      } else {
        body = promo;
      }
      for (const auto& who : p.mentions) {
        if (body.find("@" + who) == std::string::npos) body += " @" + who;
      }
      p.text = with_tags(body, p.hashtags);
      corpus.labels.push_back({p.id, true, c.category, c.id, c.language});
      corpus.posts.push_back(std::move(p));
    }
  }

  // Shops and clubs share handles too.
  std::string benign_contact(Language lang) {
    const double r = unit(rng);
    if (lang == Language::zh) {
      return r < 0.5 ? synth::contact_phrase(ContactKind::WeChat, synth::random_contact_id(ContactKind::WeChat, rng), rng)
                     : "QQ群 " + synth::random_contact_id(ContactKind::QQ, rng);
    }
    std::string url;
    if (r < 0.4) url = "https://wa.me/" + random_phone(rng);
    else if (r < 0.7) url = "https://t.me/" + random_word(rng, 5, 9) + "club";
    else url = "https://" + random_word(rng, 5, 9) + ".org/";
    landing.insert(url);
    return " " + url + " ";
  }

  void benign() {
    const BenignSpec& b = m.benign;
    if (b.n_posts == 0) return;
    std::vector<std::size_t> accounts;
    for (std::size_t a = 0; a < b.n_accounts; ++a) {
      Account acc = new_account();
      acc.profile_text = pick(rng, bank.candidates("profile_benign", "*", "en"))->text;
      accounts.push_back(corpus.accounts.size());
      corpus.accounts.push_back(std::move(acc));
      corpus.account_labels.push_back({corpus.accounts.back().id, "", false});
    }
    std::vector<double> weights;
    for (const auto& [lang, w] : b.languages) weights.push_back(w);
    const auto counts = apportion(b.n_posts, weights);
    std::vector<Language> langs;
    for (std::size_t i = 0; i < counts.size(); ++i) langs.insert(langs.end(), counts[i], b.languages[i].first);
    shuffle(langs);

    std::vector<std::string> pool = bank.pool("benign");
    const auto& popular = bank.pool("popular");
    pool.insert(pool.end(), popular.begin(), popular.end());
    const double zero = m.hashtag_counts.benign_zero_share;
    const double lambda = m.hashtag_counts.benign_mean > 0.0 ? m.hashtag_counts.benign_mean / (1.0 - zero) - 1.0 : 0.0;

    for (std::size_t i = 0; i < b.n_posts; ++i) {
      Post p;
      p.id = "p-" + std::to_string(corpus.posts.size() + 1);
      const Account& author = corpus.accounts[accounts[i % accounts.size()]];
      p.author_id = author.id;
      p.created_at = created_time();
      const Language lang = langs[i];
      std::string text = pick(rng, bank.candidates("benign", "*", to_string(lang)))->text;
      if (text.find("{place}") != std::string::npos) replace_all(text, "{place}", pick(rng, bank.term_list("place", lang)));
      if (text.find("{price}") != std::string::npos) replace_all(text, "{price}", price(lang, rng));
      if (text.find("{product}") != std::string::npos) {
        const Category topic = kAllCategories[uniform(rng, 0, kCategoryCount - 1)];
        replace_all(text, "{product}", pick(rng, bank.term_list(std::string(to_string(topic)), lang)));
      }
      if (text.find("{contact}") != std::string::npos) replace_all(text, "{contact}", benign_contact(lang));
      text = collapse_spaces(text);
      if (accounts.size() > 1 && unit(rng) < 0.05) {
        const Account& other = corpus.accounts[accounts[(i + 1) % accounts.size()]];
        p.mentions.push_back(other.handle);
        text += " @" + other.handle;
      }
      std::size_t k = 0;
      if (m.hashtag_counts.benign_mean > 0.0 && unit(rng) >= zero) k = 1 + poisson(lambda);
      p.hashtags = draw_tags(k, {}, pool);
      p.text = with_tags(text, p.hashtags);
      corpus.labels.push_back({p.id, false, std::nullopt, "", lang});
      corpus.posts.push_back(std::move(p));
    }
  }

  SimCorpus run() {
    for (const auto& c : m.campaigns) campaign(c);
    benign();
    for (const auto& r : m.redirects) redirect_map[canonical_url(r.from)] = r.to;
    for (const auto& [from, to] : redirect_map) {
      if (!redirect_map.count(canonical_url(to))) landing.insert(to);
    }
    for (const auto& [from, to] : redirect_map) corpus.redirects.push_back({from, to});
    for (const auto& url : landing) {
      if (!redirect_map.count(canonical_url(url))) corpus.landing_urls.push_back(url);
    }
    return std::move(corpus);
  }
};

}  // namespace

SimCorpus generate_corpus(const SimCorpusManifest& manifest) {
  manifest.validate();
  return Generator(manifest).run();
}

Json SimCorpus::to_json() const {
  Json j;
  j["posts"] = posts;
  j["accounts"] = accounts;
  Json labels_j = Json::array();
  for (const auto& g : labels) {
    Json gj = {{"post_id", g.post_id}, {"is_pip", g.is_pip}, {"campaign_id", g.campaign_id},
               {"language", pip::to_string(g.language)}};
    if (g.category) gj["category"] = pip::to_string(*g.category);
    labels_j.push_back(std::move(gj));
  }
  j["labels"] = std::move(labels_j);
  Json acc_j = Json::array();
  for (const auto& a : account_labels) {
    acc_j.push_back({{"account_id", a.account_id}, {"campaign_id", a.campaign_id},
                     {"promotes_in_profile", a.promotes_in_profile}});
  }
  j["account_labels"] = std::move(acc_j);
  Json red = Json::array();
  for (const auto& r : redirects) red.push_back({{"from", r.from}, {"to", r.to}});
  j["redirects"] = std::move(red);
  j["landing_urls"] = landing_urls;
  return j;
}

// ---------------------------------------------------------------- rate limiter

RateLimiter::RateLimiter(RateBudget budget, Clock clock) : budget_(budget), clock_(std::move(clock)) {
  if (budget_.requests < 1 || !(budget_.window_seconds > 0.0)) {
    fail(ErrorCode::PreconditionFailed, "rate budget must be positive");
  }
  if (!clock_) {
    clock_ = [] {
      return std::chrono::duration<double>(std::chrono::steady_clock::now().time_since_epoch()).count();
    };
  }
}

void RateLimiter::acquire() {
  std::lock_guard lock(mutex_);
  const double now = clock_();
  while (!stamps_.empty() && stamps_.front() <= now - budget_.window_seconds) stamps_.pop_front();
  if (stamps_.size() >= budget_.requests) {
    throw RateLimitedError(std::max(0.0, stamps_.front() + budget_.window_seconds - now));
  }
  stamps_.push_back(now);
  ++admitted_;
}

std::size_t RateLimiter::admitted() const {
  std::lock_guard lock(mutex_);
  return admitted_;
}

// ---------------------------------------------------------------- simulator

namespace {

std::uint64_t splitmix(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

constexpr Timestamp kNever = std::numeric_limits<Timestamp>::max();

// Absorption time of a per-day hazard h starting at `origin`, from its
// continuous rate -ln(1-h).
Timestamp draw_event(Timestamp origin, double h, Rng& rng) {
  const double u = unit(rng);
  if (h <= 0.0) return kNever;
  const double days = -std::log1p(-u) / -std::log1p(-h);
  const double seconds = days * static_cast<double>(kSecondsPerDay);
  if (seconds > 1e15) return kNever;
  return origin + static_cast<Timestamp>(std::ceil(seconds));
}

std::string lower_ascii(std::string s) {
  for (char& ch : s) {
    if (ch >= 'A' && ch <= 'Z') ch = static_cast<char>(ch - 'A' + 'a');
  }
  return s;
}

std::string strip_prefix(std::string s, char prefix) {
  if (!s.empty() && s.front() == prefix) s.erase(0, 1);
  return s;
}

}  // namespace

Simulator::Simulator(const SimCorpusManifest& manifest, RateLimiter::Clock clock)
    : manifest_(manifest), corpus_(generate_corpus(manifest)), limiter_(manifest.rate_budget, std::move(clock)) {
  now_ = manifest_.epoch + static_cast<Timestamp>(manifest_.span_days) * kSecondsPerDay;
  for (std::size_t i = 0; i < corpus_.accounts.size(); ++i) {
    account_index_[corpus_.accounts[i].id] = i;
    account_index_[corpus_.accounts[i].handle] = i;
  }
  std::vector<std::size_t> order(corpus_.posts.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return corpus_.posts[a].created_at > corpus_.posts[b].created_at;
  });
  for (std::size_t i : order) {
    const Post& p = corpus_.posts[i];
    post_index_[p.id] = i;
    by_author_[p.author_id].push_back(i);
    std::set<std::string> tags;
    for (const auto& t : p.hashtags) tags.insert(lower_ascii(t));
    for (const auto& t : tags) by_tag_[t].push_back(i);
  }

  // Every draw gets its own stream so availability does not depend on query order.
  suspended_at_.resize(corpus_.accounts.size(), kNever);
  for (std::size_t i = 0; i < corpus_.accounts.size(); ++i) {
    if (corpus_.account_labels[i].campaign_id.empty()) continue;
    Rng rng(splitmix(manifest_.seed ^ splitmix(0xACC0000000000000ULL + i)));
    suspended_at_[i] = draw_event(manifest_.epoch, manifest_.hazard.suspension_per_day, rng);
  }
  double mix_total = 0.0;
  for (const auto& [status, w] : manifest_.hazard.removal_mix) mix_total += w;
  removed_at_.resize(corpus_.posts.size(), kNever);
  removal_reason_.resize(corpus_.posts.size(), AvailabilityStatus::PageNonexistent);
  like_rate_.resize(corpus_.posts.size(), 0.0);
  for (std::size_t i = 0; i < corpus_.posts.size(); ++i) {
    Rng rng(splitmix(manifest_.seed ^ splitmix(0x9057000000000000ULL + i)));
    const bool is_pip = corpus_.labels[i].is_pip;
    like_rate_[i] = is_pip ? 1.0 + 9.0 * unit(rng) : 4.0 * unit(rng);
    if (!is_pip) continue;
    removed_at_[i] = draw_event(corpus_.posts[i].created_at, manifest_.hazard.removal_per_day, rng);
    double r = unit(rng) * mix_total;
    for (const auto& [status, w] : manifest_.hazard.removal_mix) {
      removal_reason_[i] = status;
      if (r < w) break;
      r -= w;
    }
  }

  for (const auto& r : corpus_.redirects) redirects_[canonical_url(r.from)] = r.to;
  for (const auto& url : corpus_.landing_urls) landing_[canonical_url(url)] = true;
  for (const auto& t : manifest_.threats) {
    const std::string key = t.url.find("://") == std::string::npos ? lower_ascii(t.url) : canonical_url(t.url);
    threats_[key] = t;
  }
}

AvailabilityStatus Simulator::status_at(std::size_t i, Timestamp t) const {
  const Post& p = corpus_.posts[i];
  if (t < p.created_at) return AvailabilityStatus::PageNonexistent;
  const Timestamp suspended = suspended_at_[account_index_.at(p.author_id)];
  const Timestamp removed = removed_at_[i];
  if (suspended <= t && suspended <= removed) return AvailabilityStatus::SuspendedAccount;
  if (removed <= t) return removal_reason_[i];
  return AvailabilityStatus::Reachable;
}

Post Simulator::served(std::size_t i, Timestamp now) const {
  Post p = corpus_.posts[i];
  p.crawled_at = now;
  const double age = static_cast<double>(now - p.created_at) / static_cast<double>(kSecondsPerDay);
  const double likes = like_rate_[i] * 30.0 * (1.0 - std::exp(-std::max(0.0, age) / 30.0));
  p.engagement.likes = static_cast<std::int64_t>(std::floor(likes));
  p.engagement.retweets = p.engagement.likes / 5;
  p.engagement.replies = p.engagement.likes / 10;
  p.engagement.quotes = p.engagement.likes / 25;
  return p;
}

std::vector<Post> Simulator::search_hashtag(const std::string& tag, std::size_t limit) {
  limiter_.acquire();
  const Timestamp t = now();
  std::vector<Post> out;
  const auto it = by_tag_.find(lower_ascii(strip_prefix(tag, '#')));
  if (it == by_tag_.end()) return out;
  for (std::size_t i : it->second) {
    if (out.size() >= limit) break;
    if (status_at(i, t) == AvailabilityStatus::Reachable) out.push_back(served(i, t));
  }
  return out;
}

std::vector<Post> Simulator::account_timeline(const std::string& account, std::size_t limit) {
  limiter_.acquire();
  const Timestamp t = now();
  std::vector<Post> out;
  const auto acc = account_index_.find(strip_prefix(account, '@'));
  if (acc == account_index_.end()) return out;
  if (suspended_at_[acc->second] <= t) return out;
  const auto it = by_author_.find(corpus_.accounts[acc->second].id);
  if (it == by_author_.end()) return out;
  for (std::size_t i : it->second) {
    if (out.size() >= limit) break;
    if (status_at(i, t) == AvailabilityStatus::Reachable) out.push_back(served(i, t));
  }
  return out;
}

std::optional<Account> Simulator::get_profile(const std::string& account) {
  limiter_.acquire();
  const auto acc = account_index_.find(strip_prefix(account, '@'));
  if (acc == account_index_.end() || suspended_at_[acc->second] <= now()) return std::nullopt;
  return corpus_.accounts[acc->second];
}

AvailabilityStatus Simulator::check_availability(const std::string& post_id, Timestamp t) {
  const auto it = post_index_.find(post_id);
  if (it == post_index_.end()) return AvailabilityStatus::PageNonexistent;
  return status_at(it->second, t);
}

FetchResult Simulator::fetch(const std::string& url) {
  const std::string key = canonical_url(url);
  if (const auto it = redirects_.find(key); it != redirects_.end()) return {301, it->second};
  if (landing_.count(key)) return {200, {}};
  fail(ErrorCode::FetchFailed, "unknown URL " + url);
}

ThreatReport Simulator::report(const std::string& url) {
  const std::string key = canonical_url(url);
  auto it = threats_.find(key);
  if (it == threats_.end()) it = threats_.find(url_fqdn(url));
  if (it != threats_.end()) {
    const ThreatSpec& t = it->second;
    return {true, t.malware || t.phishing, t.malware, t.phishing};
  }
  if (redirects_.count(key) || landing_.count(key)) return {true, false, false, false};
  fail(ErrorCode::FetchFailed, "no intel for " + url);
}

Timestamp Simulator::now() const {
  std::lock_guard lock(clock_mutex_);
  return now_;
}

void Simulator::advance(double days) {
  require(days >= 0.0, ErrorCode::PreconditionFailed, "the simulation clock only moves forward");
  std::lock_guard lock(clock_mutex_);
  now_ += static_cast<Timestamp>(std::llround(days * static_cast<double>(kSecondsPerDay)));
}

Timestamp Simulator::suspension_time(const std::string& account_id) const {
  const auto it = account_index_.find(account_id);
  if (it == account_index_.end()) return kNever;
  return suspended_at_[it->second];
}

}  // namespace pip::sim
