#include "pip/contacts.hpp"

#include <algorithm>
#include <random>
#include <set>
#include <unordered_set>

#include "pip/error.hpp"
#include "pip/utf8.hpp"

namespace pip {

namespace {

struct ParsedUrl {
  std::string scheme;
  std::string host;
  std::string rest;  // path, query and fragment, leading '/' included
};

std::optional<ParsedUrl> parse_url(std::string_view url) {
  const std::size_t colon = url.find("://");
  if (colon == std::string_view::npos) return std::nullopt;
  ParsedUrl p;
  p.scheme = utf8::ascii_lower(url.substr(0, colon));
  if (p.scheme != "http" && p.scheme != "https") return std::nullopt;
  std::string_view after = url.substr(colon + 3);
  const std::size_t path = after.find_first_of("/?#");
  std::string_view authority = after.substr(0, path);
  p.rest = path == std::string_view::npos ? "" : std::string(after.substr(path));
  if (const std::size_t at = authority.rfind('@'); at != std::string_view::npos) authority.remove_prefix(at + 1);
  if (const std::size_t port = authority.find(':'); port != std::string_view::npos) authority = authority.substr(0, port);
  while (!authority.empty() && authority.back() == '.') authority.remove_suffix(1);
  if (authority.empty()) return std::nullopt;
  p.host = utf8::ascii_lower(authority);
  return p;
}

std::string_view strip_www(std::string_view host) {
  if (host.substr(0, 4) == "www.") host.remove_prefix(4);
  return host;
}

// Path segments without the query or fragment.
std::vector<std::string> path_segments(std::string_view rest) {
  rest = rest.substr(0, rest.find_first_of("?#"));
  std::vector<std::string> out;
  std::size_t start = 0;
  while (start < rest.size()) {
    std::size_t end = rest.find('/', start);
    if (end == std::string_view::npos) end = rest.size();
    if (end > start) out.emplace_back(rest.substr(start, end - start));
    start = end + 1;
  }
  return out;
}

std::string query_param(std::string_view rest, std::string_view key) {
  const std::size_t q = rest.find('?');
  if (q == std::string_view::npos) return {};
  std::string_view query = rest.substr(q + 1);
  query = query.substr(0, query.find('#'));
  while (!query.empty()) {
    const std::size_t amp = query.find('&');
    const std::string_view pair = query.substr(0, amp);
    const std::size_t eq = pair.find('=');
    if (eq != std::string_view::npos && pair.substr(0, eq) == key) return std::string(pair.substr(eq + 1));
    if (amp == std::string_view::npos) break;
    query.remove_prefix(amp + 1);
  }
  return {};
}

bool all_of_chars(std::string_view s, bool (*pred)(char)) {
  return std::all_of(s.begin(), s.end(), pred);
}

bool id_char(char c) {
  return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') || c == '_' || c == '-';
}

bool digit_char(char c) { return c >= '0' && c <= '9'; }

const std::unordered_set<std::string_view>& shortener_hosts() {
  static const std::unordered_set<std::string_view> hosts = {
      "bit.ly", "tinyurl.com", "t.co",     "goo.gl",  "ow.ly",     "is.gd",   "buff.ly",
      "rebrand.ly", "cutt.ly", "lin.ee",   "wa.link", "tiny.cc",   "shorturl.at", "rb.gy"};
  return hosts;
}

// Platform trigger words seen before inline ids, including the documented
// obfuscations and emoji descriptions.
const std::unordered_map<std::string, std::string_view>& trigger_lexicon() {
  static const std::unordered_map<std::string, std::string_view> lexicon = {
      {"qq", "QQ"},           {"q", "QQ"},          {"企鹅", "QQ"},       {"扣扣", "QQ"},
      {"penguin", "QQ"},      {"qq号", "QQ"},       {"微信", "WeChat"},   {"wechat", "WeChat"},
      {"weixin", "WeChat"},   {"薇", "WeChat"},     {"v", "WeChat"},      {"vx", "WeChat"},
      {"wx", "WeChat"},       {"威信", "WeChat"},   {"微", "WeChat"},     {"heavy_black_heart", "WeChat"},
      {"satellite", "WeChat"}, {"telegram", "Telegram"}, {"tg", "Telegram"}, {"飞机", "Telegram"},
      {"电报", "Telegram"},   {"airplane", "Telegram"}, {"纸飞机", "Telegram"}, {"line", "LINE"},
      {"赖", "LINE"},         {"wickr", "Other"},   {"batchat", "Other"}, {"potato", "Other"},
      {"土豆", "Other"},      {"蝙蝠", "Other"},    {"signal", "Other"},  {"skype", "Other"},
  };
  return lexicon;
}

constexpr std::size_t kTriggerWindow = 4;
constexpr std::size_t kMaxTriggerTokens = 4;

std::string token_shape(std::string_view token) {
  std::string shape;
  std::size_t pos = 0;
  while (pos < token.size()) {
    const char32_t cp = utf8::next(token, pos);
    char c = 'o';
    if (cp >= '0' && cp <= '9') c = 'd';
    else if (cp >= 'A' && cp <= 'Z') c = 'X';
    else if (cp >= 'a' && cp <= 'z') c = 'x';
    else if (cp == '_' || cp == '-') c = '_';
    else if (utf8::is_segmented_script(utf8::classify(cp))) c = 'C';
    if (shape.empty() || shape.back() != c) shape.push_back(c);
  }
  return shape;
}

bool is_url_placeholder(std::string_view token) {
  if (token.size() < 5 || token.substr(0, 4) != "url-") return false;
  return all_of_chars(token.substr(4), digit_char);
}

bool forced_outside(const NormalizedText& text, std::size_t i) {
  const TokenKind k = text.kinds[i];
  return k == TokenKind::Url || k == TokenKind::Emoji || k == TokenKind::Hashtag || k == TokenKind::Mention ||
         k == TokenKind::Punct || is_url_placeholder(text.tokens[i]);
}

std::vector<std::vector<std::string>> token_features(const NormalizedText& text) {
  std::vector<std::string> lowered;
  lowered.reserve(text.size());
  for (const auto& t : text.tokens) lowered.push_back(utf8::lower(t));
  auto at = [&](std::ptrdiff_t i) -> std::string {
    if (i < 0) return "<s>";
    if (static_cast<std::size_t>(i) >= lowered.size()) return "</s>";
    return lowered[static_cast<std::size_t>(i)];
  };
  const auto& lexicon = trigger_lexicon();
  std::vector<std::vector<std::string>> out(text.size());
  for (std::size_t i = 0; i < text.size(); ++i) {
    auto& f = out[i];
    const auto si = static_cast<std::ptrdiff_t>(i);
    const std::string shape = token_shape(text.tokens[i]);
    f.push_back("bias");
    f.push_back("w0=" + lowered[i]);
    f.push_back("w-1=" + at(si - 1));
    f.push_back("w-2=" + at(si - 2));
    f.push_back("w+1=" + at(si + 1));
    f.push_back("w+2=" + at(si + 2));
    f.push_back("shape=" + shape);
    f.push_back("shape-1=" + (i > 0 ? token_shape(text.tokens[i - 1]) : std::string("<s>")));
    const std::size_t len = utf8::length(text.tokens[i]);
    f.push_back("len=" + std::to_string(std::min<std::size_t>(len, 16)));
    if (valid_contact_id(ContactKind::QQ, text.tokens[i])) f.push_back("qq-like");
    if (valid_contact_id(ContactKind::WeChat, text.tokens[i])) f.push_back("handle-like");

    // Triggers ending inside the window before the token; CJK triggers span
    // several single-character tokens.
    const std::size_t window_start = i >= kTriggerWindow ? i - kTriggerWindow : 0;
    for (std::size_t s = window_start; s < i; ++s) {
      std::string joined;
      for (std::size_t e = s; e < i && e < s + kMaxTriggerTokens; ++e) {
        joined += lowered[e];
        const auto hit = lexicon.find(joined);
        if (hit == lexicon.end()) continue;
        const std::string platform(hit->second);
        f.push_back("trig=" + platform);
        f.push_back("trig@" + std::to_string(i - e) + "=" + platform);
        f.push_back("trig=" + platform + "|shape=" + shape);
      }
    }
  }
  return out;
}

std::string prev_feature(BioTag prev) { return std::string("prev=") + std::string(to_string(prev)); }

}  // namespace

std::string url_fqdn(std::string_view url) {
  const auto p = parse_url(url);
  return p ? p->host : std::string{};
}

std::string canonical_url(std::string_view url) {
  const auto p = parse_url(url);
  if (!p) return std::string(url);
  return p->scheme + "://" + p->host + p->rest;
}

std::vector<Contact> extract_urls(std::string_view text) {
  std::vector<Contact> out;
  for (const TokenSpan span : find_urls(text)) {
    const std::string_view url = text.substr(span.begin, span.end - span.begin);
    const std::string fqdn = url_fqdn(url);
    if (fqdn.empty()) continue;
    Contact c;
    c.kind = ContactKind::URL;
    c.value = canonical_url(url);
    c.fqdn = fqdn;
    out.push_back(std::move(c));
  }
  return out;
}

bool is_shortener(std::string_view url) {
  const auto p = parse_url(url);
  return p && shortener_hosts().count(strip_www(p->host)) > 0;
}

std::string resolve_shortened(const std::string& url, Fetcher& fetcher, int max_hops) {
  if (!is_shortener(url)) return url;
  std::set<std::string> visited = {url};
  std::string current = url;
  for (int hop = 0;; ++hop) {
    const FetchResult r = fetcher.fetch(current);
    if (r.status >= 200 && r.status < 300) return current;
    if (r.status < 300 || r.status >= 400 || r.location.empty()) {
      fail(ErrorCode::FetchFailed, current + " answered HTTP " + std::to_string(r.status));
    }
    if (hop >= max_hops) fail(ErrorCode::RedirectLoop, url + " needs more than " + std::to_string(max_hops) + " hops");
    std::string next = r.location;
    if (!next.empty() && next.front() == '/') {
      const auto p = parse_url(current);
      if (!p) fail(ErrorCode::FetchFailed, "cannot resolve relative redirect from " + current);
      next = p->scheme + "://" + p->host + next;
    }
    if (!visited.insert(next).second) fail(ErrorCode::RedirectLoop, url + " redirects in a cycle");
    current = std::move(next);
  }
}

std::optional<ImUrl> classify_im_url(std::string_view url) {
  const auto p = parse_url(url);
  if (!p) return std::nullopt;
  const std::string_view host = strip_www(p->host);
  const auto segments = path_segments(p->rest);
  if (host == "lin.ee") return ImUrl{ContactKind::LINE, {}, true};
  if (host == "wa.link") return ImUrl{ContactKind::WhatsApp, {}, true};
  if (host == "t.me" || host == "telegram.me") {
    if (segments.empty()) return std::nullopt;
    std::string id = segments[0] == "s" && segments.size() > 1 ? segments[1] : segments[0];
    // Ids inside a URL are delimited by the path, so only the character set is checked.
    if (id.empty() || id.size() > 32 || !all_of_chars(id, id_char)) return std::nullopt;
    return ImUrl{ContactKind::Telegram, id, false};
  }
  if (host == "wa.me" || host == "api.whatsapp.com") {
    std::string phone = host == "wa.me" ? (segments.empty() ? "" : segments[0]) : query_param(p->rest, "phone");
    if (!phone.empty() && phone.front() == '+') phone.erase(0, 1);
    if (phone.size() < 6 || phone.size() > 15 || !all_of_chars(phone, digit_char)) return std::nullopt;
    return ImUrl{ContactKind::WhatsApp, phone, false};
  }
  if (host == "line.me") {
    if (segments.size() < 3 || segments[0] != "ti" || segments[1] != "p") return std::nullopt;
    std::string id = segments[2];
    if (!id.empty() && (id.front() == '~' || id.front() == '@')) id.erase(0, 1);
    if (id.empty() || id.size() > 64 || !all_of_chars(id, id_char)) return std::nullopt;
    return ImUrl{ContactKind::LINE, id, false};
  }
  return std::nullopt;
}

std::string_view to_string(BioTag t) noexcept {
  switch (t) {
    case BioTag::O: return "O";
    case BioTag::B_QQ: return "B-QQ";
    case BioTag::I_QQ: return "I-QQ";
    case BioTag::B_WeChat: return "B-WeChat";
    case BioTag::I_WeChat: return "I-WeChat";
    case BioTag::B_Telegram: return "B-Telegram";
    case BioTag::I_Telegram: return "I-Telegram";
    case BioTag::B_Other: return "B-Other";
    case BioTag::I_Other: return "I-Other";
  }
  return "O";
}

std::optional<BioTag> parse_bio_tag(std::string_view s) {
  for (std::size_t i = 0; i < kBioTagCount; ++i) {
    const auto t = static_cast<BioTag>(i);
    if (to_string(t) == s) return t;
  }
  return std::nullopt;
}

std::optional<ContactKind> bio_kind(BioTag t) noexcept {
  switch (t) {
    case BioTag::O: return std::nullopt;
    case BioTag::B_QQ:
    case BioTag::I_QQ: return ContactKind::QQ;
    case BioTag::B_WeChat:
    case BioTag::I_WeChat: return ContactKind::WeChat;
    case BioTag::B_Telegram:
    case BioTag::I_Telegram: return ContactKind::Telegram;
    case BioTag::B_Other:
    case BioTag::I_Other: return ContactKind::Other;
  }
  return std::nullopt;
}

namespace {
bool is_inside(BioTag t) {
  return t == BioTag::I_QQ || t == BioTag::I_WeChat || t == BioTag::I_Telegram || t == BioTag::I_Other;
}
}  // namespace

BioTag begin_tag(ContactKind kind) {
  switch (kind) {
    case ContactKind::QQ: return BioTag::B_QQ;
    case ContactKind::WeChat: return BioTag::B_WeChat;
    case ContactKind::Telegram: return BioTag::B_Telegram;
    default: return BioTag::B_Other;
  }
}

BioTag inside_tag(ContactKind kind) {
  return static_cast<BioTag>(static_cast<std::uint8_t>(begin_tag(kind)) + 1);
}

bool is_valid_bio(std::span<const BioTag> tags) {
  std::optional<ContactKind> open;
  for (BioTag t : tags) {
    if (is_inside(t) && open != bio_kind(t)) return false;
    open = bio_kind(t);
  }
  return true;
}

void repair_bio(std::vector<BioTag>& tags) {
  std::optional<ContactKind> open;
  for (BioTag& t : tags) {
    if (is_inside(t) && open != bio_kind(t)) t = begin_tag(*bio_kind(t));
    open = bio_kind(t);
  }
}

bool valid_contact_id(ContactKind kind, std::string_view id) {
  switch (kind) {
    case ContactKind::QQ:
      return id.size() >= 5 && id.size() <= 12 && all_of_chars(id, digit_char) && id.front() != '0';
    case ContactKind::WeChat:
    case ContactKind::Telegram:
      return id.size() >= 4 && id.size() <= 32 && all_of_chars(id, id_char);
    default:
      return id.size() >= 2 && id.size() <= 64 && all_of_chars(id, id_char);
  }
}

TaggerModel TaggerModel::train(const std::vector<LabeledSentence>& labeled, const TaggerConfig& config) {
  bool any_entity = false;
  for (const auto& s : labeled) {
    require(s.tags.size() == s.text.size(), ErrorCode::PreconditionFailed, "tag count differs from token count");
    any_entity = any_entity || std::any_of(s.tags.begin(), s.tags.end(), [](BioTag t) { return t != BioTag::O; });
  }
  require(any_entity, ErrorCode::DegenerateTrainingSet, "tagger training data has no entity tags");

  std::vector<std::vector<std::vector<std::string>>> features;
  features.reserve(labeled.size());
  for (const auto& s : labeled) features.push_back(token_features(s.text));

  // Averaged perceptron: w holds current weights, u the time-weighted sum of
  // updates, so the average is w - u / c.
  std::unordered_map<std::string, Scores> w, u;
  double c = 1.0;
  auto score = [&](const std::vector<std::string>& fs, const std::string& prev) {
    Scores s{};
    auto add = [&](const std::string& name) {
      const auto it = w.find(name);
      if (it == w.end()) return;
      for (std::size_t t = 0; t < kBioTagCount; ++t) s[t] += it->second[t];
    };
    for (const auto& name : fs) add(name);
    add(prev);
    return s;
  };
  auto update = [&](const std::string& name, std::size_t tag, double delta) {
    w[name][tag] += delta;
    u[name][tag] += c * delta;
  };

  std::vector<std::size_t> order(labeled.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::mt19937_64 rng(config.seed);
  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    for (std::size_t i = order.size(); i > 1; --i) std::swap(order[i - 1], order[rng() % i]);
    for (std::size_t idx : order) {
      const auto& sentence = labeled[idx];
      for (std::size_t i = 0; i < sentence.text.size(); ++i) {
        if (forced_outside(sentence.text, i)) continue;
        const BioTag gold = sentence.tags[i];
        const std::string prev = prev_feature(i > 0 ? sentence.tags[i - 1] : BioTag::O);
        const Scores s = score(features[idx][i], prev);
        // A tie with the gold tag counts as a mistake, so training only stops
        // updating once the gold tag wins by a margin.
        const auto truth = static_cast<std::size_t>(gold);
        std::size_t guess = truth == 0 ? 1 : 0;
        for (std::size_t t = 0; t < kBioTagCount; ++t) {
          if (t != truth && s[t] > s[guess]) guess = t;
        }
        if (s[guess] >= s[truth]) {
          for (const auto& name : features[idx][i]) {
            update(name, truth, 1.0);
            update(name, guess, -1.0);
          }
          update(prev, truth, 1.0);
          update(prev, guess, -1.0);
        }
        c += 1.0;
      }
    }
  }

  TaggerModel model;
  for (auto& [name, weights] : w) {
    Scores avg{};
    bool nonzero = false;
    const Scores& acc = u[name];
    for (std::size_t t = 0; t < kBioTagCount; ++t) {
      avg[t] = weights[t] - acc[t] / c;
      nonzero = nonzero || avg[t] != 0.0;
    }
    if (nonzero) model.weights_.emplace(name, avg);
  }
  return model;
}

std::vector<BioTag> TaggerModel::tag(const NormalizedText& text) const {
  require(trained(), ErrorCode::PreconditionFailed, "tagger is not trained");
  std::vector<BioTag> tags(text.size(), BioTag::O);
  if (text.empty()) return tags;
  const auto features = token_features(text);
  for (std::size_t i = 0; i < text.size(); ++i) {
    if (forced_outside(text, i)) continue;
    Scores s{};
    auto add = [&](const std::string& name) {
      const auto it = weights_.find(name);
      if (it == weights_.end()) return;
      for (std::size_t t = 0; t < kBioTagCount; ++t) s[t] += it->second[t];
    };
    for (const auto& name : features[i]) add(name);
    add(prev_feature(i > 0 ? tags[i - 1] : BioTag::O));
    tags[i] = static_cast<BioTag>(std::max_element(s.begin(), s.end()) - s.begin());
  }
  repair_bio(tags);
  return tags;
}

Json TaggerModel::to_json() const {
  std::vector<std::string> names;
  names.reserve(weights_.size());
  for (const auto& [name, _] : weights_) names.push_back(name);
  std::sort(names.begin(), names.end());
  Json features = Json::object();
  for (const auto& name : names) {
    const Scores& s = weights_.at(name);
    features[name] = std::vector<double>(s.begin(), s.end());
  }
  std::vector<std::string> tags;
  for (std::size_t t = 0; t < kBioTagCount; ++t) tags.emplace_back(to_string(static_cast<BioTag>(t)));
  return Json{{"template_version", kTemplateVersion}, {"tags", tags}, {"features", std::move(features)}};
}

TaggerModel TaggerModel::from_json(const Json& j) {
  try {
    if (j.at("template_version").get<int>() != kTemplateVersion) {
      fail(ErrorCode::ParseError, "tagger feature template version does not match this build");
    }
    const auto tags = j.at("tags").get<std::vector<std::string>>();
    if (tags.size() != kBioTagCount) fail(ErrorCode::ParseError, "unexpected tag set");
    for (std::size_t t = 0; t < kBioTagCount; ++t) {
      if (tags[t] != to_string(static_cast<BioTag>(t))) fail(ErrorCode::ParseError, "unexpected tag order");
    }
    TaggerModel m;
    for (const auto& [name, values] : j.at("features").items()) {
      const auto v = values.get<std::vector<double>>();
      if (v.size() != kBioTagCount) fail(ErrorCode::ParseError, "feature " + name + " has the wrong width");
      Scores s{};
      for (std::size_t t = 0; t < kBioTagCount; ++t) {
        if (!std::isfinite(v[t])) fail(ErrorCode::ParseError, "non-finite tagger weight");
        s[t] = v[t];
      }
      m.weights_.emplace(name, s);
    }
    return m;
  } catch (const Json::exception& e) {
    fail(ErrorCode::ParseError, std::string("tagger: ") + e.what());
  }
}

std::vector<BioSpan> bio_spans(std::span<const BioTag> tags) {
  std::vector<BioSpan> spans;
  for (std::size_t i = 0; i < tags.size(); ++i) {
    const auto kind = bio_kind(tags[i]);
    if (!kind) continue;
    if (is_inside(tags[i]) && !spans.empty() && spans.back().end == i && spans.back().kind == *kind) {
      spans.back().end = i + 1;
    } else {
      spans.push_back({*kind, i, i + 1});
    }
  }
  return spans;
}

SpanPrf span_prf(const std::vector<std::vector<BioTag>>& gold, const std::vector<std::vector<BioTag>>& predicted) {
  require(gold.size() == predicted.size(), ErrorCode::PreconditionFailed, "gold and predicted differ in length");
  SpanPrf r;
  for (std::size_t s = 0; s < gold.size(); ++s) {
    const auto g = bio_spans(gold[s]);
    const auto p = bio_spans(predicted[s]);
    r.gold += g.size();
    r.predicted += p.size();
    for (const auto& span : p) r.correct += std::count(g.begin(), g.end(), span) > 0 ? 1 : 0;
  }
  const double c = static_cast<double>(r.correct);
  r.precision = r.predicted ? c / static_cast<double>(r.predicted) : 0.0;
  r.recall = r.gold ? c / static_cast<double>(r.gold) : 0.0;
  r.f1 = r.precision + r.recall > 0 ? 2 * r.precision * r.recall / (r.precision + r.recall) : 0.0;
  return r;
}

namespace {

ContactExtraction extract_from_text(const std::string& text, const std::vector<std::string>& extra_mentions,
                                    ContactSource source, const std::string& post_id, const std::string& account_id,
                                    const TaggerModel& tagger, Fetcher& fetcher) {
  ContactExtraction out;
  std::set<std::pair<ContactKind, std::string>> seen;
  auto add = [&](ContactKind kind, std::string value, std::string fqdn) {
    if (value.empty() || !seen.emplace(kind, value).second) return;
    Contact c;
    c.kind = kind;
    c.value = std::move(value);
    c.fqdn = std::move(fqdn);
    c.source = source;
    c.post_id = post_id;
    c.account_id = account_id;
    out.contacts.push_back(std::move(c));
  };

  for (const Contact& url : extract_urls(text)) {
    std::string landing = url.value;
    if (is_shortener(landing)) {
      try {
        landing = resolve_shortened(landing, fetcher);
      } catch (const Error& e) {
        out.warnings.push_back(e.what());
        add(ContactKind::URL, url.value, url.fqdn);
        continue;
      }
    }
    const auto im = classify_im_url(landing);
    if (im && !im->needs_resolution) {
      add(im->kind, im->id, {});
    } else {
      if (im) out.warnings.push_back("short link did not resolve to an account: " + landing);
      add(ContactKind::URL, canonical_url(landing), url_fqdn(landing));
    }
  }

  const NormalizedText normalized = tokenize(text);
  if (!normalized.empty() && tagger.trained()) {
    const auto tags = tagger.tag(normalized);
    for (const BioSpan& span : bio_spans(tags)) {
      std::string value;
      for (std::size_t i = span.begin; i < span.end; ++i) value += normalized.tokens[i];
      if (valid_contact_id(span.kind, value)) add(span.kind, std::move(value), {});
    }
  }
  for (const auto& m : normalized.mentions) add(ContactKind::TwitterMention, m, {});
  for (const auto& m : extra_mentions) add(ContactKind::TwitterMention, m, {});
  return out;
}

}  // namespace

ContactExtraction extract_contacts(const Post& post, const TaggerModel& tagger, Fetcher& fetcher) {
  return extract_from_text(post.full_text(), post.mentions, ContactSource::Post, post.id, post.author_id, tagger,
                           fetcher);
}

ContactExtraction extract_contacts(const Account& account, const TaggerModel& tagger, Fetcher& fetcher) {
  return extract_from_text(account.profile_text, {}, ContactSource::Profile, {}, account.id, tagger, fetcher);
}

std::vector<ThreatEnrichment> enrich_threat(const std::vector<Contact>& contacts, IntelClient& intel) {
  std::vector<ThreatEnrichment> out;
  for (const Contact& c : contacts) {
    if (c.kind != ContactKind::URL) continue;
    ThreatEnrichment e;
    e.contact = c;
    try {
      e.report = intel.report(c.value);
      e.report.alarmed = e.report.alarmed || e.report.malware || e.report.phishing;
    } catch (const std::exception& ex) {
      e.report = ThreatReport{};
      e.warning = ex.what();
    }
    out.push_back(std::move(e));
  }
  return out;
}

double alarm_rate(const std::vector<ThreatEnrichment>& enriched) {
  if (enriched.empty()) return 0.0;
  const auto alarmed = std::count_if(enriched.begin(), enriched.end(),
                                     [](const ThreatEnrichment& e) { return e.report.alarmed; });
  return static_cast<double>(alarmed) / static_cast<double>(enriched.size());
}

void to_json(Json& j, const ThreatReport& r) {
  j = Json{{"reported", r.reported}, {"alarmed", r.alarmed}, {"malware", r.malware}, {"phishing", r.phishing}};
}

void from_json(const Json& j, ThreatReport& r) {
  r.reported = j.value("reported", false);
  r.alarmed = j.value("alarmed", false);
  r.malware = j.value("malware", false);
  r.phishing = j.value("phishing", false);
}

}  // namespace pip
