#include <doctest.h>

#include <algorithm>
#include <map>
#include <set>
#include <random>

#include "pip/contacts.hpp"
#include "pip/error.hpp"
#include "pip/synth.hpp"

using namespace pip;

namespace {

class MapFetcher : public Fetcher {
 public:
  std::map<std::string, std::string> redirects;
  std::set<std::string> landing;
  int calls = 0;

  FetchResult fetch(const std::string& url) override {
    ++calls;
    if (const auto it = redirects.find(url); it != redirects.end()) return {301, it->second};
    if (landing.count(url)) return {200, {}};
    fail(ErrorCode::FetchFailed, "unknown " + url);
  }
};

class MapIntel : public IntelClient {
 public:
  std::map<std::string, ThreatReport> reports;
  bool down = false;

  ThreatReport report(const std::string& url) override {
    if (down) fail(ErrorCode::FetchFailed, "intel service down");
    if (const auto it = reports.find(url); it != reports.end()) return it->second;
    return ThreatReport{true, false, false, false};
  }
};

const TaggerModel& trained_tagger() {
  static const TaggerModel model = train_tagger(synth::generate_ner_corpus(800, 1));
  return model;
}

bool has_contact(const std::vector<Contact>& cs, ContactKind kind, const std::string& value) {
  return std::any_of(cs.begin(), cs.end(), [&](const Contact& c) { return c.kind == kind && c.value == value; });
}

}  // namespace

TEST_CASE("extract_urls") {
  const auto one = extract_urls("see https://bit.ly/abc");
  REQUIRE(one.size() == 1);
  CHECK(one[0].kind == ContactKind::URL);
  CHECK(one[0].fqdn == "bit.ly");
  CHECK(one[0].value == "https://bit.ly/abc");
  CHECK(extract_urls("no links here").empty());

  const std::string text = "a http://X.example.com/1 b https://y.org:8080/p?q c http://x.example.com/1";
  const auto three = extract_urls(text);
  REQUIRE(three.size() == 3);
  CHECK(three[0].fqdn == "x.example.com");
  CHECK(three[1].fqdn == "y.org");
  CHECK(three[2].value == three[0].value);
}

TEST_CASE("extract_urls finds every URL a brute-force scan finds") {
  std::mt19937 rng(2);
  const std::vector<std::string> parts = {"x", "http://a.b/c", "加微信", "https://t.me/dd", "tiny", "https://q.q"};
  for (int trial = 0; trial < 200; ++trial) {
    std::string text;
    for (int i = 0; i < 8; ++i) text += parts[rng() % parts.size()] + " ";
    std::size_t expected = 0;
    for (std::size_t pos = text.find("http"); pos != std::string::npos; pos = text.find("http", pos + 1)) ++expected;
    CHECK(extract_urls(text).size() == expected);
  }
}

TEST_CASE("resolve_shortened follows redirects") {
  MapFetcher f;
  f.redirects["https://bit.ly/a"] = "https://t.me/dealer";
  f.landing.insert("https://t.me/dealer");
  CHECK(resolve_shortened("https://bit.ly/a", f) == "https://t.me/dealer");

  f.redirects["https://bit.ly/self"] = "https://bit.ly/self";
  try {
    resolve_shortened("https://bit.ly/self", f);
    FAIL("expected RedirectLoop");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::RedirectLoop);
  }

  f.calls = 0;
  CHECK(resolve_shortened("https://example.com/x", f) == "https://example.com/x");
  CHECK(f.calls == 0);

  try {
    resolve_shortened("https://bit.ly/missing", f);
    FAIL("expected FetchFailed");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::FetchFailed);
  }
}

TEST_CASE("resolve_shortened terminates within max_hops on long chains") {
  MapFetcher f;
  for (int i = 0; i < 30; ++i) f.redirects["https://bit.ly/" + std::to_string(i)] = "https://bit.ly/" + std::to_string(i + 1);
  f.landing.insert("https://bit.ly/30");
  f.calls = 0;
  CHECK_THROWS_AS(resolve_shortened("https://bit.ly/0", f), Error);
  CHECK(f.calls <= kMaxRedirectHops + 1);
  CHECK(resolve_shortened("https://bit.ly/25", f) == "https://bit.ly/30");
}

TEST_CASE("classify_im_url pattern table") {
  const auto tg = classify_im_url("https://t.me/dealer01");
  REQUIRE(tg);
  CHECK(tg->kind == ContactKind::Telegram);
  CHECK(tg->id == "dealer01");
  const auto wa = classify_im_url("https://wa.me/15551234567");
  REQUIRE(wa);
  CHECK(wa->kind == ContactKind::WhatsApp);
  CHECK(wa->id == "15551234567");
  const auto line = classify_im_url("https://line.me/ti/p/abc");
  REQUIRE(line);
  CHECK(line->kind == ContactKind::LINE);
  CHECK(line->id == "abc");
  CHECK(classify_im_url("http://lin.ee/XXXXXXX")->needs_resolution);
  CHECK(classify_im_url("http://wa.link/XXXXX")->kind == ContactKind::WhatsApp);
  CHECK_FALSE(classify_im_url("https://example.com/x"));
  CHECK_FALSE(classify_im_url("https://t.me/"));
}

TEST_CASE("BIO repair produces valid sequences") {
  std::mt19937 rng(4);
  for (int trial = 0; trial < 500; ++trial) {
    std::vector<BioTag> tags(rng() % 10);
    for (auto& t : tags) t = static_cast<BioTag>(rng() % kBioTagCount);
    repair_bio(tags);
    CHECK(is_valid_bio(tags));
  }
  std::vector<BioTag> t = {BioTag::O, BioTag::I_QQ, BioTag::I_QQ, BioTag::I_WeChat};
  repair_bio(t);
  CHECK(t == std::vector<BioTag>{BioTag::O, BioTag::B_QQ, BioTag::I_QQ, BioTag::B_WeChat});
}

TEST_CASE("tagger training errors and single-sentence recall") {
  LabeledSentence all_o{from_tokens({"hello", "world"}), {BioTag::O, BioTag::O}};
  CHECK_THROWS_AS(train_tagger({all_o}), Error);

  LabeledSentence one{from_tokens({"加", "微信", "abc123"}), {BioTag::O, BioTag::O, BioTag::B_WeChat}};
  const auto model = train_tagger({one});
  CHECK(model.tag(one.text) == one.tags);
  CHECK(model.tag(NormalizedText{}).empty());
}

TEST_CASE("tagger on the synthetic contact corpus") {
  const auto& model = trained_tagger();
  const auto held_out = synth::generate_ner_corpus(300, 99);
  std::vector<std::vector<BioTag>> gold, predicted;
  for (const auto& s : held_out) {
    gold.push_back(s.tags);
    predicted.push_back(model.tag(s.text));
    CHECK(is_valid_bio(predicted.back()));
    CHECK(predicted.back().size() == s.text.size());
  }
  const auto prf = span_prf(gold, predicted);
  INFO("precision " << prf.precision << " recall " << prf.recall);
  CHECK(prf.f1 >= 0.9);

  CHECK(model.tag(from_tokens({"加", "微信", "abc123"})) ==
        std::vector<BioTag>{BioTag::O, BioTag::O, BioTag::B_WeChat});
  const auto url = tokenize("tg url https://t.me/a 飞机");
  const auto tags = model.tag(url);
  CHECK(tags[2] == BioTag::O);
}

TEST_CASE("tagger output is always valid BIO") {
  const auto& model = trained_tagger();
  std::mt19937 rng(12);
  const std::vector<std::string> vocab = {"加", "微信", "abc123", "QQ", "12345678", "✈", "tg", "x_y_z", "，", "V", "@m"};
  for (int trial = 0; trial < 300; ++trial) {
    std::string text;
    const int n = static_cast<int>(rng() % 12);
    for (int i = 0; i < n; ++i) text += vocab[rng() % vocab.size()] + " ";
    CHECK(is_valid_bio(model.tag(tokenize(text))));
  }
}

TEST_CASE("tagger JSON round trip") {
  const auto& model = trained_tagger();
  const auto back = TaggerModel::from_json(Json::parse(model.to_json().dump()));
  const auto probe = tokenize("加微信 hello_world 或 QQ 123456789");
  CHECK(back.tag(probe) == model.tag(probe));
  auto j = model.to_json();
  j["template_version"] = 99;
  CHECK_THROWS_AS(TaggerModel::from_json(j), Error);
}

TEST_CASE("extract_contacts end to end") {
  MapFetcher f;
  f.redirects["http://lin.ee/abcd"] = "https://line.me/ti/p/~shop88";
  f.landing.insert("https://line.me/ti/p/~shop88");
  const auto& tagger = trained_tagger();

  Post post;
  post.id = "p-1";
  post.author_id = "u-1";
  post.text = "tg: https://t.me/a 加Q 12345678";
  const auto r = extract_contacts(post, tagger, f);
  CHECK(r.contacts.size() == 2);
  CHECK(has_contact(r.contacts, ContactKind::Telegram, "a"));
  CHECK(has_contact(r.contacts, ContactKind::QQ, "12345678"));
  for (const auto& c : r.contacts) {
    CHECK(c.source == ContactSource::Post);
    CHECK(c.post_id == "p-1");
    CHECK(c.account_id == "u-1");
  }

  Post empty;
  CHECK(extract_contacts(empty, tagger, f).contacts.empty());

  Account profile;
  profile.id = "u-2";
  profile.profile_text = "line http://lin.ee/abcd @helper https://shop.example.net/x https://bit.ly/dead";
  const auto p = extract_contacts(profile, tagger, f);
  CHECK(has_contact(p.contacts, ContactKind::LINE, "shop88"));
  CHECK(has_contact(p.contacts, ContactKind::TwitterMention, "helper"));
  CHECK(has_contact(p.contacts, ContactKind::URL, "https://shop.example.net/x"));
  CHECK(has_contact(p.contacts, ContactKind::URL, "https://bit.ly/dead"));
  CHECK(p.warnings.size() == 1);
  for (const auto& c : p.contacts) CHECK(c.source == ContactSource::Profile);

  const auto again = extract_contacts(profile, tagger, f);
  CHECK(again.contacts == p.contacts);
}

TEST_CASE("IM URLs are never also reported as URL contacts or tagged spans") {
  MapFetcher f;
  const auto& tagger = trained_tagger();
  std::mt19937 rng(6);
  for (int trial = 0; trial < 100; ++trial) {
    Post post;
    post.id = "p";
    const std::string id = "user" + std::to_string(rng() % 100000);
    post.text = "飞机 https://t.me/" + id + " 联系";
    const auto r = extract_contacts(post, tagger, f);
    CHECK(std::count_if(r.contacts.begin(), r.contacts.end(),
                        [&](const Contact& c) { return c.value.find(id) != std::string::npos; }) == 1);
    CHECK(has_contact(r.contacts, ContactKind::Telegram, id));
  }
}

TEST_CASE("enrich_threat") {
  MapIntel intel;
  std::vector<Contact> urls;
  for (int i = 0; i < 100; ++i) {
    Contact c;
    c.kind = ContactKind::URL;
    c.value = "https://site" + std::to_string(i) + ".example/";
    urls.push_back(c);
  }
  intel.reports[urls[7].value] = ThreatReport{true, false, false, true};
  const auto enriched = enrich_threat(urls, intel);
  REQUIRE(enriched.size() == 100);
  CHECK(enriched[7].report.alarmed);
  CHECK(enriched[7].report.phishing);
  CHECK(alarm_rate(enriched) == doctest::Approx(0.01));

  intel.down = true;
  const auto down = enrich_threat({urls[0]}, intel);
  REQUIRE(down.size() == 1);
  CHECK_FALSE(down[0].report.reported);
  CHECK_FALSE(down[0].warning.empty());
}
