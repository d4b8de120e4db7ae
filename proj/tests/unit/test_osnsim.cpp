#include <doctest.h>

#include <atomic>
#include <cmath>
#include <map>
#include <set>
#include <thread>

#include "pip/contacts.hpp"
#include "pip/error.hpp"
#include "pip/osnsim.hpp"
#include "pip/osnsim_http.hpp"
#include "pip/synth.hpp"
#include "pip/textnorm.hpp"

using namespace pip;
using namespace pip::sim;

namespace {

SimCorpusManifest small_manifest() {
  SimCorpusManifest m;
  m.seed = 11;
  CampaignSpec a;
  a.id = "escort";
  a.category = Category::Pornography;
  a.language = Language::zh;
  a.n_accounts = 2;
  a.n_posts = 40;
  a.hashtags = {"广州按摩", "gzvip"};
  a.contacts = {{ContactKind::WeChat, "gz_massage88", ContactStyle::Inline, {}}};
  a.poll_share = 0.2;
  a.profile_share = 1.0;
  CampaignSpec b;
  b.id = "casino";
  b.category = Category::Gambling;
  b.language = Language::en;
  b.n_accounts = 3;
  b.n_posts = 30;
  b.hashtags = {"luckyspin", "bigwin777"};
  b.contacts = {{ContactKind::LINE, "abc", ContactStyle::ShortUrl, "http://lin.ee/x"},
                {ContactKind::URL, "spin-palace.xyz", ContactStyle::Url, {}}};
  m.campaigns = {a, b};
  m.benign.n_posts = 60;
  m.benign.n_accounts = 10;
  m.benign.languages = {{Language::en, 2.0}, {Language::zh, 1.0}};
  m.threats = {{"spin-palace.xyz", false, true}};
  return m;
}

SimCorpusManifest cohort_manifest(std::size_t n, HazardSpec hazard) {
  SimCorpusManifest m;
  m.seed = 5;
  m.span_days = 1;
  CampaignSpec c;
  c.id = "cohort";
  c.category = Category::IllegalDrug;
  c.language = Language::en;
  c.n_accounts = n;
  c.n_posts = n;
  c.hashtags = {"weed420"};
  c.contacts = {{ContactKind::Telegram, "plug_weed", ContactStyle::ImUrl, {}}};
  m.campaigns = {c};
  m.hazard = hazard;
  return m;
}

bool has_tag(const Post& p, const std::string& tag) {
  return std::find(p.hashtags.begin(), p.hashtags.end(), tag) != p.hashtags.end();
}

}  // namespace

TEST_CASE("manifest validation") {
  CHECK_NOTHROW(small_manifest().validate());

  auto bad = small_manifest();
  bad.campaigns[1].id = "escort";
  CHECK_THROWS_AS(bad.validate(), Error);

  bad = small_manifest();
  bad.campaigns[0].n_posts = 1;
  CHECK_THROWS_AS(bad.validate(), Error);

  bad = small_manifest();
  bad.campaigns[0].contacts = {{ContactKind::QQ, "0123", ContactStyle::Inline, {}}};
  CHECK_THROWS_AS(bad.validate(), Error);

  bad = small_manifest();
  bad.campaigns[0].contacts = {{ContactKind::QQ, "12345678", ContactStyle::ImUrl, {}}};
  CHECK_THROWS_AS(bad.validate(), Error);

  bad = small_manifest();
  bad.campaigns[0].hashtags = {"#bad"};
  CHECK_THROWS_AS(bad.validate(), Error);

  bad = small_manifest();
  bad.rate_budget.requests = 0;
  CHECK_THROWS_AS(bad.validate(), Error);

  CHECK_THROWS_AS(SimCorpusManifest{}.validate(), Error);
  try {
    parse_manifest("{\"campaigns\": [{\"id\": 3}]}");
    FAIL("expected InvalidManifest");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::InvalidManifest);
  }
  CHECK_THROWS_AS(parse_manifest("not json"), Error);
  CHECK_THROWS_AS(generate_corpus(SimCorpusManifest{}), Error);
}

TEST_CASE("manifest JSON round trip") {
  const auto m = reference_mix_manifest(500, 300, 3);
  const auto back = parse_manifest(Json(m).dump());
  CHECK(back == m);

  const auto s = small_manifest();
  CHECK(parse_manifest(Json(s).dump()) == s);

  const auto calibrated = parse_manifest(R"({"seed": 2, "benign": {"n_posts": 3},
      "hazard": {"calibrate": {"survival": 0.9, "days": 60}}})");
  CHECK(std::pow(1.0 - calibrated.hazard.suspension_per_day, 60) *
            std::pow(1.0 - calibrated.hazard.removal_per_day, 60) ==
        doctest::Approx(0.9).epsilon(1e-12));
}

TEST_CASE("generation is deterministic per seed") {
  const auto m = small_manifest();
  const std::string a = generate_corpus(m).to_json().dump();
  const std::string b = generate_corpus(m).to_json().dump();
  CHECK(a == b);
  auto other = m;
  other.seed = 12;
  CHECK(generate_corpus(other).to_json().dump() != a);
}

TEST_CASE("apportion keeps totals and stays within one of the exact share") {
  synth::Rng rng(77);
  for (int trial = 0; trial < 300; ++trial) {
    const std::size_t parts = synth::uniform(rng, 1, 12);
    std::vector<double> w(parts);
    double sum = 0;
    for (auto& x : w) {
      x = synth::unit(rng) < 0.2 ? 0.0 : synth::unit(rng) * 10;
      sum += x;
    }
    if (sum == 0) w[0] = sum = 1.0;
    const std::size_t total = synth::uniform(rng, 0, 5000);
    const auto out = apportion(total, w);
    std::size_t got = 0;
    for (std::size_t i = 0; i < parts; ++i) {
      got += out[i];
      const double exact = static_cast<double>(total) * w[i] / sum;
      CHECK(std::abs(static_cast<double>(out[i]) - exact) < 1.0);
    }
    CHECK(got == total);
  }
  CHECK(apportion(10, {1, 1, 1}) == std::vector<std::size_t>{4, 3, 3});
}

TEST_CASE("reference mix: generated label shares equal manifest counts exactly") {
  const auto m = reference_mix_manifest(3400, 1930, 9);
  std::map<Category, std::size_t> expected;
  for (const auto& c : m.campaigns) expected[c.category] += c.n_posts;
  // Independent recount of the largest-remainder split of 3400 over the shares.
  const auto shares = reference_category_shares();
  double total_share = 0;
  for (const auto& [c, w] : shares) total_share += w;
  for (const auto& [c, w] : shares) {
    const double exact = 3400.0 * w / total_share;
    CHECK(std::abs(static_cast<double>(expected[c]) - exact) < 1.0);
  }
  CHECK(m.campaigns.size() > 11);

  const auto corpus = generate_corpus(m);
  REQUIRE(corpus.posts.size() == 3400 + 1930);
  std::map<Category, std::size_t> got;
  std::size_t benign = 0;
  for (const auto& g : corpus.labels) {
    if (g.is_pip) ++got[*g.category];
    else ++benign;
  }
  CHECK(got == expected);
  CHECK(benign == 1930);
  CHECK(got.size() == kCategoryCount);
}

TEST_CASE("hashtag counts follow the configured means") {
  const auto corpus = generate_corpus(reference_mix_manifest(3400, 1930, 4));
  std::vector<std::size_t> pip, benign;
  for (std::size_t i = 0; i < corpus.posts.size(); ++i) {
    (corpus.labels[i].is_pip ? pip : benign).push_back(corpus.posts[i].hashtags.size());
    // hashtags are written into the text too
    const auto t = tokenize(corpus.posts[i].text);
    CHECK(t.hashtags == corpus.posts[i].hashtags);
  }
  const auto p = hashtag_stats(std::span<const std::size_t>(pip));
  const auto b = hashtag_stats(std::span<const std::size_t>(benign));
  CHECK(std::abs(p.mean - 6.98) <= 0.5);
  CHECK(std::abs(b.mean - 2.27) <= 0.3);
  CHECK(p.median == 5.0);
  CHECK(b.median == 0.0);
}

TEST_CASE("campaign posts carry their contacts, polls and profile promotion") {
  const auto m = small_manifest();
  const auto corpus = generate_corpus(m);
  std::size_t polls = 0;
  for (std::size_t i = 0; i < corpus.posts.size(); ++i) {
    const Post& p = corpus.posts[i];
    const auto& g = corpus.labels[i];
    if (g.campaign_id == "escort") {
      CHECK(p.full_text().find("gz_massage88") != std::string::npos);
      if (!p.poll_options.empty()) {
        ++polls;
        CHECK(p.text.find("gz_massage88") == std::string::npos);
      }
      CHECK((has_tag(p, "广州按摩") || has_tag(p, "gzvip")));
    }
    if (g.campaign_id == "casino") {
      CHECK((p.full_text().find("http://lin.ee/x") != std::string::npos ||
             p.full_text().find("spin-palace.xyz") != std::string::npos));
    }
  }
  CHECK(polls > 0);
  for (std::size_t i = 0; i < corpus.accounts.size(); ++i) {
    if (corpus.account_labels[i].campaign_id == "escort") {
      CHECK(corpus.account_labels[i].promotes_in_profile);
      CHECK(corpus.accounts[i].profile_text.find("gz_massage88") != std::string::npos);
    }
  }
}

TEST_CASE("search returns exactly the reachable posts carrying a tag, most recent first") {
  Simulator sim(small_manifest());
  const auto& corpus = sim.corpus();
  for (const std::string tag : {"gzvip", "广州按摩", "luckyspin", "love"}) {
    std::set<std::string> oracle;
    for (const auto& p : corpus.posts) {
      if (has_tag(p, tag)) oracle.insert(p.id);
    }
    const auto found = sim.search_hashtag(tag, 10000);
    std::set<std::string> ids;
    for (const auto& p : found) ids.insert(p.id);
    CHECK(ids == oracle);
    CHECK(ids.size() == found.size());
    for (std::size_t i = 1; i < found.size(); ++i) CHECK(found[i - 1].created_at >= found[i].created_at);
    for (const auto& p : found) CHECK(p.crawled_at == sim.now());
  }
  CHECK(sim.search_hashtag("#gzvip", 5).size() == 5);
  CHECK(sim.search_hashtag("GZVIP", 1000).size() == sim.search_hashtag("gzvip", 1000).size());
  CHECK(sim.search_hashtag("no-such-tag", 10).empty());
}

TEST_CASE("timeline and profile") {
  Simulator sim(small_manifest());
  const auto& corpus = sim.corpus();
  const std::string author = corpus.posts[0].author_id;
  std::size_t oracle = 0;
  for (const auto& p : corpus.posts) oracle += p.author_id == author;
  const auto timeline = sim.account_timeline(author);
  CHECK(timeline.size() == oracle);
  for (const auto& p : timeline) CHECK(p.author_id == author);
  CHECK(sim.account_timeline(author, 3).size() == 3);
  CHECK(sim.account_timeline("nobody").empty());

  const auto profile = sim.get_profile(author);
  REQUIRE(profile);
  CHECK(profile->id == author);
  const auto by_handle = sim.get_profile("@" + profile->handle);
  REQUIRE(by_handle);
  CHECK(by_handle->id == author);
  CHECK_FALSE(sim.get_profile("nobody"));
}

TEST_CASE("engagement grows with elapsed time") {
  Simulator sim(small_manifest());
  const auto before = sim.search_hashtag("gzvip", 1000);
  sim.advance(20);
  const auto after = sim.search_hashtag("gzvip", 1000);
  REQUIRE(before.size() == after.size());
  std::int64_t a = 0, b = 0;
  for (std::size_t i = 0; i < before.size(); ++i) {
    CHECK(after[i].engagement.likes >= before[i].engagement.likes);
    a += before[i].engagement.likes;
    b += after[i].engagement.likes;
  }
  CHECK(b > a);
  CHECK_THROWS_AS(sim.advance(-1), Error);
}

TEST_CASE("rate limiter rejects the call past the budget") {
  double clock = 0;
  auto m = small_manifest();
  m.rate_budget = {5, 60.0};
  Simulator sim(m, [&] { return clock; });
  for (int i = 0; i < 5; ++i) CHECK_NOTHROW(sim.search_hashtag("gzvip", 10));
  try {
    sim.search_hashtag("gzvip", 10);
    FAIL("expected RateLimited");
  } catch (const RateLimitedError& e) {
    CHECK(e.code() == ErrorCode::RateLimited);
    CHECK(e.retry_after() == doctest::Approx(60.0));
  }
  clock = 30;
  CHECK_THROWS_AS(sim.account_timeline("u-1"), RateLimitedError);
  clock = 60;
  CHECK_NOTHROW(sim.get_profile("u-1"));
  CHECK(sim.limiter().admitted() == 6);
}

TEST_CASE("rate limiter never admits more than the budget under concurrency") {
  std::atomic<int> tick{0};
  RateLimiter limiter({50, 10.0}, [&] { return static_cast<double>(tick.load()) * 0.5; });
  for (int window = 0; window < 3; ++window) {
    std::atomic<int> ok{0};
    std::vector<std::thread> threads;
    for (int t = 0; t < 8; ++t) {
      threads.emplace_back([&] {
        for (int k = 0; k < 40; ++k) {
          try {
            limiter.acquire();
            ++ok;
          } catch (const RateLimitedError&) {
          }
        }
      });
    }
    for (auto& th : threads) th.join();
    CHECK(ok.load() == 50);
    tick += 20;  // one full window later
  }
  CHECK(limiter.admitted() == 150);
  CHECK_THROWS_AS(RateLimiter({0, 1.0}), Error);
}

TEST_CASE("availability with zero hazard is always reachable") {
  Simulator sim(cohort_manifest(200, HazardSpec{}));
  for (const auto& p : sim.corpus().posts) {
    for (int day : {0, 30, 365, 3650}) {
      CHECK(sim.check_availability(p.id, p.created_at + day * kSecondsPerDay) == AvailabilityStatus::Reachable);
    }
  }
  CHECK(sim.check_availability("p-999999", sim.now()) == AvailabilityStatus::PageNonexistent);
}

TEST_CASE("availability is absorbing and suspension covers every post of the account") {
  HazardSpec h;
  h.suspension_per_day = 0.01;
  h.removal_per_day = 0.005;
  auto m = small_manifest();
  m.hazard = h;
  Simulator sim(m);
  const auto& corpus = sim.corpus();
  synth::Rng rng(3);
  for (std::size_t i = 0; i < corpus.posts.size(); ++i) {
    const Post& p = corpus.posts[i];
    bool unavailable = false;
    AvailabilityStatus first = AvailabilityStatus::Reachable;
    for (int day = 0; day < 2000; day += static_cast<int>(synth::uniform(rng, 1, 60))) {
      const auto s = sim.check_availability(p.id, p.created_at + day * kSecondsPerDay);
      if (unavailable) CHECK(s == first);
      if (s != AvailabilityStatus::Reachable && !unavailable) {
        unavailable = true;
        first = s;
      }
    }
    if (!corpus.labels[i].is_pip) CHECK_FALSE(unavailable);
  }
  for (const auto& a : corpus.accounts) {
    const Timestamp t = sim.suspension_time(a.id);
    if (t == std::numeric_limits<Timestamp>::max()) continue;
    for (const auto& p : corpus.posts) {
      if (p.author_id != a.id || p.created_at > t) continue;
      // a post already removed before the suspension keeps its removal reason
      const bool removed_earlier = sim.check_availability(p.id, t - 1) != AvailabilityStatus::Reachable;
      for (Timestamp later : {t, t + 1, t + 400 * kSecondsPerDay}) {
        const auto s = sim.check_availability(p.id, later);
        if (removed_earlier) CHECK(s != AvailabilityStatus::Reachable);
        else CHECK(s == AvailabilityStatus::SuspendedAccount);
      }
    }
  }
}

TEST_CASE("hazard calibrated for 60-day survival 0.90 holds over a 5k cohort") {
  const auto hazard = HazardSpec::calibrated(0.90, 60.0);
  CHECK(std::pow((1 - hazard.suspension_per_day) * (1 - hazard.removal_per_day), 60) ==
        doctest::Approx(0.90).epsilon(1e-12));
  Simulator sim(cohort_manifest(5000, hazard));
  const Timestamp probe = sim.manifest().epoch + 60 * kSecondsPerDay;
  std::size_t alive = 0;
  for (const auto& p : sim.corpus().posts) alive += sim.check_availability(p.id, probe) == AvailabilityStatus::Reachable;
  const double er = static_cast<double>(alive) / 5000.0;
  CHECK(std::abs(er - 0.90) <= 0.02);
}

TEST_CASE("resolve follows declared chains and intel reflects declared threats") {
  auto m = small_manifest();
  Simulator sim(m);
  const FetchResult first = sim.fetch("http://lin.ee/x");
  CHECK(first.status == 301);
  CHECK(first.location == "https://line.me/ti/p/abc");
  const std::string landing = resolve_shortened("http://lin.ee/x", sim);
  const auto im = classify_im_url(landing);
  REQUIRE(im);
  CHECK(im->kind == ContactKind::LINE);
  CHECK(im->id == "abc");

  CHECK_THROWS_AS(sim.fetch("https://unknown.example/"), Error);
  CHECK_THROWS_AS(sim.report("https://unknown.example/"), Error);
  const auto bad = sim.report("https://spin-palace.xyz/vip");
  CHECK(bad.reported);
  CHECK(bad.phishing);
  CHECK(bad.alarmed);
  CHECK_FALSE(bad.malware);
  const auto clean = sim.report("https://line.me/ti/p/abc");
  CHECK(clean.reported);
  CHECK_FALSE(clean.alarmed);

  m.redirects = {{"https://bit.ly/chain1", "https://bit.ly/chain2"}, {"https://bit.ly/chain2", "https://t.me/deal"}};
  Simulator chained(m);
  CHECK(resolve_shortened("https://bit.ly/chain1", chained) == "https://t.me/deal");
}

TEST_CASE("HTTP endpoints mirror the simulator") {
  auto m = small_manifest();
  m.rate_budget = {1000, 60.0};
  Simulator direct(m);
  Simulator served(m);
  SimServer server(served);
  const int port = server.start();
  SimClient client("http://127.0.0.1:" + std::to_string(port));

  const auto a = direct.search_hashtag("gzvip", 50);
  const auto b = client.search_hashtag("gzvip", 50);
  CHECK(Json(a).dump() == Json(b).dump());
  CHECK(client.search_hashtag("no-such-tag", 5).empty());
  CHECK(client.account_timeline("u-1").size() == direct.account_timeline("u-1").size());
  CHECK(client.account_timeline("nobody").empty());
  REQUIRE(client.get_profile("u-1"));
  CHECK_FALSE(client.get_profile("nobody"));

  const auto& post = direct.corpus().posts[0];
  CHECK(client.check_availability(post.id, post.created_at) == AvailabilityStatus::Reachable);
  CHECK(client.check_availability("missing", 0) == AvailabilityStatus::PageNonexistent);
  CHECK(client.fetch("http://lin.ee/x").location == "https://line.me/ti/p/abc");
  CHECK(resolve_shortened("http://lin.ee/x", client) == "https://line.me/ti/p/abc");
  try {
    client.fetch("https://unknown.example/");
    FAIL("expected FetchFailed");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::FetchFailed);
  }
  CHECK(client.report("https://spin-palace.xyz/").phishing);

  const Timestamp before = client.now();
  CHECK(client.advance(2.0) == before + 2 * kSecondsPerDay);
  CHECK(served.now() == before + 2 * kSecondsPerDay);
  server.stop();
}

TEST_CASE("HTTP rate limiting answers 429 with Retry-After") {
  double clock = 0;
  auto m = small_manifest();
  m.rate_budget = {2, 30.0};
  Simulator sim(m, [&] { return clock; });
  SimServer server(sim);
  SimClient client("http://127.0.0.1:" + std::to_string(server.start()));
  client.search_hashtag("gzvip", 1);
  client.search_hashtag("gzvip", 1);
  try {
    client.search_hashtag("gzvip", 1);
    FAIL("expected RateLimited");
  } catch (const RateLimitedError& e) {
    CHECK(e.retry_after() == doctest::Approx(30.0));
  }
  server.stop();
}
