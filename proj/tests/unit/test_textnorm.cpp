#include <doctest.h>

#include <random>

#include "pip/error.hpp"
#include "pip/textnorm.hpp"
#include "pip/utf8.hpp"

using namespace pip;

namespace {

std::string strip_whitespace(std::string_view s) {
  std::string out;
  std::size_t pos = 0;
  while (pos < s.size()) {
    const std::size_t start = pos;
    const char32_t cp = utf8::next(s, pos);
    if (!utf8::is_space(cp)) out.append(s.substr(start, pos - start));
  }
  return out;
}

// Rebuilds the source content from tokens by putting URLs and emoji back.
std::string reinsert(const NormalizedText& t) {
  std::string out;
  std::size_t next_emoji = 0;
  for (std::size_t i = 0; i < t.tokens.size(); ++i) {
    if (t.kinds[i] == TokenKind::Url) {
      const int id = std::stoi(t.tokens[i].substr(4));
      out += t.url_map.at(static_cast<std::size_t>(id - 1)).url;
    } else if (t.kinds[i] == TokenKind::Emoji) {
      REQUIRE(t.emoji_expansions.at(next_emoji).token_index == i);
      out += utf8::encode(t.emoji_expansions[next_emoji++].codepoints);
    } else {
      out += t.tokens[i];
    }
  }
  return out;
}

}  // namespace

TEST_CASE("tokenize substitutes URLs with numbered placeholders") {
  const auto t = tokenize("join https://t.me/a now");
  CHECK(t.tokens == std::vector<std::string>{"join", "url-1", "now"});
  REQUIRE(t.url_map.size() == 1);
  CHECK(t.url_map[0].id == 1);
  CHECK(t.url_map[0].url == "https://t.me/a");
}

TEST_CASE("tokenize on empty input") {
  const auto t = tokenize("");
  CHECK(t.tokens.empty());
  CHECK(t.url_map.empty());
  CHECK(t.hashtags.empty());
}

TEST_CASE("tokenize expands emoji into descriptions") {
  const auto t = tokenize("fly ✈ me");
  CHECK(t.tokens == std::vector<std::string>{"fly", "airplane", "me"});
  REQUIRE(t.emoji_expansions.size() == 1);
  CHECK(t.emoji_expansions[0].codepoints == std::u32string{0x2708});
  CHECK(t.emoji_expansions[0].description == "airplane");

  const auto named = tokenize("\U0001F427 \U0001F6F0 ❤️ \U0001F341");
  CHECK(named.tokens == std::vector<std::string>{"penguin", "satellite", "heavy_black_heart", "maple_leaf"});
  CHECK(named.emoji_expansions[2].codepoints == std::u32string{0x2764, 0xFE0F});
}

TEST_CASE("tokenize segments CJK per code point and keeps hashtags and mentions") {
  const auto t = tokenize("加微信abc_123 #广州线下 @dealer01 ok!");
  CHECK(t.tokens == std::vector<std::string>{"加", "微", "信", "abc_123", "#广州线下", "@dealer01", "ok", "!"});
  CHECK(t.hashtags == std::vector<std::string>{"广州线下"});
  CHECK(t.mentions == std::vector<std::string>{"dealer01"});
  CHECK(t.kinds[4] == TokenKind::Hashtag);
  CHECK(t.kinds[5] == TokenKind::Mention);
  CHECK(t.kinds[7] == TokenKind::Punct);
}

TEST_CASE("hashtags and mentions preserve order and duplicates") {
  const auto t = tokenize("#a #b #a x@y.com @u @u");
  CHECK(t.hashtags == std::vector<std::string>{"a", "b", "a"});
  CHECK(t.mentions == std::vector<std::string>{"u", "u"});
}

TEST_CASE("URL trailing punctuation is left outside the placeholder") {
  const auto t = tokenize("see (https://bit.ly/abc). and http://x.y/z?q=1, ok");
  REQUIRE(t.url_map.size() == 2);
  CHECK(t.url_map[0].url == "https://bit.ly/abc");
  CHECK(t.url_map[1].url == "http://x.y/z?q=1");
}

TEST_CASE("round trip and placeholder numbering over random URL-bearing strings") {
  std::mt19937 rng(1234);
  const std::vector<std::string> pieces = {
      "hello", "世界", "https://t.me/abc", "http://bit.ly/x1", "✈", "\U0001F427", "#tag", "@who",
      "!!", "價格", "ราคา", "привет", "123", "a-b", "，", "❤️", "https://exa.mple/p?q=1.", "x"};
  const std::vector<std::string> seps = {" ", "", "  ", "\n", "\t"};
  for (int trial = 0; trial < 500; ++trial) {
    std::string text;
    const int parts = std::uniform_int_distribution<int>(0, 12)(rng);
    for (int p = 0; p < parts; ++p) {
      text += pieces[rng() % pieces.size()];
      text += seps[rng() % seps.size()];
    }
    const auto t = tokenize(text);
    CHECK(reinsert(t) == strip_whitespace(text));
    int expected_id = 1;
    for (std::size_t i = 0; i < t.tokens.size(); ++i) {
      if (t.kinds[i] != TokenKind::Url) continue;
      CHECK(t.tokens[i] == "url-" + std::to_string(expected_id));
      ++expected_id;
    }
    CHECK(static_cast<std::size_t>(expected_id - 1) == t.url_map.size());
  }
}

TEST_CASE("detect_language on the closed set") {
  const auto zh = detect_language(tokenize("这是中文推文"));
  CHECK(zh.code == Language::zh);
  CHECK(zh.confidence >= 0.8);

  const auto en = detect_language(tokenize("the quick brown fox"));
  CHECK(en.code == Language::en);
  CHECK(en.confidence >= 0.8);

  const auto empty = detect_language(tokenize(""));
  CHECK(empty.code == Language::other);
  CHECK(empty.confidence == 0.0);

  const auto unknown = detect_language(tokenize("مرحبا بكم في المدينة"));
  CHECK(unknown.code == Language::other);
}

TEST_CASE("detect_language recognises held-out sentences of each language") {
  const std::vector<std::pair<Language, std::string>> cases = {
      {Language::en, "We went to the market and bought some fresh vegetables"},
      {Language::zh, "我们明天一起去看电影好不好"},
      {Language::ja, "明日は友達と買い物に行きます"},
      {Language::th, "พรุ่งนี้ไปเที่ยวกับเพื่อน"},
      {Language::es, "Mañana vamos a la ciudad con mis amigos para comer"},
      {Language::it, "Domani andiamo in città con gli amici per mangiare"},
      {Language::de, "Morgen fahren wir mit Freunden in die Stadt zum Essen"},
      {Language::ru, "Завтра мы поедем в город с друзьями"},
      {Language::ko, "내일 친구들이랑 같이 시내에 가요"},
      {Language::fr, "Demain nous allons en ville avec des amis pour manger"},
  };
  for (const auto& [language, text] : cases) {
    INFO(text);
    const auto tag = detect_language(tokenize(text));
    CHECK(tag.code == language);
  }
}

TEST_CASE("detect_language is deterministic and bounded") {
  std::mt19937 rng(9);
  const std::string alphabet = "abcdefghijklmnopqrstuvwxyz 中文日本語ไทยпривет";
  const auto cps = utf8::decode(alphabet);
  for (int i = 0; i < 200; ++i) {
    std::u32string s;
    const int len = static_cast<int>(rng() % 30);
    for (int k = 0; k < len; ++k) s.push_back(cps[rng() % cps.size()]);
    const auto text = tokenize(utf8::encode(s));
    const auto a = detect_language(text);
    const auto b = detect_language(text);
    CHECK(a.code == b.code);
    CHECK(a.confidence == b.confidence);
    CHECK(a.confidence >= 0.0);
    CHECK(a.confidence <= 1.0);
  }
}

TEST_CASE("jargon_tag finds lexicon terms") {
  const auto& lexicon = JargonLexicon::builtin();
  CHECK(lexicon.entries().size() == 16);

  const auto drug = jargon_tag(tokenize("今天有叶子吗"), lexicon);
  REQUIRE(drug.size() == 1);
  CHECK(drug[0].term == "叶子");
  CHECK(drug[0].category == Category::IllegalDrug);
  CHECK(drug[0].token_index == 3);

  CHECK(jargon_tag(from_tokens({"hello", "world"}), lexicon).empty());

  const auto data = jargon_tag(tokenize("出售四件套"), lexicon);
  REQUIRE(data.size() == 1);
  CHECK(data[0].term == "四件套");
  CHECK(data[0].category == Category::DataTheftLeakage);
}

TEST_CASE("jargon_tag recalls every planted term") {
  const auto& lexicon = JargonLexicon::builtin();
  const std::vector<std::string> frames = {"最近{}很火", "有{} 联系我", "hello {} world", "{}"};
  std::mt19937 rng(5);
  for (const auto& entry : lexicon.entries()) {
    for (int rep = 0; rep < 5; ++rep) {
      std::string frame = frames[rng() % frames.size()];
      frame.replace(frame.find("{}"), 2, entry.term);
      const auto hits = jargon_tag(tokenize(frame), lexicon);
      const bool found = std::any_of(hits.begin(), hits.end(), [&](const JargonHit& h) { return h.term == entry.term; });
      CHECK_MESSAGE(found, frame);
    }
  }
}

TEST_CASE("jargon lexicon rejects duplicate terms and empty lexicons") {
  JargonLexicon lexicon;
  CHECK_THROWS_AS(jargon_tag(tokenize("x"), lexicon), Error);
  lexicon.add({"海螺", "conch", Category::Gambling});
  CHECK_THROWS_AS(lexicon.add({"海螺", "again", Category::Gambling}), Error);
}

TEST_CASE("hashtag_stats") {
  const std::vector<std::size_t> a = {0, 0, 2};
  const auto s = hashtag_stats(std::span<const std::size_t>(a));
  CHECK(s.median == 0.0);
  CHECK(s.mean == doctest::Approx(2.0 / 3.0).epsilon(1e-12));
  CHECK(s.frac_ge3 == 0.0);
  CHECK(s.frac_ge5 == 0.0);

  const std::vector<std::size_t> b = {3, 5, 5, 7};
  const auto t = hashtag_stats(std::span<const std::size_t>(b));
  CHECK(t.median == 5.0);
  CHECK(t.mean == 5.0);
  CHECK(t.frac_ge3 == 1.0);
  CHECK(t.frac_ge5 == 0.75);

  CHECK_THROWS_AS(hashtag_stats(std::span<const Post>()), Error);
}
