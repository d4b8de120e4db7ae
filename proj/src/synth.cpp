#include "pip/synth.hpp"

#include "pip/error.hpp"
#include "pip/textnorm.hpp"

namespace pip::synth {

namespace {

const std::vector<std::string> kQqLead = {"加Q ", "QQ: ", "qq ", "企鹅 ", "扣扣：", "扣扣 ", "🐧 ", "penguin ", "Q号 ", "加扣扣 "};
const std::vector<std::string> kWeChatLead = {"加微信 ", "加微信", "微信：", "wechat: ", "薇 ", "V: ", "VX ", "vx：", "❤️ ",
                                              "🛰 ", "wx ", "加V ", "威信 "};
const std::vector<std::string> kTelegramLead = {"飞机 ", "✈️ ", "✈ ", "tg: ", "TG ", "telegram ", "电报 ", "纸飞机：", "airplane "};
const std::vector<std::string> kOtherLead = {"wickr ", "potato: ", "土豆 ", "batchat ", "蝙蝠 ", "signal "};

const std::vector<std::string> kFillers = {
    "诚信经营", "价格美丽", "需要的私聊", "欢迎咨询", "24小时在线", "dm for details", "best quality", "只做回头客",
    "在线等", "量大从优", "fast delivery", "新人优惠", "全国可发", "安全可靠", "contact me", "包邮到家", "今日特价",
    "limited offer", "懂的来", "支持验货", "Guangzhou incall and outcall", "discreet and verified", "Preis 780€",
    "heute verfügbar", "kontaktieren Sie uns", "contactez-nous", "garanti et sûr", "disponible ahora", "Precio especial",
    "scrivimi in privato", "consegna veloce", "пишите в личку", "быстрая доставка", "Bangkok delivery", "Tokyo 今すぐ",
    "Shenzhen 上门", "Berlin und Hamburg", "Paris et Lyon", "Madrid centro", "Roma e Milano", "Moscow today",
    "Seoul 출장", "안전 거래", "ส่งฟรี", "นัดได้", "お問い合わせ", "今すぐ連絡"};

const std::vector<std::string> kDistractors = {
    "价格 {n} 元", "库存 {n} 件", "room {n} tonight", "only {n} left", "{n} 起步", "call before {n}", "订单号 {n}",
    "第 {n} 期", "今年 {n} 人报名", "vip {n}"};

std::string number(Rng& rng) { return std::to_string(uniform(rng, 10, 99999999)); }

std::string replace_all(std::string s, const std::string& from, const std::string& to) {
  for (std::size_t pos = s.find(from); pos != std::string::npos; pos = s.find(from, pos + to.size())) {
    s.replace(pos, from.size(), to);
  }
  return s;
}

std::string filler(Rng& rng) {
  if (unit(rng) < 0.3) return replace_all(pick(rng, kDistractors), "{n}", number(rng));
  return pick(rng, kFillers);
}

const char kAlnum[] = "abcdefghijklmnopqrstuvwxyz0123456789";

}  // namespace

std::uint64_t uniform(Rng& rng, std::uint64_t lo, std::uint64_t hi) {
  require(lo <= hi, ErrorCode::PreconditionFailed, "empty range");
  const std::uint64_t span = hi - lo + 1;
  if (span == 0) return rng();
  // Rejection sampling to avoid modulo bias.
  const std::uint64_t limit = UINT64_MAX - UINT64_MAX % span;
  std::uint64_t x = rng();
  while (x >= limit) x = rng();
  return lo + x % span;
}

double unit(Rng& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

std::string random_contact_id(ContactKind kind, Rng& rng) {
  if (kind == ContactKind::QQ) {
    std::string id(1, static_cast<char>('1' + uniform(rng, 0, 8)));
    const auto len = uniform(rng, 6, 10);
    while (id.size() < len) id.push_back(static_cast<char>('0' + uniform(rng, 0, 9)));
    return id;
  }
  std::string id(1, static_cast<char>('a' + uniform(rng, 0, 25)));
  const auto len = uniform(rng, 5, 12);
  while (id.size() < len) {
    if (unit(rng) < 0.1 && id.back() != '_') id.push_back('_');
    else id.push_back(kAlnum[uniform(rng, 0, sizeof(kAlnum) - 2)]);
  }
  if (id.back() == '_') id.back() = 'x';
  return id;
}

std::string contact_phrase(ContactKind kind, const std::string& id, Rng& rng) {
  switch (kind) {
    case ContactKind::QQ: return pick(rng, kQqLead) + id;
    case ContactKind::WeChat: return pick(rng, kWeChatLead) + id;
    case ContactKind::Telegram: return pick(rng, kTelegramLead) + id;
    default: return pick(rng, kOtherLead) + id;
  }
}

std::vector<LabeledSentence> generate_ner_corpus(std::size_t n, std::uint64_t seed) {
  Rng rng(seed);
  const ContactKind kinds[] = {ContactKind::QQ, ContactKind::WeChat, ContactKind::Telegram, ContactKind::Other};
  const double kind_share[] = {0.3, 0.35, 0.25, 0.1};
  std::vector<LabeledSentence> out;
  out.reserve(n);
  while (out.size() < n) {
    std::string text = filler(rng);
    std::string id;
    ContactKind kind = ContactKind::Other;
    const bool has_contact = unit(rng) >= 0.2;
    if (has_contact) {
      double r = unit(rng);
      std::size_t k = 0;
      while (k + 1 < 4 && r >= kind_share[k]) r -= kind_share[k++];
      kind = kinds[k];
      id = random_contact_id(kind, rng);
      text += unit(rng) < 0.5 ? " " : "，";
      text += contact_phrase(kind, id, rng);
    }
    if (unit(rng) < 0.6) text += " " + filler(rng);

    LabeledSentence s;
    s.text = tokenize(text);
    s.tags.assign(s.text.size(), BioTag::O);
    if (has_contact) {
      bool found = false;
      for (std::size_t i = 0; i < s.text.size(); ++i) {
        if (s.text.tokens[i] == id && s.text.kinds[i] == TokenKind::Word) {
          s.tags[i] = begin_tag(kind);
          found = true;
          break;
        }
      }
      if (!found) continue;  // the id fused with a neighbouring token; draw again
    }
    out.push_back(std::move(s));
  }
  return out;
}

}  // namespace pip::synth
