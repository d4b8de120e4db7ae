#include "pip/utf8.hpp"

namespace pip::utf8 {

char32_t next(std::string_view s, std::size_t& pos) noexcept {
  const auto byte = [&](std::size_t i) { return static_cast<unsigned char>(s[i]); };
  const unsigned char lead = byte(pos);
  int extra = 0;
  char32_t cp = 0;
  if (lead < 0x80) {
    ++pos;
    return lead;
  } else if ((lead & 0xE0) == 0xC0) {
    extra = 1;
    cp = lead & 0x1F;
  } else if ((lead & 0xF0) == 0xE0) {
    extra = 2;
    cp = lead & 0x0F;
  } else if ((lead & 0xF8) == 0xF0) {
    extra = 3;
    cp = lead & 0x07;
  } else {
    ++pos;
    return 0xFFFD;
  }
  if (pos + extra >= s.size()) {
    ++pos;
    return 0xFFFD;
  }
  for (int i = 1; i <= extra; ++i) {
    const unsigned char c = byte(pos + i);
    if ((c & 0xC0) != 0x80) {
      ++pos;
      return 0xFFFD;
    }
    cp = (cp << 6) | (c & 0x3F);
  }
  pos += extra + 1;
  return cp;
}

std::u32string decode(std::string_view s) {
  std::u32string out;
  out.reserve(s.size());
  std::size_t pos = 0;
  while (pos < s.size()) out.push_back(next(s, pos));
  return out;
}

std::string encode(char32_t cp) {
  std::string out;
  if (cp < 0x80) {
    out.push_back(static_cast<char>(cp));
  } else if (cp < 0x800) {
    out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else if (cp < 0x10000) {
    out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else {
    out.push_back(static_cast<char>(0xF0 | (cp >> 18)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  }
  return out;
}

std::string encode(std::u32string_view cps) {
  std::string out;
  for (char32_t cp : cps) out += encode(cp);
  return out;
}

std::size_t length(std::string_view s) noexcept {
  std::size_t n = 0;
  std::size_t pos = 0;
  while (pos < s.size()) {
    next(s, pos);
    ++n;
  }
  return n;
}

std::string ascii_lower(std::string_view s) {
  std::string out(s);
  for (char& c : out) {
    if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
  }
  return out;
}

namespace {
char32_t lower_cp(char32_t cp) noexcept {
  if (cp >= 'A' && cp <= 'Z') return cp + 32;
  if ((cp >= 0xC0 && cp <= 0xDE) && cp != 0xD7) return cp + 32;
  if (cp >= 0x100 && cp <= 0x17F && (cp % 2 == 0)) return cp + 1;
  if (cp >= 0x391 && cp <= 0x3AB && cp != 0x3A2) return cp + 32;
  if (cp >= 0x410 && cp <= 0x42F) return cp + 32;
  if (cp >= 0x400 && cp <= 0x40F) return cp + 80;
  if (cp >= 0xFF21 && cp <= 0xFF3A) return cp + 32;
  return cp;
}
}  // namespace

std::string lower(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  std::size_t pos = 0;
  while (pos < s.size()) {
    const std::size_t start = pos;
    const char32_t cp = next(s, pos);
    const char32_t low = lower_cp(cp);
    if (low == cp) {
      out.append(s.substr(start, pos - start));
    } else {
      out += encode(low);
    }
  }
  return out;
}

bool is_space(char32_t cp) noexcept {
  return cp == ' ' || cp == '\t' || cp == '\n' || cp == '\r' || cp == '\v' || cp == '\f' ||
         cp == 0x85 || cp == 0xA0 || cp == 0x1680 || (cp >= 0x2000 && cp <= 0x200A) ||
         cp == 0x2028 || cp == 0x2029 || cp == 0x202F || cp == 0x205F || cp == 0x3000;
}

Script classify(char32_t cp) noexcept {
  if (is_space(cp)) return Script::Space;
  if (cp < 0x80) {
    if ((cp >= 'a' && cp <= 'z') || (cp >= 'A' && cp <= 'Z')) return Script::Latin;
    if (cp >= '0' && cp <= '9') return Script::Digit;
    if (cp < 0x20 || cp == 0x7F) return Script::Other;
    return Script::Punct;
  }
  if (cp >= 0xFF10 && cp <= 0xFF19) return Script::Digit;
  if ((cp >= 0xFF21 && cp <= 0xFF3A) || (cp >= 0xFF41 && cp <= 0xFF5A)) return Script::Latin;
  if (cp >= 0xFF65 && cp <= 0xFF9F) return Script::Kana;
  if (cp >= 0xFF00 && cp <= 0xFFEF) return Script::Punct;
  if (cp >= 0x80 && cp <= 0xBF) {
    if (cp == 0xAA || cp == 0xBA || cp == 0xB5) return Script::Latin;
    return Script::Punct;
  }
  if (cp == 0xD7 || cp == 0xF7) return Script::Punct;
  if (cp >= 0xC0 && cp <= 0x24F) return Script::Latin;
  if (cp >= 0x250 && cp <= 0x2AF) return Script::Latin;
  if (cp >= 0x2B0 && cp <= 0x2FF) return Script::Mark;
  if (cp >= 0x300 && cp <= 0x36F) return Script::Mark;
  if (cp >= 0x370 && cp <= 0x3FF) return Script::Greek;
  if (cp >= 0x400 && cp <= 0x52F) return Script::Cyrillic;
  if (cp >= 0x530 && cp <= 0x8FF) return Script::OtherLetter;  // Armenian, Hebrew, Arabic, ...
  if (cp >= 0x900 && cp <= 0xDFF) return Script::OtherLetter;  // Indic
  if (cp >= 0xE00 && cp <= 0xE7F) return Script::Thai;
  if (cp >= 0xE80 && cp <= 0xFFF) return Script::OtherLetter;
  if (cp >= 0x1100 && cp <= 0x11FF) return Script::Hangul;
  if (cp >= 0x1E00 && cp <= 0x1EFF) return Script::Latin;
  if (cp >= 0x1F00 && cp <= 0x1FFF) return Script::Greek;
  if (cp == 0x200C || cp == 0x200D) return Script::Mark;
  if (cp >= 0x2000 && cp <= 0x206F) return Script::Punct;
  if (cp >= 0x20A0 && cp <= 0x20CF) return Script::Symbol;  // currency
  if (cp >= 0x2100 && cp <= 0x2BFF) return Script::Symbol;
  if (cp >= 0x2E80 && cp <= 0x2FDF) return Script::Han;
  if (cp >= 0x3001 && cp <= 0x303F) {
    if (cp == 0x3005 || cp == 0x3007) return Script::Han;
    return Script::Punct;
  }
  if (cp >= 0x3040 && cp <= 0x30FF) {
    if (cp == 0x30FB) return Script::Punct;
    return Script::Kana;
  }
  if (cp >= 0x3130 && cp <= 0x318F) return Script::Hangul;
  if (cp >= 0x31F0 && cp <= 0x31FF) return Script::Kana;
  if (cp >= 0x3400 && cp <= 0x4DBF) return Script::Han;
  if (cp >= 0x4E00 && cp <= 0x9FFF) return Script::Han;
  if (cp >= 0xAC00 && cp <= 0xD7AF) return Script::Hangul;
  if (cp >= 0xF900 && cp <= 0xFAFF) return Script::Han;
  if (cp >= 0xFE00 && cp <= 0xFE0F) return Script::Mark;
  if (cp >= 0xFE30 && cp <= 0xFE4F) return Script::Punct;
  if (cp >= 0x1F000 && cp <= 0x1FAFF) return Script::Symbol;
  if (cp >= 0x20000 && cp <= 0x2FA1F) return Script::Han;
  if (cp >= 0xE0000 && cp <= 0xE007F) return Script::Mark;
  return Script::Other;
}

}  // namespace pip::utf8
