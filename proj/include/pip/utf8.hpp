#pragma once

#include <cstdint>
#include <string>
#include <string_view>

namespace pip::utf8 {

/// Decodes one code point starting at `pos` and advances `pos`. Malformed
/// sequences decode to U+FFFD and consume one byte.
char32_t next(std::string_view s, std::size_t& pos) noexcept;

std::u32string decode(std::string_view s);
std::string encode(char32_t cp);
std::string encode(std::u32string_view cps);
std::size_t length(std::string_view s) noexcept;

/// ASCII-only lowering; non-ASCII code points pass through unchanged.
std::string ascii_lower(std::string_view s);
/// Lowercases ASCII, Latin-1/Latin Extended-A, Greek and Cyrillic letters.
std::string lower(std::string_view s);

enum class Script { Latin, Cyrillic, Greek, Hangul, Han, Kana, Thai, OtherLetter, Digit, Space, Punct, Symbol, Mark, Other };

Script classify(char32_t cp) noexcept;

inline bool is_segmented_script(Script s) noexcept {
  return s == Script::Han || s == Script::Kana || s == Script::Thai;
}
inline bool is_letter(Script s) noexcept {
  return s == Script::Latin || s == Script::Cyrillic || s == Script::Greek || s == Script::Hangul ||
         s == Script::Han || s == Script::Kana || s == Script::Thai || s == Script::OtherLetter;
}
bool is_space(char32_t cp) noexcept;

}  // namespace pip::utf8
