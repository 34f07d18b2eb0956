#include "socialoam/similarity.hpp"

#include <algorithm>
#include <string_view>
#include <vector>

namespace socialoam {
namespace {

// Base letters for U+00C0..U+017F; '*' marks symbols (treated as punctuation).
constexpr std::string_view kLatinFold =
    "AAAAAAACEEEEIIII"  // C0
    "DNOOOOO*OUUUUYTs"  // D0
    "aaaaaaaceeeeiiii"  // E0
    "dnooooo*ouuuuyty"  // F0
    "AaAaAaCcCcCcCcDd"  // 100
    "DdEeEeEeEeEeGgGg"  // 110
    "GgGgHhHhIiIiIiIi"  // 120
    "IiJjJjKkkLlLlLlL"  // 130
    "lLlNnNnNnnNnOoOo"  // 140
    "OoOoRrRrRrSsSsSs"  // 150
    "SsTtTtTtUuUuUuUu"  // 160
    "UuUuWwYyYZzZzZzs"; // 170

std::u32string decode_utf8(std::string_view s) {
  std::u32string out;
  out.reserve(s.size());
  for (std::size_t i = 0; i < s.size();) {
    const auto b0 = static_cast<unsigned char>(s[i]);
    int extra = 0;
    char32_t cp = b0;
    if (b0 >= 0xF0 && b0 < 0xF8) {
      extra = 3;
      cp = b0 & 0x07;
    } else if (b0 >= 0xE0) {
      extra = 2;
      cp = b0 & 0x0F;
    } else if (b0 >= 0xC0) {
      extra = 1;
      cp = b0 & 0x1F;
    }
    bool ok = i + static_cast<std::size_t>(extra) < s.size();
    for (int k = 1; ok && k <= extra; ++k) {
      const auto b = static_cast<unsigned char>(s[i + static_cast<std::size_t>(k)]);
      if ((b & 0xC0) != 0x80) {
        ok = false;
      } else {
        cp = (cp << 6) | (b & 0x3F);
      }
    }
    if (!ok || (b0 >= 0x80 && b0 < 0xC0) || b0 >= 0xF8) {
      out.push_back(b0);  // Latin-1 fallback
      ++i;
      continue;
    }
    out.push_back(cp);
    i += static_cast<std::size_t>(extra) + 1;
  }
  return out;
}

void encode_utf8(char32_t cp, std::string& out) {
  if (cp < 0x80) {
    out += static_cast<char>(cp);
  } else if (cp < 0x800) {
    out += static_cast<char>(0xC0 | (cp >> 6));
    out += static_cast<char>(0x80 | (cp & 0x3F));
  } else if (cp < 0x10000) {
    out += static_cast<char>(0xE0 | (cp >> 12));
    out += static_cast<char>(0x80 | ((cp >> 6) & 0x3F));
    out += static_cast<char>(0x80 | (cp & 0x3F));
  } else {
    out += static_cast<char>(0xF0 | (cp >> 18));
    out += static_cast<char>(0x80 | ((cp >> 12) & 0x3F));
    out += static_cast<char>(0x80 | ((cp >> 6) & 0x3F));
    out += static_cast<char>(0x80 | (cp & 0x3F));
  }
}

bool is_combining_mark(char32_t cp) { return cp >= 0x0300 && cp <= 0x036F; }

// Returns 0 for separators, otherwise the folded lower-case code point.
char32_t fold(char32_t cp) {
  if (cp < 0x80) {
    if (cp >= 'A' && cp <= 'Z') return cp - 'A' + 'a';
    if ((cp >= 'a' && cp <= 'z') || (cp >= '0' && cp <= '9')) return cp;
    return 0;
  }
  if (cp >= 0xC0 && cp <= 0x17F) {
    const char base = kLatinFold[cp - 0xC0];
    if (base == '*') return 0;
    return fold(static_cast<char32_t>(static_cast<unsigned char>(base)));
  }
  if (cp < 0xC0) return 0;                     // Latin-1 punctuation and symbols
  if (cp >= 0x2000 && cp <= 0x206F) return 0;  // general punctuation
  if (cp >= 0x3000 && cp <= 0x303F) return 0;  // CJK punctuation
  return cp;
}

}  // namespace

std::u32string normalize_codepoints(std::string_view text) {
  std::u32string out;
  bool pending_space = false;
  for (char32_t cp : decode_utf8(text)) {
    if (is_combining_mark(cp)) continue;
    const char32_t f = fold(cp);
    if (f == 0) {
      pending_space = !out.empty();
      continue;
    }
    if (pending_space) out.push_back(U' ');
    pending_space = false;
    out.push_back(f);
  }
  return out;
}

std::string normalize_text(std::string_view text) {
  std::string out;
  for (char32_t cp : normalize_codepoints(text)) encode_utf8(cp, out);
  return out;
}

std::size_t edit_distance(std::u32string_view a, std::u32string_view b) {
  if (a.size() < b.size()) std::swap(a, b);
  std::vector<std::size_t> row(b.size() + 1);
  for (std::size_t j = 0; j <= b.size(); ++j) row[j] = j;
  for (std::size_t i = 1; i <= a.size(); ++i) {
    std::size_t diag = row[0];
    row[0] = i;
    for (std::size_t j = 1; j <= b.size(); ++j) {
      const std::size_t up = row[j];
      row[j] = std::min({row[j] + 1, row[j - 1] + 1, diag + (a[i - 1] == b[j - 1] ? 0 : 1)});
      diag = up;
    }
  }
  return row[b.size()];
}

double similarity_normalized(std::u32string_view a, std::u32string_view b) {
  const std::size_t longest = std::max(a.size(), b.size());
  if (longest == 0) return 1.0;
  return 1.0 - static_cast<double>(edit_distance(a, b)) / static_cast<double>(longest);
}

double similarity(std::string_view a, std::string_view b) {
  return similarity_normalized(normalize_codepoints(a), normalize_codepoints(b));
}

bool contains_word(std::string_view text, std::string_view term) {
  const std::u32string hay = normalize_codepoints(text);
  const std::u32string needle = normalize_codepoints(term);
  if (needle.empty() || hay.size() < needle.size()) return false;
  for (std::size_t pos = hay.find(needle); pos != std::u32string::npos; pos = hay.find(needle, pos + 1)) {
    const bool left = pos == 0 || hay[pos - 1] == U' ';
    const std::size_t end = pos + needle.size();
    const bool right = end == hay.size() || hay[end] == U' ';
    if (left && right) return true;
  }
  return false;
}

}  // namespace socialoam
