#pragma once

#include <cstddef>
#include <string>
#include <string_view>

namespace socialoam {

/// Lower-cases, folds Latin diacritics to their base letter, turns
/// punctuation into spaces, collapses whitespace and trims. Input is UTF-8;
/// invalid bytes are treated as Latin-1.
[[nodiscard]] std::string normalize_text(std::string_view text);

/// Same normalization, decoded to code points.
[[nodiscard]] std::u32string normalize_codepoints(std::string_view text);

/// Levenshtein distance over code points.
[[nodiscard]] std::size_t edit_distance(std::u32string_view a, std::u32string_view b);

/// 1 - editdist(a', b') / max(|a'|, |b'|) over normalized forms; two empty
/// forms are identical (1.0).
[[nodiscard]] double similarity(std::string_view a, std::string_view b);
[[nodiscard]] double similarity_normalized(std::u32string_view a, std::u32string_view b);

/// Whole-word (or whole-phrase) containment after normalization of both sides.
[[nodiscard]] bool contains_word(std::string_view text, std::string_view term);

}  // namespace socialoam
