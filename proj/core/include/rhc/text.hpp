#ifndef RHC_TEXT_HPP_
#define RHC_TEXT_HPP_

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>

namespace rhc {

std::string_view TrimView(std::string_view s);

// CRLF and lone CR become LF.
std::string NormalizeNewlines(std::string_view s);

// Runs of whitespace (including newlines) become one ASCII space; the result
// is trimmed.
std::string CollapseWhitespace(std::string_view s);

bool StartsWithIgnoreCase(std::string_view s, std::string_view prefix);

// Decodes one UTF-8 code point at s[pos]. Returns its byte length (>= 1) and
// stores the scalar in *cp; malformed bytes decode as U+FFFD of length 1.
std::size_t DecodeUtf8(std::string_view s, std::size_t pos, char32_t* cp);

// White_Space property from the Unicode character database.
bool IsUnicodeWhitespace(char32_t cp);

// 64-bit FNV-1a, printed as 16 hex digits.
std::string Fnv1aHex(std::string_view s);

}  // namespace rhc

#endif  // RHC_TEXT_HPP_
