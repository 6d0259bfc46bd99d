#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

// Small string helpers shared across modules. Case folding is ASCII-only;
// bytes outside ASCII pass through unchanged.
namespace ontolink::text {

std::string to_lower(std::string_view s);
std::string_view trim(std::string_view s);
bool iequals(std::string_view a, std::string_view b);
std::string join(std::span<const std::string> parts, std::string_view sep);

/// Number of UTF-8 code points in `s` (continuation bytes are not counted).
std::size_t utf8_length(std::string_view s);

/// The first `max_chars` code points of `s`.
std::string utf8_prefix(std::string_view s, std::size_t max_chars);

/// Appends the UTF-8 encoding of `cp`. Returns false for surrogates and
/// values above U+10FFFF.
bool append_utf8(std::string& out, char32_t cp);

}  // namespace ontolink::text
