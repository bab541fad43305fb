#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace kglink::text {

/// One decoded code point and the byte range it occupied.
struct CodePoint {
  char32_t value;
  std::size_t byte_begin;
  std::size_t byte_end;
};

/// Decodes UTF-8. Invalid or truncated sequences decode to U+FFFD one byte at a time.
std::vector<CodePoint> decode_utf8(std::string_view s);

std::u32string to_u32(std::string_view s);
std::string to_utf8(std::u32string_view s);
void append_utf8(std::string& out, char32_t cp);

std::size_t code_point_count(std::string_view s);

}  // namespace kglink::text
