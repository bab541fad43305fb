#pragma once

#include <iosfwd>
#include <string>

namespace kglink::kg {

struct ConversionStats {
  std::size_t lines = 0;
  std::size_t written = 0;
  std::size_t skipped_no_label = 0;
  std::size_t skipped_not_item = 0;
};

/// Streams a Wikidata JSON entity dump (one entity object per line, optionally
/// wrapped in "[" / "]" lines with trailing commas) into the entity dump
/// format, keeping labels and aliases in `language`. Only Q-items are kept.
/// Memory use is bounded by the longest line. Throws ParseError with the line
/// number on invalid JSON.
ConversionStats convert_wikidata(std::istream& in, std::ostream& out, const std::string& language = "en");

}  // namespace kglink::kg
