#pragma once

#include <cstddef>
#include <iosfwd>

namespace kglink::data {

struct TrexStats {
  std::size_t documents = 0;
  std::size_t sentences = 0;
  std::size_t annotations = 0;
  std::size_t skipped_non_entity = 0;   // literal values (dates, quantities) and non-Q URIs
  std::size_t skipped_cross_sentence = 0;
  std::size_t duplicates = 0;
};

/// Converts T-REx documents (a JSON array of documents, or one document per
/// line) into corpus lines, one per sentence, keeping entity annotations
/// that lie inside the sentence. Documents are processed one at a time.
/// Throws ParseError on malformed input.
TrexStats convert_trex(std::istream& in, std::ostream& out);

}  // namespace kglink::data
