#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace kglink::kg {

/// Matching key for labels, aliases and queries: NFKC with case folding,
/// every character that is not a letter, digit or combining mark replaced by
/// a space, runs of spaces collapsed, ends trimmed. Idempotent.
std::string normalize(std::string_view s);

/// Space-separated pieces of an already normalized string.
std::vector<std::string> split_normalized(std::string_view normalized);

}  // namespace kglink::kg
