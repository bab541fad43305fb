#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>

#include "kglink/kg/index.hpp"

// Entity dump: one UTF-8 line per entity,
//   id <TAB> label <TAB> alias|alias|...
// The alias field may be empty or absent. Inside fields "\|" is a literal bar
// and "\\" a literal backslash.

namespace kglink::kg {

struct DumpStats {
  std::size_t lines = 0;
  std::size_t entities = 0;
  std::size_t skipped_no_label = 0;
  std::size_t duplicate_ids = 0;
};

/// nullopt for a blank line. The returned label may be empty. Throws
/// ParseError (carrying `line_number`) on a malformed line.
std::optional<EntityRecord> parse_dump_line(std::string_view line, std::size_t line_number);

/// Inverse of parse_dump_line. Tabs and line breaks inside fields become spaces.
std::string format_dump_line(const EntityRecord& record);

struct IngestResult {
  KGIndex index;
  DumpStats stats;
};

IngestResult ingest_dump(std::istream& in);
/// Throws ArtifactError when the file cannot be opened.
IngestResult ingest_dump(const std::filesystem::path& path);

}  // namespace kglink::kg
