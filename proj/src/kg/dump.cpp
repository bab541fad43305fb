#include "kglink/kg/dump.hpp"

#include <fstream>
#include <istream>
#include <vector>

#include "kglink/errors.hpp"

namespace kglink::kg {

namespace {

// Splits on unescaped `sep` and resolves escapes.
std::vector<std::string> split_escaped(std::string_view field, char sep, std::size_t line_number) {
  std::vector<std::string> parts(1);
  for (std::size_t i = 0; i < field.size(); ++i) {
    const char c = field[i];
    if (c == '\\') {
      if (i + 1 == field.size()) throw ParseError("dangling backslash", line_number);
      const char next = field[++i];
      if (next != '\\' && next != '|') throw ParseError(std::string("unknown escape \\") + next, line_number);
      parts.back().push_back(next);
    } else if (c == sep) {
      parts.emplace_back();
    } else {
      parts.back().push_back(c);
    }
  }
  return parts;
}

std::string unescape(std::string_view field, std::size_t line_number) {
  return split_escaped(field, '\0', line_number).front();
}

std::string escape(std::string_view s, bool bar) {
  std::string out;
  for (char c : s) {
    if (c == '\\' || (bar && c == '|')) out.push_back('\\');
    out.push_back(c == '\t' || c == '\n' || c == '\r' ? ' ' : c);
  }
  return out;
}

}  // namespace

std::optional<EntityRecord> parse_dump_line(std::string_view line, std::size_t line_number) {
  if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
  if (line.find_first_not_of(" \t") == std::string_view::npos) return std::nullopt;

  std::vector<std::string_view> fields;
  std::size_t start = 0;
  for (;;) {
    const auto tab = line.find('\t', start);
    fields.push_back(line.substr(start, tab == std::string_view::npos ? std::string_view::npos : tab - start));
    if (tab == std::string_view::npos) break;
    start = tab + 1;
  }
  if (fields.size() < 2 || fields.size() > 3)
    throw ParseError("expected 2 or 3 tab-separated fields, found " + std::to_string(fields.size()), line_number);
  if (!is_qid(fields[0])) throw ParseError("invalid entity id '" + std::string(fields[0]) + "'", line_number);

  EntityRecord record;
  record.id = std::string(fields[0]);
  record.label = unescape(fields[1], line_number);
  if (fields.size() == 3 && !fields[2].empty()) {
    for (auto& a : split_escaped(fields[2], '|', line_number))
      if (!a.empty()) record.aliases.push_back(std::move(a));
  }
  return record;
}

std::string format_dump_line(const EntityRecord& record) {
  std::string out = record.id + '\t' + escape(record.label, false) + '\t';
  for (std::size_t i = 0; i < record.aliases.size(); ++i) {
    if (i) out.push_back('|');
    out += escape(record.aliases[i], true);
  }
  return out;
}

IngestResult ingest_dump(std::istream& in) {
  KGIndexBuilder builder;
  DumpStats stats;
  std::string line;
  while (std::getline(in, line)) {
    ++stats.lines;
    auto record = parse_dump_line(line, stats.lines);
    if (!record) continue;
    if (record->label.empty()) {
      ++stats.skipped_no_label;
      continue;
    }
    if (!builder.add(std::move(*record))) ++stats.duplicate_ids;
  }
  stats.entities = builder.size();
  return {builder.build(), stats};
}

IngestResult ingest_dump(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ArtifactError("cannot open entity dump " + path.string());
  return ingest_dump(in);
}

}  // namespace kglink::kg
