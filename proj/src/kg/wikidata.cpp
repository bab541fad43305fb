#include "kglink/kg/wikidata.hpp"

#include <istream>
#include <ostream>

#include <json.hpp>

#include "kglink/errors.hpp"
#include "kglink/kg/dump.hpp"

namespace kglink::kg {

ConversionStats convert_wikidata(std::istream& in, std::ostream& out, const std::string& language) {
  ConversionStats stats;
  std::string line;
  while (std::getline(in, line)) {
    ++stats.lines;
    std::string_view body = line;
    while (!body.empty() && (body.back() == '\r' || body.back() == ' ' || body.back() == ',')) body.remove_suffix(1);
    while (!body.empty() && body.front() == ' ') body.remove_prefix(1);
    if (body.empty() || body == "[" || body == "]") continue;

    nlohmann::json entity;
    try {
      entity = nlohmann::json::parse(body);
    } catch (const nlohmann::json::parse_error& e) {
      throw ParseError(std::string("invalid JSON: ") + e.what(), stats.lines);
    }
    if (!entity.is_object()) throw ParseError("entity line is not a JSON object", stats.lines);

    const std::string id = entity.value("id", "");
    if (!is_qid(id)) {
      ++stats.skipped_not_item;
      continue;
    }
    EntityRecord record{id, "", {}};
    if (auto labels = entity.find("labels"); labels != entity.end() && labels->contains(language))
      record.label = (*labels)[language].value("value", "");
    if (record.label.empty()) {
      ++stats.skipped_no_label;
      continue;
    }
    if (auto aliases = entity.find("aliases"); aliases != entity.end() && aliases->contains(language)) {
      for (const auto& a : (*aliases)[language]) {
        std::string value = a.value("value", "");
        if (!value.empty()) record.aliases.push_back(std::move(value));
      }
    }
    out << format_dump_line(record) << '\n';
    ++stats.written;
  }
  return stats;
}

}  // namespace kglink::kg
