#include "kglink/data/trex.hpp"

#include <istream>
#include <ostream>
#include <set>
#include <string>
#include <tuple>

#include <json.hpp>

#include "kglink/errors.hpp"
#include "kglink/kg/index.hpp"
#include "kglink/text/utf8.hpp"

namespace kglink::data {

namespace {

using nlohmann::json;

std::string qid_from_uri(const std::string& uri) {
  const auto slash = uri.find_last_of('/');
  std::string tail = slash == std::string::npos ? uri : uri.substr(slash + 1);
  return kg::is_qid(tail) ? tail : std::string{};
}

void convert_document(const json& doc, std::ostream& out, TrexStats& stats) {
  if (!doc.is_object() || !doc.contains("text") || !doc["text"].is_string())
    throw ParseError("T-REx document " + std::to_string(stats.documents + 1) + " lacks a text field");
  ++stats.documents;
  const std::u32string text = text::to_u32(doc["text"].get<std::string>());

  struct Mention {
    std::size_t start, end;
    std::string qid, surface;
  };
  std::vector<Mention> mentions;
  std::set<std::tuple<std::size_t, std::size_t, std::string>> seen;
  for (const auto& e : doc.value("entities", json::array())) {
    const auto& b = e.value("boundaries", json::array());
    if (b.size() != 2 || !b[0].is_number_integer() || !b[1].is_number_integer()) continue;
    const std::string qid = qid_from_uri(e.value("uri", ""));
    if (qid.empty()) {
      ++stats.skipped_non_entity;
      continue;
    }
    const auto start = b[0].get<std::size_t>(), end = b[1].get<std::size_t>();
    if (start >= end || end > text.size()) continue;
    if (!seen.emplace(start, end, qid).second) {
      ++stats.duplicates;
      continue;
    }
    mentions.push_back({start, end, qid, text::to_utf8(std::u32string_view(text).substr(start, end - start))});
  }

  std::vector<bool> placed(mentions.size(), false);
  for (const auto& sb : doc.value("sentences_boundaries", json::array())) {
    if (sb.size() != 2) continue;
    const auto s0 = sb[0].get<std::size_t>(), s1 = std::min(sb[1].get<std::size_t>(), text.size());
    if (s0 >= s1) continue;
    json anns = json::array();
    for (std::size_t i = 0; i < mentions.size(); ++i) {
      const auto& m = mentions[i];
      if (m.start < s0 || m.end > s1) continue;
      placed[i] = true;
      anns.push_back({{"start", m.start - s0}, {"end", m.end - s0}, {"surface", m.surface}, {"qid", m.qid}});
    }
    stats.annotations += anns.size();
    ++stats.sentences;
    out << json{{"text", text::to_utf8(std::u32string_view(text).substr(s0, s1 - s0))}, {"annotations", anns}}.dump()
        << '\n';
  }
  for (bool p : placed)
    if (!p) ++stats.skipped_cross_sentence;
}

}  // namespace

TrexStats convert_trex(std::istream& in, std::ostream& out) {
  TrexStats stats;
  in >> std::ws;
  if (in.peek() == '[') {
    try {
      [[maybe_unused]] const json rest = json::parse(in, [&](int depth, json::parse_event_t event, json& parsed) {
        if (depth == 1 && event == json::parse_event_t::object_end) {
          convert_document(parsed, out, stats);
          return false;  // drop the document from the (discarded) array
        }
        return true;
      });
    } catch (const json::exception& e) {
      throw ParseError(std::string("invalid T-REx JSON: ") + e.what());
    }
    return stats;
  }
  std::string line;
  std::size_t line_number = 0;
  while (std::getline(in, line)) {
    ++line_number;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    json doc;
    try {
      doc = json::parse(line);
    } catch (const json::parse_error& e) {
      throw ParseError(std::string("invalid JSON: ") + e.what(), line_number);
    }
    convert_document(doc, out, stats);
  }
  return stats;
}

}  // namespace kglink::data
