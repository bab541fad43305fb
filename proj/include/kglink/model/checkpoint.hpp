#pragma once

#include <filesystem>
#include <string>

#include "kglink/model/seq2seq.hpp"

namespace kglink::model {

// Checkpoint layout (all integers little-endian):
//   8 bytes  magic "KGLCKPT\0"
//   u32      format version
//   u64      length of the JSON header, then the header itself: task, the
//            Seq2SeqConfig fields, both vocabularies with their FNV-1a
//            fingerprints, and the frozen embedding rows
//   u32      tensor count, then per tensor: u32 name length, name,
//            u32 rank, u64 extents, IEEE-754 doubles
inline constexpr std::uint32_t kCheckpointVersion = 1;

std::string serialize_checkpoint(const Seq2SeqModel& model);
Seq2SeqModel deserialize_checkpoint(const std::string& bytes);

/// Atomic write (temporary file + rename).
void save_checkpoint(const Seq2SeqModel& model, const std::filesystem::path& path);

/// Throws ArtifactError if the file is missing, ParseError on a bad magic,
/// version or truncated payload, ShapeError when a tensor disagrees with the
/// header.
Seq2SeqModel load_checkpoint(const std::filesystem::path& path);

}  // namespace kglink::model
