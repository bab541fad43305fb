#pragma once

#include <filesystem>
#include <functional>
#include <iosfwd>
#include <string>
#include <string_view>

namespace kglink::io {

/// Writes `bytes` to a sibling temporary file, then renames it over `path`,
/// so readers never observe a partially written artifact.
void write_file_atomic(const std::filesystem::path& path, std::string_view bytes);

/// Same guarantee for output produced incrementally by `writer`. If the
/// writer throws, the temporary is removed and `path` is left untouched.
void write_stream_atomic(const std::filesystem::path& path, const std::function<void(std::ostream&)>& writer);

/// Whole file as bytes. Throws ArtifactError when it cannot be opened.
std::string read_file(const std::filesystem::path& path);

}  // namespace kglink::io
