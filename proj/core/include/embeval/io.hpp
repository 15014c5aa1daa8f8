#ifndef EMBEVAL_IO_HPP
#define EMBEVAL_IO_HPP

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "embeval/types.hpp"

namespace embeval {

namespace fs = std::filesystem;

/// BEMB header layout (little-endian):
///   "BEMB" | u16 version | u16 reserved | u32 dim | u64 count
/// followed by count*dim binary32 values, row-major. Ids and the model name
/// live in the sidecar `<stem>.meta.json`.
inline constexpr std::uint16_t kBembVersion = 1;
inline constexpr std::size_t kBembHeaderBytes = 20;

fs::path sidecar_path(const fs::path& bemb_path);

/// Reads a BEMB file (with sidecar) or an `id,e0,...` CSV. The format is
/// chosen from the leading bytes, not the extension.
EmbeddingSet load_embeddings(const fs::path& path);

/// Writes BEMB plus sidecar. Round-trips bit-exactly through load_embeddings.
void save_embeddings(const EmbeddingSet& set, const fs::path& path);

void save_embeddings_csv(const EmbeddingSet& set, const fs::path& path);

/// Header must contain file,start_s,end_s,label (any order); an optional
/// event_id column supplies ids, otherwise ids are "<file>#<row>" with row
/// the 0-based data row.
AnnotationTable load_annotations(const fs::path& path);
AnnotationTable parse_annotations(std::string_view text);

/// Writes event_id,file,start_s,end_s,label.
void save_annotations(const AnnotationTable& table, const fs::path& path);

ModelRegistry load_registry(const fs::path& path);
ModelRegistry parse_registry(std::string_view json_text);

// Small CSV helpers shared by the exporters.
std::vector<std::string> split_csv_line(std::string_view line);
std::string csv_escape(std::string_view field);
/// Shortest decimal representation that round-trips.
std::string format_real(double value);

std::string read_text_file(const fs::path& path);
void write_text_file(const fs::path& path, std::string_view content);

}  // namespace embeval

#endif  // EMBEVAL_IO_HPP
