#include "embeval/io.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <charconv>
#include <cmath>
#include <cstring>
#include <fstream>
#include <map>
#include <sstream>

#include <json.hpp>

#include "embeval/error.hpp"

namespace embeval {

namespace {

using nlohmann::json;

constexpr std::array<unsigned char, 4> kMagic{0x42, 0x45, 0x4D, 0x42};

template <class U>
U read_le(const unsigned char* p) {
    U v = 0;
    for (std::size_t i = 0; i < sizeof(U); ++i) v |= static_cast<U>(p[i]) << (8 * i);
    return v;
}

template <class U>
void write_le(std::string& out, U v) {
    for (std::size_t i = 0; i < sizeof(U); ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
}

std::string read_binary(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorCode::IoFailure, "cannot open " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return std::move(ss).str();
}

bool parse_double(std::string_view text, double& out) {
    while (!text.empty() && (text.front() == ' ' || text.front() == '\t')) text.remove_prefix(1);
    while (!text.empty() && (text.back() == ' ' || text.back() == '\t')) text.remove_suffix(1);
    if (text.empty()) return false;
    if (text.front() == '+') text.remove_prefix(1);
    const auto* end = text.data() + text.size();
    auto [ptr, ec] = std::from_chars(text.data(), end, out);
    return ec == std::errc() && ptr == end;
}

bool parse_float(std::string_view text, float& out) {
    while (!text.empty() && (text.front() == ' ' || text.front() == '\t')) text.remove_prefix(1);
    while (!text.empty() && (text.back() == ' ' || text.back() == '\t')) text.remove_suffix(1);
    if (text.empty()) return false;
    if (text.front() == '+') text.remove_prefix(1);
    const auto* end = text.data() + text.size();
    auto [ptr, ec] = std::from_chars(text.data(), end, out);
    return ec == std::errc() && ptr == end;
}

bool try_split_csv(std::string_view line, std::vector<std::string>& fields) {
    fields.clear();
    std::string cur;
    bool quoted = false;
    bool field_started_quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char c = line[i];
        if (quoted) {
            if (c == '"') {
                if (i + 1 < line.size() && line[i + 1] == '"') {
                    cur.push_back('"');
                    ++i;
                } else {
                    quoted = false;
                }
            } else {
                cur.push_back(c);
            }
        } else if (c == '"' && cur.empty() && !field_started_quoted) {
            quoted = true;
            field_started_quoted = true;
        } else if (c == ',') {
            fields.push_back(std::move(cur));
            cur.clear();
            field_started_quoted = false;
        } else {
            cur.push_back(c);
        }
    }
    if (quoted) return false;
    fields.push_back(std::move(cur));
    return true;
}

/// Splits text into lines, dropping a trailing '\r' and a UTF-8 BOM.
std::vector<std::string_view> lines_of(std::string_view text) {
    if (text.starts_with("\xEF\xBB\xBF")) text.remove_prefix(3);
    std::vector<std::string_view> out;
    std::size_t pos = 0;
    while (pos < text.size()) {
        auto nl = text.find('\n', pos);
        if (nl == std::string_view::npos) nl = text.size();
        auto line = text.substr(pos, nl - pos);
        if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
        out.push_back(line);
        pos = nl + 1;
    }
    return out;
}

bool is_blank(std::string_view line) {
    return line.find_first_not_of(" \t") == std::string_view::npos;
}

EmbeddingSet load_bemb(const fs::path& path, const std::string& bytes) {
    if (bytes.size() < kBembHeaderBytes) {
        throw Error(ErrorCode::DimensionMismatch, "truncated BEMB header in " + path.string());
    }
    const auto* p = reinterpret_cast<const unsigned char*>(bytes.data());
    const auto version = read_le<std::uint16_t>(p + 4);
    const auto reserved = read_le<std::uint16_t>(p + 6);
    const auto dim = read_le<std::uint32_t>(p + 8);
    const auto count = read_le<std::uint64_t>(p + 12);
    if (version != kBembVersion || reserved != 0) {
        throw Error(ErrorCode::ParseError, "unsupported BEMB version " + std::to_string(version));
    }
    if (count > 0 && dim == 0) {
        throw Error(ErrorCode::DimensionMismatch, "dim is 0 with count " + std::to_string(count));
    }
    const std::uint64_t payload = bytes.size() - kBembHeaderBytes;
    const std::uint64_t values = payload / 4;
    if (payload % 4 != 0 || (dim != 0 && values / dim != count) || values != count * dim) {
        throw Error(ErrorCode::DimensionMismatch,
                    "payload holds " + std::to_string(payload) + " bytes, header needs " +
                        std::to_string(count) + "x" + std::to_string(dim) + " floats");
    }

    std::vector<float> data(count * dim);
    const auto* q = p + kBembHeaderBytes;
    for (std::size_t i = 0; i < data.size(); ++i) {
        data[i] = std::bit_cast<float>(read_le<std::uint32_t>(q + 4 * i));
        if (!std::isfinite(data[i])) {
            const std::size_t row = i / dim;
            throw Error(ErrorCode::NonFiniteValue, "non-finite value in row " + std::to_string(row), row);
        }
    }

    const auto meta_path = sidecar_path(path);
    json meta;
    try {
        meta = json::parse(read_text_file(meta_path));
    } catch (const json::exception& e) {
        throw Error(ErrorCode::ParseError, meta_path.string() + ": " + e.what());
    }
    EmbeddingSet set;
    try {
        set.model_name = meta.at("model").get<std::string>();
        set.event_ids = meta.at("event_ids").get<std::vector<std::string>>();
    } catch (const json::exception& e) {
        throw Error(ErrorCode::ParseError, meta_path.string() + ": " + e.what());
    }
    if (set.event_ids.size() != count) {
        throw Error(ErrorCode::IdCountMismatch,
                    "sidecar lists " + std::to_string(set.event_ids.size()) + " ids for " +
                        std::to_string(count) + " rows",
                    set.event_ids.size());
    }
    set.data = MatrixF(count, dim, std::move(data));
    validate(set);
    return set;
}

EmbeddingSet load_embedding_csv(const fs::path& path, const std::string& text) {
    const auto lines = lines_of(text);
    std::vector<std::string> fields;
    std::size_t header_line = 0;
    while (header_line < lines.size() && is_blank(lines[header_line])) ++header_line;
    if (header_line == lines.size() || !try_split_csv(lines[header_line], fields) || fields.empty() ||
        fields[0] != "id") {
        throw Error(ErrorCode::MagicMismatch, path.string() + " is neither BEMB nor an id,e0,... CSV");
    }
    const std::size_t dim = fields.size() - 1;
    for (std::size_t c = 0; c < dim; ++c) {
        if (fields[c + 1] != "e" + std::to_string(c)) {
            throw Error(ErrorCode::ParseError, "unexpected column '" + fields[c + 1] + "'", header_line + 1);
        }
    }

    EmbeddingSet set;
    set.model_name = path.stem().string();
    std::vector<float> data;
    for (std::size_t li = header_line + 1; li < lines.size(); ++li) {
        if (is_blank(lines[li])) continue;
        if (!try_split_csv(lines[li], fields)) {
            throw Error(ErrorCode::ParseError, "unterminated quote", li + 1);
        }
        const std::size_t row = set.event_ids.size();
        if (fields.size() != dim + 1) {
            throw Error(ErrorCode::DimensionMismatch,
                        "row " + std::to_string(row) + " has " + std::to_string(fields.size() - 1) +
                            " values, expected " + std::to_string(dim),
                        row);
        }
        set.event_ids.push_back(fields[0]);
        for (std::size_t c = 0; c < dim; ++c) {
            float v = 0.0f;
            if (!parse_float(fields[c + 1], v)) {
                throw Error(ErrorCode::ParseError, "bad number '" + fields[c + 1] + "'", li + 1);
            }
            if (!std::isfinite(v)) {
                throw Error(ErrorCode::NonFiniteValue, "non-finite value in row " + std::to_string(row), row);
            }
            data.push_back(v);
        }
    }
    if (dim == 0 && !set.event_ids.empty()) {
        throw Error(ErrorCode::DimensionMismatch, "CSV rows without embedding columns");
    }
    set.data = MatrixF(set.event_ids.size(), dim, std::move(data));
    validate(set);
    return set;
}

}  // namespace

fs::path sidecar_path(const fs::path& bemb_path) {
    auto p = bemb_path;
    p.replace_extension();
    p += ".meta.json";
    return p;
}

std::string read_text_file(const fs::path& path) { return read_binary(path); }

void write_text_file(const fs::path& path, std::string_view content) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::IoFailure, "cannot open " + path.string() + " for writing");
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!out) throw Error(ErrorCode::IoFailure, "write failed for " + path.string());
}

EmbeddingSet load_embeddings(const fs::path& path) {
    const std::string bytes = read_binary(path);
    if (bytes.size() >= 4 && std::memcmp(bytes.data(), kMagic.data(), 4) == 0) {
        return load_bemb(path, bytes);
    }
    return load_embedding_csv(path, bytes);
}

void save_embeddings(const EmbeddingSet& set, const fs::path& path) {
    validate(set);
    std::string out;
    out.reserve(kBembHeaderBytes + 4 * set.data.values().size());
    out.append(reinterpret_cast<const char*>(kMagic.data()), kMagic.size());
    write_le<std::uint16_t>(out, kBembVersion);
    write_le<std::uint16_t>(out, 0);
    write_le<std::uint32_t>(out, static_cast<std::uint32_t>(set.dim()));
    write_le<std::uint64_t>(out, static_cast<std::uint64_t>(set.count()));
    for (float v : set.data.values()) write_le<std::uint32_t>(out, std::bit_cast<std::uint32_t>(v));
    write_text_file(path, out);

    json meta;
    meta["model"] = set.model_name;
    meta["event_ids"] = set.event_ids;
    write_text_file(sidecar_path(path), meta.dump() + "\n");
}

void save_embeddings_csv(const EmbeddingSet& set, const fs::path& path) {
    validate(set);
    std::string out = "id";
    for (std::size_t c = 0; c < set.dim(); ++c) out += ",e" + std::to_string(c);
    out += '\n';
    for (std::size_t r = 0; r < set.count(); ++r) {
        out += csv_escape(set.event_ids[r]);
        for (float v : set.data.row(r)) {
            std::array<char, 32> buf{};
            auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
            out += ',';
            out.append(buf.data(), ptr);
        }
        out += '\n';
    }
    write_text_file(path, out);
}

std::vector<std::string> split_csv_line(std::string_view line) {
    std::vector<std::string> fields;
    if (!try_split_csv(line, fields)) throw Error(ErrorCode::ParseError, "unterminated quote");
    return fields;
}

std::string csv_escape(std::string_view field) {
    if (field.find_first_of(",\"\n\r") == std::string_view::npos) return std::string(field);
    std::string out = "\"";
    for (char c : field) {
        if (c == '"') out += '"';
        out += c;
    }
    out += '"';
    return out;
}

std::string format_real(double value) {
    std::array<char, 32> buf{};
    auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), value);
    return std::string(buf.data(), ptr);
}

AnnotationTable parse_annotations(std::string_view text) {
    const auto lines = lines_of(text);
    std::vector<std::string> fields;
    std::size_t li = 0;
    while (li < lines.size() && is_blank(lines[li])) ++li;
    if (li == lines.size()) throw Error(ErrorCode::ParseError, "missing header", 1);
    if (!try_split_csv(lines[li], fields)) throw Error(ErrorCode::ParseError, "unterminated quote", li + 1);

    std::map<std::string, std::size_t> column;
    for (std::size_t c = 0; c < fields.size(); ++c) column.emplace(fields[c], c);
    for (const char* required : {"file", "start_s", "end_s", "label"}) {
        if (!column.contains(required)) {
            throw Error(ErrorCode::ParseError, std::string("header lacks column '") + required + "'", li + 1);
        }
    }
    const auto col_file = column.at("file");
    const auto col_start = column.at("start_s");
    const auto col_end = column.at("end_s");
    const auto col_label = column.at("label");
    const auto id_it = column.find("event_id");
    const std::size_t width = fields.size();

    AnnotationTable table;
    for (++li; li < lines.size(); ++li) {
        if (is_blank(lines[li])) continue;
        const std::size_t line_no = li + 1;
        if (!try_split_csv(lines[li], fields)) throw Error(ErrorCode::ParseError, "unterminated quote", line_no);
        if (fields.size() != width) {
            throw Error(ErrorCode::ParseError,
                        "expected " + std::to_string(width) + " fields, got " + std::to_string(fields.size()),
                        line_no);
        }
        AnnotationEvent e;
        e.file = fields[col_file];
        e.label = fields[col_label];
        if (!parse_double(fields[col_start], e.start_s) || !parse_double(fields[col_end], e.end_s)) {
            throw Error(ErrorCode::ParseError, "bad time value", line_no);
        }
        if (e.file.empty() || e.label.empty()) throw Error(ErrorCode::ParseError, "empty file or label", line_no);
        if (!(e.end_s > e.start_s)) {
            throw Error(ErrorCode::InvariantViolation, "end_s <= start_s", line_no);
        }
        if (!(e.start_s >= 0.0) || !std::isfinite(e.end_s)) {
            throw Error(ErrorCode::InvariantViolation, "start_s must be >= 0 and times finite", line_no);
        }
        e.event_id = id_it != column.end() ? fields[id_it->second]
                                           : e.file + "#" + std::to_string(table.rows.size());
        table.rows.push_back(std::move(e));
    }
    validate(table);
    return table;
}

AnnotationTable load_annotations(const fs::path& path) { return parse_annotations(read_text_file(path)); }

void save_annotations(const AnnotationTable& table, const fs::path& path) {
    std::string out = "event_id,file,start_s,end_s,label\n";
    for (const auto& e : table.rows) {
        out += csv_escape(e.event_id) + ',' + csv_escape(e.file) + ',' + format_real(e.start_s) + ',' +
               format_real(e.end_s) + ',' + csv_escape(e.label) + '\n';
    }
    write_text_file(path, out);
}

ModelRegistry parse_registry(std::string_view json_text) {
    json doc;
    try {
        doc = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw Error(ErrorCode::ParseError, e.what(), e.byte);
    }
    if (!doc.is_array()) throw Error(ErrorCode::ParseError, "registry must be a JSON array");

    ModelRegistry registry;
    for (std::size_t i = 0; i < doc.size(); ++i) {
        const auto& item = doc[i];
        RegistryEntry e;
        try {
            e.name = item.at("name").get<std::string>();
            e.abbrev = item.value("abbrev", std::string{});
            const auto training = item.at("training").get<std::string>();
            const auto parsed = parse_training(training);
            if (!parsed) throw Error(ErrorCode::ParseError, "unknown training '" + training + "'", i);
            e.training = *parsed;
            const auto dim = item.at("dimension").get<std::int64_t>();
            if (dim <= 0) throw Error(ErrorCode::InvariantViolation, "dimension must be positive", i);
            e.dimension = static_cast<std::uint32_t>(dim);
            e.domains = item.value("domains", std::vector<std::string>{});
        } catch (const json::exception& ex) {
            throw Error(ErrorCode::ParseError, "entry " + std::to_string(i) + ": " + ex.what(), i);
        }
        const bool bird = std::find(e.domains.begin(), e.domains.end(), kBirdDomain) != e.domains.end();
        if (item.contains("is_bird_trained") && item["is_bird_trained"].is_boolean() &&
            item["is_bird_trained"].get<bool>() != bird) {
            throw Error(ErrorCode::InvariantViolation,
                        "is_bird_trained disagrees with domains for '" + e.name + "'", i);
        }
        registry.entries.push_back(std::move(e));
    }
    validate(registry);
    return registry;
}

ModelRegistry load_registry(const fs::path& path) { return parse_registry(read_text_file(path)); }

}  // namespace embeval
