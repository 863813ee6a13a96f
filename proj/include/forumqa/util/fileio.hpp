#pragma once

#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

namespace forumqa::fileio {

std::string read_file(const std::string& path);

// Writes to a sibling temp file, fsyncs, then renames over `path`.
void write_file_atomic(const std::string& path, std::string_view contents);

// Appends one line and fsyncs before returning.
void append_line_durable(const std::string& path, std::string_view line);

std::vector<nlohmann::json> read_jsonl(const std::string& path);
void write_jsonl_atomic(const std::string& path, const std::vector<nlohmann::json>& rows);

nlohmann::json read_json(const std::string& path);

// Stable serialization: sorted keys, two-space indent, trailing newline.
std::string dump_stable(const nlohmann::json& j);

}  // namespace forumqa::fileio
