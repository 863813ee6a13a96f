#pragma once

#include <chrono>
#include <cstddef>
#include <istream>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

namespace forumqa::ingest {

/// One forum post, the corpus atom. `author_ref` is always a pseudonym.
struct RawPost {
  std::string post_id;
  std::chrono::year_month_day posted_at{};
  std::string author_ref;
  std::string body;

  bool operator==(const RawPost&) const = default;
};

enum class InputFormat { kJsonl, kCsv, kHtml };

InputFormat parse_format(std::string_view name);

struct ParseStats {
  std::size_t records = 0;       // candidate records seen
  std::size_t malformed = 0;     // unparseable or missing required fields
  std::size_t duplicates = 0;    // repeated post_id
  std::size_t empty_bodies = 0;  // body empty after cleaning
  std::size_t skipped() const { return malformed + duplicates + empty_bodies; }
};

struct ParseResult {
  std::vector<RawPost> posts;
  ParseStats stats;
};

struct IngestOptions {
  // Key for the username pseudonymization hash.
  std::string pseudonym_key = "forumqa-default-key";
  std::size_t repeat_threshold = 3;
};

/// Parses a saved forum export into posts in file order.
///
/// Records that carry a raw `author`/`username` are pseudonymized with a keyed
/// hash and every known username is redacted from bodies. Records that already
/// carry `author_ref` keep it. Malformed records are counted and skipped.
/// Throws FormatError (with byte offset) for undecodable input and
/// EmptyCorpusError when no post survives.
ParseResult parse_post_dump(std::string_view input, InputFormat format, const IngestOptions& options = {});
ParseResult parse_post_dump(std::istream& input, InputFormat format, const IngestOptions& options = {});

std::string pseudonymize(std::string_view username, std::string_view key);

std::string format_date(const std::chrono::year_month_day& date);
// Accepts "YYYY-MM-DD" optionally followed by a time part.
bool parse_date(std::string_view text, std::chrono::year_month_day& out);

nlohmann::json to_json(const RawPost& post);
RawPost post_from_json(const nlohmann::json& j);

// Canonical corpus file: JSON Lines with exactly post_id/posted_at/author_ref/body.
void write_corpus(const std::string& path, const std::vector<RawPost>& posts);
std::vector<RawPost> read_corpus(const std::string& path);

}  // namespace forumqa::ingest
