#include "forumqa/ingest/corpus.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cstdio>
#include <iterator>
#include <optional>
#include <set>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include "forumqa/error.hpp"
#include "forumqa/ingest/cleaning.hpp"
#include "forumqa/util/fileio.hpp"
#include "forumqa/util/hash.hpp"
#include "forumqa/util/utf8.hpp"
#include "html_posts.hpp"

namespace forumqa::ingest {

namespace {

// A record before validation; either `author_ref` or `username` is set.
struct Candidate {
  std::string post_id;
  std::string date;
  std::string author_ref;
  std::string username;
  std::string body;
  bool well_formed = true;
};

std::optional<std::string> json_text(const nlohmann::json& j, std::initializer_list<const char*> keys) {
  for (const char* key : keys) {
    auto it = j.find(key);
    if (it == j.end() || it->is_null()) continue;
    if (it->is_string()) return it->get<std::string>();
    if (it->is_number_integer()) return std::to_string(it->get<long long>());
  }
  return std::nullopt;
}

std::vector<Candidate> parse_jsonl(std::string_view input) {
  std::vector<Candidate> out;
  std::size_t start = 0;
  while (start < input.size()) {
    std::size_t nl = input.find('\n', start);
    if (nl == std::string_view::npos) nl = input.size();
    std::string_view line = input.substr(start, nl - start);
    start = nl + 1;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.find_first_not_of(" \t") == std::string_view::npos) continue;

    Candidate c;
    try {
      const auto j = nlohmann::json::parse(line);
      if (!j.is_object()) throw std::runtime_error("not an object");
      auto id = json_text(j, {"post_id", "id"});
      auto date = json_text(j, {"posted_at", "date"});
      auto body = json_text(j, {"body", "text", "content"});
      auto ref = json_text(j, {"author_ref"});
      auto user = json_text(j, {"author", "username", "user"});
      if (!id || !date || !body || (!ref && !user)) {
        c.well_formed = false;
      } else {
        c.post_id = *id;
        c.date = *date;
        c.body = *body;
        if (ref) c.author_ref = *ref;
        else c.username = *user;
      }
    } catch (const std::exception&) {
      c.well_formed = false;
    }
    out.push_back(std::move(c));
  }
  return out;
}

std::vector<std::vector<std::string>> parse_csv_rows(std::string_view input) {
  std::vector<std::vector<std::string>> rows;
  std::vector<std::string> row;
  std::string field;
  bool in_quotes = false;
  bool row_started = false;
  std::size_t quote_start = 0;
  for (std::size_t i = 0; i < input.size(); ++i) {
    const char c = input[i];
    if (in_quotes) {
      if (c == '"') {
        if (i + 1 < input.size() && input[i + 1] == '"') {
          field.push_back('"');
          ++i;
        } else {
          in_quotes = false;
        }
      } else {
        field.push_back(c);
      }
      continue;
    }
    switch (c) {
      case '"':
        in_quotes = true;
        quote_start = i;
        row_started = true;
        break;
      case ',':
        row.push_back(std::move(field));
        field.clear();
        row_started = true;
        break;
      case '\r':
        break;
      case '\n':
        if (row_started || !field.empty()) {
          row.push_back(std::move(field));
          rows.push_back(std::move(row));
        }
        field.clear();
        row.clear();
        row_started = false;
        break;
      default:
        field.push_back(c);
        row_started = true;
    }
  }
  if (in_quotes) throw FormatError("unterminated quoted CSV field", quote_start);
  if (row_started || !field.empty()) {
    row.push_back(std::move(field));
    rows.push_back(std::move(row));
  }
  return rows;
}

std::string lower_trim(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
  const auto b = s.find_first_not_of(" \t");
  if (b == std::string::npos) return {};
  return s.substr(b, s.find_last_not_of(" \t") - b + 1);
}

std::vector<Candidate> parse_csv(std::string_view input) {
  auto rows = parse_csv_rows(input);
  if (rows.empty()) return {};
  const auto& header = rows.front();
  auto column = [&header](std::initializer_list<const char*> names) -> std::optional<std::size_t> {
    for (const char* name : names)
      for (std::size_t i = 0; i < header.size(); ++i)
        if (lower_trim(header[i]) == name) return i;
    return std::nullopt;
  };
  const auto id_col = column({"post_id", "id"});
  const auto date_col = column({"posted_at", "date"});
  const auto body_col = column({"body", "text", "content"});
  const auto ref_col = column({"author_ref"});
  const auto user_col = column({"author", "username", "user"});
  if (!id_col || !date_col || !body_col || (!ref_col && !user_col))
    throw FormatError("CSV header lacks post_id/posted_at/author/body columns", 0);

  std::vector<Candidate> out;
  for (std::size_t r = 1; r < rows.size(); ++r) {
    const auto& row = rows[r];
    Candidate c;
    auto cell = [&row](std::optional<std::size_t> col) -> std::string {
      return col && *col < row.size() ? row[*col] : std::string{};
    };
    c.post_id = cell(id_col);
    c.date = cell(date_col);
    c.body = cell(body_col);
    if (ref_col) c.author_ref = cell(ref_col);
    else c.username = cell(user_col);
    const bool short_row = row.size() < header.size();
    c.well_formed = !short_row && !c.post_id.empty() && !c.body.empty() &&
                    (!c.author_ref.empty() || !c.username.empty());
    out.push_back(std::move(c));
  }
  return out;
}

std::vector<Candidate> parse_html(std::string_view input) {
  std::vector<Candidate> out;
  for (auto& rec : detail::extract_html_posts(input)) {
    Candidate c;
    c.post_id = std::move(rec.post_id);
    c.date = std::move(rec.date);
    c.username = std::move(rec.author);
    c.body = std::move(rec.body);
    c.well_formed = !c.post_id.empty() && !c.username.empty() && !c.body.empty();
    out.push_back(std::move(c));
  }
  return out;
}

bool is_word_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; }

// Replaces whole-word occurrences of `name` with `replacement`.
std::string redact(std::string text, const std::string& name, const std::string& replacement) {
  if (name.empty()) return text;
  std::size_t pos = 0;
  while ((pos = text.find(name, pos)) != std::string::npos) {
    const bool left_ok = pos == 0 || !is_word_char(text[pos - 1]) || !is_word_char(name.front());
    const std::size_t after = pos + name.size();
    const bool right_ok = after >= text.size() || !is_word_char(text[after]) || !is_word_char(name.back());
    if (left_ok && right_ok) {
      text.replace(pos, name.size(), replacement);
      pos += replacement.size();
    } else {
      ++pos;
    }
  }
  return text;
}

class Redactor {
 public:
  Redactor(const std::set<std::string>& usernames, const std::string& key) {
    for (const auto& name : usernames) {
      const bool simple = std::all_of(name.begin(), name.end(), is_word_char);
      if (simple) simple_.emplace(name, pseudonymize(name, key));
      else complex_.emplace_back(name, pseudonymize(name, key));
    }
    // Longest first so a name containing another is replaced whole.
    std::stable_sort(complex_.begin(), complex_.end(),
                     [](const auto& a, const auto& b) { return a.first.size() > b.first.size(); });
  }

  std::string apply(std::string text) const {
    for (const auto& [name, ref] : complex_) text = redact(std::move(text), name, ref);
    if (simple_.empty()) return text;
    std::string out;
    out.reserve(text.size());
    std::size_t i = 0;
    while (i < text.size()) {
      if (!is_word_char(text[i])) {
        out.push_back(text[i++]);
        continue;
      }
      std::size_t j = i;
      while (j < text.size() && is_word_char(text[j])) ++j;
      const std::string word = text.substr(i, j - i);
      auto it = simple_.find(word);
      out += it == simple_.end() ? word : it->second;
      i = j;
    }
    return out;
  }

 private:
  std::unordered_map<std::string, std::string> simple_;
  std::vector<std::pair<std::string, std::string>> complex_;
};

}  // namespace

InputFormat parse_format(std::string_view name) {
  if (name == "jsonl") return InputFormat::kJsonl;
  if (name == "csv") return InputFormat::kCsv;
  if (name == "html" || name == "saved_html_thread") return InputFormat::kHtml;
  throw ParameterError("unknown input format: " + std::string(name));
}

std::string pseudonymize(std::string_view username, std::string_view key) {
  return "u_" + hash::hmac_sha256_hex(key, username).substr(0, 16);
}

std::string format_date(const std::chrono::year_month_day& date) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", static_cast<int>(date.year()),
                static_cast<unsigned>(date.month()), static_cast<unsigned>(date.day()));
  return buf;
}

bool parse_date(std::string_view text, std::chrono::year_month_day& out) {
  while (!text.empty() && std::isspace(static_cast<unsigned char>(text.front()))) text.remove_prefix(1);
  if (text.size() < 10 || text[4] != '-' || text[7] != '-') return false;
  if (text.size() > 10 && text[10] != 'T' && text[10] != ' ') return false;
  int y = 0;
  unsigned m = 0, d = 0;
  auto parse = [](std::string_view s, auto& v) {
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    return ec == std::errc{} && p == s.data() + s.size();
  };
  if (!parse(text.substr(0, 4), y) || !parse(text.substr(5, 2), m) || !parse(text.substr(8, 2), d)) return false;
  const std::chrono::year_month_day ymd{std::chrono::year{y}, std::chrono::month{m}, std::chrono::day{d}};
  if (!ymd.ok()) return false;
  out = ymd;
  return true;
}

ParseResult parse_post_dump(std::string_view input, InputFormat format, const IngestOptions& options) {
  if (auto bad = utf8::find_invalid(input)) throw FormatError("invalid UTF-8", *bad);

  std::vector<Candidate> candidates;
  switch (format) {
    case InputFormat::kJsonl: candidates = parse_jsonl(input); break;
    case InputFormat::kCsv: candidates = parse_csv(input); break;
    case InputFormat::kHtml: candidates = parse_html(input); break;
  }

  ParseResult result;
  result.stats.records = candidates.size();

  std::set<std::string> usernames;
  for (const auto& c : candidates)
    if (c.well_formed && !c.username.empty()) usernames.insert(c.username);

  const Redactor redactor(usernames, options.pseudonym_key);
  std::unordered_set<std::string> seen;
  for (auto& c : candidates) {
    RawPost post;
    if (!c.well_formed || !parse_date(c.date, post.posted_at)) {
      ++result.stats.malformed;
      continue;
    }
    if (!seen.insert(c.post_id).second) {
      ++result.stats.duplicates;
      continue;
    }
    post.post_id = std::move(c.post_id);
    post.author_ref = c.author_ref.empty() ? pseudonymize(c.username, options.pseudonym_key) : c.author_ref;
    std::string body = clean_document(redactor.apply(std::move(c.body)), options.repeat_threshold);
    while (!body.empty() && body.back() == '\n') body.pop_back();
    if (body.empty()) {
      ++result.stats.empty_bodies;
      continue;
    }
    post.body = std::move(body);
    result.posts.push_back(std::move(post));
  }
  if (result.posts.empty()) throw EmptyCorpusError("no posts parsed from input");
  return result;
}

ParseResult parse_post_dump(std::istream& input, InputFormat format, const IngestOptions& options) {
  std::string bytes{std::istreambuf_iterator<char>(input), std::istreambuf_iterator<char>()};
  return parse_post_dump(bytes, format, options);
}

nlohmann::json to_json(const RawPost& post) {
  return nlohmann::json{{"post_id", post.post_id},
                        {"posted_at", format_date(post.posted_at)},
                        {"author_ref", post.author_ref},
                        {"body", post.body}};
}

RawPost post_from_json(const nlohmann::json& j) {
  RawPost post;
  try {
    post.post_id = j.at("post_id").get<std::string>();
    post.author_ref = j.at("author_ref").get<std::string>();
    post.body = j.at("body").get<std::string>();
    if (!parse_date(j.at("posted_at").get<std::string>(), post.posted_at))
      throw ValidationError("bad posted_at for post " + post.post_id);
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("corpus record: ") + e.what());
  }
  return post;
}

void write_corpus(const std::string& path, const std::vector<RawPost>& posts) {
  std::vector<nlohmann::json> rows;
  rows.reserve(posts.size());
  for (const auto& p : posts) rows.push_back(to_json(p));
  fileio::write_jsonl_atomic(path, rows);
}

std::vector<RawPost> read_corpus(const std::string& path) {
  std::vector<RawPost> posts;
  for (const auto& row : fileio::read_jsonl(path)) posts.push_back(post_from_json(row));
  return posts;
}

}  // namespace forumqa::ingest
