#include "forumqa/ingest/cleaning.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <map>

#include "forumqa/error.hpp"
#include "forumqa/util/utf8.hpp"

namespace forumqa::ingest {

namespace {

std::string_view trim(std::string_view s) {
  std::size_t b = 0;
  while (b < s.size()) {
    std::size_t p = b;
    if (!utf8::is_space(utf8::decode(s, p))) break;
    b = p;
  }
  // Walk back over trailing whitespace one code point at a time.
  std::size_t e = s.size();
  while (e > b) {
    std::size_t start = e - 1;
    while (start > b && (static_cast<unsigned char>(s[start]) & 0xC0) == 0x80) --start;
    std::size_t p = start;
    if (!utf8::is_space(utf8::decode(s, p))) break;
    e = start;
  }
  return s.substr(b, e - b);
}

std::vector<std::string> split_lines(std::string_view s) {
  std::vector<std::string> lines;
  std::size_t start = 0;
  while (true) {
    const std::size_t nl = s.find('\n', start);
    if (nl == std::string_view::npos) {
      lines.emplace_back(s.substr(start));
      break;
    }
    lines.emplace_back(s.substr(start, nl - start));
    start = nl + 1;
  }
  return lines;
}

// Header/footer identity ignores page numbers.
std::string line_key(std::string_view line) {
  std::string key;
  bool in_digits = false;
  for (char c : line) {
    if (std::isdigit(static_cast<unsigned char>(c))) {
      if (!in_digits) key.push_back('#');
      in_digits = true;
    } else {
      key.push_back(c);
      in_digits = false;
    }
  }
  return key;
}

using Page = std::vector<std::string>;

// Removes one round of repeated first (or last) non-empty lines. Returns true
// when something was removed.
bool strip_repeated_edge(std::vector<Page>& pages, std::size_t threshold, bool header) {
  auto edge_index = [header](const Page& page) -> std::ptrdiff_t {
    if (header) {
      for (std::size_t i = 0; i < page.size(); ++i)
        if (!page[i].empty()) return static_cast<std::ptrdiff_t>(i);
    } else {
      for (std::size_t i = page.size(); i-- > 0;)
        if (!page[i].empty()) return static_cast<std::ptrdiff_t>(i);
    }
    return -1;
  };
  std::map<std::string, std::size_t> counts;
  for (const auto& page : pages) {
    const auto idx = edge_index(page);
    if (idx >= 0) ++counts[line_key(page[static_cast<std::size_t>(idx)])];
  }
  bool removed = false;
  for (auto& page : pages) {
    const auto idx = edge_index(page);
    if (idx < 0) continue;
    if (counts[line_key(page[static_cast<std::size_t>(idx)])] >= threshold) {
      page.erase(page.begin() + idx);
      removed = true;
    }
  }
  return removed;
}

constexpr std::array<std::string_view, 24> kAbbreviations = {
    "mr", "mrs", "ms", "dr", "prof", "sr", "jr", "st", "vs", "etc", "e.g", "i.e",
    "no", "vol", "fig", "approx", "dept", "est", "inc", "ltd", "co", "mt", "jan", "feb"};

bool is_abbreviation(std::string_view word) {
  std::string lower;
  for (char c : word) lower.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
  while (!lower.empty() && (lower.front() == '(' || lower.front() == '"' || lower.front() == '\''))
    lower.erase(lower.begin());
  if (lower.size() == 1 && std::isalpha(static_cast<unsigned char>(lower[0]))) return true;  // initials
  return std::find(kAbbreviations.begin(), kAbbreviations.end(), lower) != kAbbreviations.end();
}

bool is_closer(char c) { return c == '"' || c == '\'' || c == ')' || c == ']'; }
bool is_opener(char c) { return c == '"' || c == '\'' || c == '(' || c == '['; }

}  // namespace

std::string clean_document(std::string_view text, std::size_t repeat_threshold) {
  std::string normalized;
  normalized.reserve(text.size());
  for (std::size_t i = 0; i < text.size(); ++i) {
    if (text[i] == '\r') {
      normalized.push_back('\n');
      if (i + 1 < text.size() && text[i + 1] == '\n') ++i;
    } else {
      normalized.push_back(text[i]);
    }
  }

  std::vector<Page> pages;
  std::size_t start = 0;
  while (true) {
    const std::size_t ff = normalized.find('\f', start);
    const std::string_view chunk =
        std::string_view(normalized).substr(start, ff == std::string::npos ? std::string::npos : ff - start);
    Page page;
    for (const auto& line : split_lines(chunk)) page.emplace_back(trim(line));
    pages.push_back(std::move(page));
    if (ff == std::string::npos) break;
    start = ff + 1;
  }

  if (repeat_threshold >= 2 && pages.size() >= repeat_threshold) {
    bool changed = true;
    while (changed) {
      changed = strip_repeated_edge(pages, repeat_threshold, true);
      changed = strip_repeated_edge(pages, repeat_threshold, false) || changed;
    }
  }

  std::string joined;
  for (std::size_t p = 0; p < pages.size(); ++p) {
    if (p > 0) joined += "\n\n";
    for (std::size_t i = 0; i < pages[p].size(); ++i) {
      if (i > 0) joined.push_back('\n');
      joined += pages[p][i];
    }
  }

  std::string out;
  out.reserve(joined.size());
  std::size_t i = 0;
  while (i < joined.size() && joined[i] == '\n') ++i;
  while (i < joined.size()) {
    if (joined[i] != '\n') {
      out.push_back(joined[i++]);
      continue;
    }
    std::size_t run = 0;
    while (i < joined.size() && joined[i] == '\n') {
      ++run;
      ++i;
    }
    if (i == joined.size()) {
      out.push_back('\n');
    } else {
      out.append(std::min<std::size_t>(run, 2), '\n');
    }
  }
  return out;
}

std::vector<ByteSpan> word_spans(std::string_view text) {
  std::vector<ByteSpan> words;
  std::size_t pos = 0;
  std::size_t word_start = std::string_view::npos;
  while (pos < text.size()) {
    const std::size_t here = pos;
    const char32_t cp = utf8::decode(text, pos);
    if (utf8::is_space(cp)) {
      if (word_start != std::string_view::npos) words.push_back({word_start, here});
      word_start = std::string_view::npos;
    } else if (word_start == std::string_view::npos) {
      word_start = here;
    }
  }
  if (word_start != std::string_view::npos) words.push_back({word_start, text.size()});
  return words;
}

std::size_t word_count(std::string_view text) { return word_spans(text).size(); }

std::vector<ByteSpan> sentence_spans(std::string_view text) {
  const auto words = word_spans(text);
  std::vector<ByteSpan> sentences;
  if (words.empty()) return sentences;

  std::size_t sentence_start = words.front().begin;
  for (std::size_t w = 0; w + 1 < words.size(); ++w) {
    const std::string_view word = text.substr(words[w].begin, words[w].end - words[w].begin);
    const std::string_view gap = text.substr(words[w].end, words[w + 1].begin - words[w].end);
    const std::string_view next = text.substr(words[w + 1].begin, words[w + 1].end - words[w + 1].begin);

    bool boundary = std::count(gap.begin(), gap.end(), '\n') >= 2;
    if (!boundary) {
      std::size_t end = word.size();
      while (end > 0 && is_closer(word[end - 1])) --end;
      const bool terminal = end > 0 && (word[end - 1] == '.' || word[end - 1] == '!' || word[end - 1] == '?');
      if (terminal) {
        std::size_t n = 0;
        while (n < next.size() && is_opener(next[n])) ++n;
        const bool starts_upper =
            n < next.size() && (std::isupper(static_cast<unsigned char>(next[n])) ||
                                std::isdigit(static_cast<unsigned char>(next[n])));
        std::size_t stem_end = end;
        while (stem_end > 0 && (word[stem_end - 1] == '.' || word[stem_end - 1] == '!' || word[stem_end - 1] == '?'))
          --stem_end;
        const bool abbreviation = word[end - 1] == '.' && end - stem_end == 1 && is_abbreviation(word.substr(0, stem_end));
        boundary = starts_upper && !abbreviation;
      }
    }
    if (boundary) {
      sentences.push_back({sentence_start, words[w].end});
      sentence_start = words[w + 1].begin;
    }
  }
  sentences.push_back({sentence_start, words.back().end});
  return sentences;
}

namespace {

struct Unit {
  ByteSpan bytes;
  std::size_t first_word;
  std::size_t words;
};

}  // namespace

std::vector<SplitPiece> split_with_overlap(const CleanDocument& doc, std::size_t max_words,
                                           std::size_t overlap_words) {
  if (max_words == 0) throw ParameterError("max_words must be positive");
  if (overlap_words >= max_words) throw ParameterError("overlap_words must be smaller than max_words");

  const auto words = word_spans(doc.text);
  if (words.empty()) return {};
  if (words.size() <= max_words) {
    return {SplitPiece{doc, {0, doc.text.size()}, 0, words.size(), 0}};
  }

  // Sentences, with over-long ones cut into max_words chunks.
  std::vector<Unit> units;
  std::size_t w = 0;
  for (const auto& sentence : sentence_spans(doc.text)) {
    std::size_t first = w;
    while (w < words.size() && words[w].end <= sentence.end) ++w;
    for (std::size_t chunk = first; chunk < w; chunk += max_words) {
      const std::size_t last = std::min(w, chunk + max_words);
      units.push_back({{words[chunk].begin, words[last - 1].end}, chunk, last - chunk});
    }
  }

  auto words_in = [&units](std::size_t from, std::size_t to) {
    std::size_t n = 0;
    for (std::size_t i = from; i < to; ++i) n += units[i].words;
    return n;
  };

  std::vector<SplitPiece> pieces;
  std::size_t start = 0;
  std::size_t overlap = 0;
  while (true) {
    std::size_t end = start;
    std::size_t total = 0;
    while (end < units.size() && total + units[end].words <= max_words) total += units[end++].words;

    SplitPiece piece;
    piece.source = {units[start].bytes.begin, units[end - 1].bytes.end};
    piece.first_word = units[start].first_word;
    piece.word_count = total;
    piece.overlap_words = overlap;
    piece.document.doc_id = doc.doc_id + "-" + std::to_string(pieces.size());
    piece.document.text = doc.text.substr(piece.source.begin, piece.source.end - piece.source.begin);
    piece.document.source_post_ids = doc.source_post_ids;
    pieces.push_back(std::move(piece));
    if (end == units.size()) break;

    std::size_t next = end;
    if (overlap_words > 0) {
      next = end - 1;
      while (next > start + 1 && words_in(next, end) < overlap_words) --next;
      if (next <= start) next = end;
      while (next < end && words_in(next, end) + units[end].words > max_words) ++next;
    }
    overlap = words_in(next, end);
    start = next;
  }
  return pieces;
}

}  // namespace forumqa::ingest
