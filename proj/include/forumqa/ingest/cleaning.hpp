#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace forumqa::ingest {

struct CleanDocument {
  std::string doc_id;
  std::string text;
  std::vector<std::string> source_post_ids;

  bool operator==(const CleanDocument&) const = default;
};

/// Normalizes a document:
///  - CRLF to LF, every line trimmed of surrounding whitespace;
///  - pages are separated by form feeds; a first or last line that repeats
///    (digits ignored) on at least `repeat_threshold` pages is dropped as a
///    header or footer; thresholds below 2 disable this rule;
///  - runs of blank lines collapse to a single blank line, leading blank lines
///    go, and at most one trailing newline is kept.
/// Idempotent.
std::string clean_document(std::string_view text, std::size_t repeat_threshold = 3);

struct ByteSpan {
  std::size_t begin = 0;
  std::size_t end = 0;
  bool operator==(const ByteSpan&) const = default;
};

// Sentence spans in byte offsets. A sentence ends at . ! or ? (plus closing
// quotes) followed by whitespace and an uppercase letter or digit, skipping
// common abbreviations, or at a blank line. The end of the text always closes
// the last sentence.
std::vector<ByteSpan> sentence_spans(std::string_view text);

// Whitespace-delimited words as byte spans.
std::vector<ByteSpan> word_spans(std::string_view text);
std::size_t word_count(std::string_view text);

struct SplitPiece {
  CleanDocument document;
  ByteSpan source;                // byte range in the source text
  std::size_t first_word = 0;     // index of the first word in the source word sequence
  std::size_t word_count = 0;
  std::size_t overlap_words = 0;  // leading words shared with the previous piece
};

/// Splits at sentence boundaries into pieces of at most `max_words` words.
/// Each piece after the first repeats the shortest run of whole trailing
/// sentences of its predecessor holding at least `overlap_words` words, shrunk
/// when needed to respect the bound. A single sentence longer than
/// `max_words` is cut at word boundaries. A document that already fits is
/// returned unchanged as the only piece.
std::vector<SplitPiece> split_with_overlap(const CleanDocument& doc, std::size_t max_words,
                                           std::size_t overlap_words);

}  // namespace forumqa::ingest
