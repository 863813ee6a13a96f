#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace forumqa::ingest::detail {

struct HtmlPostRecord {
  std::string post_id;
  std::string date;
  std::string author;
  std::string body;
  std::size_t byte_offset = 0;
};

// Extracts post blocks from a saved thread page. A post block is any element
// carrying `data-post-id` or an id of the form `post_<id>` / `post-<id>`.
// Inside it, the author comes from the first element whose class mentions
// "username" or "author", the date from a <time datetime> attribute or an
// element with class "date", and the body from the first element whose class
// mentions "postcontent", "post-content", "post-body" or "message".
std::vector<HtmlPostRecord> extract_html_posts(std::string_view html);

std::string decode_entities(std::string_view text);

}  // namespace forumqa::ingest::detail
