#include "html_posts.hpp"

#include <algorithm>
#include <cctype>
#include <functional>
#include <map>
#include <optional>
#include <regex>

#include "forumqa/util/utf8.hpp"

namespace forumqa::ingest::detail {

namespace {

struct Node {
  std::string tag;  // empty for text nodes
  std::map<std::string, std::string> attrs;
  std::string text;
  std::vector<std::size_t> children;
  std::size_t offset = 0;
};

std::string lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(), [](unsigned char c) { return std::tolower(c); });
  return out;
}

bool is_void(const std::string& tag) {
  static const char* kVoid[] = {"area", "base", "br", "col", "embed", "hr", "img", "input",
                                "link", "meta", "param", "source", "track", "wbr"};
  return std::any_of(std::begin(kVoid), std::end(kVoid), [&](const char* v) { return tag == v; });
}

bool is_block(const std::string& tag) {
  static const char* kBlock[] = {"div", "li", "tr", "ul", "ol", "pre", "h1", "h2", "h3",
                                 "h4", "h5", "h6", "table", "section", "article", "header", "footer"};
  return std::any_of(std::begin(kBlock), std::end(kBlock), [&](const char* v) { return tag == v; });
}

class Parser {
 public:
  explicit Parser(std::string_view html) : html_(html) { nodes_.push_back(Node{"#root", {}, {}, {}, 0}); }

  std::vector<Node> parse() {
    std::vector<std::size_t> stack{0};
    while (pos_ < html_.size()) {
      if (html_[pos_] != '<') {
        const std::size_t next = html_.find('<', pos_);
        const std::size_t end = next == std::string_view::npos ? html_.size() : next;
        add_child(stack.back(), Node{"", {}, std::string(html_.substr(pos_, end - pos_)), {}, pos_});
        pos_ = end;
        continue;
      }
      if (html_.compare(pos_, 4, "<!--") == 0) {
        skip_past("-->");
        continue;
      }
      if (pos_ + 1 < html_.size() && (html_[pos_ + 1] == '!' || html_[pos_ + 1] == '?')) {
        skip_past(">");
        continue;
      }
      if (pos_ + 1 < html_.size() && html_[pos_ + 1] == '/') {
        pos_ += 2;
        const std::string name = lower(read_name());
        skip_past(">");
        auto it = std::find_if(stack.rbegin(), stack.rend(), [&](std::size_t i) { return nodes_[i].tag == name; });
        if (it != stack.rend()) stack.erase(std::next(it).base(), stack.end());
        continue;
      }
      const std::size_t tag_offset = pos_;
      ++pos_;
      Node node;
      node.tag = lower(read_name());
      node.offset = tag_offset;
      if (node.tag.empty()) {
        add_child(stack.back(), Node{"", {}, "<", {}, tag_offset});
        continue;
      }
      const bool self_closing = read_attributes(node.attrs);
      const std::string tag = node.tag;
      const std::size_t idx = add_child(stack.back(), std::move(node));
      if (tag == "script" || tag == "style") {
        const std::size_t close = lower(html_.substr(pos_)).find("</" + tag);
        pos_ = close == std::string::npos ? html_.size() : pos_ + close;
        skip_past(">");
        continue;
      }
      if (!self_closing && !is_void(tag)) stack.push_back(idx);
    }
    return std::move(nodes_);
  }

 private:
  std::size_t add_child(std::size_t parent, Node node) {
    nodes_.push_back(std::move(node));
    const std::size_t idx = nodes_.size() - 1;
    nodes_[parent].children.push_back(idx);
    return idx;
  }

  void skip_past(std::string_view marker) {
    const std::size_t at = html_.find(marker, pos_);
    pos_ = at == std::string_view::npos ? html_.size() : at + marker.size();
  }

  std::string read_name() {
    const std::size_t start = pos_;
    while (pos_ < html_.size() && (std::isalnum(static_cast<unsigned char>(html_[pos_])) || html_[pos_] == '-' ||
                                   html_[pos_] == '_' || html_[pos_] == ':'))
      ++pos_;
    return std::string(html_.substr(start, pos_ - start));
  }

  void skip_space() {
    while (pos_ < html_.size() && std::isspace(static_cast<unsigned char>(html_[pos_]))) ++pos_;
  }

  // Returns true for a self-closing tag.
  bool read_attributes(std::map<std::string, std::string>& attrs) {
    while (pos_ < html_.size()) {
      skip_space();
      if (pos_ >= html_.size()) return false;
      if (html_[pos_] == '>') {
        ++pos_;
        return false;
      }
      if (html_[pos_] == '/') {
        ++pos_;
        skip_space();
        if (pos_ < html_.size() && html_[pos_] == '>') {
          ++pos_;
          return true;
        }
        continue;
      }
      std::string name = lower(read_name());
      if (name.empty()) {
        ++pos_;
        continue;
      }
      skip_space();
      std::string value;
      if (pos_ < html_.size() && html_[pos_] == '=') {
        ++pos_;
        skip_space();
        if (pos_ < html_.size() && (html_[pos_] == '"' || html_[pos_] == '\'')) {
          const char quote = html_[pos_++];
          const std::size_t end = html_.find(quote, pos_);
          const std::size_t stop = end == std::string_view::npos ? html_.size() : end;
          value = std::string(html_.substr(pos_, stop - pos_));
          pos_ = std::min(html_.size(), stop + 1);
        } else {
          const std::size_t start = pos_;
          while (pos_ < html_.size() && !std::isspace(static_cast<unsigned char>(html_[pos_])) && html_[pos_] != '>')
            ++pos_;
          value = std::string(html_.substr(start, pos_ - start));
        }
      }
      attrs.emplace(std::move(name), decode_entities(value));
    }
    return false;
  }

  std::string_view html_;
  std::size_t pos_ = 0;
  std::vector<Node> nodes_;
};

class PostExtractor {
 public:
  explicit PostExtractor(std::vector<Node> nodes) : nodes_(std::move(nodes)) {}

  std::vector<HtmlPostRecord> run() {
    std::vector<HtmlPostRecord> out;
    visit(0, out);
    return out;
  }

 private:
  static std::optional<std::string> post_id_of(const Node& node) {
    if (auto it = node.attrs.find("data-post-id"); it != node.attrs.end() && !it->second.empty()) return it->second;
    if (auto it = node.attrs.find("id"); it != node.attrs.end()) {
      // "post_1001", "post-ab12", "post42"; not "posts".
      static const std::regex kId(R"(post(?:[_-]([A-Za-z0-9]+)|([0-9]+)))", std::regex::icase);
      std::smatch m;
      if (std::regex_match(it->second, m, kId)) return m[1].matched ? m[1].str() : m[2].str();
    }
    return std::nullopt;
  }

  static bool class_mentions(const Node& node, std::initializer_list<std::string_view> needles) {
    auto it = node.attrs.find("class");
    if (it == node.attrs.end()) return false;
    const std::string cls = lower(it->second);
    return std::any_of(needles.begin(), needles.end(),
                       [&](std::string_view n) { return cls.find(n) != std::string::npos; });
  }

  void visit(std::size_t idx, std::vector<HtmlPostRecord>& out) {
    const Node& node = nodes_[idx];
    if (!node.tag.empty() && idx != 0) {
      if (auto id = post_id_of(node)) {
        out.push_back(read_post(idx, *id));
        return;
      }
    }
    for (std::size_t child : node.children) visit(child, out);
  }

  std::optional<std::size_t> find(std::size_t idx, const std::function<bool(const Node&)>& pred) const {
    for (std::size_t child : nodes_[idx].children) {
      if (!nodes_[child].tag.empty() && pred(nodes_[child])) return child;
      if (auto hit = find(child, pred)) return hit;
    }
    return std::nullopt;
  }

  void text_of(std::size_t idx, std::string& out) const {
    const Node& node = nodes_[idx];
    if (node.tag.empty()) {
      // HTML whitespace collapsing.
      bool space = !out.empty() && (out.back() == ' ' || out.back() == '\n');
      for (char c : node.text) {
        if (std::isspace(static_cast<unsigned char>(c))) {
          if (!space) out.push_back(' ');
          space = true;
        } else {
          out.push_back(c);
          space = false;
        }
      }
      return;
    }
    if (node.tag == "br") {
      out.push_back('\n');
      return;
    }
    const bool paragraph = node.tag == "p" || node.tag == "blockquote";
    const bool block = paragraph || is_block(node.tag);
    if (block) out += paragraph ? "\n\n" : "\n";
    for (std::size_t child : node.children) text_of(child, out);
    if (block) out += paragraph ? "\n\n" : "\n";
  }

  std::string trimmed_text(std::size_t idx) const {
    std::string raw;
    text_of(idx, raw);
    std::string text = decode_entities(raw);
    const auto b = text.find_first_not_of(" \t\n");
    if (b == std::string::npos) return {};
    const auto e = text.find_last_not_of(" \t\n");
    return text.substr(b, e - b + 1);
  }

  HtmlPostRecord read_post(std::size_t idx, const std::string& id) const {
    HtmlPostRecord rec;
    rec.post_id = id;
    rec.byte_offset = nodes_[idx].offset;
    if (auto a = find(idx, [](const Node& n) { return class_mentions(n, {"username", "author"}); }))
      rec.author = trimmed_text(*a);
    if (auto t = find(idx, [](const Node& n) { return n.tag == "time" && n.attrs.count("datetime"); })) {
      rec.date = nodes_[*t].attrs.at("datetime");
    } else if (auto d = find(idx, [](const Node& n) { return class_mentions(n, {"date"}); })) {
      rec.date = trimmed_text(*d);
    }
    if (auto b = find(idx, [](const Node& n) {
          return class_mentions(n, {"postcontent", "post-content", "post-body", "message"});
        }))
      rec.body = trimmed_text(*b);
    return rec;
  }

  std::vector<Node> nodes_;
};

}  // namespace

std::string decode_entities(std::string_view text) {
  static const std::map<std::string, char32_t, std::less<>> kNamed = {
      {"amp", '&'},       {"lt", '<'},        {"gt", '>'},        {"quot", '"'},      {"apos", '\''},
      {"nbsp", 0xA0},     {"hellip", 0x2026}, {"mdash", 0x2014},  {"ndash", 0x2013},  {"rsquo", 0x2019},
      {"lsquo", 0x2018},  {"ldquo", 0x201C},  {"rdquo", 0x201D},  {"eacute", 0xE9},   {"egrave", 0xE8},
      {"agrave", 0xE0},   {"ccedil", 0xE7},   {"uuml", 0xFC},     {"ouml", 0xF6},     {"auml", 0xE4}};
  std::string out;
  out.reserve(text.size());
  std::size_t i = 0;
  while (i < text.size()) {
    if (text[i] != '&') {
      out.push_back(text[i++]);
      continue;
    }
    const std::size_t semi = text.find(';', i);
    if (semi == std::string_view::npos || semi - i > 10) {
      out.push_back(text[i++]);
      continue;
    }
    const std::string_view name = text.substr(i + 1, semi - i - 1);
    std::optional<char32_t> cp;
    if (!name.empty() && name[0] == '#') {
      try {
        const bool hex = name.size() > 1 && (name[1] == 'x' || name[1] == 'X');
        const std::string digits(name.substr(hex ? 2 : 1));
        std::size_t used = 0;
        const unsigned long v = std::stoul(digits, &used, hex ? 16 : 10);
        if (used == digits.size() && v > 0 && v <= 0x10FFFF && (v < 0xD800 || v > 0xDFFF))
          cp = static_cast<char32_t>(v);
      } catch (const std::exception&) {
      }
    } else if (auto it = kNamed.find(name); it != kNamed.end()) {
      cp = it->second;
    }
    if (cp) {
      utf8::append(out, *cp);
      i = semi + 1;
    } else {
      out.push_back(text[i++]);
    }
  }
  return out;
}

std::vector<HtmlPostRecord> extract_html_posts(std::string_view html) {
  return PostExtractor(Parser(html).parse()).run();
}

}  // namespace forumqa::ingest::detail
