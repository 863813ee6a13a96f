#include "forumqa/segment/segmenter.hpp"

#include <algorithm>

#include "forumqa/error.hpp"
#include "forumqa/ingest/cleaning.hpp"
#include "forumqa/util/fileio.hpp"

namespace forumqa::segment {

nlohmann::json to_json(const TopicParagraph& p) {
  return {{"paragraph_id", p.paragraph_id},
          {"topic_id", p.topic_id},
          {"context", p.context},
          {"member_post_ids", p.member_post_ids},
          {"word_count", p.word_count}};
}

TopicParagraph paragraph_from_json(const nlohmann::json& j) {
  try {
    return {j.at("paragraph_id").get<std::string>(), j.at("topic_id").get<Topic>(), j.at("context").get<std::string>(),
            j.at("member_post_ids").get<std::vector<std::string>>(), j.at("word_count").get<std::size_t>()};
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("bad paragraph record: ") + e.what());
  }
}

std::string paragraph_id(Topic topic, std::size_t seq) {
  return "topic-" + std::to_string(topic) + "-" + std::to_string(seq);
}

std::vector<TopicParagraph> segment(const std::vector<ingest::RawPost>& posts, const TopicOf& topic_of,
                                    const SegmentOptions& options) {
  std::map<Topic, std::vector<const ingest::RawPost*>> groups;
  for (const auto& post : posts)
    if (!post.body.empty()) groups[topic_of(post)].push_back(&post);

  std::vector<TopicParagraph> out;
  for (auto& [topic, members] : groups) {
    std::stable_sort(members.begin(), members.end(), [](const ingest::RawPost* a, const ingest::RawPost* b) {
      if (a->posted_at != b->posted_at) return a->posted_at < b->posted_at;
      return a->post_id < b->post_id;
    });
    ingest::CleanDocument doc;
    doc.doc_id = "topic-" + std::to_string(topic);
    std::vector<ingest::ByteSpan> ranges;
    for (const auto* post : members) {
      if (!doc.text.empty()) doc.text += "\n\n";
      ranges.push_back({doc.text.size(), doc.text.size() + post->body.size()});
      doc.text += post->body;
      doc.source_post_ids.push_back(post->post_id);
    }
    const auto pieces = ingest::split_with_overlap(doc, options.max_words, options.overlap_words);
    for (std::size_t seq = 0; seq < pieces.size(); ++seq) {
      const auto& piece = pieces[seq];
      TopicParagraph p;
      p.paragraph_id = paragraph_id(topic, seq);
      p.topic_id = topic;
      p.context = piece.document.text;
      p.word_count = piece.word_count;
      for (std::size_t m = 0; m < members.size(); ++m)
        if (ranges[m].begin < piece.source.end && piece.source.begin < ranges[m].end)
          p.member_post_ids.push_back(members[m]->post_id);
      out.push_back(std::move(p));
    }
  }
  return out;
}

std::vector<TopicParagraph> segment(const std::vector<ingest::RawPost>& posts, const lda::TopicModel& model,
                                    const SegmentOptions& options) {
  std::unordered_map<std::string, Topic> topics;
  for (std::size_t d = 0; d < model.doc_ids.size(); ++d) topics[model.doc_ids[d]] = lda::argmax_topic(model.theta[d]);
  return segment(
      posts,
      [&](const ingest::RawPost& post) {
        const auto it = topics.find(post.post_id);
        return it == topics.end() ? Topic{0} : it->second;
      },
      options);
}

nlohmann::json ParagraphStats::to_json() const {
  nlohmann::json counts = nlohmann::json::object();
  for (const auto& [topic, n] : per_topic) counts[std::to_string(topic)] = n;
  return {{"paragraphs", paragraphs}, {"topics", topics},         {"per_topic", counts},
          {"max_words", max_words},   {"mean_words", mean_words}};
}

ParagraphStats paragraph_stats(const std::vector<TopicParagraph>& paragraphs) {
  ParagraphStats s;
  s.paragraphs = paragraphs.size();
  std::size_t total = 0;
  for (const auto& p : paragraphs) {
    ++s.per_topic[p.topic_id];
    s.max_words = std::max(s.max_words, p.word_count);
    total += p.word_count;
  }
  s.topics = s.per_topic.size();
  if (!paragraphs.empty()) s.mean_words = static_cast<double>(total) / static_cast<double>(paragraphs.size());
  return s;
}

void write_paragraphs(const std::string& path, const std::vector<TopicParagraph>& paragraphs) {
  std::vector<nlohmann::json> rows;
  rows.reserve(paragraphs.size());
  for (const auto& p : paragraphs) rows.push_back(to_json(p));
  fileio::write_jsonl_atomic(path, rows);
}

std::vector<TopicParagraph> read_paragraphs(const std::string& path) {
  std::vector<TopicParagraph> out;
  for (const auto& row : fileio::read_jsonl(path)) out.push_back(paragraph_from_json(row));
  return out;
}

}  // namespace forumqa::segment
