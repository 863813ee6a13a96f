#pragma once

#include <functional>
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "forumqa/ingest/corpus.hpp"
#include "forumqa/lda/lda.hpp"

namespace forumqa::segment {

using lda::Topic;

/// A bounded-length context built from posts that share a dominant topic.
struct TopicParagraph {
  std::string paragraph_id;  // "topic-{k}-{seq}"
  Topic topic_id = 0;
  std::string context;
  std::vector<std::string> member_post_ids;
  std::size_t word_count = 0;

  bool operator==(const TopicParagraph&) const = default;
};

nlohmann::json to_json(const TopicParagraph& p);
TopicParagraph paragraph_from_json(const nlohmann::json& j);

std::string paragraph_id(Topic topic, std::size_t seq);

struct SegmentOptions {
  std::size_t max_words = 385;
  std::size_t overlap_words = 50;
};

using TopicOf = std::function<Topic(const ingest::RawPost&)>;

/// Groups posts by topic, orders each group by (date, post_id), joins bodies
/// with a blank line and splits the result with split_with_overlap.
/// Paragraphs come out ordered by (topic, seq).
std::vector<TopicParagraph> segment(const std::vector<ingest::RawPost>& posts, const TopicOf& topic_of,
                                    const SegmentOptions& options = {});

// Topic of a post is its dominant topic in `model`; posts the model never saw
// (no in-vocabulary tokens) fall back to topic 0.
std::vector<TopicParagraph> segment(const std::vector<ingest::RawPost>& posts, const lda::TopicModel& model,
                                    const SegmentOptions& options = {});

struct ParagraphStats {
  std::size_t paragraphs = 0;
  std::size_t topics = 0;  // distinct topics with at least one paragraph
  std::map<Topic, std::size_t> per_topic;
  std::size_t max_words = 0;
  double mean_words = 0.0;

  nlohmann::json to_json() const;
};

ParagraphStats paragraph_stats(const std::vector<TopicParagraph>& paragraphs);

void write_paragraphs(const std::string& path, const std::vector<TopicParagraph>& paragraphs);
std::vector<TopicParagraph> read_paragraphs(const std::string& path);

}  // namespace forumqa::segment
