#pragma once

#include <cmath>
#include <vector>

#include "forumqa/segment/segmenter.hpp"

namespace forumqa::test {

// Four paragraphs with 3, 2, 4 and 1 analyzed tokens; average length 2.5.
inline std::vector<segment::TopicParagraph> bm25_paragraphs() {
  return {{"p1", 0, "Coffee, coffee and tea.", {}, 4},
          {"p2", 0, "Tea before sleep.", {}, 3},
          {"p3", 1, "Sleep, sleep, sleep with the voices.", {}, 6},
          {"p4", 1, "The voices.", {}, 2}};
}

struct Bm25Expectation {
  const char* id;
  double score;
};

// Hand evaluation for the query "coffee sleep" with k1 = 1.5, b = 0.75, N = 4:
//   idf(coffe) = ln(1 + 3.5/1.5), idf(sleep) = ln(1 + 2.5/2.5) = ln 2
//   p1: tf 2, |d| 3 -> 2 * 2.5 / (2 + 1.5 * (0.25 + 0.75 * 3/2.5)) = 5 / 3.725
//   p2: tf 1, |d| 2 -> 2.5 / (1 + 1.5 * (0.25 + 0.75 * 2/2.5))     = 2.5 / 2.275
//   p3: tf 3, |d| 4 -> 7.5 / (3 + 1.5 * (0.25 + 0.75 * 4/2.5))     = 7.5 / 5.175
inline std::vector<Bm25Expectation> bm25_expected_coffee_sleep() {
  const double idf_coffee = std::log(1.0 + 3.5 / 1.5);
  const double idf_sleep = std::log(2.0);
  return {{"p1", idf_coffee * 5.0 / 3.725},
          {"p3", idf_sleep * 7.5 / 5.175},
          {"p2", idf_sleep * 2.5 / 2.275},
          {"p4", 0.0}};
}

}  // namespace forumqa::test
