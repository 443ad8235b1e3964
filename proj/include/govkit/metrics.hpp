#pragma once

// Output-similarity metrics for replay verification and the four-metric
// ensemble. Texts are UTF-8; positions and n-grams are over Unicode scalar
// values.

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace govkit::repro {

// Scalar values of `text`. A byte that does not start a well-formed sequence
// maps to 0x110000 + byte, outside the Unicode range, so malformed input still
// compares positionally without colliding with real characters.
std::vector<std::uint32_t> decode_scalars(std::string_view text);

// Tokens separated by runs of Unicode White_Space characters.
std::vector<std::string> tokenize(std::string_view text);

// |{i : a[i] = b[i]}| / max(|a|, |b|); 1 when both are empty.
double char_match(std::string_view a, std::string_view b);

// Word-set Jaccard index; 1 when both token sets are empty.
double jaccard(std::string_view a, std::string_view b);

// Cosine of TF-IDF vectors with IDF fit on the pair itself:
// idf(t) = ln((1 + 2) / (1 + df(t))) + 1.
double tfidf_cosine(std::string_view a, std::string_view b);

// Cosine of character n-gram count vectors. A non-empty text shorter than n
// contributes itself as a single gram.
double ngram_cosine(std::string_view a, std::string_view b, std::size_t n = 3);

enum class Metric { char_match, jaccard, tfidf_cosine, ngram_cosine };
inline constexpr Metric kAllMetrics[] = {Metric::char_match, Metric::jaccard, Metric::tfidf_cosine,
                                         Metric::ngram_cosine};
std::string_view to_string(Metric metric);
Metric metric_from_string(std::string_view name);

struct Thresholds {
  double char_match = 0.146;
  double jaccard = 0.408;
  double tfidf_cosine = 0.837;
  double ngram_cosine = 0.809;

  double get(Metric metric) const;
  void set(Metric metric, double value);
};

struct ScoreVector {
  double char_match = 0;
  double jaccard = 0;
  double tfidf_cosine = 0;
  double ngram_cosine = 0;

  double get(Metric metric) const;
};

ScoreVector score_all(std::string_view a, std::string_view b);

struct SimilarityReport {
  ScoreVector scores;
  bool ensemble_flagged = false;
  Thresholds thresholds_used;
};

// Flagged iff any metric falls below its threshold.
SimilarityReport ensemble_evaluate(std::string_view a, std::string_view b, const Thresholds& thresholds = {});

}  // namespace govkit::repro
