#include <doctest.h>

#include <random>

#include "govkit/calibration.hpp"
#include "govkit/error.hpp"
#include "support.hpp"

using namespace govkit;
using namespace govkit::repro;
using testsupport::oracles;

namespace {

std::vector<bool> as_bools(const testsupport::Json& j) {
  std::vector<bool> out;
  for (const auto& v : j) out.push_back(v.get<bool>());
  return out;
}

// Span-friendly label storage (std::vector<bool> is bit-packed).
struct Labels {
  std::unique_ptr<bool[]> data;
  std::size_t size;
  explicit Labels(const std::vector<bool>& v) : data(new bool[v.size()]), size(v.size()) {
    for (std::size_t i = 0; i < size; ++i) data[i] = v[i];
  }
  std::span<const bool> span() const { return {data.get(), size}; }
};

}  // namespace

TEST_CASE("Youden J matches scikit-learn's ROC maximum") {
  const auto& o = oracles()["calibration"];
  const auto scores = o["scores"].get<std::vector<double>>();
  const Labels labels(as_bools(o["labels"]));
  const auto c = calibrate_metric(Metric::char_match, scores, labels.span());
  CHECK(c.youden_j == doctest::Approx(o["youden_j"].get<double>()).epsilon(1e-12));
  // The chosen threshold reproduces its own rates.
  std::size_t tp = 0, fp = 0, pos = 0, neg = 0;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    const bool pass = scores[i] >= c.theta;
    if (labels.span()[i]) {
      ++pos;
      tp += pass;
    } else {
      ++neg;
      fp += pass;
    }
  }
  CHECK(c.tpr == doctest::Approx(static_cast<double>(tp) / pos));
  CHECK(c.fpr == doctest::Approx(static_cast<double>(fp) / neg));
  CHECK(c.cross_model_pass_rate == c.fpr);
}

TEST_CASE("two separated clusters give J = 1 with the threshold strictly between") {
  std::mt19937 rng(4);
  std::uniform_real_distribution<double> hi(0.8, 0.95), lo(0.1, 0.3);
  std::vector<double> scores;
  std::vector<bool> labels;
  for (int i = 0; i < 50; ++i) {
    scores.push_back(hi(rng));
    labels.push_back(true);
    scores.push_back(lo(rng));
    labels.push_back(false);
  }
  const Labels l(labels);
  const auto c = calibrate_metric(Metric::jaccard, scores, l.span());
  CHECK(c.youden_j == 1.0);
  CHECK(c.theta > 0.3);
  CHECK(c.theta < 0.8);
  CHECK(c.f1 == 1.0);
  REQUIRE(c.cohens_d.has_value());
  CHECK(*c.cohens_d > 5);
  REQUIRE(c.separation_ratio.has_value());
  CHECK(*c.separation_ratio > 2);
}

TEST_CASE("identical score distributions give J = 0") {
  const std::vector<double> scores(20, 0.5);
  std::vector<bool> labels;
  for (int i = 0; i < 20; ++i) labels.push_back(i % 2 == 0);
  const Labels l(labels);
  const auto c = calibrate_metric(Metric::ngram_cosine, scores, l.span());
  CHECK(c.youden_j == 0.0);
  CHECK(c.theta == 0.5);
  CHECK_FALSE(c.cohens_d.has_value());
}

TEST_CASE("errors and optional statistics") {
  const std::vector<double> s = {0.1, 0.2};
  const Labels same({true, true});
  try {
    calibrate_metric(Metric::char_match, s, same.span());
    FAIL("expected single_class");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::single_class);
  }
  const Labels three({true, false, true});
  CHECK_THROWS_AS(calibrate_metric(Metric::char_match, s, three.span()), Error);
  const Labels mixed({true, false});
  const std::vector<double> zero_cross = {0.5, 0.0};
  const auto c = calibrate_metric(Metric::char_match, zero_cross, mixed.span());
  CHECK_FALSE(c.separation_ratio.has_value());
  CHECK_FALSE(c.cohens_d.has_value());  // n <= 2
}

TEST_CASE("calibrate_thresholds covers every metric") {
  std::vector<LabeledScores> pairs;
  pairs.push_back({score_all("the cat sat on the mat", "the cat sat on the mat"), true});
  pairs.push_back({score_all("the cat sat on the mat", "the cat sat on a mat"), true});
  pairs.push_back({score_all("the cat sat on the mat", "QX7 ZZ9 PLM"), false});
  pairs.push_back({score_all("an entirely different answer", "the cat sat on the mat"), false});
  const auto r = calibrate_thresholds(pairs);
  CHECK(r.metrics.size() == 4);
  CHECK(r.same_model_count == 2);
  CHECK(r.cross_model_count == 2);
  for (auto m : kAllMetrics) {
    CHECK(r.at(m).youden_j == 1.0);
    CHECK(r.thresholds().get(m) == r.at(m).theta);
  }
}
