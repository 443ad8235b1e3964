#pragma once

// Per-metric threshold selection by Youden's J on labelled comparison pairs.
// Positive class is same_model; a pair passes when its score is >= θ.

#include <optional>
#include <span>
#include <vector>

#include "govkit/metrics.hpp"

namespace govkit::repro {

struct LabeledScores {
  ScoreVector scores;
  bool same_model = false;
};

struct MetricCalibration {
  Metric metric = Metric::char_match;
  double theta = 0;
  double youden_j = 0;
  double tpr = 0;
  double fpr = 0;
  double f1 = 0;
  double same_model_mean = 0;
  double cross_model_mean = 0;
  // same_model_mean / cross_model_mean; absent when the cross mean is 0.
  std::optional<double> separation_ratio;
  // Mean difference over the pooled standard deviation; absent when the
  // pooled deviation is 0 or there are too few samples.
  std::optional<double> cohens_d;
  // Fraction of cross-model pairs passing at θ (equals fpr).
  double cross_model_pass_rate = 0;
};

struct CalibrationReport {
  std::vector<MetricCalibration> metrics;
  std::size_t same_model_count = 0;
  std::size_t cross_model_count = 0;

  const MetricCalibration& at(Metric metric) const;
  Thresholds thresholds() const;
};

// Candidates are midpoints between consecutive distinct scores, or the single
// common score when all are equal. Ties on J go to higher F1, then lower θ.
// Throws Error(single_class) unless both labels occur, Error(length_mismatch)
// when the spans differ in length.
MetricCalibration calibrate_metric(Metric metric, std::span<const double> scores, std::span<const bool> same_model);

CalibrationReport calibrate_thresholds(std::span<const LabeledScores> pairs);

}  // namespace govkit::repro
