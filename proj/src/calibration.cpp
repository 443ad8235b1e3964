#include "govkit/calibration.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <numeric>

#include "govkit/error.hpp"

namespace govkit::repro {

namespace {

struct Moments {
  double mean = 0;
  double sum_sq = 0;  // sum of squared deviations
  std::size_t n = 0;
};

Moments moments(const std::vector<double>& xs) {
  Moments m;
  m.n = xs.size();
  if (xs.empty()) return m;
  m.mean = std::accumulate(xs.begin(), xs.end(), 0.0) / static_cast<double>(xs.size());
  for (double x : xs) m.sum_sq += (x - m.mean) * (x - m.mean);
  return m;
}

}  // namespace

const MetricCalibration& CalibrationReport::at(Metric metric) const {
  for (const auto& m : metrics) {
    if (m.metric == metric) return m;
  }
  throw Error(ErrorCode::invalid_argument, "metric '" + std::string(to_string(metric)) + "' was not calibrated");
}

Thresholds CalibrationReport::thresholds() const {
  Thresholds t;
  for (const auto& m : metrics) t.set(m.metric, m.theta);
  return t;
}

MetricCalibration calibrate_metric(Metric metric, std::span<const double> scores, std::span<const bool> same_model) {
  if (scores.size() != same_model.size()) {
    throw Error(ErrorCode::length_mismatch, "scores and labels differ in length");
  }
  std::vector<double> same, cross;
  for (std::size_t i = 0; i < scores.size(); ++i) (same_model[i] ? same : cross).push_back(scores[i]);
  if (same.empty() || cross.empty()) {
    throw Error(ErrorCode::single_class, "calibration needs both same-model and cross-model pairs");
  }

  std::vector<double> distinct(scores.begin(), scores.end());
  std::sort(distinct.begin(), distinct.end());
  distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
  std::vector<double> candidates;
  if (distinct.size() == 1) {
    candidates.push_back(distinct.front());
  } else {
    for (std::size_t i = 0; i + 1 < distinct.size(); ++i) {
      candidates.push_back(distinct[i] + (distinct[i + 1] - distinct[i]) / 2);
    }
  }

  std::sort(same.begin(), same.end());
  std::sort(cross.begin(), cross.end());
  auto passing = [](const std::vector<double>& sorted, double theta) {
    return static_cast<double>(sorted.end() - std::lower_bound(sorted.begin(), sorted.end(), theta));
  };

  MetricCalibration best;
  best.metric = metric;
  bool have_best = false;
  for (double theta : candidates) {
    const double tp = passing(same, theta);
    const double fp = passing(cross, theta);
    const double tpr = tp / static_cast<double>(same.size());
    const double fpr = fp / static_cast<double>(cross.size());
    const double j = tpr - fpr;
    const double f1 = tp == 0 ? 0.0 : 2 * tp / (2 * tp + fp + (static_cast<double>(same.size()) - tp));
    const bool better = !have_best || j > best.youden_j + 1e-12 ||
                        (std::abs(j - best.youden_j) <= 1e-12 && f1 > best.f1 + 1e-12);
    if (better) {
      best.theta = theta;
      best.youden_j = j;
      best.tpr = tpr;
      best.fpr = fpr;
      best.f1 = f1;
      have_best = true;
    }
  }
  best.cross_model_pass_rate = best.fpr;

  const auto ms = moments(same);
  const auto mc = moments(cross);
  best.same_model_mean = ms.mean;
  best.cross_model_mean = mc.mean;
  if (mc.mean != 0) best.separation_ratio = ms.mean / mc.mean;
  if (ms.n + mc.n > 2) {
    const double pooled = std::sqrt((ms.sum_sq + mc.sum_sq) / static_cast<double>(ms.n + mc.n - 2));
    if (pooled > 0) best.cohens_d = (ms.mean - mc.mean) / pooled;
  }
  return best;
}

CalibrationReport calibrate_thresholds(std::span<const LabeledScores> pairs) {
  CalibrationReport report;
  // std::vector<bool> is not contiguous, so labels live in a plain array.
  auto labels = std::make_unique<bool[]>(pairs.size());
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    labels[i] = pairs[i].same_model;
    (labels[i] ? report.same_model_count : report.cross_model_count) += 1;
  }
  for (auto m : kAllMetrics) {
    std::vector<double> scores;
    scores.reserve(pairs.size());
    for (const auto& p : pairs) scores.push_back(p.scores.get(m));
    report.metrics.push_back(calibrate_metric(m, scores, std::span<const bool>(labels.get(), pairs.size())));
  }
  return report;
}

}  // namespace govkit::repro
