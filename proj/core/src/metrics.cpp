#include "dse/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "dse/base.hpp"

namespace dse::metrics {
namespace {

void check_inputs(const Vector& scores, const std::vector<int>& labels) {
  if (scores.size() != labels.size())
    throw DimensionError("scores and labels differ in length");
  if (scores.empty()) throw DataError("cannot compute ROC of an empty sample");
  bool saw1 = false, saw2 = false;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (!std::isfinite(scores[i])) throw DataError("non-finite score");
    if (labels[i] == 1)
      saw1 = true;
    else if (labels[i] == 2)
      saw2 = true;
    else
      throw DataError("labels must be 1 or 2, got " + std::to_string(labels[i]));
  }
  if (!saw1 || !saw2) throw DataError("ROC needs both classes present");
}

} // namespace

RocCurve roc_curve(const Vector& scores, const std::vector<int>& labels) {
  check_inputs(scores, labels);
  const std::size_t n = scores.size();

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return scores[a] > scores[b];
  });

  double positives = 0.0, negatives = 0.0;
  for (const int l : labels) (l == 2 ? positives : negatives) += 1.0;

  RocCurve curve;
  curve.fpr.push_back(0.0);
  curve.tpr.push_back(0.0);

  double tp = 0.0, fp = 0.0;
  std::size_t i = 0;
  while (i < n) {
    const double value = scores[order[i]];
    // Consume the whole tied group before emitting a point.
    while (i < n && scores[order[i]] == value) {
      (labels[order[i]] == 2 ? tp : fp) += 1.0;
      ++i;
    }
    curve.thresholds.push_back(value);
    curve.fpr.push_back(fp / negatives);
    curve.tpr.push_back(tp / positives);
  }

  double area = 0.0;
  for (std::size_t k = 1; k < curve.fpr.size(); ++k)
    area += 0.5 * (curve.tpr[k] + curve.tpr[k - 1]) * (curve.fpr[k] - curve.fpr[k - 1]);
  curve.auc = area;
  return curve;
}

double roc_auc(const Vector& scores, const std::vector<int>& labels) {
  return roc_curve(scores, labels).auc;
}

double mann_whitney_auc(const Vector& scores, const std::vector<int>& labels) {
  check_inputs(scores, labels);
  // Midranks over the pooled sample; the rank sum of the positives yields
  // the U statistic with tied pairs counted half.
  const std::size_t n = scores.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return scores[a] < scores[b];
  });

  std::vector<double> rank(n, 0.0);
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i;
    while (j < n && scores[order[j]] == scores[order[i]]) ++j;
    const double mid = 0.5 * (static_cast<double>(i + 1) + static_cast<double>(j));
    for (std::size_t k = i; k < j; ++k) rank[order[k]] = mid;
    i = j;
  }

  double positives = 0.0, rank_sum = 0.0;
  for (std::size_t k = 0; k < n; ++k)
    if (labels[k] == 2) {
      positives += 1.0;
      rank_sum += rank[k];
    }
  const double negatives = static_cast<double>(n) - positives;
  const double u = rank_sum - positives * (positives + 1.0) / 2.0;
  return u / (positives * negatives);
}

double interpolate_tpr(const RocCurve& curve, double fpr) {
  const auto& xs = curve.fpr;
  const auto& ys = curve.tpr;
  if (xs.size() < 2) throw DataError("ROC curve has too few points");
  if (fpr <= xs.front()) return ys.front();
  if (fpr >= xs.back()) return ys.back();
  // fpr is non-decreasing along the sweep; find the bracketing segment.
  const auto it = std::upper_bound(xs.begin(), xs.end(), fpr);
  const std::size_t hi = static_cast<std::size_t>(it - xs.begin());
  const std::size_t lo = hi - 1;
  const double span = xs[hi] - xs[lo];
  if (span <= 0.0) return std::max(ys[lo], ys[hi]);
  const double t = (fpr - xs[lo]) / span;
  return ys[lo] + t * (ys[hi] - ys[lo]);
}

RocCurve mean_roc(const std::vector<RocCurve>& curves) {
  if (curves.empty()) throw DataError("cannot average zero ROC curves");
  RocCurve out;
  out.fpr.resize(101);
  out.tpr.assign(101, 0.0);
  for (int g = 0; g <= 100; ++g) {
    const double f = g / 100.0;
    out.fpr[g] = f;
    double acc = 0.0;
    for (const auto& c : curves) acc += interpolate_tpr(c, f);
    out.tpr[g] = acc / static_cast<double>(curves.size());
  }
  double area = 0.0;
  for (std::size_t k = 1; k < out.fpr.size(); ++k)
    area += 0.5 * (out.tpr[k] + out.tpr[k - 1]) * (out.fpr[k] - out.fpr[k - 1]);
  out.auc = area;
  return out;
}

Matrix embed2d(const Matrix& psd, const Matrix& x) {
  if (psd.rows() < 2) throw DimensionError("embedding needs dimension >= 2");
  if (x.cols() != psd.rows())
    throw DimensionError("data dimension does not match the matrix");
  const auto eig = linalg::sym_eigen(psd);
  const double s0 = std::sqrt(std::max(eig.eigenvalues[0], 0.0));
  const double s1 = std::sqrt(std::max(eig.eigenvalues[1], 0.0));

  const std::size_t n = x.rows();
  const std::size_t d = x.cols();
  Matrix out(n, 2);
  for (std::size_t i = 0; i < n; ++i) {
    const double* row = x.row(i);
    double p0 = 0.0, p1 = 0.0;
    for (std::size_t j = 0; j < d; ++j) {
      p0 += eig.eigenvectors(j, 0) * row[j];
      p1 += eig.eigenvectors(j, 1) * row[j];
    }
    out(i, 0) = s0 * p0;
    out(i, 1) = s1 * p1;
  }
  return out;
}

Matrix embed2d(const learners::GmlvqModel& model, const datagen::LabeledDataset& data) {
  data.validate();
  return embed2d(model.lambda(), data.features);
}

} // namespace dse::metrics
