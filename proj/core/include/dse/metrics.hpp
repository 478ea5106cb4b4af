#pragma once

#include <vector>

#include "dse/learners.hpp"
#include "dse/linalg.hpp"

namespace dse::metrics {

using linalg::Matrix;
using linalg::Vector;

/// Operating points swept over descending score thresholds, including the
/// (0,0) and (1,1) endpoints; samples with tied scores move in one step.
/// thresholds[k] is the score admitted at point k+1, so it has one entry
/// fewer than the point lists (averaged curves carry no thresholds).
struct RocCurve {
  Vector thresholds;
  Vector fpr;
  Vector tpr;
  double auc = 0.0;
};

/// Builds the curve treating label 2 as positive, higher score as more
/// positive. Trapezoid area over the tie-grouped sweep; equals the
/// Mann-Whitney statistic with ties counted half.
RocCurve roc_curve(const Vector& scores, const std::vector<int>& labels);

double roc_auc(const Vector& scores, const std::vector<int>& labels);

/// Rank-based pair-counting oracle for the same statistic.
double mann_whitney_auc(const Vector& scores, const std::vector<int>& labels);

/// TPR of the curve polyline at the given FPR, by linear interpolation.
double interpolate_tpr(const RocCurve& curve, double fpr);

/// Vertical average over a fixed 101-point FPR grid (step 0.01).
RocCurve mean_roc(const std::vector<RocCurve>& curves);

/// Projects rows of x onto the top-2 eigenvectors of the symmetric PSD
/// matrix, each coordinate scaled by the square root of its eigenvalue.
Matrix embed2d(const Matrix& psd, const Matrix& x);

/// Same projection under a trained model's metric.
Matrix embed2d(const learners::GmlvqModel& model, const datagen::LabeledDataset& data);

} // namespace dse::metrics
