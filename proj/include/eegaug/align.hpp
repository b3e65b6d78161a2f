#pragma once

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <vector>

#include "eegaug/errors.hpp"
#include "eegaug/trial.hpp"

namespace eegaug {

// Euclidean Alignment: whiten each subject's trials by the inverse square
// root of the mean trial covariance. At test time the reference is updated
// incrementally as each unlabeled trial arrives; labels are never read.

inline Eigen::MatrixXd trial_covariance(const Trial& trial) {
  const double t = static_cast<double>(trial.sample_count());
  if (t < 2) throw DataError("covariance needs at least 2 samples");
  return trial.samples * trial.samples.transpose() / (t - 1.0);
}

// Running mean of trial covariances for one subject. The stored matrix is
// the plain arithmetic mean; the SPD-guaranteeing shrinkage is applied when
// the whitener is formed, so incremental updates stay exactly consistent
// with batch recomputation.
struct EaReference {
  Eigen::MatrixXd mean_cov;
  int count{0};

  static constexpr double kShrinkage = 1e-8;

  // Mean covariance with shrinkage eps*trace/C added on the diagonal.
  Eigen::MatrixXd regularized() const {
    const auto c = static_cast<double>(mean_cov.rows());
    return mean_cov + (kShrinkage * mean_cov.trace() / c) *
                          Eigen::MatrixXd::Identity(mean_cov.rows(), mean_cov.cols());
  }
};

// Inverse matrix square root of a symmetric positive-definite matrix via
// the symmetric eigendecomposition: Q diag(1/sqrt(lambda)) Q^T.
inline Eigen::MatrixXd inv_sqrt_spd(const Eigen::MatrixXd& m) {
  if (m.rows() != m.cols()) throw DataError("inv_sqrt_spd requires a square matrix");
  if (!m.isApprox(m.transpose(), 1e-10))
    throw DataError("inv_sqrt_spd requires a symmetric matrix");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(m);
  if (eig.info() != Eigen::Success)
    throw DataError("eigendecomposition failed");
  const Eigen::VectorXd& vals = eig.eigenvalues();
  if (vals.minCoeff() <= 0.0)
    throw DataError("matrix is not positive definite");
  return eig.eigenvectors() * vals.array().rsqrt().matrix().asDiagonal() *
         eig.eigenvectors().transpose();
}

// Builds the reference from one subject's trials.
inline EaReference ea_reference(const std::vector<Trial>& trials) {
  if (trials.empty()) throw DataError("ea_reference needs at least one trial");
  EaReference ref;
  for (const Trial& t : trials) {
    if (t.test_only)
      throw std::logic_error("ea_reference received a held-out test trial");
    if (!t.samples.allFinite()) throw DataError("non-finite sample in EA input");
    const Eigen::MatrixXd cov = trial_covariance(t);
    if (ref.count == 0)
      ref.mean_cov = cov;
    else
      ref.mean_cov += cov;
    ++ref.count;
  }
  ref.mean_cov /= static_cast<double>(ref.count);
  return ref;
}

// Folds one more trial into the running mean: R <- (n*R + cov)/(n + 1).
// The only place test data may touch preprocessing state; labels unused.
inline void ea_update(EaReference& ref, const Trial& trial) {
  if (ref.count < 1) throw DataError("ea_update on an unseeded reference");
  if (trial.channel_count() != ref.mean_cov.rows())
    throw DataError("ea_update shape mismatch");
  const double n = static_cast<double>(ref.count);
  ref.mean_cov = (n * ref.mean_cov + trial_covariance(trial)) / (n + 1.0);
  ref.count += 1;
}

// The whitening transform R^{-1/2} for this reference.
inline Eigen::MatrixXd whitening_matrix(const EaReference& ref) {
  if (ref.count < 1) throw DataError("whitening_matrix on an unseeded reference");
  return inv_sqrt_spd(ref.regularized());
}

inline Trial ea_apply(const Trial& trial, const EaReference& ref) {
  if (trial.channel_count() != ref.mean_cov.rows())
    throw DataError("ea_apply shape mismatch");
  Trial out = trial;
  out.samples = whitening_matrix(ref) * trial.samples;
  return out;
}

// Convenience: batch-align one subject's trials with their own reference.
inline std::vector<Trial> ea_align_subject(const std::vector<Trial>& trials) {
  const EaReference ref = ea_reference(trials);
  const Eigen::MatrixXd w = whitening_matrix(ref);
  std::vector<Trial> out;
  out.reserve(trials.size());
  for (const Trial& t : trials) {
    Trial a = t;
    a.samples = w * t.samples;
    out.push_back(std::move(a));
  }
  return out;
}

}  // namespace eegaug
