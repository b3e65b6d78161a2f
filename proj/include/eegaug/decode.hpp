#pragma once

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <vector>

#include "eegaug/align.hpp"
#include "eegaug/errors.hpp"
#include "eegaug/trial.hpp"

namespace eegaug {

// Common spatial patterns + linear discriminant analysis, the classic
// binary motor-imagery decoder, plus the two evaluation metrics.

// Spatial filter bank W (C x F). Columns solve the generalized eigenproblem
// Sigma0 w = lambda (Sigma0 + Sigma1) w on trace-normalized class-mean
// covariances, taken half from each spectral end, most extreme first; the
// class-0-dominant end comes first. W^T (Sigma0 + Sigma1) W = I by
// construction. Fitted models are immutable and shareable.
struct CspModel {
  Eigen::MatrixXd filters;  // C x F

  Eigen::Index filter_count() const { return filters.cols(); }
};

struct LdaModel {
  Eigen::VectorXd weights;
  double bias{0.0};
};

namespace detail {

// Per-trial covariance, trace-normalized so every trial contributes equal
// total power.
inline Eigen::MatrixXd normalized_covariance(const Trial& trial) {
  Eigen::MatrixXd cov = trial.samples * trial.samples.transpose();
  const double tr = cov.trace();
  if (!(tr > 0.0)) throw DataError("trial has zero total power");
  return cov / tr;
}

}  // namespace detail

inline CspModel csp_fit(const std::vector<Trial>& trials,
                        const std::vector<int>& labels, int n_filters = 10) {
  if (trials.size() != labels.size())
    throw ConfigError("csp_fit: trials and labels differ in length");
  if (trials.empty()) throw ConfigError("csp_fit: empty training set");
  if (n_filters < 2 || n_filters % 2 != 0)
    throw ConfigError("csp_fit: n_filters must be even and >= 2");

  const Eigen::Index c = trials[0].channel_count();
  Eigen::MatrixXd sigma0 = Eigen::MatrixXd::Zero(c, c);
  Eigen::MatrixXd sigma1 = Eigen::MatrixXd::Zero(c, c);
  int n0 = 0, n1 = 0;
  for (std::size_t i = 0; i < trials.size(); ++i) {
    if (trials[i].test_only)
      throw std::logic_error("csp_fit received a held-out test trial");
    if (trials[i].channel_count() != c)
      throw DataError("csp_fit: inconsistent channel counts");
    if (labels[i] == 0) {
      sigma0 += detail::normalized_covariance(trials[i]);
      ++n0;
    } else if (labels[i] == 1) {
      sigma1 += detail::normalized_covariance(trials[i]);
      ++n1;
    } else {
      throw DataError("csp_fit: labels must be binary");
    }
  }
  if (n0 == 0 || n1 == 0)
    throw DataError("csp_fit: both classes must be present");
  sigma0 /= static_cast<double>(n0);
  sigma1 /= static_cast<double>(n1);

  int f = n_filters;
  if (f > static_cast<int>(c)) {
    f = static_cast<int>(c) - static_cast<int>(c) % 2;
    std::cerr << "csp_fit: clamping filter count from " << n_filters << " to " << f
              << " (only " << c << " channels)\n";
  }

  Eigen::MatrixXd pooled = sigma0 + sigma1;
  pooled += (1e-8 * pooled.trace() / static_cast<double>(c)) *
            Eigen::MatrixXd::Identity(c, c);
  const Eigen::MatrixXd p = inv_sqrt_spd(pooled);

  // Whitened problem: eigenvectors of P Sigma0 P give the filters after
  // back-projection through P.
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(p * sigma0 * p);
  if (eig.info() != Eigen::Success) throw DataError("csp_fit: eigensolver failed");
  const Eigen::MatrixXd w_full = p * eig.eigenvectors();  // ascending eigenvalues

  CspModel model;
  model.filters.resize(c, f);
  const int half = f / 2;
  for (int j = 0; j < half; ++j) {
    model.filters.col(j) = w_full.col(c - 1 - j);       // class-0 end, extreme first
    model.filters.col(half + j) = w_full.col(j);        // class-1 end, extreme first
  }
  return model;
}

// Normalized log-variance features: f_k = log(var_k / sum_j var_j).
// Invariant to global trial scaling; sum(exp(f)) == 1.
inline Eigen::VectorXd csp_features(const Trial& trial, const CspModel& model) {
  if (trial.channel_count() != model.filters.rows())
    throw DataError("csp_features shape mismatch");
  const Eigen::MatrixXd projected = model.filters.transpose() * trial.samples;
  Eigen::VectorXd variances = projected.array().square().rowwise().mean();
  const double total = variances.sum();
  if (!(total > 0.0)) throw DataError("csp_features: zero total variance");
  return (variances / total).array().log();
}

inline Eigen::MatrixXd csp_feature_matrix(const std::vector<Trial>& trials,
                                          const CspModel& model) {
  Eigen::MatrixXd out(static_cast<Eigen::Index>(trials.size()), model.filter_count());
  for (std::size_t i = 0; i < trials.size(); ++i)
    out.row(static_cast<Eigen::Index>(i)) = csp_features(trials[i], model).transpose();
  return out;
}

// Fisher LDA with pooled within-class covariance (shrinkage 1e-6*trace/F)
// and the boundary at the midpoint of the projected class means.
inline LdaModel lda_fit(const Eigen::MatrixXd& features,
                        const std::vector<int>& labels) {
  const auto m = features.rows();
  const auto f = features.cols();
  if (m != static_cast<Eigen::Index>(labels.size()))
    throw ConfigError("lda_fit: features and labels differ in length");
  Eigen::VectorXd mu0 = Eigen::VectorXd::Zero(f);
  Eigen::VectorXd mu1 = Eigen::VectorXd::Zero(f);
  int n0 = 0, n1 = 0;
  for (Eigen::Index i = 0; i < m; ++i) {
    if (labels[static_cast<std::size_t>(i)] == 0) {
      mu0 += features.row(i).transpose();
      ++n0;
    } else if (labels[static_cast<std::size_t>(i)] == 1) {
      mu1 += features.row(i).transpose();
      ++n1;
    } else {
      throw DataError("lda_fit: labels must be binary");
    }
  }
  if (n0 == 0 || n1 == 0) throw DataError("lda_fit: both classes must be present");
  mu0 /= static_cast<double>(n0);
  mu1 /= static_cast<double>(n1);

  Eigen::MatrixXd sw = Eigen::MatrixXd::Zero(f, f);
  for (Eigen::Index i = 0; i < m; ++i) {
    const Eigen::VectorXd& mu = labels[static_cast<std::size_t>(i)] == 0 ? mu0 : mu1;
    const Eigen::VectorXd d = features.row(i).transpose() - mu;
    sw += d * d.transpose();
  }
  sw /= std::max(1.0, static_cast<double>(m - 2));
  sw += (1e-6 * sw.trace() / static_cast<double>(f)) *
        Eigen::MatrixXd::Identity(f, f);

  LdaModel model;
  model.weights = sw.ldlt().solve(mu1 - mu0);
  if (!model.weights.allFinite())
    throw DataError("lda_fit: within-class covariance is degenerate");
  model.bias = -model.weights.dot(0.5 * (mu0 + mu1));
  return model;
}

// Ties at the boundary (score exactly 0) go to class 1.
inline int lda_predict(const LdaModel& model, const Eigen::VectorXd& features) {
  return model.weights.dot(features) + model.bias >= 0.0 ? 1 : 0;
}

inline double accuracy(const std::vector<int>& preds, const std::vector<int>& labels) {
  if (preds.size() != labels.size())
    throw ConfigError("accuracy: length mismatch");
  if (preds.empty()) throw ConfigError("accuracy: empty input");
  std::size_t hit = 0;
  for (std::size_t i = 0; i < preds.size(); ++i)
    if (preds[i] == labels[i]) ++hit;
  return 100.0 * static_cast<double>(hit) / static_cast<double>(preds.size());
}

// Balanced classification accuracy: mean per-class recall over the classes
// present in the labels.
inline double bca(const std::vector<int>& preds, const std::vector<int>& labels) {
  if (preds.size() != labels.size()) throw ConfigError("bca: length mismatch");
  if (preds.empty()) throw ConfigError("bca: empty input");
  std::vector<int> present;
  for (int y : labels)
    if (std::find(present.begin(), present.end(), y) == present.end())
      present.push_back(y);
  double recall_sum = 0.0;
  for (int cls : present) {
    std::size_t total = 0, hit = 0;
    for (std::size_t i = 0; i < labels.size(); ++i) {
      if (labels[i] != cls) continue;
      ++total;
      if (preds[i] == cls) ++hit;
    }
    recall_sum += static_cast<double>(hit) / static_cast<double>(total);
  }
  return 100.0 * recall_sum / static_cast<double>(present.size());
}

// Per-trial feature table: "subject,label,f1..fF", one row per trial.
inline void export_features_csv(const std::vector<Trial>& trials,
                                const CspModel& model,
                                const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw DataError("cannot open file for writing: " + path.string());
  out << "subject,label";
  for (Eigen::Index k = 0; k < model.filter_count(); ++k) out << ",f" << (k + 1);
  out << '\n';
  out.precision(9);
  for (const Trial& t : trials) {
    const Eigen::VectorXd f = csp_features(t, model);
    out << t.subject << ',' << t.label;
    for (Eigen::Index k = 0; k < f.size(); ++k) out << ',' << f[k];
    out << '\n';
  }
  if (!out) throw DataError("write failed: " + path.string());
}

}  // namespace eegaug
