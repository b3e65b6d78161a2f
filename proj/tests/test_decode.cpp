#include <catch2/catch.hpp>

#include <filesystem>
#include <fstream>

#include "eegaug/decode.hpp"
#include "eegaug/rng.hpp"

using namespace eegaug;

namespace {

Trial gaussian_trial(Rng& rng, Eigen::Index c, Eigen::Index t,
                     const Eigen::VectorXd& channel_scales, int label) {
  Trial trial;
  trial.samples.resize(c, t);
  for (Eigen::Index i = 0; i < c; ++i)
    for (Eigen::Index j = 0; j < t; ++j)
      trial.samples(i, j) = channel_scales[i] * rng.gaussian();
  trial.fs = 250.0;
  trial.label = label;
  return trial;
}

// Re-derives the pooled covariance the way csp_fit is specified to build
// it: trace-normalized per-trial covariances, class means, shrinkage.
Eigen::MatrixXd pooled_cov_oracle(const std::vector<Trial>& trials,
                                  const std::vector<int>& labels) {
  const Eigen::Index c = trials[0].channel_count();
  Eigen::MatrixXd s0 = Eigen::MatrixXd::Zero(c, c);
  Eigen::MatrixXd s1 = Eigen::MatrixXd::Zero(c, c);
  double n0 = 0.0, n1 = 0.0;
  for (std::size_t i = 0; i < trials.size(); ++i) {
    Eigen::MatrixXd cov = trials[i].samples * trials[i].samples.transpose();
    cov /= cov.trace();
    if (labels[i] == 0) {
      s0 += cov;
      n0 += 1.0;
    } else {
      s1 += cov;
      n1 += 1.0;
    }
  }
  Eigen::MatrixXd pooled = s0 / n0 + s1 / n1;
  pooled += (1e-8 * pooled.trace() / static_cast<double>(c)) *
            Eigen::MatrixXd::Identity(c, c);
  return pooled;
}

}  // namespace

TEST_CASE("csp recovers axis filters on diagonal class covariances") {
  // Exact construction: orthogonal rows give diag(2,1)/3 vs diag(1,2)/3
  // trace-normalized covariances, so the generalized eigenvectors are the
  // coordinate axes.
  Trial t0, t1;
  t0.samples.resize(2, 4);
  t0.samples << std::sqrt(2.0), std::sqrt(2.0), -std::sqrt(2.0), -std::sqrt(2.0),
                1, -1, 1, -1;
  t1.samples.resize(2, 4);
  t1.samples << 1, 1, -1, -1,
                std::sqrt(2.0), -std::sqrt(2.0), std::sqrt(2.0), -std::sqrt(2.0);
  t0.fs = t1.fs = 250.0;
  const std::vector<Trial> trials{t0, t1};
  const std::vector<int> labels{0, 1};

  const CspModel model = csp_fit(trials, labels, 2);
  REQUIRE(model.filter_count() == 2);
  for (Eigen::Index j = 0; j < 2; ++j) {
    const double big = model.filters.col(j).cwiseAbs().maxCoeff();
    const double small = model.filters.col(j).cwiseAbs().minCoeff();
    REQUIRE(big / std::max(small, 1e-300) > 100.0);
  }
  // Class-0 dominant direction first: class 0 has its variance on axis 0.
  REQUIRE(std::abs(model.filters(0, 0)) > std::abs(model.filters(1, 0)));
  REQUIRE(std::abs(model.filters(1, 1)) > std::abs(model.filters(0, 1)));
}

TEST_CASE("csp satisfies the whitening constraint") {
  Rng rng(17);
  std::vector<Trial> trials;
  std::vector<int> labels;
  Eigen::VectorXd scale0(6), scale1(6);
  scale0 << 2.0, 1.0, 1.0, 1.5, 0.7, 1.0;
  scale1 << 1.0, 2.0, 1.0, 0.7, 1.5, 1.0;
  for (int i = 0; i < 30; ++i) {
    trials.push_back(gaussian_trial(rng, 6, 200, i % 2 ? scale1 : scale0, i % 2));
    labels.push_back(i % 2);
  }
  const CspModel model = csp_fit(trials, labels, 4);
  const Eigen::MatrixXd pooled = pooled_cov_oracle(trials, labels);
  const Eigen::MatrixXd gram =
      model.filters.transpose() * pooled * model.filters;
  REQUIRE((gram - Eigen::MatrixXd::Identity(4, 4)).cwiseAbs().maxCoeff() < 1e-8);
}

TEST_CASE("csp clamps the filter count to the channel count") {
  Rng rng(18);
  std::vector<Trial> trials;
  std::vector<int> labels;
  const Eigen::VectorXd ones = Eigen::VectorXd::Ones(3);
  for (int i = 0; i < 10; ++i) {
    trials.push_back(gaussian_trial(rng, 3, 64, ones, i % 2));
    labels.push_back(i % 2);
  }
  const CspModel model = csp_fit(trials, labels, 10);
  REQUIRE(model.filter_count() == 2);
}

TEST_CASE("csp rejects degenerate inputs") {
  Rng rng(19);
  const Eigen::VectorXd ones = Eigen::VectorXd::Ones(3);
  std::vector<Trial> trials{gaussian_trial(rng, 3, 64, ones, 0),
                            gaussian_trial(rng, 3, 64, ones, 0)};
  SECTION("single class") {
    REQUIRE_THROWS_AS(csp_fit(trials, {0, 0}, 2), DataError);
  }
  SECTION("odd filter count") {
    REQUIRE_THROWS_AS(csp_fit(trials, {0, 1}, 3), ConfigError);
  }
  SECTION("tainted test trial") {
    std::vector<Trial> tainted = trials;
    tainted[0].test_only = true;
    REQUIRE_THROWS_AS(csp_fit(tainted, {0, 1}, 2), std::logic_error);
  }
}

TEST_CASE("csp features are normalized log variances") {
  Rng rng(20);
  Eigen::VectorXd scale0(4), scale1(4);
  scale0 << 2.0, 1.0, 1.2, 0.8;
  scale1 << 1.0, 2.0, 0.8, 1.2;
  std::vector<Trial> trials;
  std::vector<int> labels;
  for (int i = 0; i < 20; ++i) {
    trials.push_back(gaussian_trial(rng, 4, 128, i % 2 ? scale1 : scale0, i % 2));
    labels.push_back(i % 2);
  }
  const CspModel model = csp_fit(trials, labels, 4);

  SECTION("a trial living in one filter direction maximizes that feature") {
    // Build samples as (pseudo)inverse-projected impulse along filter 0:
    // project W^T X back out of a rank-1 trial aligned with column 0.
    const Eigen::MatrixXd winv =
        model.filters.completeOrthogonalDecomposition().pseudoInverse();
    Trial probe;
    probe.samples.resize(4, 64);
    Eigen::RowVectorXd osc(64);
    for (int i = 0; i < 64; ++i) osc[i] = std::sin(0.3 * i);
    probe.samples = winv.row(0).transpose() * osc;
    probe.fs = 250.0;
    const Eigen::VectorXd f = csp_features(probe, model);
    Eigen::Index argmax;
    f.maxCoeff(&argmax);
    REQUIRE(argmax == 0);
  }
  SECTION("scale invariance and normalization") {
    const Eigen::VectorXd f = csp_features(trials[0], model);
    Trial scaled = trials[0];
    scaled.samples *= 12.5;
    const Eigen::VectorXd fs2 = csp_features(scaled, model);
    REQUIRE((f - fs2).cwiseAbs().maxCoeff() < 1e-12);
    REQUIRE(f.array().exp().sum() == Approx(1.0).margin(1e-9));
  }
  SECTION("a silent trial has no features") {
    Trial silent;
    silent.samples = Eigen::MatrixXd::Zero(4, 32);
    silent.fs = 250.0;
    REQUIRE_THROWS_AS(csp_features(silent, model), DataError);
  }
}

TEST_CASE("lda places the boundary at the class midpoint") {
  Eigen::MatrixXd features(8, 1);
  features << -1.2, -0.8, -1.1, -0.9, 0.8, 1.2, 0.9, 1.1;
  const std::vector<int> labels{0, 0, 0, 0, 1, 1, 1, 1};
  const LdaModel model = lda_fit(features, labels);

  REQUIRE(lda_predict(model, Eigen::VectorXd::Constant(1, 0.1)) == 1);
  REQUIRE(lda_predict(model, Eigen::VectorXd::Constant(1, -0.1)) == 0);
  // boundary: w*0 + b == w*midpoint(means) + b == 0
  REQUIRE(std::abs(model.weights[0] * 0.0 + model.bias) < 1e-12);

  // an exact tie goes to class 1
  LdaModel tie;
  tie.weights = Eigen::VectorXd::Ones(1);
  tie.bias = 0.0;
  REQUIRE(lda_predict(tie, Eigen::VectorXd::Zero(1)) == 1);
}

TEST_CASE("lda separates a linearly separable toy set perfectly") {
  Rng rng(30);
  Eigen::MatrixXd features(40, 2);
  std::vector<int> labels;
  for (int i = 0; i < 40; ++i) {
    const int y = i % 2;
    features(i, 0) = (y ? 3.0 : -3.0) + rng.uniform(-1.0, 1.0);
    features(i, 1) = rng.uniform(-1.0, 1.0);
    labels.push_back(y);
  }
  const LdaModel model = lda_fit(features, labels);
  int correct = 0;
  for (int i = 0; i < 40; ++i)
    if (lda_predict(model, features.row(i).transpose()) == labels[i]) ++correct;
  REQUIRE(correct == 40);
}

TEST_CASE("lda predictions are invariant to common feature rescaling") {
  Rng rng(31);
  Eigen::MatrixXd features(30, 3);
  std::vector<int> labels;
  for (int i = 0; i < 30; ++i) {
    const int y = i < 15 ? 0 : 1;
    for (int j = 0; j < 3; ++j)
      features(i, j) = (y ? 1.0 : -1.0) * (j + 1) * 0.3 + rng.gaussian();
    labels.push_back(y);
  }
  const LdaModel plain = lda_fit(features, labels);
  const double s = 42.0;
  const LdaModel scaled = lda_fit(features * s, labels);
  Rng probe_rng(32);
  for (int i = 0; i < 50; ++i) {
    Eigen::VectorXd probe(3);
    for (int j = 0; j < 3; ++j) probe[j] = probe_rng.gaussian() * 2.0;
    REQUIRE(lda_predict(plain, probe) == lda_predict(scaled, probe * s));
  }
}

TEST_CASE("accuracy and balanced accuracy") {
  SECTION("perfect predictions score 100 on both") {
    const std::vector<int> y{0, 1, 0, 1, 1};
    REQUIRE(accuracy(y, y) == 100.0);
    REQUIRE(bca(y, y) == 100.0);
  }
  SECTION("all-majority predictions on a 90/10 split") {
    std::vector<int> labels(90, 0);
    labels.insert(labels.end(), 10, 1);
    const std::vector<int> preds(100, 0);
    REQUIRE(accuracy(preds, labels) == 90.0);
    REQUIRE(bca(preds, labels) == 50.0);
  }
  SECTION("recalls 0.8 and 0.6 average to BCA 70") {
    // class 0: 10 samples, 8 hit; class 1: 10 samples, 6 hit.
    std::vector<int> labels, preds;
    for (int i = 0; i < 10; ++i) {
      labels.push_back(0);
      preds.push_back(i < 8 ? 0 : 1);
    }
    for (int i = 0; i < 10; ++i) {
      labels.push_back(1);
      preds.push_back(i < 6 ? 1 : 0);
    }
    REQUIRE(bca(preds, labels) == Approx(70.0).margin(1e-12));
    REQUIRE(accuracy(preds, labels) == Approx(70.0).margin(1e-12));
  }
  SECTION("BCA equals accuracy on balanced labels") {
    Rng rng(40);
    std::vector<int> labels, preds;
    for (int i = 0; i < 60; ++i) {
      labels.push_back(i % 2);
      preds.push_back(static_cast<int>(rng.uniform_int(2)));
    }
    REQUIRE(bca(preds, labels) == Approx(accuracy(preds, labels)).margin(1e-12));
  }
  SECTION("empty input is rejected") {
    REQUIRE_THROWS_AS(accuracy({}, {}), ConfigError);
    REQUIRE_THROWS_AS(bca({}, {}), ConfigError);
  }
}

TEST_CASE("feature CSV export writes one row per trial") {
  Rng rng(50);
  const Eigen::VectorXd ones = Eigen::VectorXd::Ones(3);
  std::vector<Trial> trials;
  std::vector<int> labels;
  for (int i = 0; i < 6; ++i) {
    Trial t = gaussian_trial(rng, 3, 64, ones, i % 2);
    t.subject = i / 2;
    trials.push_back(std::move(t));
    labels.push_back(i % 2);
  }
  const CspModel model = csp_fit(trials, labels, 2);
  const auto path = std::filesystem::temp_directory_path() / "eegaug_features.csv";
  export_features_csv(trials, model, path);

  std::ifstream in(path);
  std::string line;
  std::getline(in, line);
  REQUIRE(line == "subject,label,f1,f2");
  int rows = 0;
  while (std::getline(in, line))
    if (!line.empty()) ++rows;
  REQUIRE(rows == 6);
  std::filesystem::remove(path);
}
