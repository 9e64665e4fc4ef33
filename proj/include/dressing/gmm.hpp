// Copyright 2026 The dressing-sim Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <Eigen/Cholesky>
#include <Eigen/Dense>
#include <algorithm>
#include <cstdint>
#include <limits>
#include <numbers>
#include <random>
#include <vector>

#include "dressing/errors.hpp"

namespace dressing {

using Eigen::MatrixXd;
using Eigen::VectorXd;

/// Gaussian mixture with an input/output block split for regression.
/// input_lo/input_hi record the axis-aligned bounding box of the training
/// inputs so queries outside the demonstrated region can be flagged.
struct GaussianMixture {
  int input_dim = 0;
  int output_dim = 0;
  VectorXd weights;                 // K, sums to 1
  std::vector<VectorXd> means;      // K x d
  std::vector<MatrixXd> covariances;  // K x (d x d), SPD
  VectorXd input_lo, input_hi;      // empty when unknown

  int components() const { return static_cast<int>(weights.size()); }
  int dim() const { return means.empty() ? 0 : static_cast<int>(means[0].size()); }

  void validate() const {
    if (components() < 1) throw DomainError("mixture has no components");
    if (std::abs(weights.sum() - 1.0) > 1e-12 || (weights.array() <= 0.0).any()) {
      throw DomainError("mixture weights must be positive and sum to 1");
    }
    const int d = dim();
    if (input_dim + output_dim != d) {
      throw DomainError("mixture block split does not match dimension");
    }
    for (const auto& cov : covariances) {
      if (cov.rows() != d || cov.cols() != d ||
          (cov - cov.transpose()).cwiseAbs().maxCoeff() > 1e-12) {
        throw DomainError("mixture covariance is not symmetric");
      }
      Eigen::SelfAdjointEigenSolver<MatrixXd> eig(cov);
      if (eig.eigenvalues().minCoeff() <= 0.0) {
        throw DomainError("mixture covariance is not positive definite");
      }
    }
  }

  bool inside_input_box(const VectorXd& x) const {
    if (input_lo.size() != input_dim) return true;  // box unknown
    return (x.array() >= input_lo.array()).all() &&
           (x.array() <= input_hi.array()).all();
  }
};

inline double log_mvn_pdf(const VectorXd& x, const VectorXd& mean,
                          const MatrixXd& cov) {
  const Eigen::LLT<MatrixXd> llt(cov);
  if (llt.info() != Eigen::Success) {
    throw NumericError("covariance is not positive definite");
  }
  const VectorXd centered = x - mean;
  const VectorXd alpha = llt.matrixL().solve(centered);
  double log_det = 0.0;
  for (int i = 0; i < cov.rows(); ++i) {
    log_det += std::log(llt.matrixL()(i, i));
  }
  return -0.5 * alpha.squaredNorm() - log_det -
         0.5 * cov.rows() * std::log(2.0 * std::numbers::pi);
}

namespace detail {

inline double log_sum_exp(const VectorXd& v) {
  const double m = v.maxCoeff();
  if (!std::isfinite(m)) return m;
  return m + std::log((v.array() - m).exp().sum());
}

struct KMeansResult {
  std::vector<int> labels;
  std::vector<VectorXd> centers;
  double inertia = std::numeric_limits<double>::infinity();
};

inline KMeansResult kmeans_once(const std::vector<VectorXd>& data, int k,
                                std::uint64_t seed) {
  const int n = static_cast<int>(data.size());
  std::mt19937_64 rng(seed);
  // Fisher-Yates prefix to draw k distinct starting centers.
  std::vector<int> idx(n);
  for (int i = 0; i < n; ++i) idx[i] = i;
  for (int i = 0; i < k; ++i) {
    const int j = i + static_cast<int>(rng() % static_cast<std::uint64_t>(n - i));
    std::swap(idx[i], idx[j]);
  }
  KMeansResult res;
  res.centers.resize(k);
  for (int c = 0; c < k; ++c) res.centers[c] = data[idx[c]];
  res.labels.assign(n, -1);

  for (int iter = 0; iter < 100; ++iter) {
    bool changed = false;
    for (int i = 0; i < n; ++i) {
      int best = 0;
      double best_d = (data[i] - res.centers[0]).squaredNorm();
      for (int c = 1; c < k; ++c) {
        const double d = (data[i] - res.centers[c]).squaredNorm();
        if (d < best_d) {
          best_d = d;
          best = c;
        }
      }
      if (res.labels[i] != best) {
        res.labels[i] = best;
        changed = true;
      }
    }
    if (!changed && iter > 0) break;

    for (int c = 0; c < k; ++c) {
      VectorXd sum = VectorXd::Zero(data[0].size());
      int count = 0;
      for (int i = 0; i < n; ++i) {
        if (res.labels[i] == c) {
          sum += data[i];
          ++count;
        }
      }
      if (count == 0) {
        // Re-seed an empty cluster with the point farthest from its center.
        int far = 0;
        double far_d = -1.0;
        for (int i = 0; i < n; ++i) {
          const double d = (data[i] - res.centers[res.labels[i]]).squaredNorm();
          if (d > far_d) {
            far_d = d;
            far = i;
          }
        }
        res.centers[c] = data[far];
        res.labels[far] = c;
      } else {
        res.centers[c] = sum / count;
      }
    }
  }

  res.inertia = 0.0;
  for (int i = 0; i < n; ++i) {
    res.inertia += (data[i] - res.centers[res.labels[i]]).squaredNorm();
  }
  return res;
}

inline KMeansResult kmeans(const std::vector<VectorXd>& data, int k,
                           std::uint64_t seed, int restarts = 10) {
  KMeansResult best;
  for (int r = 0; r < restarts; ++r) {
    KMeansResult cand = kmeans_once(data, k, seed * 1000003ULL + r);
    if (cand.inertia < best.inertia) best = std::move(cand);
  }
  return best;
}

}  // namespace detail

struct GmmFit {
  GaussianMixture model;
  std::vector<double> log_likelihood;  // total, one entry per EM iteration
};

/// K-means initialized EM. Deterministic for a fixed seed; stops when the
/// per-sample log-likelihood improves by less than 1e-7 or after 500
/// iterations. Covariance diagonals get a small data-scaled regularizer
/// each M-step. A component whose responsibility mass collapses triggers
/// one re-seeded fit, then DegenerateComponent.
inline GmmFit fit_gmm_detailed(const std::vector<VectorXd>& data, int k,
                               std::uint64_t seed, bool reseeded = false) {
  if (k < 1) throw DomainError("component count must be >= 1");
  const int n = static_cast<int>(data.size());
  if (n < 10 * k) {
    throw InsufficientData("need at least 10 samples per component");
  }
  const int d = static_cast<int>(data[0].size());
  for (const auto& x : data) {
    if (x.size() != d) throw DomainError("data vectors differ in dimension");
  }

  // Regularization scale from the average per-dimension variance.
  VectorXd mean = VectorXd::Zero(d);
  for (const auto& x : data) mean += x;
  mean /= n;
  double var_scale = 0.0;
  for (const auto& x : data) var_scale += (x - mean).squaredNorm();
  var_scale /= (n * d);
  const double reg = std::max(1e-8 * var_scale, 1e-12);

  const detail::KMeansResult km = detail::kmeans(data, k, seed);

  GaussianMixture g;
  g.input_dim = d;
  g.output_dim = 0;
  g.weights = VectorXd::Zero(k);
  g.means.assign(k, VectorXd::Zero(d));
  g.covariances.assign(k, MatrixXd::Zero(d, d));
  for (int i = 0; i < n; ++i) {
    const int c = km.labels[i];
    g.weights[c] += 1.0;
    g.means[c] += data[i];
  }
  for (int c = 0; c < k; ++c) {
    g.means[c] /= std::max(g.weights[c], 1.0);
  }
  for (int i = 0; i < n; ++i) {
    const int c = km.labels[i];
    const VectorXd r = data[i] - g.means[c];
    g.covariances[c] += r * r.transpose();
  }
  for (int c = 0; c < k; ++c) {
    g.covariances[c] /= std::max(g.weights[c], 1.0);
    g.covariances[c].diagonal().array() += reg;
    g.weights[c] /= n;
    if (g.weights[c] <= 0.0) g.weights[c] = 1e-12;
  }
  g.weights /= g.weights.sum();

  GmmFit fit;
  MatrixXd log_resp(n, k);
  double prev_ll = -std::numeric_limits<double>::infinity();
  for (int iter = 0; iter < 500; ++iter) {
    // E-step.
    double ll = 0.0;
    for (int i = 0; i < n; ++i) {
      for (int c = 0; c < k; ++c) {
        log_resp(i, c) =
            std::log(g.weights[c]) + log_mvn_pdf(data[i], g.means[c],
                                                 g.covariances[c]);
      }
      const double lse = detail::log_sum_exp(log_resp.row(i).transpose());
      log_resp.row(i).array() -= lse;
      ll += lse;
    }
    fit.log_likelihood.push_back(ll);

    // M-step.
    for (int c = 0; c < k; ++c) {
      const Eigen::ArrayXd h = log_resp.col(c).array().exp();
      const double mass = h.sum();
      if (mass < 1e-6) {
        if (!reseeded) return fit_gmm_detailed(data, k, seed + 1, true);
        throw DegenerateComponent("EM component responsibility collapsed");
      }
      VectorXd mu = VectorXd::Zero(d);
      for (int i = 0; i < n; ++i) mu += h[i] * data[i];
      mu /= mass;
      MatrixXd cov = MatrixXd::Zero(d, d);
      for (int i = 0; i < n; ++i) {
        const VectorXd r = data[i] - mu;
        cov += h[i] * (r * r.transpose());
      }
      cov /= mass;
      cov.diagonal().array() += reg;
      g.weights[c] = mass / n;
      g.means[c] = mu;
      g.covariances[c] = cov;
    }
    g.weights /= g.weights.sum();

    if ((ll - prev_ll) / n < 1e-7 && iter > 0) break;
    prev_ll = ll;
  }

  fit.model = std::move(g);
  return fit;
}

inline GaussianMixture fit_gmm(const std::vector<VectorXd>& data, int k,
                               std::uint64_t seed) {
  return fit_gmm_detailed(data, k, seed).model;
}

/// BIC = -2 ln L + n_params ln N with full-covariance parameter count.
inline double bic_score(double log_likelihood, int k, int d, int n) {
  const double params = (k - 1) + k * d + k * d * (d + 1) / 2.0;
  return -2.0 * log_likelihood + params * std::log(static_cast<double>(n));
}

/// Picks the component count minimizing BIC over the (deduplicated) range;
/// ties break toward smaller K.
inline int select_k_bic(const std::vector<VectorXd>& data,
                        std::vector<int> k_range, std::uint64_t seed) {
  if (k_range.empty()) throw DomainError("empty component range");
  std::sort(k_range.begin(), k_range.end());
  k_range.erase(std::unique(k_range.begin(), k_range.end()), k_range.end());

  const int n = static_cast<int>(data.size());
  const int d = data.empty() ? 0 : static_cast<int>(data[0].size());
  int best_k = -1;
  double best_bic = std::numeric_limits<double>::infinity();
  for (int k : k_range) {
    double ll;
    try {
      ll = fit_gmm_detailed(data, k, seed).log_likelihood.back();
    } catch (const DegenerateComponent&) {
      continue;  // k unusable for this data
    }
    const double bic = bic_score(ll, k, d, n);
    if (bic < best_bic) {
      best_bic = bic;
      best_k = k;
    }
  }
  if (best_k < 0) throw DegenerateComponent("no component count fits the data");
  return best_k;
}

/// Responsibilities of the mixture components for an input block value.
inline VectorXd gmr_responsibilities(const GaussianMixture& g,
                                     const VectorXd& input) {
  const int k = g.components();
  const int di = g.input_dim;
  VectorXd logw(k);
  for (int c = 0; c < k; ++c) {
    logw[c] = std::log(g.weights[c]) +
              log_mvn_pdf(input, g.means[c].head(di),
                          g.covariances[c].topLeftCorner(di, di));
  }
  const double lse = detail::log_sum_exp(logw);
  return (logw.array() - lse).exp();
}

struct GmrResult {
  VectorXd mean;
  MatrixXd covariance;
};

/// Gaussian mixture regression: conditions the joint model on the input
/// block, blending the per-component Gaussian conditionals with their
/// responsibilities. Covariance follows the law of total variance.
inline GmrResult gmr_condition(const GaussianMixture& g,
                               const VectorXd& input) {
  if (input.size() != g.input_dim) {
    throw DomainError("GMR input dimension mismatch");
  }
  if (!input.allFinite()) {
    throw NumericalUnderflow("GMR input is not finite");
  }
  const int k = g.components();
  const int di = g.input_dim;
  const int do_ = g.output_dim;
  if (do_ < 1) throw DomainError("mixture has no output block");

  const VectorXd h = gmr_responsibilities(g, input);

  GmrResult res;
  res.mean = VectorXd::Zero(do_);
  res.covariance = MatrixXd::Zero(do_, do_);
  std::vector<VectorXd> cond_means(k);
  for (int c = 0; c < k; ++c) {
    const auto& cov = g.covariances[c];
    const Eigen::LLT<MatrixXd> llt(cov.topLeftCorner(di, di));
    const MatrixXd gain =
        llt.solve(cov.topRightCorner(di, do_)).transpose();  // Sigma_OI inv(Sigma_I)
    cond_means[c] =
        g.means[c].tail(do_) + gain * (input - g.means[c].head(di));
    const MatrixXd cond_cov =
        cov.bottomRightCorner(do_, do_) - gain * cov.topRightCorner(di, do_);
    res.mean += h[c] * cond_means[c];
    res.covariance +=
        h[c] * (cond_cov + cond_means[c] * cond_means[c].transpose());
  }
  res.covariance -= res.mean * res.mean.transpose();
  return res;
}

}  // namespace dressing
