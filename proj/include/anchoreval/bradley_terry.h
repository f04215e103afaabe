// Copyright 2025 The Anchoreval Authors.
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

// Bradley-Terry paired-comparison model with a Gaussian ridge prior.
//
// With log-strengths theta, P(i beats j) = sigma(theta_i - theta_j). The fit
// maximizes the penalized log-likelihood
//
//   L(theta) = sum_{i,j} wins[i][j] * log sigma(theta_i - theta_j)
//              - (lambda / 2) * sum_i theta_i^2
//
// by minorization-maximization. Using -log(x) >= -log(x_k) - (x - x_k) / x_k
// on each log(e^theta_i + e^theta_j) term gives a surrogate that separates
// per model:
//
//   Q_i(t) = W_i * t - D_i * e^t - (lambda / 2) * t^2,
//   W_i = sum_j wins[i][j],  D_i = sum_j n_ij / (e^theta_i + e^theta_j),
//
// where n_ij = wins[i][j] + wins[j][i]. Each iteration sets theta_i to the
// unique root of W_i - D_i e^t - lambda t = 0, so L never decreases. With
// lambda = 0 this is the classic update gamma_i = W_i / D_i. At the optimum
// the stationarity conditions sum to lambda * sum_i theta_i = 0, so the MAP
// estimate is centered. Each iteration also re-centers, which maximizes the
// objective along the shift direction and never lowers it.

#ifndef ANCHOREVAL_BRADLEY_TERRY_H_
#define ANCHOREVAL_BRADLEY_TERRY_H_

#include <cstdint>
#include <functional>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace anchoreval {

// wins(i, j) = number of judgments in which model i beat model j.
class MatchMatrix {
 public:
  MatchMatrix() = default;
  explicit MatchMatrix(std::vector<std::string> models);

  size_t size() const { return models_.size(); }
  const std::vector<std::string>& models() const { return models_; }
  // -1 when absent.
  int IndexOf(std::string_view model) const;

  std::int64_t wins(size_t i, size_t j) const { return wins_[i * size() + j]; }
  std::int64_t matches(size_t i, size_t j) const {
    return wins(i, j) + wins(j, i);
  }
  void AddWin(size_t winner, size_t loser, std::int64_t count = 1);

  std::int64_t TotalWins(size_t i) const;
  std::int64_t TotalMatches(size_t i) const;

 private:
  std::vector<std::string> models_;
  std::vector<std::int64_t> wins_;
};

inline constexpr double kDefaultPriorStrength = 0.01;
inline constexpr double kDefaultTolerance = 1e-8;
inline constexpr int kDefaultMaxIterations = 10000;

struct FitOptions {
  double prior_strength = kDefaultPriorStrength;  // lambda
  double tol = kDefaultTolerance;                 // on max |delta theta|
  int max_iterations = kDefaultMaxIterations;
  // Called after every iteration with the penalized objective.
  std::function<void(int iteration, double objective)> on_iteration;
};

struct BtFit {
  std::vector<std::string> models;
  std::vector<double> theta;  // centered
  double theta_bar = 0.0;     // mean of theta
  double log_likelihood = 0.0;
  double penalized_objective = 0.0;
  int iterations = 0;
  bool converged = false;  // false when max_iterations was hit
  double prior_strength = kDefaultPriorStrength;

  // Throws UnknownModelError.
  double Theta(std::string_view model) const;
  std::map<std::string, double> ThetaMap() const;
};

double Sigmoid(double x);
// log sigma(x) without overflow.
double LogSigmoid(double x);

// Unpenalized when lambda == 0.
double PenalizedLogLikelihood(const MatchMatrix& m,
                              std::span<const double> theta, double lambda);
std::vector<double> PenalizedGradient(const MatchMatrix& m,
                                      std::span<const double> theta,
                                      double lambda);

// Throws DegenerateError for fewer than 2 models, a negative prior, or (with
// lambda == 0) a model without wins, losses or matches, where the unpenalized
// MLE does not exist. Non-convergence is reported via BtFit::converged.
BtFit FitBradleyTerry(const MatchMatrix& m, const FitOptions& options = {});

// 10 * sigma(centered), kept strictly inside (0, 10).
double LtFromCentered(double centered_theta);
// 10 * sigma(theta_model - theta_bar). Throws UnknownModelError.
double LtScore(const BtFit& fit, std::string_view model);

}  // namespace anchoreval

#endif  // ANCHOREVAL_BRADLEY_TERRY_H_
