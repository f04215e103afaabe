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

#include "anchoreval/bradley_terry.h"

#include <algorithm>
#include <cmath>
#include <limits>

#include "anchoreval/error.h"

namespace anchoreval {
namespace {

// Root of f(t) = w - d * e^t - lambda * t, which is strictly decreasing when
// d > 0 or lambda > 0. Bracketed Newton with bisection fallback.
double SolveCoordinate(double w, double d, double lambda, double start) {
  if (lambda == 0.0) return std::log(w / d);
  if (d == 0.0) return w / lambda;
  auto f = [&](double t) { return w - d * std::exp(t) - lambda * t; };

  double lo = start, hi = start;
  double step = 1.0;
  if (f(start) > 0.0) {
    do {
      lo = hi;
      hi = start + step;
      step *= 2.0;
    } while (f(hi) > 0.0);
  } else {
    do {
      hi = lo;
      lo = start - step;
      step *= 2.0;
    } while (f(lo) < 0.0);
  }

  double x = std::clamp(start, lo, hi);
  for (int iter = 0; iter < 200; ++iter) {
    double fx = f(x);
    if (fx == 0.0) return x;
    if (fx > 0.0) {
      lo = x;
    } else {
      hi = x;
    }
    double dfx = -d * std::exp(x) - lambda;
    double next = x - fx / dfx;
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    if (std::abs(next - x) <= 1e-15 * (1.0 + std::abs(x)) ||
        hi - lo <= 1e-15 * (1.0 + std::abs(x))) {
      return next;
    }
    x = next;
  }
  return x;
}

}  // namespace

MatchMatrix::MatchMatrix(std::vector<std::string> models)
    : models_(std::move(models)), wins_(models_.size() * models_.size(), 0) {}

int MatchMatrix::IndexOf(std::string_view model) const {
  for (size_t i = 0; i < models_.size(); ++i) {
    if (models_[i] == model) return static_cast<int>(i);
  }
  return -1;
}

void MatchMatrix::AddWin(size_t winner, size_t loser, std::int64_t count) {
  if (winner == loser) return;  // diagonal stays zero
  wins_[winner * size() + loser] += count;
}

std::int64_t MatchMatrix::TotalWins(size_t i) const {
  std::int64_t total = 0;
  for (size_t j = 0; j < size(); ++j) total += wins(i, j);
  return total;
}

std::int64_t MatchMatrix::TotalMatches(size_t i) const {
  std::int64_t total = 0;
  for (size_t j = 0; j < size(); ++j) total += matches(i, j);
  return total;
}

double BtFit::Theta(std::string_view model) const {
  for (size_t i = 0; i < models.size(); ++i) {
    if (models[i] == model) return theta[i];
  }
  throw UnknownModelError("model '" + std::string(model) + "' is not in the fit");
}

std::map<std::string, double> BtFit::ThetaMap() const {
  std::map<std::string, double> out;
  for (size_t i = 0; i < models.size(); ++i) out[models[i]] = theta[i];
  return out;
}

double Sigmoid(double x) {
  if (x >= 0) return 1.0 / (1.0 + std::exp(-x));
  double e = std::exp(x);
  return e / (1.0 + e);
}

double LogSigmoid(double x) {
  if (x >= 0) return -std::log1p(std::exp(-x));
  return x - std::log1p(std::exp(x));
}

double PenalizedLogLikelihood(const MatchMatrix& m,
                              std::span<const double> theta, double lambda) {
  const size_t n = m.size();
  double ll = 0.0;
  for (size_t i = 0; i < n; ++i) {
    for (size_t j = 0; j < n; ++j) {
      if (auto w = m.wins(i, j); w > 0) {
        ll += static_cast<double>(w) * LogSigmoid(theta[i] - theta[j]);
      }
    }
  }
  double sq = 0.0;
  for (double t : theta) sq += t * t;
  return ll - 0.5 * lambda * sq;
}

std::vector<double> PenalizedGradient(const MatchMatrix& m,
                                      std::span<const double> theta,
                                      double lambda) {
  const size_t n = m.size();
  std::vector<double> g(n, 0.0);
  for (size_t i = 0; i < n; ++i) {
    double gi = 0.0;
    for (size_t j = 0; j < n; ++j) {
      if (i == j) continue;
      // d/dtheta_i of w_ij log s(ti-tj) + w_ji log s(tj-ti).
      double p = Sigmoid(theta[i] - theta[j]);
      gi += static_cast<double>(m.wins(i, j)) * (1.0 - p) -
            static_cast<double>(m.wins(j, i)) * p;
    }
    g[i] = gi - lambda * theta[i];
  }
  return g;
}

BtFit FitBradleyTerry(const MatchMatrix& m, const FitOptions& options) {
  const size_t n = m.size();
  const double lambda = options.prior_strength;
  if (n < 2) {
    throw DegenerateError("Bradley-Terry fit needs at least 2 models, got " +
                          std::to_string(n));
  }
  if (!(lambda >= 0.0)) throw DegenerateError("prior strength must be >= 0");

  std::vector<double> wins(n);
  for (size_t i = 0; i < n; ++i) {
    wins[i] = static_cast<double>(m.TotalWins(i));
    if (lambda == 0.0) {
      const auto total = m.TotalMatches(i);
      if (total == 0 || m.TotalWins(i) == 0 || m.TotalWins(i) == total) {
        throw DegenerateError(
            "model '" + m.models()[i] +
            "' has no matches, no wins or no losses; the unpenalized MLE "
            "diverges (use a positive prior strength)");
      }
    }
  }

  std::vector<double> theta(n, 0.0), next(n, 0.0), gamma(n, 1.0);
  BtFit fit;
  fit.models = m.models();
  fit.prior_strength = lambda;

  int iter = 0;
  bool converged = false;
  while (iter < options.max_iterations) {
    for (size_t i = 0; i < n; ++i) gamma[i] = std::exp(theta[i]);
    double max_delta = 0.0;
    for (size_t i = 0; i < n; ++i) {
      double d = 0.0;
      for (size_t j = 0; j < n; ++j) {
        if (auto nij = m.matches(i, j); nij > 0) {
          d += static_cast<double>(nij) / (gamma[i] + gamma[j]);
        }
      }
      next[i] = SolveCoordinate(wins[i], d, lambda, theta[i]);
      max_delta = std::max(max_delta, std::abs(next[i] - theta[i]));
    }
    theta.swap(next);
    ++iter;
    // The likelihood is shift-invariant and the ridge term is smallest at
    // zero mean, so centering is the exact maximizer along the shift
    // direction. Without it MM creeps along that direction at rate ~lambda.
    {
      double mean = 0.0;
      for (double t : theta) mean += t;
      mean /= static_cast<double>(n);
      for (double& t : theta) t -= mean;
    }
    if (options.on_iteration) {
      options.on_iteration(iter, PenalizedLogLikelihood(m, theta, lambda));
    }
    if (max_delta < options.tol) {
      converged = true;
      break;
    }
  }

  double mean = 0.0;
  for (double t : theta) mean += t;
  mean /= static_cast<double>(n);
  for (double& t : theta) t -= mean;

  double bar = 0.0;
  for (double t : theta) bar += t;
  fit.theta = std::move(theta);
  fit.theta_bar = bar / static_cast<double>(n);
  fit.iterations = iter;
  fit.converged = converged;
  fit.log_likelihood = PenalizedLogLikelihood(m, fit.theta, 0.0);
  fit.penalized_objective = PenalizedLogLikelihood(m, fit.theta, lambda);
  return fit;
}

double LtFromCentered(double centered_theta) {
  static const double kMin = std::nextafter(0.0, 1.0);
  static const double kMax = std::nextafter(10.0, 0.0);
  return std::clamp(10.0 * Sigmoid(centered_theta), kMin, kMax);
}

double LtScore(const BtFit& fit, std::string_view model) {
  return LtFromCentered(fit.Theta(model) - fit.theta_bar);
}

}  // namespace anchoreval
