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

// Judge simulator with known ground-truth strengths. Slot A wins with
// probability clamp(sigma((theta*_A - theta*_B) / temperature) + bias, 0, 1).
// Every draw is a keyed hash of (rng_seed, item, models, replicate), so
// results do not depend on evaluation order or thread schedule.

#ifndef ANCHOREVAL_SIMJUDGE_H_
#define ANCHOREVAL_SIMJUDGE_H_

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "anchoreval/datamodel.h"
#include "anchoreval/pairing.h"

namespace anchoreval {

inline constexpr std::string_view kSimJudgeModel = "sim/judge";
inline constexpr std::string_view kSimTimestamp = "1970-01-01T00:00:00Z";

struct SimConfig {
  std::map<std::string, double> true_theta;
  double position_bias = 0.0;      // [0, 0.5], toward slot A
  double noise_temperature = 1.0;  // > 0
  std::uint64_t rng_seed = 42;
  // Token usage stamped on every simulated judgment.
  std::int64_t input_tokens = 0;
  std::int64_t output_tokens = 0;
};

// Throws ValidationError.
void ValidateSimConfig(const SimConfig& cfg);

void to_json(Json& j, const SimConfig& v);
void from_json(const Json& j, SimConfig& v);

struct SlotProbability {
  double p_a = 0.5;
  bool clamped = false;
};

SlotProbability SlotAProbability(double theta_a, double theta_b,
                                 const SimConfig& cfg);

struct SimDraw {
  Judgment judgment;
  bool clamped = false;
};

// Throws UnknownModelError for a model without a true theta. When
// `translations` is given, an empty translation loses with certainty (both
// empty: fair coin).
SimDraw SimulateDraw(const PairAssignment& pair, const SimConfig& cfg,
                     const TranslationStore* translations = nullptr,
                     std::uint64_t replicate = 0);

inline Judgment SimulateJudgment(const PairAssignment& pair,
                                 const SimConfig& cfg,
                                 const TranslationStore* translations = nullptr,
                                 std::uint64_t replicate = 0) {
  return SimulateDraw(pair, cfg, translations, replicate).judgment;
}

struct SimBatch {
  std::vector<Judgment> judgments;
  std::int64_t clamped = 0;
};

SimBatch SimulatePlan(const std::vector<PairAssignment>& pairs,
                      const SimConfig& cfg,
                      const TranslationStore* translations = nullptr);

// theta* for n evenly spaced models on [-spread/2, spread/2], ascending.
std::vector<double> EvenlySpacedThetas(int n, double spread);

// Expected win rate of the strongest of n evenly spaced models against all
// the others, with equal matches per opponent.
double TopExpectedWinRate(int n, double spread, double temperature = 1.0);

// Spread at which TopExpectedWinRate(n, spread) equals target (bisection).
double SpreadForTopWinRate(int n, double target, double temperature = 1.0);

// Placeholder text of a synthetic translation.
std::string SynthTranslationText(std::string_view model_id,
                                 std::string_view item_id);

// "sim/anchor-01", "sim/anchor-02", ... weakest first.
std::string SynthAnchorId(int index, int n_anchors);

struct SynthResult {
  AnchorSet anchors;
  std::map<std::string, double> true_theta;
};

// Evenly spaced anchors with placeholder translations for every item and a
// frozen judgment for every (item, anchor pair). The returned true_theta is
// merged with cfg.true_theta. Throws DegenerateError for n_anchors < 2.
SynthResult SynthAnchorSet(int n_anchors, double theta_spread,
                           const ItemSet& items, const SimConfig& cfg,
                           std::uint64_t pair_seed = kDefaultPairSeed);

struct BiasSweepRow {
  double bias = 0.0;
  std::int64_t judgments = 0;
  double slot_a_win_rate = 0.0;
  // Largest |model win rate - same draws at bias 0| over the models.
  double max_model_shift = 0.0;
  std::int64_t clamped = 0;
};

// Round-robin over `models` (all true thetas from cfg) on synthetic items
// until `judgments` draws, with seeded side assignment, at each bias level.
std::vector<BiasSweepRow> BiasSweep(const SimConfig& cfg,
                                    const std::vector<double>& biases,
                                    std::int64_t judgments,
                                    std::uint64_t pair_seed = kDefaultPairSeed);

}  // namespace anchoreval

#endif  // ANCHOREVAL_SIMJUDGE_H_
