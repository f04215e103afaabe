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

#include "anchoreval/simjudge.h"

#include <cmath>
#include <cstdio>

#include "anchoreval/bradley_terry.h"
#include "anchoreval/error.h"
#include "anchoreval/hashing.h"
#include "anchoreval/prompts.h"

namespace anchoreval {
namespace {

double TrueTheta(const SimConfig& cfg, const std::string& model) {
  auto it = cfg.true_theta.find(model);
  if (it == cfg.true_theta.end()) {
    throw UnknownModelError("no true theta for model '" + model + "'");
  }
  return it->second;
}

}  // namespace

void ValidateSimConfig(const SimConfig& cfg) {
  if (!(cfg.position_bias >= 0.0 && cfg.position_bias <= 0.5)) {
    throw ValidationError("position_bias must lie in [0, 0.5]");
  }
  if (!(cfg.noise_temperature > 0.0) || !std::isfinite(cfg.noise_temperature)) {
    throw ValidationError("noise_temperature must be > 0");
  }
  for (const auto& [model, theta] : cfg.true_theta) {
    if (!std::isfinite(theta)) {
      throw ValidationError("true theta of '" + model + "' is not finite");
    }
  }
  if (cfg.input_tokens < 0 || cfg.output_tokens < 0) {
    throw ValidationError("token counts must be >= 0");
  }
}

void to_json(Json& j, const SimConfig& v) {
  j = Json{{"true_theta", v.true_theta},
           {"position_bias", v.position_bias},
           {"noise_temperature", v.noise_temperature},
           {"rng_seed", v.rng_seed},
           {"input_tokens", v.input_tokens},
           {"output_tokens", v.output_tokens}};
}

void from_json(const Json& j, SimConfig& v) {
  SimConfig d;
  v.true_theta =
      j.value("true_theta", std::map<std::string, double>{});
  v.position_bias = j.value("position_bias", d.position_bias);
  v.noise_temperature = j.value("noise_temperature", d.noise_temperature);
  v.rng_seed = j.value("rng_seed", d.rng_seed);
  v.input_tokens = j.value("input_tokens", d.input_tokens);
  v.output_tokens = j.value("output_tokens", d.output_tokens);
}

SlotProbability SlotAProbability(double theta_a, double theta_b,
                                 const SimConfig& cfg) {
  SlotProbability s;
  double p = Sigmoid((theta_a - theta_b) / cfg.noise_temperature) +
             cfg.position_bias;
  if (p > 1.0) {
    p = 1.0;
    s.clamped = true;
  } else if (p < 0.0) {
    p = 0.0;
    s.clamped = true;
  }
  s.p_a = p;
  return s;
}

SimDraw SimulateDraw(const PairAssignment& pair, const SimConfig& cfg,
                     const TranslationStore* translations,
                     std::uint64_t replicate) {
  const std::string& a = pair.a_model();
  const std::string& b = pair.b_model();
  const double theta_a = TrueTheta(cfg, a);
  const double theta_b = TrueTheta(cfg, b);

  const std::string rep = std::to_string(replicate);
  const double u = UnitInterval(KeyedDigest(
      cfg.rng_seed,
      {"sim-judge\x1f", pair.item_id, "\x1f", pair.left_model, "\x1f",
       pair.right_model, "\x1f", rep}));

  SimDraw draw;
  double p_a;
  bool a_empty = false, b_empty = false;
  if (translations != nullptr) {
    const Translation* ta = translations->Find(pair.item_id, a);
    const Translation* tb = translations->Find(pair.item_id, b);
    a_empty = ta == nullptr || ta->text.empty();
    b_empty = tb == nullptr || tb->text.empty();
  }
  if (a_empty && b_empty) {
    p_a = 0.5;
  } else if (a_empty) {
    p_a = 0.0;
  } else if (b_empty) {
    p_a = 1.0;
  } else {
    SlotProbability s = SlotAProbability(theta_a, theta_b, cfg);
    p_a = s.p_a;
    draw.clamped = s.clamped;
  }

  Judgment& j = draw.judgment;
  j.pair = pair;
  j.verdict = u < p_a ? Verdict::kA : Verdict::kB;
  j.winner_model = WinnerFor(pair, j.verdict);
  char buf[96];
  std::snprintf(buf, sizeof(buf), "simulated verdict, P(A) = %.6f", p_a);
  j.analysis_text = buf;
  j.input_tokens = cfg.input_tokens;
  j.output_tokens = cfg.output_tokens;
  j.judge = JudgeRef{std::string(kSimJudgeModel), ComparePromptId()};
  j.judged_at = std::string(kSimTimestamp);
  return draw;
}

SimBatch SimulatePlan(const std::vector<PairAssignment>& pairs,
                      const SimConfig& cfg,
                      const TranslationStore* translations) {
  SimBatch batch;
  batch.judgments.reserve(pairs.size());
  for (const PairAssignment& p : pairs) {
    SimDraw d = SimulateDraw(p, cfg, translations);
    if (d.clamped) ++batch.clamped;
    batch.judgments.push_back(std::move(d.judgment));
  }
  return batch;
}

std::vector<double> EvenlySpacedThetas(int n, double spread) {
  std::vector<double> out(static_cast<size_t>(std::max(n, 0)));
  for (int i = 0; i < n; ++i) {
    out[i] = n == 1 ? 0.0 : -spread / 2.0 + spread * i / (n - 1);
  }
  return out;
}

double TopExpectedWinRate(int n, double spread, double temperature) {
  if (n < 2) throw DegenerateError("need at least 2 models");
  std::vector<double> t = EvenlySpacedThetas(n, spread);
  double sum = 0.0;
  for (int j = 0; j + 1 < n; ++j) {
    sum += Sigmoid((t[n - 1] - t[j]) / temperature);
  }
  return sum / (n - 1);
}

double SpreadForTopWinRate(int n, double target, double temperature) {
  if (!(target > 0.5 && target < 1.0)) {
    throw ValidationError("target top win rate must lie in (0.5, 1)");
  }
  double lo = 0.0, hi = 1.0;
  while (TopExpectedWinRate(n, hi, temperature) < target) hi *= 2.0;
  for (int i = 0; i < 200; ++i) {
    double mid = 0.5 * (lo + hi);
    if (TopExpectedWinRate(n, mid, temperature) < target) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

std::string SynthTranslationText(std::string_view model_id,
                                 std::string_view item_id) {
  return "[" + std::string(model_id) + "] translation of " +
         std::string(item_id);
}

std::string SynthAnchorId(int index, int n_anchors) {
  int width = 2;
  for (int v = n_anchors; v >= 100; v /= 10) ++width;
  std::string digits = std::to_string(index + 1);
  if (static_cast<int>(digits.size()) < width) {
    digits.insert(0, static_cast<size_t>(width) - digits.size(), '0');
  }
  return "sim/anchor-" + digits;
}

SynthResult SynthAnchorSet(int n_anchors, double theta_spread,
                           const ItemSet& items, const SimConfig& cfg,
                           std::uint64_t pair_seed) {
  if (n_anchors < 2) {
    throw DegenerateError("a synthetic anchor set needs at least 2 anchors");
  }
  SynthResult out;
  SimConfig sim = cfg;
  std::vector<double> thetas = EvenlySpacedThetas(n_anchors, theta_spread);

  AnchorSet& set = out.anchors;
  set.version = Version::Parse("1.0.0");
  set.judge.model.id = std::string(kSimJudgeModel);
  set.judge.model.endpoint = "simulated";
  set.judge.prompt_id = ComparePromptId();
  set.judge.decoding.temperature = 0.0;
  set.judge.model.decoding = set.judge.decoding;
  for (int i = 0; i < n_anchors; ++i) {
    ModelRef m;
    m.id = SynthAnchorId(i, n_anchors);
    set.anchors.push_back(m);
    sim.true_theta[m.id] = thetas[i];
  }
  for (const Item& item : items.items()) {
    for (const ModelRef& m : set.anchors) {
      Translation t;
      t.item_id = item.id;
      t.model_id = m.id;
      t.text = SynthTranslationText(m.id, item.id);
      t.generated_at = std::string(kSimTimestamp);
      t.generation_meta["source"] = "synthetic";
      set.translations.Insert(std::move(t));
    }
  }
  for (const Item& item : items.items()) {
    for (int i = 0; i < n_anchors; ++i) {
      for (int k = i + 1; k < n_anchors; ++k) {
        PairAssignment p = AssignPair(pair_seed, item.id, set.anchors[i].id,
                                      set.anchors[k].id);
        set.frozen_judgments.push_back(SimulateJudgment(p, sim));
      }
    }
  }
  out.true_theta = std::move(sim.true_theta);
  return out;
}

std::vector<BiasSweepRow> BiasSweep(const SimConfig& cfg,
                                    const std::vector<double>& biases,
                                    std::int64_t judgments,
                                    std::uint64_t pair_seed) {
  std::vector<std::string> models;
  for (const auto& [id, theta] : cfg.true_theta) models.push_back(id);
  if (models.size() < 2) {
    throw DegenerateError("bias sweep needs at least 2 models");
  }
  std::vector<std::pair<size_t, size_t>> pairs;
  for (size_t i = 0; i < models.size(); ++i) {
    for (size_t k = i + 1; k < models.size(); ++k) pairs.emplace_back(i, k);
  }
  std::vector<PairAssignment> plan;
  plan.reserve(static_cast<size_t>(judgments));
  for (std::int64_t n = 0; n < judgments; ++n) {
    const auto& [i, k] = pairs[static_cast<size_t>(n) % pairs.size()];
    const std::string item =
        "sweep-" + std::to_string(static_cast<size_t>(n) / pairs.size());
    plan.push_back(AssignPair(pair_seed, item, models[i], models[k]));
  }

  auto model_rates = [&](const SimConfig& c, std::int64_t* slot_a,
                         std::int64_t* clamped) {
    std::map<std::string, std::pair<std::int64_t, std::int64_t>> wm;
    for (const PairAssignment& p : plan) {
      SimDraw d = SimulateDraw(p, c);
      if (d.judgment.verdict == Verdict::kA) ++*slot_a;
      if (d.clamped) ++*clamped;
      ++wm[p.left_model].second;
      ++wm[p.right_model].second;
      ++wm[*d.judgment.winner_model].first;
    }
    std::map<std::string, double> rates;
    for (const auto& [id, wl] : wm) {
      rates[id] = static_cast<double>(wl.first) / static_cast<double>(wl.second);
    }
    return rates;
  };

  SimConfig base = cfg;
  base.position_bias = 0.0;
  std::int64_t unused_a = 0, unused_c = 0;
  const auto unbiased = model_rates(base, &unused_a, &unused_c);

  std::vector<BiasSweepRow> rows;
  for (double bias : biases) {
    SimConfig c = cfg;
    c.position_bias = bias;
    ValidateSimConfig(c);
    BiasSweepRow row;
    row.bias = bias;
    row.judgments = judgments;
    std::int64_t slot_a = 0;
    const auto rates = model_rates(c, &slot_a, &row.clamped);
    row.slot_a_win_rate =
        judgments > 0 ? static_cast<double>(slot_a) / judgments : 0.0;
    for (const auto& [id, r] : rates) {
      row.max_model_shift = std::max(row.max_model_shift,
                                     std::abs(r - unbiased.at(id)));
    }
    rows.push_back(row);
  }
  return rows;
}

}  // namespace anchoreval
