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

#include "anchoreval/aggregate.h"

#include <algorithm>
#include <cstdio>
#include <set>
#include <sstream>

#include "anchoreval/error.h"

namespace anchoreval {
namespace {

std::string Fmt(const char* format, double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), format, v);
  return buf;
}

std::string Lt2(const std::optional<double>& v) {
  return v ? Fmt("%.2f", *v) : "n/a";
}

std::string Pct2(const std::optional<double>& v) {
  return v ? Fmt("%.2f%%", *v * 100.0) : "n/a";
}

std::string DecodingSummary(const DecodingConfig& d) {
  std::string out = "temperature=" + Fmt("%g", d.temperature) +
                    ", max_output_tokens=" +
                    std::to_string(d.max_output_tokens);
  for (const auto& [k, v] : d.extra) out += ", " + k + "=" + v;
  return out;
}

// The single non-anchor side of a candidate judgment.
const std::string& CandidateSide(const Judgment& j,
                                 const std::set<std::string>& anchors) {
  const bool left_anchor = anchors.count(j.pair.left_model) > 0;
  const bool right_anchor = anchors.count(j.pair.right_model) > 0;
  if (left_anchor == right_anchor) {
    throw ValidationError("judgment on item '" + j.pair.item_id +
                          "' does not pair one candidate with one anchor (" +
                          j.pair.left_model + " vs " + j.pair.right_model +
                          ")");
  }
  return left_anchor ? j.pair.right_model : j.pair.left_model;
}

void AddJudgment(MatchMatrix& m, const Judgment& j) {
  const std::string& winner = *j.winner_model;
  const std::string& loser =
      winner == j.pair.left_model ? j.pair.right_model : j.pair.left_model;
  m.AddWin(static_cast<size_t>(m.IndexOf(winner)),
           static_cast<size_t>(m.IndexOf(loser)));
}

Json OptionalJson(const std::optional<double>& v) {
  return v ? Json(*v) : Json(nullptr);
}

std::optional<double> OptionalDouble(const Json& j, const char* key) {
  auto it = j.find(key);
  if (it == j.end() || it->is_null()) return std::nullopt;
  return it->get<double>();
}

}  // namespace

MatchMatrix BuildMatchMatrix(const std::vector<std::string>& anchor_ids,
                             const std::vector<Judgment>& frozen,
                             const std::vector<Judgment>& candidate_judgments,
                             Slice slice, const ItemSet& items,
                             const std::optional<std::string>& candidate_id) {
  const std::set<std::string> anchors(anchor_ids.begin(), anchor_ids.end());
  if (candidate_id && anchors.count(*candidate_id)) {
    throw ConflictError("candidate id '" + *candidate_id +
                        "' collides with an anchor id");
  }

  std::optional<std::string> candidate = candidate_id;
  for (const Judgment& j : candidate_judgments) {
    const std::string& c = CandidateSide(j, anchors);
    if (!candidate) {
      candidate = c;
    } else if (*candidate != c) {
      throw MixedCandidatesError("candidate judgments mix models '" +
                                 *candidate + "' and '" + c + "'");
    }
  }

  std::vector<std::string> models = anchor_ids;
  if (candidate) models.push_back(*candidate);
  MatchMatrix m(std::move(models));

  auto in_slice = [&](const Judgment& j) {
    const Item* item = items.Find(j.pair.item_id);
    if (item == nullptr) {
      throw ValidationError("judgment references unknown item '" +
                            j.pair.item_id + "'");
    }
    return SliceContains(slice, *item);
  };

  for (const Judgment& j : frozen) {
    if (!anchors.count(j.pair.left_model) ||
        !anchors.count(j.pair.right_model)) {
      throw ValidationError("frozen judgment on item '" + j.pair.item_id +
                            "' references a non-anchor model");
    }
    ValidateJudgment(j);
    if (!in_slice(j) || j.refused()) continue;
    AddJudgment(m, j);
  }
  for (const Judgment& j : candidate_judgments) {
    ValidateJudgment(j);
    if (!in_slice(j) || j.refused()) continue;
    AddJudgment(m, j);
  }
  return m;
}

ScoreReport ScoreCandidate(const AnchorSet& baseset,
                           const std::string& candidate,
                           const std::vector<Judgment>& candidate_judgments,
                           const ItemSet& items, const ScoreOptions& options) {
  const std::vector<std::string> anchor_ids = baseset.AnchorIds();

  std::set<std::string> seen;
  std::int64_t refused_total = 0;
  for (const Judgment& j : candidate_judgments) {
    if (!seen.insert(PairKey(j.pair)).second) {
      throw ValidationError("duplicate judgment for item '" + j.pair.item_id +
                            "' (" + j.pair.left_model + " vs " +
                            j.pair.right_model + ")");
    }
    if (j.refused()) ++refused_total;
  }

  ScoreReport report;
  report.candidate = candidate;
  report.baseset_version = baseset.version.ToString();
  report.judge = baseset.judge;
  report.aggregation.prior_strength = options.fit.prior_strength;
  report.aggregation.tol = options.fit.tol;
  report.aggregation.max_iterations = options.fit.max_iterations;

  const std::int64_t expected =
      static_cast<std::int64_t>(items.size() * anchor_ids.size());
  const auto judged = static_cast<std::int64_t>(candidate_judgments.size());
  if (judged < expected) {
    report.incomplete = true;
    report.notes.push_back(std::to_string(judged) + " of " +
                           std::to_string(expected) +
                           " candidate pairs judged; missing pairs are not "
                           "backfilled");
  }
  if (refused_total > 0) {
    report.notes.push_back(std::to_string(refused_total) +
                           " judge refusal(s) excluded from aggregation");
  }

  FitOptions fit_options = options.fit;
  fit_options.on_iteration = nullptr;
  for (Slice slice : kAllSlices) {
    MatchMatrix m = BuildMatchMatrix(anchor_ids, baseset.frozen_judgments,
                                     candidate_judgments, slice, items,
                                     candidate);
    const size_t ci = m.size() - 1;
    SliceScore s;
    s.matches = m.TotalMatches(ci);
    s.wins = m.TotalWins(ci);
    for (const Judgment& j : candidate_judgments) {
      if (j.refused() && SliceContains(slice, *items.Find(j.pair.item_id))) {
        ++s.excluded;
      }
    }
    if (s.matches == 0) {
      report.incomplete = true;
      report.notes.push_back("slice " + std::string(ToString(slice)) +
                             " has no candidate matches; not scored");
      report.per_slice[slice] = std::move(s);
      continue;
    }
    BtFit fit = FitBradleyTerry(m, fit_options);
    s.win_rate = static_cast<double>(s.wins) / static_cast<double>(s.matches);
    s.theta = fit.theta[ci] - fit.theta_bar;
    s.lt = LtFromCentered(*s.theta);
    for (size_t i = 0; i < ci; ++i) {
      s.anchor_thetas[fit.models[i]] = fit.theta[i] - fit.theta_bar;
    }
    s.converged = fit.converged;
    s.iterations = fit.iterations;
    if (!fit.converged) {
      report.notes.push_back("slice " + std::string(ToString(slice)) +
                             " fit stopped at the iteration limit");
    }
    report.per_slice[slice] = std::move(s);
  }

  bool any_answered = false;
  for (const Judgment& j : candidate_judgments) any_answered |= !j.refused();
  if (any_answered) {
    report.token_stats = MeasureTokenStats(candidate_judgments);
    if (options.prices) {
      report.prices = options.prices;
      report.cost = EstimateCost(*report.token_stats, *options.prices);
    }
  }

  ReproMeta& meta = report.checklist;
  meta = options.provenance;
  meta.baseset_version = report.baseset_version;
  meta.judge_model = baseset.judge.model.id;
  if (meta.judge_endpoint.empty()) meta.judge_endpoint = baseset.judge.model.endpoint;
  meta.judge_prompt_id = baseset.judge.prompt_id;
  meta.judge_decoding = baseset.judge.decoding;
  meta.candidate_model = candidate;
  meta.filtering_notes = report.notes;
  if (meta.filtering_notes.empty()) {
    meta.filtering_notes.push_back("none: all pairs judged, no filtering or "
                                   "backfill applied");
  }
  meta.candidate_log_sha256 = CanonicalJudgmentsSha256(candidate_judgments);
  meta.frozen_log_sha256 = CanonicalJudgmentsSha256(baseset.frozen_judgments);
  return report;
}

void to_json(Json& j, const SliceScore& v) {
  j = Json{{"matches", v.matches},
           {"wins", v.wins},
           {"excluded", v.excluded},
           {"win_rate", OptionalJson(v.win_rate)},
           {"theta", OptionalJson(v.theta)},
           {"lt", OptionalJson(v.lt)},
           {"anchor_thetas", v.anchor_thetas},
           {"converged", v.converged},
           {"iterations", v.iterations}};
}

void from_json(const Json& j, SliceScore& v) {
  v.matches = j.at("matches").get<std::int64_t>();
  v.wins = j.at("wins").get<std::int64_t>();
  v.excluded = j.at("excluded").get<std::int64_t>();
  v.win_rate = OptionalDouble(j, "win_rate");
  v.theta = OptionalDouble(j, "theta");
  v.lt = OptionalDouble(j, "lt");
  v.anchor_thetas = j.at("anchor_thetas").get<std::map<std::string, double>>();
  v.converged = j.at("converged").get<bool>();
  v.iterations = j.at("iterations").get<int>();
}

void to_json(Json& j, const ReproMeta& v) {
  j = Json{{"baseset_version", v.baseset_version},
           {"baseset_path", v.baseset_path},
           {"judge_model", v.judge_model},
           {"judge_endpoint", v.judge_endpoint},
           {"judge_prompt_id", v.judge_prompt_id},
           {"judge_prompt_path", v.judge_prompt_path},
           {"judge_decoding", v.judge_decoding},
           {"candidate_model", v.candidate_model},
           {"candidate_endpoint", v.candidate_endpoint},
           {"candidate_decoding", v.candidate_decoding},
           {"candidate_prompt_id", v.candidate_prompt_id},
           {"filtering_notes", v.filtering_notes},
           {"candidate_log_path", v.candidate_log_path},
           {"candidate_log_sha256", v.candidate_log_sha256},
           {"frozen_log_sha256", v.frozen_log_sha256},
           {"pair_seed", v.pair_seed}};
}

void from_json(const Json& j, ReproMeta& v) {
  v.baseset_version = j.at("baseset_version").get<std::string>();
  v.baseset_path = j.at("baseset_path").get<std::string>();
  v.judge_model = j.at("judge_model").get<std::string>();
  v.judge_endpoint = j.at("judge_endpoint").get<std::string>();
  v.judge_prompt_id = j.at("judge_prompt_id").get<std::string>();
  v.judge_prompt_path = j.at("judge_prompt_path").get<std::string>();
  v.judge_decoding = j.at("judge_decoding").get<DecodingConfig>();
  v.candidate_model = j.at("candidate_model").get<std::string>();
  v.candidate_endpoint = j.at("candidate_endpoint").get<std::string>();
  v.candidate_decoding = j.at("candidate_decoding").get<DecodingConfig>();
  v.candidate_prompt_id = j.at("candidate_prompt_id").get<std::string>();
  v.filtering_notes = j.at("filtering_notes").get<std::vector<std::string>>();
  v.candidate_log_path = j.at("candidate_log_path").get<std::string>();
  v.candidate_log_sha256 = j.at("candidate_log_sha256").get<std::string>();
  v.frozen_log_sha256 = j.at("frozen_log_sha256").get<std::string>();
  v.pair_seed = j.at("pair_seed").get<std::uint64_t>();
}

void to_json(Json& j, const ScoreReport& v) {
  Json slices = Json::object();
  for (const auto& [slice, score] : v.per_slice) {
    slices[std::string(ToString(slice))] = score;
  }
  j = Json{{"candidate", v.candidate},
           {"baseset_version", v.baseset_version},
           {"judge", v.judge},
           {"per_slice", slices},
           {"token_stats", v.token_stats ? Json(*v.token_stats) : Json(nullptr)},
           {"cost", v.cost ? Json(*v.cost) : Json(nullptr)},
           {"prices", v.prices ? Json(*v.prices) : Json(nullptr)},
           {"incomplete", v.incomplete},
           {"notes", v.notes},
           {"checklist", v.checklist},
           {"aggregation",
            {{"method", v.aggregation.method},
             {"prior_strength", v.aggregation.prior_strength},
             {"tol", v.aggregation.tol},
             {"max_iterations", v.aggregation.max_iterations}}}};
}

void from_json(const Json& j, ScoreReport& v) {
  v.candidate = j.at("candidate").get<std::string>();
  v.baseset_version = j.at("baseset_version").get<std::string>();
  v.judge = j.at("judge").get<JudgeConfig>();
  v.per_slice.clear();
  for (const auto& [name, score] : j.at("per_slice").items()) {
    v.per_slice[ParseSlice(name)] = score.get<SliceScore>();
  }
  v.token_stats.reset();
  if (!j.at("token_stats").is_null()) {
    v.token_stats = j.at("token_stats").get<TokenStats>();
  }
  v.cost.reset();
  if (!j.at("cost").is_null()) v.cost = j.at("cost").get<CostEstimate>();
  v.prices.reset();
  if (const Json& p = j.at("prices"); !p.is_null()) {
    v.prices = PriceSheet::FromDecimal(p.at("input_per_million").get<double>(),
                                       p.at("output_per_million").get<double>(),
                                       p.at("currency").get<std::string>());
  }
  v.incomplete = j.at("incomplete").get<bool>();
  v.notes = j.at("notes").get<std::vector<std::string>>();
  v.checklist = j.at("checklist").get<ReproMeta>();
  const Json& a = j.at("aggregation");
  v.aggregation.method = a.at("method").get<std::string>();
  v.aggregation.prior_strength = a.at("prior_strength").get<double>();
  v.aggregation.tol = a.at("tol").get<double>();
  v.aggregation.max_iterations = a.at("max_iterations").get<int>();
}

std::string SerializeReport(const ScoreReport& report) {
  return Json(report).dump(2) + "\n";
}

ScoreReport ParseReport(std::string_view text) {
  try {
    return Json::parse(text).get<ScoreReport>();
  } catch (const Json::exception& e) {
    throw ParseError(std::string("bad report: ") + e.what());
  }
}

const std::vector<std::string>& ChecklistLabels() {
  static const std::vector<std::string> labels = {
      "Base set version",
      "Judge model and provider",
      "Judge prompt hash and decoding",
      "Candidate model and decoding",
      "Filtering and backfill",
      "Comparison logs",
  };
  return labels;
}

std::string RenderReportMarkdown(const ScoreReport& r) {
  std::ostringstream out;
  auto slice = [&](Slice s) -> const SliceScore& { return r.per_slice.at(s); };

  out << "# " << r.candidate << " vs base set " << r.baseset_version << "\n\n";
  if (r.incomplete) out << "**Incomplete run.** See notes below.\n\n";

  out << "| Direction | Easy LT | Hard LT | Overall LT | Win Rate |\n";
  out << "|---|---:|---:|---:|---:|\n";
  struct Row {
    const char* label;
    Slice easy, hard, all;
  };
  const Row rows[] = {
      {"EN→JA", Slice::kEnToJaEasy, Slice::kEnToJaHard, Slice::kEnToJa},
      {"JA→EN", Slice::kJaToEnEasy, Slice::kJaToEnHard, Slice::kJaToEn},
      {"Overall", Slice::kEasy, Slice::kHard, Slice::kOverall},
  };
  for (const Row& row : rows) {
    out << "| " << row.label << " | " << Lt2(slice(row.easy).lt) << " | "
        << Lt2(slice(row.hard).lt) << " | " << Lt2(slice(row.all).lt) << " | "
        << Pct2(slice(row.all).win_rate) << " |\n";
  }

  out << "\n## Slices\n\n";
  out << "| Slice | Matches | Wins | Excluded | Win Rate | Theta | LT |\n";
  out << "|---|---:|---:|---:|---:|---:|---:|\n";
  for (Slice s : kAllSlices) {
    const SliceScore& sc = slice(s);
    out << "| " << ToString(s) << " | " << sc.matches << " | " << sc.wins
        << " | " << sc.excluded << " | " << Pct2(sc.win_rate) << " | "
        << (sc.theta ? Fmt("%.4f", *sc.theta) : "n/a") << " | " << Lt2(sc.lt)
        << " |\n";
  }

  const SliceScore& overall = slice(Slice::kOverall);
  if (!overall.anchor_thetas.empty()) {
    std::vector<std::pair<std::string, double>> anchors(
        overall.anchor_thetas.begin(), overall.anchor_thetas.end());
    std::stable_sort(anchors.begin(), anchors.end(),
                     [](const auto& a, const auto& b) {
                       return a.second > b.second;
                     });
    out << "\n## Anchors (overall fit)\n\n";
    out << "| Anchor | Theta | LT |\n|---|---:|---:|\n";
    for (const auto& [id, theta] : anchors) {
      out << "| " << id << " | " << Fmt("%.4f", theta) << " | "
          << Fmt("%.2f", LtFromCentered(theta)) << " |\n";
    }
  }

  out << "\n## Cost\n\n";
  if (r.cost) {
    out << "| | Tokens | Cost (" << r.cost->currency << ") |\n|---|---:|---:|\n";
    out << "| Input | " << r.cost->input_tokens << " | "
        << r.cost->input_cost.ToCents() << " |\n";
    out << "| Output | " << r.cost->output_tokens << " | "
        << r.cost->output_cost.ToCents() << " |\n";
    out << "| Total | " << r.cost->input_tokens + r.cost->output_tokens
        << " | " << r.cost->total.ToCents() << " |\n";
  } else if (r.token_stats) {
    out << "Mean tokens per judgment: " << Fmt("%.1f", r.token_stats->mean_input)
        << " in, " << Fmt("%.1f", r.token_stats->mean_output)
        << " out (no price sheet given).\n";
  } else {
    out << "No answered judgments.\n";
  }

  const ReproMeta& m = r.checklist;
  const auto& labels = ChecklistLabels();
  out << "\n## Reproducibility\n\n";
  out << "- " << labels[0] << ": " << m.baseset_version;
  if (!m.baseset_path.empty()) out << " (" << m.baseset_path << ")";
  out << "\n";
  out << "- " << labels[1] << ": " << m.judge_model << " via "
      << m.judge_endpoint << "\n";
  out << "- " << labels[2] << ": sha256 " << m.judge_prompt_id;
  if (!m.judge_prompt_path.empty()) out << " (" << m.judge_prompt_path << ")";
  out << "; " << DecodingSummary(m.judge_decoding) << "\n";
  out << "- " << labels[3] << ": " << m.candidate_model;
  if (!m.candidate_endpoint.empty()) out << " via " << m.candidate_endpoint;
  out << "; " << DecodingSummary(m.candidate_decoding);
  if (!m.candidate_prompt_id.empty()) {
    out << "; translation prompt sha256 " << m.candidate_prompt_id;
  }
  out << "\n";
  out << "- " << labels[4] << ":";
  for (size_t i = 0; i < m.filtering_notes.size(); ++i) {
    out << (i == 0 ? " " : "; ") << m.filtering_notes[i];
  }
  out << "\n";
  out << "- " << labels[5] << ": candidate sha256 " << m.candidate_log_sha256;
  if (!m.candidate_log_path.empty()) out << " (" << m.candidate_log_path << ")";
  out << ", frozen sha256 " << m.frozen_log_sha256 << "\n";
  out << "- Pair seed: " << m.pair_seed << "\n";
  out << "- Aggregation: " << r.aggregation.method
      << ", prior strength " << Fmt("%g", r.aggregation.prior_strength)
      << ", tol " << Fmt("%g", r.aggregation.tol) << ", max iterations "
      << r.aggregation.max_iterations << "\n";
  return out.str();
}

RubricSummary RubricStats(const std::vector<RubricResult>& results) {
  if (results.empty()) throw EmptyError("no rubric results");
  RubricSummary s;
  s.count = static_cast<int>(results.size());
  std::array<int, 5> counts{};
  int sum = 0, useful = 0, perfect = 0;
  std::vector<int> scores;
  scores.reserve(results.size());
  for (const RubricResult& r : results) {
    if (r.score < 1 || r.score > 5) {
      throw ValidationError("rubric score out of range: " +
                            std::to_string(r.score));
    }
    ++counts[r.score - 1];
    sum += r.score;
    if (r.score >= 3) ++useful;
    if (r.perfect) ++perfect;
    scores.push_back(r.score);
  }
  const double n = s.count;
  s.mean = sum / n;
  std::sort(scores.begin(), scores.end());
  const size_t mid = scores.size() / 2;
  s.median = scores.size() % 2 == 1 ? scores[mid]
                                    : (scores[mid - 1] + scores[mid]) / 2.0;
  for (int k = 0; k < 5; ++k) s.pct[k] = 100.0 * counts[k] / n;
  s.useful_pct = 100.0 * useful / n;
  s.perfect_pct = 100.0 * perfect / n;
  return s;
}

}  // namespace anchoreval
