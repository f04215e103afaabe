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

#include "anchoreval/cli.h"

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <set>
#include <sstream>

#include "CLI11.hpp"
#include "anchoreval/aggregate.h"
#include "anchoreval/costmodel.h"
#include "anchoreval/error.h"
#include "anchoreval/inference.h"
#include "anchoreval/inspect.h"
#include "anchoreval/judge.h"
#include "anchoreval/pairing.h"
#include "anchoreval/prompts.h"
#include "anchoreval/run_config.h"
#include "anchoreval/simjudge.h"

namespace anchoreval {
namespace {

namespace fs = std::filesystem;

struct Io {
  std::istream& in;
  std::ostream& out;
  std::ostream& err;
};

std::string Fixed(double v, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*f", digits, v);
  return buf;
}

bool IsUrl(std::string_view s) {
  return s.rfind("http://", 0) == 0 || s.rfind("https://", 0) == 0;
}

ItemSet LoadItemsForConfig(const RunConfig& cfg) {
  return LoadItemSet(cfg.item_set);
}

// Anchor translations plus the candidate's, if any have been generated.
TranslationStore MergedTranslations(const AnchorSet& baseset,
                                    const RunConfig& cfg) {
  TranslationStore store;
  for (const Translation* t : baseset.translations.Sorted()) store.Put(*t);
  TranslationStore cand = ReadTranslationsIfExists(cfg.translations_path());
  for (const Translation* t : cand.Sorted()) {
    if (baseset.IsAnchor(t->model_id)) continue;
    store.Put(*t);
  }
  return store;
}

EndpointProfile ProfileFor(const std::optional<EndpointProfile>& profile,
                           const std::string& endpoint, const char* what) {
  if (profile) return *profile;
  if (!IsUrl(endpoint)) {
    throw ConfigError(std::string(what) + " endpoint '" + endpoint +
                      "' is not a URL and no profile was given");
  }
  EndpointProfile p;
  p.base_url = endpoint;
  return p;
}

// Writes the plan, or checks that an existing one matches.
PairPlan EnsurePlan(const RunConfig& cfg, const ItemSet& items,
                    const AnchorSet& baseset) {
  PairPlan plan = BuildPairPlan(items, baseset, cfg.candidate, cfg.seed);
  if (fs::exists(cfg.plan_path())) {
    PairPlan stored = LoadPlan(cfg.plan_path());
    if (SerializePlan(stored) != SerializePlan(plan)) {
      throw ConflictError("existing plan '" + cfg.plan_path().string() +
                          "' differs from the current settings; use a new "
                          "output_dir");
    }
    return stored;
  }
  fs::create_directories(cfg.output_dir);
  SavePlan(plan, cfg.plan_path());
  return plan;
}

// ---- generate ----------------------------------------------------------

int CmdGenerate(const Io& io, const std::string& config_path,
                bool retry_failed, bool json) {
  RunConfig cfg = LoadRunConfig(config_path);
  ItemSet items = LoadItemsForConfig(cfg);
  GenerateSummary s;
  if (cfg.candidate.endpoint == kFrozenEndpoint ||
      cfg.candidate.endpoint == "simulated") {
    TranslationStore store = ReadTranslationsIfExists(cfg.translations_path());
    int missing = 0;
    for (const Item& item : items.items()) {
      if (store.Find(item.id, cfg.candidate.id)) {
        ++s.cached;
      } else {
        ++missing;
      }
    }
    if (missing > 0) {
      throw IncompleteError(std::to_string(missing) +
                            " translation(s) missing for frozen candidate '" +
                            cfg.candidate.id + "'");
    }
  } else {
    EndpointProfile profile =
        ProfileFor(cfg.candidate_profile, cfg.candidate.endpoint, "candidate");
    HttpChatClient client(profile);
    fs::create_directories(cfg.output_dir);
    GenerateOptions options;
    options.max_concurrency = profile.max_concurrency;
    options.retry_failed = retry_failed;
    s = GenerateAll(items, cfg.candidate, client, cfg.translations_path(),
                    options);
  }
  if (json) {
    io.out << Json{{"generated", s.generated},
                   {"cached", s.cached},
                   {"failed", s.failed}}
                  .dump()
           << "\n";
  } else {
    io.out << "generated: " << s.generated << ", cached: " << s.cached
           << ", failed: " << s.failed << "\n";
  }
  if (s.failed > 0) {
    io.err << "warning: " << s.failed
           << " translation(s) failed and were stored as empty output\n";
  }
  return kExitOk;
}

// ---- judge -------------------------------------------------------------

int CmdJudge(const Io& io, const std::string& config_path, bool json) {
  RunConfig cfg = LoadRunConfig(config_path);
  ItemSet items = LoadItemsForConfig(cfg);
  AnchorSet baseset = LoadAnchorSet(cfg.baseset, items);
  if (!fs::exists(cfg.translations_path())) {
    throw PreconditionError("no candidate translations at '" +
                            cfg.translations_path().string() +
                            "'; run generate first");
  }
  TranslationStore store = MergedTranslations(baseset, cfg);
  PairPlan plan = EnsurePlan(cfg, items, baseset);
  EndpointProfile profile =
      ProfileFor(cfg.judge_profile, baseset.judge.model.endpoint, "judge");
  HttpChatClient client(profile);
  JudgeAllOptions options;
  options.max_concurrency = profile.max_concurrency;
  JudgeSummary s = JudgeAll(plan, items, store, baseset.judge, client,
                            cfg.judgments_path(), options);
  if (json) {
    io.out << Json{{"judged", s.judged},
                   {"cached", s.cached},
                   {"refused", s.refused}}
                  .dump()
           << "\n";
  } else {
    io.out << "judged: " << s.judged << ", cached: " << s.cached
           << ", refused: " << s.refused << "\n";
  }
  if (s.refused > 0) {
    io.err << "warning: " << s.refused
           << " judgment(s) refused by the judge; they are excluded from "
              "scoring\n";
  }
  return kExitOk;
}

// ---- score -------------------------------------------------------------

ReproMeta ProvenanceFor(const RunConfig& cfg) {
  ReproMeta m;
  m.baseset_path = cfg.raw.value("baseset", std::string());
  m.judge_prompt_path = "prompts/compare_prompt.txt";
  if (cfg.judge_profile) m.judge_endpoint = cfg.judge_profile->base_url;
  m.candidate_endpoint = cfg.candidate.endpoint;
  m.candidate_decoding = cfg.candidate.decoding;
  m.candidate_prompt_id = TranslatePromptId();
  std::string out_dir = cfg.raw.value("output_dir", std::string());
  m.candidate_log_path = (fs::path(out_dir) / "judgments.jsonl").string();
  m.pair_seed = cfg.seed;
  return m;
}

void PrintScoreSummary(const Io& io, const ScoreReport& r) {
  const SliceScore& o = r.per_slice.at(Slice::kOverall);
  io.out << "candidate: " << r.candidate << " (base set "
         << r.baseset_version << ")\n";
  if (o.lt) {
    io.out << "overall: LT " << Fixed(*o.lt, 2) << ", win rate "
           << Fixed(*o.win_rate * 100.0, 2) << "% over " << o.matches
           << " matches (" << o.excluded << " excluded)\n";
  } else {
    io.out << "overall: no matches\n";
  }
  if (r.cost) io.out << "cost: " << r.cost->total.ToCents() << " " << r.cost->currency << "\n";
}

int CmdScore(const Io& io, const std::string& config_path, bool json) {
  RunConfig cfg = LoadRunConfig(config_path);
  ItemSet items = LoadItemsForConfig(cfg);
  AnchorSet baseset = LoadAnchorSet(cfg.baseset, items);
  std::vector<Judgment> judgments = ReadJudgmentsIfExists(cfg.judgments_path());
  if (fs::exists(cfg.plan_path())) {
    PairPlan plan = LoadPlan(cfg.plan_path());
    std::set<std::string> keys;
    for (const PairAssignment& p : plan.pairs) keys.insert(PairKey(p));
    for (const Judgment& j : judgments) {
      if (!keys.count(PairKey(j.pair))) {
        throw ConflictError("judgment for item '" + j.pair.item_id +
                            "' is not in the plan");
      }
    }
  }
  ScoreOptions options;
  if (cfg.prices) options.prices = LoadPriceSheet(*cfg.prices);
  options.provenance = ProvenanceFor(cfg);
  ScoreReport report =
      ScoreCandidate(baseset, cfg.candidate.id, judgments, items, options);
  fs::create_directories(cfg.output_dir);
  WriteFile(cfg.report_json_path(), SerializeReport(report));
  WriteFile(cfg.report_md_path(), RenderReportMarkdown(report));
  if (json) {
    io.out << SerializeReport(report);
  } else {
    PrintScoreSummary(io, report);
    io.out << "wrote " << cfg.report_json_path().string() << " and "
           << cfg.report_md_path().string() << "\n";
  }
  if (report.incomplete) {
    io.err << "warning: report is incomplete:";
    for (const std::string& n : report.notes) io.err << "\n  " << n;
    io.err << "\n";
  }
  return kExitOk;
}

// ---- report ------------------------------------------------------------

int CmdReport(const Io& io, const std::string& config_path,
              const std::string& report_path, bool json) {
  fs::path path;
  if (!report_path.empty()) {
    path = report_path;
  } else if (!config_path.empty()) {
    path = LoadRunConfig(config_path).report_json_path();
  } else {
    throw ConfigError("report needs --config or --report");
  }
  if (!fs::exists(path)) {
    throw ConfigError("no report at '" + path.string() + "'; run score first");
  }
  ScoreReport report = ParseReport(ReadFile(path));
  io.out << (json ? SerializeReport(report) : RenderReportMarkdown(report));
  return kExitOk;
}

// ---- cost --------------------------------------------------------------

struct CostArgs {
  std::string log;
  std::string prices;
  std::optional<double> mean_input, mean_output;
  std::optional<std::int64_t> count;
  std::optional<double> input_price, output_price;
};

int CmdCost(const Io& io, const CostArgs& a, bool json) {
  TokenStats stats;
  if (!a.log.empty()) {
    if (!fs::exists(a.log)) throw ConfigError("no log at '" + a.log + "'");
    stats = MeasureTokenStats(fs::path(a.log));
  } else if (a.mean_input && a.mean_output && a.count) {
    stats.mean_input = *a.mean_input;
    stats.mean_output = *a.mean_output;
    stats.judgment_count = *a.count;
  } else {
    throw ConfigError(
        "cost needs --log or all of --mean-input, --mean-output, --count");
  }
  if (a.mean_input) stats.mean_input = *a.mean_input;
  if (a.mean_output) stats.mean_output = *a.mean_output;
  if (a.count) stats.judgment_count = *a.count;

  PriceSheet prices;
  if (!a.prices.empty()) {
    if (!fs::exists(a.prices)) {
      throw ConfigError("no price sheet at '" + a.prices + "'");
    }
    prices = LoadPriceSheet(a.prices);
  } else if (a.input_price && a.output_price) {
    prices = PriceSheet::FromDecimal(*a.input_price, *a.output_price);
  } else {
    throw ConfigError("cost needs --prices or --input-price and --output-price");
  }
  CostEstimate c = EstimateCost(stats, prices);
  if (json) {
    io.out << Json{{"token_stats", stats}, {"prices", prices}, {"cost", c}}.dump()
           << "\n";
  } else {
    io.out << "judgments: " << stats.judgment_count << " (mean "
           << Fixed(stats.mean_input, 1) << " in, "
           << Fixed(stats.mean_output, 1) << " out)\n";
    io.out << "input: " << c.input_tokens << " tokens, "
           << c.input_cost.ToCents() << " " << c.currency << "\n";
    io.out << "output: " << c.output_tokens << " tokens, "
           << c.output_cost.ToCents() << " " << c.currency << "\n";
    io.out << "total: " << c.total.ToCents() << " " << c.currency << "\n";
  }
  return kExitOk;
}

// ---- simulate ----------------------------------------------------------

struct SimFile {
  SimConfig sim;
  int n_anchors = 20;
  std::optional<double> theta_spread;
  double top_win_rate = 0.96;
  std::string candidate_id = "sim/candidate";
  std::optional<double> candidate_theta;
  std::vector<std::string> empty_items;
  std::uint64_t pair_seed = kDefaultPairSeed;
  std::optional<PriceSheet> prices;
};

SimFile LoadSimFile(const std::string& path) {
  if (!fs::is_regular_file(path)) {
    throw ConfigError("simulation config not found: " + path);
  }
  SimFile f;
  try {
    Json j = Json::parse(ReadFile(path));
    f.sim = j.get<SimConfig>();
    f.n_anchors = j.value("n_anchors", f.n_anchors);
    if (j.contains("theta_spread")) f.theta_spread = j.at("theta_spread").get<double>();
    f.top_win_rate = j.value("top_win_rate", f.top_win_rate);
    f.candidate_id = j.value("candidate_id", f.candidate_id);
    if (j.contains("candidate_theta")) {
      f.candidate_theta = j.at("candidate_theta").get<double>();
    }
    f.empty_items = j.value("empty_items", std::vector<std::string>{});
    f.pair_seed = j.value("pair_seed", f.pair_seed);
    if (j.contains("prices")) {
      const Json& p = j.at("prices");
      f.prices = PriceSheet::FromDecimal(
          p.at("input_per_million").get<double>(),
          p.at("output_per_million").get<double>(),
          p.value("currency", std::string("USD")));
    }
    ValidateSimConfig(f.sim);
  } catch (const Json::exception& e) {
    throw ConfigError("bad simulation config '" + path + "': " + e.what());
  } catch (const ValidationError& e) {
    throw ConfigError("bad simulation config '" + path + "': " + e.what());
  }
  if (f.n_anchors < 2) throw ConfigError("n_anchors must be >= 2");
  return f;
}

std::string JsonLines(const std::vector<Json>& records) {
  std::string out;
  for (const Json& r : records) out += r.dump() + "\n";
  return out;
}

int CmdSimulate(const Io& io, const std::string& sim_path,
                const std::string& items_path, const std::string& out_dir,
                bool bias_sweep, std::int64_t sweep_judgments,
                const std::vector<double>& biases, bool json) {
  SimFile f = LoadSimFile(sim_path);
  const double spread = f.theta_spread
                            ? *f.theta_spread
                            : SpreadForTopWinRate(f.n_anchors, f.top_win_rate,
                                                  f.sim.noise_temperature);

  if (bias_sweep) {
    SimConfig cfg = f.sim;
    std::vector<double> thetas = EvenlySpacedThetas(f.n_anchors, spread);
    for (int i = 0; i < f.n_anchors; ++i) {
      cfg.true_theta[SynthAnchorId(i, f.n_anchors)] = thetas[i];
    }
    std::vector<BiasSweepRow> rows =
        BiasSweep(cfg, biases, sweep_judgments, f.pair_seed);
    if (json) {
      Json arr = Json::array();
      for (const BiasSweepRow& r : rows) {
        arr.push_back({{"bias", r.bias},
                       {"judgments", r.judgments},
                       {"slot_a_win_rate", r.slot_a_win_rate},
                       {"max_model_shift", r.max_model_shift},
                       {"clamped", r.clamped}});
      }
      io.out << arr.dump() << "\n";
    } else {
      io.out << "| Bias | Judgments | Slot-A win rate | Max model shift | "
                "Clamped |\n|---:|---:|---:|---:|---:|\n";
      for (const BiasSweepRow& r : rows) {
        io.out << "| " << Fixed(r.bias, 3) << " | " << r.judgments << " | "
               << Fixed(r.slot_a_win_rate, 4) << " | "
               << Fixed(r.max_model_shift, 4) << " | " << r.clamped << " |\n";
      }
    }
    return kExitOk;
  }

  if (items_path.empty() || out_dir.empty()) {
    throw ConfigError("simulate needs --items and --out (or --bias-sweep)");
  }
  if (!fs::is_regular_file(items_path)) {
    throw ConfigError("item set not found: " + items_path);
  }
  ItemSet items = LoadItemSet(items_path);
  SynthResult synth = SynthAnchorSet(f.n_anchors, spread, items, f.sim,
                                     f.pair_seed);
  SimConfig sim = f.sim;
  sim.true_theta = synth.true_theta;
  if (synth.true_theta.count(f.candidate_id)) {
    throw ConfigError("candidate id '" + f.candidate_id +
                      "' collides with a synthetic anchor");
  }
  sim.true_theta[f.candidate_id] =
      f.candidate_theta ? *f.candidate_theta : spread / 2.0 + 0.5;

  const fs::path out(out_dir);
  const fs::path run = out / "run";
  fs::create_directories(run);
  SaveAnchorSet(synth.anchors, out / "baseset");
  SaveItemSet(items, out / "itemset.json");
  if (f.prices) WriteFile(out / "prices.json", Json(*f.prices).dump(2) + "\n");

  ModelRef candidate;
  candidate.id = f.candidate_id;
  candidate.endpoint = "simulated";
  const std::set<std::string> empty(f.empty_items.begin(), f.empty_items.end());
  TranslationStore store = synth.anchors.translations;
  std::vector<Json> cand_records;
  for (const Item& item : items.items()) {
    Translation t;
    t.item_id = item.id;
    t.model_id = candidate.id;
    t.text = empty.count(item.id) ? "" : SynthTranslationText(candidate.id, item.id);
    t.generated_at = std::string(kSimTimestamp);
    t.generation_meta["source"] = "synthetic";
    cand_records.push_back(Json(t));
    store.Put(std::move(t));
  }
  WriteFile(run / "translations.jsonl", JsonLines(cand_records));

  PairPlan plan = BuildPairPlan(items, synth.anchors, candidate, f.pair_seed);
  SavePlan(plan, run / "plan.json");
  SimBatch batch = SimulatePlan(plan.pairs, sim, &store);
  std::vector<Json> judgment_records;
  for (const Judgment& j : batch.judgments) judgment_records.push_back(Json(j));
  WriteFile(run / "judgments.jsonl", JsonLines(judgment_records));

  Json run_config = {{"item_set", "itemset.json"},
                     {"baseset", "baseset"},
                     {"candidate", candidate},
                     {"seed", f.pair_seed},
                     {"output_dir", "run"}};
  if (f.prices) run_config["prices"] = "prices.json";
  WriteFile(out / "run.json", run_config.dump(2) + "\n");

  Json summary = {{"anchors", f.n_anchors},
                  {"theta_spread", spread},
                  {"items", items.size()},
                  {"frozen_judgments", synth.anchors.frozen_judgments.size()},
                  {"candidate_judgments", batch.judgments.size()},
                  {"clamped", batch.clamped},
                  {"run_config", (out / "run.json").string()}};
  if (json) {
    io.out << summary.dump() << "\n";
  } else {
    io.out << "anchors: " << f.n_anchors << " (theta spread "
           << Fixed(spread, 4) << "), items: " << items.size()
           << ", frozen judgments: " << synth.anchors.frozen_judgments.size()
           << ", candidate judgments: " << batch.judgments.size()
           << ", clamped: " << batch.clamped << "\n";
    io.out << "next: anchoreval score --config "
           << (out / "run.json").string() << "\n";
  }
  return kExitOk;
}

// ---- inspect -----------------------------------------------------------

int CmdInspect(const Io& io, const std::string& config_path,
               const std::string& log_path, bool dump,
               const std::vector<std::string>& terms) {
  InspectData data;
  if (!config_path.empty()) {
    RunConfig cfg = LoadRunConfig(config_path);
    data.items = LoadItemsForConfig(cfg);
    AnchorSet baseset = LoadAnchorSet(cfg.baseset, data.items);
    data.translations = MergedTranslations(baseset, cfg);
    fs::path log = log_path.empty() ? cfg.judgments_path() : fs::path(log_path);
    if (!fs::exists(log)) throw ConfigError("no log at '" + log.string() + "'");
    data.judgments = ReadJudgments(log);
  } else if (!log_path.empty()) {
    if (!fs::exists(log_path)) throw ConfigError("no log at '" + log_path + "'");
    data.judgments = ReadJudgments(log_path);
  } else {
    throw ConfigError("inspect needs --config or --log");
  }
  InspectFilter filter = ParseFilter(terms);
  if (dump) {
    io.out << DumpJudgments(data, filter);
    return kExitOk;
  }
  RunInspector(data, io.in, io.out);
  return kExitOk;
}

// ---- validate-baseset --------------------------------------------------

int CmdValidateBaseset(const Io& io, const std::string& dir,
                       const std::string& items_path, bool json) {
  if (!fs::is_regular_file(items_path)) {
    throw ConfigError("item set not found: " + items_path);
  }
  if (!fs::is_directory(dir)) throw ConfigError("no base set at '" + dir + "'");
  ItemSet items = LoadItemSet(items_path);
  AnchorSet set;
  try {
    set = LoadAnchorSet(dir, items);
  } catch (const Error& e) {
    if (json) {
      io.out << Json{{"valid", false}, {"error", e.what()}}.dump() << "\n";
    } else {
      io.out << "invalid: " << e.what() << "\n";
    }
    return kExitConfig;
  }
  std::int64_t refused = 0;
  for (const Judgment& j : set.frozen_judgments) refused += j.refused();
  if (json) {
    io.out << Json{{"valid", true},
                   {"version", set.version.ToString()},
                   {"anchors", set.anchors.size()},
                   {"items", items.size()},
                   {"translations", set.translations.size()},
                   {"frozen_judgments", set.frozen_judgments.size()},
                   {"frozen_refusals", refused},
                   {"judge", set.judge.model.id},
                   {"prompt_id", set.judge.prompt_id},
                   {"frozen_sha256",
                    CanonicalJudgmentsSha256(set.frozen_judgments)}}
                  .dump()
           << "\n";
  } else {
    io.out << "ok: version " << set.version.ToString() << ", "
           << set.anchors.size() << " anchors, " << items.size()
           << " items, " << set.translations.size() << " translations, "
           << set.frozen_judgments.size() << " frozen judgments ("
           << refused << " refused)\n";
    if (set.judge.prompt_id != ComparePromptId()) {
      io.out << "note: judge prompt id differs from the bundled compare "
                "prompt\n";
    }
  }
  return kExitOk;
}

}  // namespace

int RunCli(const std::vector<std::string>& args, std::istream& in,
           std::ostream& out, std::ostream& err) {
  Io io{in, out, err};
  CLI::App app{"Anchored pairwise translation evaluation", "anchoreval"};
  app.require_subcommand(1);
  bool json = false;
  app.add_flag("--json", json, "Machine-readable output");

  std::string config;
  bool retry_failed = false;
  auto* gen = app.add_subcommand("generate", "Generate candidate translations");
  gen->add_option("-c,--config", config, "Run config")->required();
  gen->add_flag("--retry-failed", retry_failed, "Re-attempt failed items");
  gen->add_flag("--json", json, "Machine-readable output");

  auto* judge = app.add_subcommand("judge", "Judge candidate vs anchor pairs");
  judge->add_option("-c,--config", config, "Run config")->required();
  judge->add_flag("--json", json, "Machine-readable output");

  auto* score = app.add_subcommand("score", "Fit and write report.json/report.md");
  score->add_option("-c,--config", config, "Run config")->required();
  score->add_flag("--json", json, "Machine-readable output");

  std::string report_path;
  auto* report = app.add_subcommand("report", "Render an existing report");
  report->add_option("-c,--config", config, "Run config");
  report->add_option("--report", report_path, "Path to report.json");
  report->add_flag("--json", json, "Machine-readable output");

  CostArgs cost_args;
  auto* cost = app.add_subcommand("cost", "Estimate judging cost");
  cost->add_option("--log", cost_args.log, "Judgment log to measure");
  cost->add_option("--prices", cost_args.prices, "Price sheet (prices.json)");
  cost->add_option("--mean-input", cost_args.mean_input, "Mean input tokens");
  cost->add_option("--mean-output", cost_args.mean_output, "Mean output tokens");
  cost->add_option("--count", cost_args.count, "Number of judgments");
  cost->add_option("--input-price", cost_args.input_price,
                   "Input price per million tokens");
  cost->add_option("--output-price", cost_args.output_price,
                   "Output price per million tokens");
  cost->add_flag("--json", json, "Machine-readable output");

  std::string sim_config, items_path, out_dir;
  bool bias_sweep = false;
  std::int64_t sweep_judgments = 10000;
  std::vector<double> biases = {0.0, 0.05, 0.1, 0.2, 0.3};
  auto* simulate =
      app.add_subcommand("simulate", "Build a synthetic base set and candidate");
  simulate->add_option("-c,--config", sim_config, "Simulation config")
      ->required();
  simulate->add_option("--items", items_path, "Item set");
  simulate->add_option("--out", out_dir, "Output directory");
  simulate->add_flag("--bias-sweep", bias_sweep,
                     "Print slot-A win rates per position-bias level");
  simulate->add_option("--sweep-judgments", sweep_judgments,
                       "Draws per bias level");
  simulate->add_option("--biases", biases, "Bias levels")->delimiter(',');
  simulate->add_flag("--json", json, "Machine-readable output");

  std::string log_path;
  bool dump = false;
  std::vector<std::string> terms;
  auto* inspect = app.add_subcommand("inspect", "Browse judgments (read-only)");
  inspect->add_option("-c,--config", config, "Run config");
  inspect->add_option("--log", log_path, "Judgment log");
  inspect->add_flag("--dump", dump, "Print matching judgments and exit");
  inspect->add_option("filters", terms,
                      "Filters: item=, anchor=, verdict=, slice=");

  std::string baseset_dir;
  auto* validate =
      app.add_subcommand("validate-baseset", "Check a base set directory");
  validate->add_option("--baseset", baseset_dir, "Base set directory")
      ->required();
  validate->add_option("--items", items_path, "Item set")->required();
  validate->add_flag("--json", json, "Machine-readable output");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n" << "run with --help for usage\n";
    return kExitConfig;
  }

  try {
    if (gen->parsed()) return CmdGenerate(io, config, retry_failed, json);
    if (judge->parsed()) return CmdJudge(io, config, json);
    if (score->parsed()) return CmdScore(io, config, json);
    if (report->parsed()) return CmdReport(io, config, report_path, json);
    if (cost->parsed()) return CmdCost(io, cost_args, json);
    if (simulate->parsed()) {
      return CmdSimulate(io, sim_config, items_path, out_dir, bias_sweep,
                         sweep_judgments, biases, json);
    }
    if (inspect->parsed()) {
      return CmdInspect(io, config, log_path, dump, terms);
    }
    if (validate->parsed()) {
      return CmdValidateBaseset(io, baseset_dir, items_path, json);
    }
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitInternal;
  }
  return kExitInternal;
}

}  // namespace anchoreval
