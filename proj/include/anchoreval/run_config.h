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

// Run configuration file:
//
//   {
//     "item_set": "itemset.json",
//     "baseset": "baseset/v1.0",
//     "candidate": {"id": "...", "endpoint": "https://...", "decoding": {...}},
//     "candidate_profile": "candidate_profile.json",   // optional
//     "judge_profile": "judge_profile.json",           // optional
//     "seed": 42,
//     "output_dir": "runs/my-model",
//     "prices": "prices.json"                          // optional
//   }
//
// Relative paths are resolved against the directory holding the file.

#ifndef ANCHOREVAL_RUN_CONFIG_H_
#define ANCHOREVAL_RUN_CONFIG_H_

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>

#include "anchoreval/datamodel.h"
#include "anchoreval/endpoint.h"
#include "anchoreval/pairing.h"

namespace anchoreval {

struct RunConfig {
  std::filesystem::path config_path;
  std::filesystem::path item_set;
  std::filesystem::path baseset;
  ModelRef candidate;
  std::optional<EndpointProfile> candidate_profile;
  std::optional<EndpointProfile> judge_profile;
  std::uint64_t seed = kDefaultPairSeed;
  std::filesystem::path output_dir;
  std::optional<std::filesystem::path> prices;

  // Paths exactly as written in the file, echoed into reports so they do
  // not depend on the working directory.
  Json raw;

  std::filesystem::path translations_path() const {
    return output_dir / "translations.jsonl";
  }
  std::filesystem::path plan_path() const { return output_dir / "plan.json"; }
  std::filesystem::path judgments_path() const {
    return output_dir / "judgments.jsonl";
  }
  std::filesystem::path report_json_path() const {
    return output_dir / "report.json";
  }
  std::filesystem::path report_md_path() const {
    return output_dir / "report.md";
  }
};

// Throws ConfigError for unreadable or invalid files and for referenced
// inputs (item set, base set, profiles, prices) that do not exist.
RunConfig LoadRunConfig(const std::filesystem::path& path);

// The file contents with effective seed and candidate filled in.
Json RunConfigJson(const RunConfig& config);

}  // namespace anchoreval

#endif  // ANCHOREVAL_RUN_CONFIG_H_
