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

#include "anchoreval/run_config.h"

#include "anchoreval/error.h"

namespace anchoreval {
namespace {

namespace fs = std::filesystem;

fs::path Resolve(const fs::path& base, const std::string& p) {
  fs::path path(p);
  return path.is_absolute() ? path : base / path;
}

fs::path RequireExisting(const fs::path& base, const Json& j, const char* key) {
  if (!j.contains(key) || !j.at(key).is_string()) {
    throw ConfigError(std::string("run config needs a string '") + key + "'");
  }
  fs::path p = Resolve(base, j.at(key).get<std::string>());
  if (!fs::exists(p)) {
    throw ConfigError(std::string("'") + key + "' path does not exist: " +
                      p.string());
  }
  return p;
}

}  // namespace

RunConfig LoadRunConfig(const fs::path& path) {
  if (!fs::is_regular_file(path)) {
    throw ConfigError("run config not found: " + path.string());
  }
  Json j;
  try {
    j = Json::parse(ReadFile(path));
  } catch (const Json::exception& e) {
    throw ConfigError("bad run config '" + path.string() + "': " + e.what());
  } catch (const IoError& e) {
    throw ConfigError(e.what());
  }
  if (!j.is_object()) throw ConfigError("run config must be a JSON object");

  const fs::path base = path.parent_path();
  RunConfig c;
  c.config_path = path;
  c.raw = j;
  c.item_set = RequireExisting(base, j, "item_set");
  c.baseset = RequireExisting(base, j, "baseset");
  try {
    c.candidate = j.at("candidate").get<ModelRef>();
    c.seed = j.value("seed", kDefaultPairSeed);
    if (j.contains("candidate_profile")) {
      c.candidate_profile =
          LoadProfile(RequireExisting(base, j, "candidate_profile"));
    }
    if (j.contains("judge_profile")) {
      c.judge_profile = LoadProfile(RequireExisting(base, j, "judge_profile"));
    }
    if (j.contains("prices")) c.prices = RequireExisting(base, j, "prices");
    if (!j.contains("output_dir") || !j.at("output_dir").is_string()) {
      throw ConfigError("run config needs a string 'output_dir'");
    }
    c.output_dir = Resolve(base, j.at("output_dir").get<std::string>());
  } catch (const Json::exception& e) {
    throw ConfigError("bad run config '" + path.string() + "': " + e.what());
  } catch (const ValidationError& e) {
    throw ConfigError("bad run config '" + path.string() + "': " + e.what());
  }
  if (c.candidate.id.empty()) throw ConfigError("candidate.id is empty");
  return c;
}

Json RunConfigJson(const RunConfig& config) {
  Json j = config.raw;
  j["seed"] = config.seed;
  j["candidate"] = config.candidate;
  return j;
}

}  // namespace anchoreval
