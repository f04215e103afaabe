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

#include "anchoreval/pairing.h"

#include <algorithm>

#include "anchoreval/error.h"
#include "anchoreval/hashing.h"

namespace anchoreval {

PairAssignment AssignPair(std::uint64_t seed, std::string_view item_id,
                          std::string_view model_a, std::string_view model_b) {
  if (model_a == model_b) {
    throw ValidationError("cannot pair model '" + std::string(model_a) +
                          "' with itself");
  }
  std::string_view left = std::min(model_a, model_b);
  std::string_view right = std::max(model_a, model_b);
  PairAssignment p;
  p.item_id = std::string(item_id);
  p.left_model = std::string(left);
  p.right_model = std::string(right);
  p.seed = seed;
  p.a_side = LowBit(KeyedDigest(seed, {item_id, left, right})) == 0
                 ? Side::kLeft
                 : Side::kRight;
  return p;
}

PairPlan BuildPairPlan(const ItemSet& items, const AnchorSet& anchors,
                       const ModelRef& candidate, std::uint64_t seed) {
  if (items.empty()) throw EmptyError("item set is empty");
  if (anchors.anchors.empty()) throw EmptyError("anchor set has no anchors");
  if (anchors.IsAnchor(candidate.id)) {
    throw ConflictError("candidate id '" + candidate.id +
                        "' collides with an anchor id");
  }
  std::vector<const Item*> sorted_items;
  for (const Item& item : items.items()) sorted_items.push_back(&item);
  std::sort(sorted_items.begin(), sorted_items.end(),
            [](const Item* a, const Item* b) { return a->id < b->id; });
  std::vector<std::string> anchor_ids = anchors.AnchorIds();
  std::sort(anchor_ids.begin(), anchor_ids.end());

  PairPlan plan;
  plan.candidate = candidate.id;
  plan.baseset_version = anchors.version.ToString();
  plan.seed = seed;
  plan.pairs.reserve(sorted_items.size() * anchor_ids.size());
  for (const Item* item : sorted_items) {
    for (const std::string& anchor : anchor_ids) {
      plan.pairs.push_back(AssignPair(seed, item->id, candidate.id, anchor));
    }
  }
  return plan;
}

std::vector<Slice> SliceOf(const Item& item) {
  std::vector<Slice> out;
  for (Slice s : kAllSlices) {
    if (SliceContains(s, item)) out.push_back(s);
  }
  return out;
}

void to_json(Json& j, const PairPlan& v) {
  j = Json{{"candidate", v.candidate},
           {"baseset_version", v.baseset_version},
           {"seed", v.seed},
           {"pairs", v.pairs}};
}

void from_json(const Json& j, PairPlan& v) {
  v.candidate = j.at("candidate").get<std::string>();
  v.baseset_version = j.at("baseset_version").get<std::string>();
  v.seed = j.at("seed").get<std::uint64_t>();
  v.pairs = j.at("pairs").get<std::vector<PairAssignment>>();
}

std::string SerializePlan(const PairPlan& plan) {
  return Json(plan).dump(1) + "\n";
}

void SavePlan(const PairPlan& plan, const std::filesystem::path& path) {
  WriteFile(path, SerializePlan(plan));
}

PairPlan LoadPlan(const std::filesystem::path& path) {
  std::string text = ReadFile(path);
  try {
    return Json::parse(text).get<PairPlan>();
  } catch (const Json::exception& e) {
    throw ParseError("bad plan file '" + path.string() + "': " + e.what());
  }
}

}  // namespace anchoreval
