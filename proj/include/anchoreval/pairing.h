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

#ifndef ANCHOREVAL_PAIRING_H_
#define ANCHOREVAL_PAIRING_H_

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "anchoreval/datamodel.h"

namespace anchoreval {

inline constexpr std::uint64_t kDefaultPairSeed = 42;

// Side assignment for one comparison. The lexicographically smaller model id
// is always the left model; Translation A is the left model's output iff the
// low bit of SHA-256(seed_le || item_id || left || right) is 0. The result
// does not depend on enumeration order.
PairAssignment AssignPair(std::uint64_t seed, std::string_view item_id,
                          std::string_view model_a, std::string_view model_b);

struct PairPlan {
  std::string candidate;
  std::string baseset_version;
  std::uint64_t seed = kDefaultPairSeed;
  std::vector<PairAssignment> pairs;  // sorted by (item_id, anchor_id)

  friend bool operator==(const PairPlan&, const PairPlan&) = default;
};

// One assignment per (item, anchor), candidate vs anchor.
// Throws ConflictError if the candidate id is also an anchor id, EmptyError
// if there are no items or no anchors.
PairPlan BuildPairPlan(const ItemSet& items, const AnchorSet& anchors,
                       const ModelRef& candidate,
                       std::uint64_t seed = kDefaultPairSeed);

// The four slices an item belongs to: overall, its direction, its tier and
// the direction x tier cell.
std::vector<Slice> SliceOf(const Item& item);

void to_json(Json& j, const PairPlan& v);
void from_json(const Json& j, PairPlan& v);

// plan.json, keys sorted, pairs in canonical order.
std::string SerializePlan(const PairPlan& plan);
void SavePlan(const PairPlan& plan, const std::filesystem::path& path);
PairPlan LoadPlan(const std::filesystem::path& path);

}  // namespace anchoreval

#endif  // ANCHOREVAL_PAIRING_H_
