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

// Read-only judgment browser. Nothing here writes to disk.

#ifndef ANCHOREVAL_INSPECT_H_
#define ANCHOREVAL_INSPECT_H_

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "anchoreval/datamodel.h"

namespace anchoreval {

struct InspectData {
  std::vector<Judgment> judgments;
  TranslationStore translations;
  ItemSet items;
};

struct InspectFilter {
  std::optional<std::string> item;
  std::optional<std::string> model;  // matches either side ("anchor=")
  std::optional<Verdict> verdict;
  std::optional<Slice> slice;

  bool Matches(const Judgment& j, const ItemSet& items) const;
};

// Parses "key=value" terms: item=, anchor= (or model=), verdict=
// (A, B, refused / JudgeRefused), slice=. Throws ConfigError.
void ApplyFilterTerm(InspectFilter& filter, std::string_view term);
InspectFilter ParseFilter(const std::vector<std::string>& terms);

// Indices into data.judgments, ordered by (item, left, right).
std::vector<size_t> SelectJudgments(const InspectData& data,
                                    const InspectFilter& filter);

std::string RenderRow(const InspectData& data, size_t index);
std::string RenderDetail(const InspectData& data, size_t index);

// Every matching judgment in detail form, separated by rules. Deterministic,
// suitable for golden files.
std::string DumpJudgments(const InspectData& data, const InspectFilter& filter);

// Line-oriented session: list, filter k=v, clear, show N, next, prev, help,
// quit. Returns when input ends or on quit.
void RunInspector(const InspectData& data, std::istream& in, std::ostream& out);

}  // namespace anchoreval

#endif  // ANCHOREVAL_INSPECT_H_
