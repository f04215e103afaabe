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

#include "anchoreval/inspect.h"

#include <algorithm>
#include <istream>
#include <ostream>
#include <sstream>

#include "anchoreval/error.h"

namespace anchoreval {
namespace {

constexpr std::string_view kRule =
    "------------------------------------------------------------------------";

std::string TextOrMissing(const Translation* t) {
  if (t == nullptr) return "(translation not found)";
  if (t->text.empty()) return "(empty)";
  return t->text;
}

}  // namespace

bool InspectFilter::Matches(const Judgment& j, const ItemSet& items) const {
  if (item && j.pair.item_id != *item) return false;
  if (model && !j.pair.Involves(*model)) return false;
  if (verdict && j.verdict != *verdict) return false;
  if (slice) {
    const Item* it = items.Find(j.pair.item_id);
    if (it == nullptr || !SliceContains(*slice, *it)) return false;
  }
  return true;
}

void ApplyFilterTerm(InspectFilter& filter, std::string_view term) {
  size_t eq = term.find('=');
  if (eq == std::string_view::npos) {
    throw ConfigError("filter term '" + std::string(term) +
                      "' is not key=value");
  }
  std::string key(term.substr(0, eq));
  std::string value(term.substr(eq + 1));
  if (key == "item") {
    filter.item = value;
  } else if (key == "anchor" || key == "model") {
    filter.model = value;
  } else if (key == "verdict") {
    if (value == "JudgeRefused") value = "refused";
    try {
      filter.verdict = ParseVerdict(value);
    } catch (const Error&) {
      throw ConfigError("unknown verdict '" + value + "'");
    }
  } else if (key == "slice") {
    try {
      filter.slice = ParseSlice(value);
    } catch (const Error&) {
      throw ConfigError("unknown slice '" + value + "'");
    }
  } else {
    throw ConfigError("unknown filter key '" + key + "'");
  }
}

InspectFilter ParseFilter(const std::vector<std::string>& terms) {
  InspectFilter f;
  for (const std::string& t : terms) ApplyFilterTerm(f, t);
  return f;
}

std::vector<size_t> SelectJudgments(const InspectData& data,
                                    const InspectFilter& filter) {
  std::vector<size_t> out;
  for (size_t i = 0; i < data.judgments.size(); ++i) {
    if (filter.Matches(data.judgments[i], data.items)) out.push_back(i);
  }
  std::stable_sort(out.begin(), out.end(), [&](size_t a, size_t b) {
    return PairKey(data.judgments[a].pair) < PairKey(data.judgments[b].pair);
  });
  return out;
}

std::string RenderRow(const InspectData& data, size_t index) {
  const Judgment& j = data.judgments.at(index);
  std::ostringstream out;
  out << "#" << index << "  " << j.pair.item_id << "  A=" << j.pair.a_model()
      << "  B=" << j.pair.b_model() << "  verdict=" << ToString(j.verdict);
  if (j.winner_model) out << "  winner=" << *j.winner_model;
  return out.str();
}

std::string RenderDetail(const InspectData& data, size_t index) {
  const Judgment& j = data.judgments.at(index);
  const PairAssignment& p = j.pair;
  std::ostringstream out;
  out << "Judgment #" << index << "\n";
  out << "Item: " << p.item_id;
  if (const Item* item = data.items.Find(p.item_id)) {
    out << " (" << ToString(item->direction) << ", " << ToString(item->tier)
        << ")\n";
    out << "\nSource:\n" << item->source_text << "\n";
  } else {
    out << " (not in item set)\n";
  }
  out << "\nSlots: A = " << p.a_model() << " (" << ToString(p.a_side)
      << "), B = " << p.b_model() << " ("
      << ToString(p.a_side == Side::kLeft ? Side::kRight : Side::kLeft)
      << "), seed " << p.seed << "\n";
  out << "\nTranslation A [" << p.a_model() << "]:\n"
      << TextOrMissing(data.translations.Find(p.item_id, p.a_model())) << "\n";
  out << "\nTranslation B [" << p.b_model() << "]:\n"
      << TextOrMissing(data.translations.Find(p.item_id, p.b_model())) << "\n";
  out << "\nVerdict: " << ToString(j.verdict);
  if (j.winner_model) out << " (winner: " << *j.winner_model << ")";
  out << "\n";
  if (j.refused()) out << "Refusal: " << j.refusal_reason << "\n";
  out << "Judge: " << j.judge.model_id << ", prompt " << j.judge.prompt_id
      << "\n";
  out << "Tokens: " << j.input_tokens << " in, " << j.output_tokens << " out"
      << (j.tokens_estimated ? " (estimated)" : "") << ", attempts "
      << j.attempts << "\n";
  out << "\nAnalysis:\n" << j.analysis_text << "\n";
  return out.str();
}

std::string DumpJudgments(const InspectData& data,
                          const InspectFilter& filter) {
  std::ostringstream out;
  std::vector<size_t> rows = SelectJudgments(data, filter);
  out << rows.size() << " judgment(s)\n";
  for (size_t i : rows) out << kRule << "\n" << RenderDetail(data, i);
  return out.str();
}

void RunInspector(const InspectData& data, std::istream& in,
                  std::ostream& out) {
  InspectFilter filter;
  std::vector<size_t> rows = SelectJudgments(data, filter);
  // Position in rows; kNone before the first show.
  constexpr size_t kNone = static_cast<size_t>(-1);
  size_t cursor = kNone;

  auto show = [&](size_t pos) {
    cursor = pos;
    out << RenderDetail(data, rows[pos]);
  };

  out << data.judgments.size() << " judgment(s) loaded. Type 'help'.\n";
  std::string line;
  while (out << "> " << std::flush, std::getline(in, line)) {
    std::istringstream words(line);
    std::string cmd;
    words >> cmd;
    if (cmd.empty()) continue;
    if (cmd == "quit" || cmd == "q" || cmd == "exit") break;
    if (cmd == "help" || cmd == "?") {
      out << "list | filter key=value... | clear | show N | next | prev | "
             "quit\nfilter keys: item, anchor, verdict (A, B, refused), "
             "slice\n";
    } else if (cmd == "list" || cmd == "ls") {
      for (size_t pos = 0; pos < rows.size(); ++pos) {
        out << pos << ": " << RenderRow(data, rows[pos]) << "\n";
      }
      out << rows.size() << " row(s)\n";
    } else if (cmd == "filter") {
      std::string term;
      try {
        while (words >> term) ApplyFilterTerm(filter, term);
      } catch (const ConfigError& e) {
        out << "error: " << e.what() << "\n";
      }
      rows = SelectJudgments(data, filter);
      cursor = kNone;
      out << rows.size() << " row(s) match\n";
    } else if (cmd == "clear") {
      filter = InspectFilter{};
      rows = SelectJudgments(data, filter);
      cursor = kNone;
      out << rows.size() << " row(s)\n";
    } else if (cmd == "show") {
      long long pos = -1;
      if (!(words >> pos) || pos < 0 ||
          static_cast<size_t>(pos) >= rows.size()) {
        out << "error: row out of range\n";
      } else {
        show(static_cast<size_t>(pos));
      }
    } else if (cmd == "next" || cmd == "n") {
      size_t pos = cursor == kNone ? 0 : cursor + 1;
      if (pos < rows.size()) {
        show(pos);
      } else {
        out << "end of list\n";
      }
    } else if (cmd == "prev" || cmd == "p") {
      if (cursor != kNone && cursor > 0) {
        show(cursor - 1);
      } else {
        out << "start of list\n";
      }
    } else {
      out << "unknown command '" << cmd << "'\n";
    }
  }
}

}  // namespace anchoreval
