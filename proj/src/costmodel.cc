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

#include "anchoreval/costmodel.h"

#include <cmath>
#include <cstdio>
#include <cstdlib>

#include "anchoreval/error.h"

namespace anchoreval {
namespace {

constexpr std::int64_t kPicoPerCent = 10'000'000'000;  // 1e10

std::int64_t ToMicros(double value, const char* what) {
  if (!(value >= 0.0) || !std::isfinite(value)) {
    throw ValidationError(std::string(what) + " must be a finite price >= 0");
  }
  return std::llround(value * 1e6);
}

}  // namespace

std::string Money::ToCents() const {
  // Round half away from zero at the cent.
  std::int64_t cents = (std::llabs(pico) + kPicoPerCent / 2) / kPicoPerCent;
  if (pico < 0) cents = -cents;
  char buf[48];
  std::snprintf(buf, sizeof(buf), "%s%lld.%02lld", cents < 0 ? "-" : "",
                static_cast<long long>(std::llabs(cents) / 100),
                static_cast<long long>(std::llabs(cents) % 100));
  return buf;
}

PriceSheet PriceSheet::FromDecimal(double input_per_million,
                                   double output_per_million,
                                   std::string currency) {
  PriceSheet p;
  p.input_per_million_micros = ToMicros(input_per_million, "input price");
  p.output_per_million_micros = ToMicros(output_per_million, "output price");
  p.currency = std::move(currency);
  return p;
}

PriceSheet LoadPriceSheet(const std::filesystem::path& path) {
  std::string text = ReadFile(path);
  try {
    Json j = Json::parse(text);
    return PriceSheet::FromDecimal(j.at("input_per_million").get<double>(),
                                   j.at("output_per_million").get<double>(),
                                   j.value("currency", std::string("USD")));
  } catch (const Json::exception& e) {
    throw ParseError("bad price sheet '" + path.string() + "': " + e.what());
  }
}

CostEstimate EstimateCost(const TokenStats& stats, const PriceSheet& prices) {
  CostEstimate c;
  c.currency = prices.currency;
  const double count = static_cast<double>(stats.judgment_count);
  c.input_tokens = std::llround(stats.mean_input * count);
  c.output_tokens = std::llround(stats.mean_output * count);
  // tokens * (micros per 1e6 tokens) = micro-units * 1e-6 per token... which
  // is exactly pico-units.
  c.input_cost = Money{c.input_tokens * prices.input_per_million_micros};
  c.output_cost = Money{c.output_tokens * prices.output_per_million_micros};
  c.total = c.input_cost + c.output_cost;
  return c;
}

TokenStats MeasureTokenStats(const std::vector<Judgment>& judgments) {
  std::int64_t count = 0, in = 0, out = 0, estimated = 0;
  for (const Judgment& j : judgments) {
    if (j.refused()) continue;
    ++count;
    in += j.input_tokens;
    out += j.output_tokens;
    if (j.tokens_estimated) ++estimated;
  }
  if (count == 0) {
    throw EmptyError("no non-refused judgments to measure token usage on");
  }
  TokenStats s;
  s.judgment_count = count;
  s.mean_input = static_cast<double>(in) / static_cast<double>(count);
  s.mean_output = static_cast<double>(out) / static_cast<double>(count);
  s.estimated_fraction =
      static_cast<double>(estimated) / static_cast<double>(count);
  return s;
}

TokenStats MeasureTokenStats(const std::filesystem::path& log_path) {
  return MeasureTokenStats(ReadJudgments(log_path));
}

void to_json(Json& j, const PriceSheet& v) {
  j = Json{{"input_per_million", static_cast<double>(v.input_per_million_micros) / 1e6},
           {"output_per_million", static_cast<double>(v.output_per_million_micros) / 1e6},
           {"currency", v.currency}};
}

void to_json(Json& j, const TokenStats& v) {
  j = Json{{"mean_input", v.mean_input},
           {"mean_output", v.mean_output},
           {"judgment_count", v.judgment_count},
           {"estimated_fraction", v.estimated_fraction}};
}

void from_json(const Json& j, TokenStats& v) {
  v.mean_input = j.at("mean_input").get<double>();
  v.mean_output = j.at("mean_output").get<double>();
  v.judgment_count = j.at("judgment_count").get<std::int64_t>();
  v.estimated_fraction = j.value("estimated_fraction", 0.0);
}

void to_json(Json& j, const CostEstimate& v) {
  j = Json{{"input_tokens", v.input_tokens},
           {"output_tokens", v.output_tokens},
           {"input_cost_pico", v.input_cost.pico},
           {"output_cost_pico", v.output_cost.pico},
           {"total_pico", v.total.pico},
           {"input_cost", v.input_cost.ToDouble()},
           {"output_cost", v.output_cost.ToDouble()},
           {"total", v.total.ToDouble()},
           {"currency", v.currency}};
}

void from_json(const Json& j, CostEstimate& v) {
  v.input_tokens = j.at("input_tokens").get<std::int64_t>();
  v.output_tokens = j.at("output_tokens").get<std::int64_t>();
  v.input_cost = Money{j.at("input_cost_pico").get<std::int64_t>()};
  v.output_cost = Money{j.at("output_cost_pico").get<std::int64_t>()};
  v.total = Money{j.at("total_pico").get<std::int64_t>()};
  v.currency = j.value("currency", std::string("USD"));
}

}  // namespace anchoreval
