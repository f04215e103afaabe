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

#ifndef ANCHOREVAL_COSTMODEL_H_
#define ANCHOREVAL_COSTMODEL_H_

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "anchoreval/datamodel.h"

namespace anchoreval {

// Money in integer pico-units of the sheet's currency (1e-12). Products of
// integer token counts and micro-unit prices are exact in this unit.
struct Money {
  std::int64_t pico = 0;

  double ToDouble() const { return static_cast<double>(pico) * 1e-12; }
  // Rounded to cents, e.g. "6.59".
  std::string ToCents() const;

  friend Money operator+(Money a, Money b) { return Money{a.pico + b.pico}; }
  friend bool operator==(Money, Money) = default;
};

struct PriceSheet {
  // Price per one million tokens, in micro-units of currency.
  std::int64_t input_per_million_micros = 0;
  std::int64_t output_per_million_micros = 0;
  std::string currency = "USD";

  // From decimal prices per million tokens, e.g. (0.30, 2.50).
  static PriceSheet FromDecimal(double input_per_million,
                                double output_per_million,
                                std::string currency = "USD");
};

// prices.json: { "input_per_million": 0.30, "output_per_million": 2.50,
//                "currency": "USD" }. Throws IoError/ParseError/ValidationError.
PriceSheet LoadPriceSheet(const std::filesystem::path& path);

struct TokenStats {
  double mean_input = 0.0;
  double mean_output = 0.0;
  std::int64_t judgment_count = 0;
  double estimated_fraction = 0.0;
};

struct CostEstimate {
  std::int64_t input_tokens = 0;
  std::int64_t output_tokens = 0;
  Money input_cost;
  Money output_cost;
  Money total;
  std::string currency = "USD";
};

CostEstimate EstimateCost(const TokenStats& stats, const PriceSheet& prices);

// Means over non-refused judgments. Throws EmptyError when there are none.
TokenStats MeasureTokenStats(const std::vector<Judgment>& judgments);
TokenStats MeasureTokenStats(const std::filesystem::path& log_path);

void to_json(Json& j, const PriceSheet& v);
void to_json(Json& j, const TokenStats& v);
void from_json(const Json& j, TokenStats& v);
void to_json(Json& j, const CostEstimate& v);
void from_json(const Json& j, CostEstimate& v);

}  // namespace anchoreval

#endif  // ANCHOREVAL_COSTMODEL_H_
