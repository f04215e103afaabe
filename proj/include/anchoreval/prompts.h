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

// Prompt templates. The text of each template lives in prompts/*.txt and is
// compiled in at configure time, so the shipped files and the binary agree.

#ifndef ANCHOREVAL_PROMPTS_H_
#define ANCHOREVAL_PROMPTS_H_

#include <string>
#include <string_view>

#include "anchoreval/datamodel.h"

namespace anchoreval {

std::string_view ComparePromptTemplate();
std::string_view RubricPromptTemplate();
std::string_view TranslatePromptTemplate();

// Layout substituted for {{formatted_data}} in the compare prompt.
inline constexpr std::string_view kFormattedDataLayout =
    "Source text:\n{{source_text}}\n\n"
    "Translation A:\n{{translation_a}}\n\n"
    "Translation B:\n{{translation_b}}";

// SHA-256 over NFC(template) followed by NFC(layout).
std::string ComparePromptId();
std::string RubricPromptId();
std::string TranslatePromptId();

struct ComparePromptInput {
  std::string source_text;
  std::string translation_a;
  std::string translation_b;
  Direction direction = Direction::kEnToJa;
};

// Builds the slot texts for a pair from the store. Throws PreconditionError
// when either translation is missing.
ComparePromptInput MakeComparePromptInput(const Item& item,
                                          const PairAssignment& pair,
                                          const TranslationStore& store);

std::string RenderComparePrompt(const ComparePromptInput& input);
std::string RenderRubricPrompt(std::string_view source_text,
                               std::string_view translated_text,
                               std::string_view reference_text);
std::string RenderTranslatePrompt(const Item& item);

// Replaces every occurrence of `key` in `text`. Values are inserted
// verbatim and never rescanned.
std::string ReplaceAll(std::string_view text, std::string_view key,
                       std::string_view value);

}  // namespace anchoreval

#endif  // ANCHOREVAL_PROMPTS_H_
