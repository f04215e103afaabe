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

#include "anchoreval/prompts.h"

#include "anchoreval/error.h"
#include "anchoreval/hashing.h"

namespace anchoreval {

std::string ReplaceAll(std::string_view text, std::string_view key,
                       std::string_view value) {
  std::string out;
  out.reserve(text.size() + value.size());
  size_t pos = 0;
  while (true) {
    size_t hit = text.find(key, pos);
    if (hit == std::string_view::npos) break;
    out.append(text.substr(pos, hit - pos));
    out.append(value);
    pos = hit + key.size();
  }
  out.append(text.substr(pos));
  return out;
}

std::string ComparePromptId() {
  static const std::string id =
      Sha256Hex(NormalizeNfc(ComparePromptTemplate()) +
                NormalizeNfc(kFormattedDataLayout));
  return id;
}

std::string RubricPromptId() {
  static const std::string id = Sha256Hex(NormalizeNfc(RubricPromptTemplate()));
  return id;
}

std::string TranslatePromptId() {
  static const std::string id =
      Sha256Hex(NormalizeNfc(TranslatePromptTemplate()));
  return id;
}

ComparePromptInput MakeComparePromptInput(const Item& item,
                                          const PairAssignment& pair,
                                          const TranslationStore& store) {
  const Translation* a = store.Find(item.id, pair.a_model());
  const Translation* b = store.Find(item.id, pair.b_model());
  if (a == nullptr || b == nullptr) {
    throw PreconditionError("missing translation for item '" + item.id +
                            "' and model '" +
                            (a == nullptr ? pair.a_model() : pair.b_model()) +
                            "'");
  }
  return ComparePromptInput{item.source_text, a->text, b->text,
                            item.direction};
}

std::string RenderComparePrompt(const ComparePromptInput& input) {
  // Fill the layout in one left-to-right pass so a translation that happens
  // to contain "{{translation_b}}" is never substituted into.
  std::string data;
  std::string_view layout = kFormattedDataLayout;
  struct Slot {
    std::string_view key;
    const std::string* value;
  };
  const Slot slots[] = {{"{{source_text}}", &input.source_text},
                        {"{{translation_a}}", &input.translation_a},
                        {"{{translation_b}}", &input.translation_b}};
  size_t pos = 0;
  for (const Slot& slot : slots) {
    size_t hit = layout.find(slot.key, pos);
    data.append(layout.substr(pos, hit - pos));
    data.append(*slot.value);
    pos = hit + slot.key.size();
  }
  data.append(layout.substr(pos));
  return ReplaceAll(ComparePromptTemplate(), "{{formatted_data}}", data);
}

std::string RenderRubricPrompt(std::string_view source_text,
                               std::string_view translated_text,
                               std::string_view reference_text) {
  std::string_view tmpl = RubricPromptTemplate();
  struct Slot {
    std::string_view key;
    std::string_view value;
  };
  const Slot slots[] = {{"{{ source_text }}", source_text},
                        {"{{ translated_text }}", translated_text},
                        {"{{ reference_text }}", reference_text}};
  std::string out;
  size_t pos = 0;
  for (const Slot& slot : slots) {
    size_t hit = tmpl.find(slot.key, pos);
    out.append(tmpl.substr(pos, hit - pos));
    out.append(slot.value);
    pos = hit + slot.key.size();
  }
  out.append(tmpl.substr(pos));
  return out;
}

std::string RenderTranslatePrompt(const Item& item) {
  std::string_view tmpl = TranslatePromptTemplate();
  const std::string_view lang_key = "{{target_language}}";
  const std::string_view src_key = "{{source_text}}";
  size_t lang = tmpl.find(lang_key);
  size_t src = tmpl.find(src_key, lang + lang_key.size());
  std::string out;
  out.append(tmpl.substr(0, lang));
  out.append(TargetLanguage(item.direction));
  out.append(tmpl.substr(lang + lang_key.size(), src - lang - lang_key.size()));
  out.append(item.source_text);
  out.append(tmpl.substr(src + src_key.size()));
  return out;
}

}  // namespace anchoreval
