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

#ifndef ANCHOREVAL_HASHING_H_
#define ANCHOREVAL_HASHING_H_

#include <array>
#include <cstdint>
#include <initializer_list>
#include <string>
#include <string_view>

namespace anchoreval {

using Sha256Digest = std::array<std::uint8_t, 32>;

Sha256Digest Sha256(std::string_view bytes);

// Lowercase hex of SHA-256 over the UTF-8 bytes.
std::string Sha256Hex(std::string_view bytes);

std::string ToHex(const Sha256Digest& digest);

// Unicode NFC. Throws ValidationError on invalid UTF-8.
std::string NormalizeNfc(std::string_view utf8);

// SHA-256(seed as 8 little-endian bytes || part_0 || part_1 || ...).
// Parts are concatenated without separators.
Sha256Digest KeyedDigest(std::uint64_t seed,
                         std::initializer_list<std::string_view> parts);

// Least-significant bit of the digest read as a big-endian integer.
inline int LowBit(const Sha256Digest& digest) { return digest[31] & 1; }

// Uniform double in [0, 1) from the leading 53 bits of the digest.
double UnitInterval(const Sha256Digest& digest);

}  // namespace anchoreval

#endif  // ANCHOREVAL_HASHING_H_
