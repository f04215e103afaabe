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

#ifndef ANCHOREVAL_SEMVER_H_
#define ANCHOREVAL_SEMVER_H_

#include <compare>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace anchoreval {

// Semantic version of an anchor set. A leading "v" is tolerated on input
// ("v1.0.0"); major, minor and patch are all required.
struct Version {
  std::uint64_t major = 0;
  std::uint64_t minor = 0;
  std::uint64_t patch = 0;
  std::vector<std::string> prerelease;  // dot-separated identifiers
  std::string build;                    // ignored for precedence

  // Throws VersionError.
  static Version Parse(std::string_view text);

  std::string ToString() const;

  // Semver 2.0 precedence. Build metadata does not participate.
  friend std::strong_ordering operator<=>(const Version& a, const Version& b);
  friend bool operator==(const Version& a, const Version& b) {
    return (a <=> b) == 0;
  }
};

enum class VersionRelation {
  kEqual,
  kComparablePatch,    // same major.minor
  kCalibratedMinor,    // same major, different minor
  kIncomparableMajor,  // different major
};

VersionRelation CompareVersions(const Version& a, const Version& b);
// Parses both sides first; throws VersionError on malformed input.
VersionRelation CompareVersions(std::string_view a, std::string_view b);

std::string_view ToString(VersionRelation r);

}  // namespace anchoreval

#endif  // ANCHOREVAL_SEMVER_H_
