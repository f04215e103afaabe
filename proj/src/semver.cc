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

#include "anchoreval/semver.h"

#include <algorithm>
#include <charconv>

#include "anchoreval/error.h"

namespace anchoreval {
namespace {

bool AllDigits(std::string_view s) {
  return !s.empty() && std::all_of(s.begin(), s.end(), [](char c) {
    return c >= '0' && c <= '9';
  });
}

bool ValidIdentifier(std::string_view s) {
  return !s.empty() && std::all_of(s.begin(), s.end(), [](char c) {
    return (c >= '0' && c <= '9') || (c >= 'a' && c <= 'z') ||
           (c >= 'A' && c <= 'Z') || c == '-';
  });
}

std::vector<std::string_view> Split(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  size_t start = 0;
  while (true) {
    size_t pos = s.find(sep, start);
    out.push_back(s.substr(start, pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

std::uint64_t ParseNumeric(std::string_view part, std::string_view whole) {
  if (!AllDigits(part) || (part.size() > 1 && part[0] == '0')) {
    throw VersionError("not a semantic version: '" + std::string(whole) + "'");
  }
  std::uint64_t v = 0;
  auto [ptr, ec] = std::from_chars(part.data(), part.data() + part.size(), v);
  if (ec != std::errc()) {
    throw VersionError("version component overflows: '" + std::string(whole) +
                       "'");
  }
  return v;
}

}  // namespace

Version Version::Parse(std::string_view text) {
  std::string_view s = text;
  if (!s.empty() && s[0] == 'v') s.remove_prefix(1);
  Version v;
  if (size_t plus = s.find('+'); plus != std::string_view::npos) {
    v.build = std::string(s.substr(plus + 1));
    for (auto id : Split(v.build, '.')) {
      if (!ValidIdentifier(id)) {
        throw VersionError("bad build metadata in '" + std::string(text) + "'");
      }
    }
    s = s.substr(0, plus);
  }
  if (size_t dash = s.find('-'); dash != std::string_view::npos) {
    for (auto id : Split(s.substr(dash + 1), '.')) {
      if (!ValidIdentifier(id) ||
          (AllDigits(id) && id.size() > 1 && id[0] == '0')) {
        throw VersionError("bad pre-release in '" + std::string(text) + "'");
      }
      v.prerelease.emplace_back(id);
    }
    s = s.substr(0, dash);
  }
  auto core = Split(s, '.');
  if (core.size() != 3) {
    throw VersionError("not a semantic version (need major.minor.patch): '" +
                       std::string(text) + "'");
  }
  v.major = ParseNumeric(core[0], text);
  v.minor = ParseNumeric(core[1], text);
  v.patch = ParseNumeric(core[2], text);
  return v;
}

std::string Version::ToString() const {
  std::string out = std::to_string(major) + "." + std::to_string(minor) + "." +
                    std::to_string(patch);
  for (size_t i = 0; i < prerelease.size(); ++i) {
    out += (i == 0 ? "-" : ".") + prerelease[i];
  }
  if (!build.empty()) out += "+" + build;
  return out;
}

std::strong_ordering operator<=>(const Version& a, const Version& b) {
  if (auto c = a.major <=> b.major; c != 0) return c;
  if (auto c = a.minor <=> b.minor; c != 0) return c;
  if (auto c = a.patch <=> b.patch; c != 0) return c;
  // A version without pre-release outranks any pre-release of the same core.
  if (a.prerelease.empty() != b.prerelease.empty()) {
    return a.prerelease.empty() ? std::strong_ordering::greater
                                : std::strong_ordering::less;
  }
  size_t n = std::min(a.prerelease.size(), b.prerelease.size());
  for (size_t i = 0; i < n; ++i) {
    const std::string& x = a.prerelease[i];
    const std::string& y = b.prerelease[i];
    bool xn = AllDigits(x), yn = AllDigits(y);
    if (xn && yn) {
      if (x.size() != y.size()) return x.size() <=> y.size();
      if (auto c = x.compare(y) <=> 0; c != 0) return c;
    } else if (xn != yn) {
      return xn ? std::strong_ordering::less : std::strong_ordering::greater;
    } else if (auto c = x.compare(y) <=> 0; c != 0) {
      return c;
    }
  }
  return a.prerelease.size() <=> b.prerelease.size();
}

VersionRelation CompareVersions(const Version& a, const Version& b) {
  if (a.major != b.major) return VersionRelation::kIncomparableMajor;
  if (a.minor != b.minor) return VersionRelation::kCalibratedMinor;
  if (a.patch == b.patch && a.prerelease == b.prerelease) {
    return VersionRelation::kEqual;
  }
  return VersionRelation::kComparablePatch;
}

VersionRelation CompareVersions(std::string_view a, std::string_view b) {
  return CompareVersions(Version::Parse(a), Version::Parse(b));
}

std::string_view ToString(VersionRelation r) {
  switch (r) {
    case VersionRelation::kEqual:
      return "equal";
    case VersionRelation::kComparablePatch:
      return "comparable-patch";
    case VersionRelation::kCalibratedMinor:
      return "calibrated-minor";
    case VersionRelation::kIncomparableMajor:
      return "incomparable-major";
  }
  return "?";
}

}  // namespace anchoreval
