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

#ifndef ANCHOREVAL_ERROR_H_
#define ANCHOREVAL_ERROR_H_

#include <stdexcept>
#include <string>

namespace anchoreval {

// Root of every error thrown by the library. The CLI maps ConfigError to
// exit status 2 and everything else to 1.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

#define ANCHOREVAL_DEFINE_ERROR(Name)  \
  class Name : public Error {          \
   public:                             \
    using Error::Error;                \
  }

ANCHOREVAL_DEFINE_ERROR(ParseError);
ANCHOREVAL_DEFINE_ERROR(ValidationError);
ANCHOREVAL_DEFINE_ERROR(IncompleteError);
ANCHOREVAL_DEFINE_ERROR(VersionError);
ANCHOREVAL_DEFINE_ERROR(IoError);
ANCHOREVAL_DEFINE_ERROR(ConflictError);
ANCHOREVAL_DEFINE_ERROR(EmptyError);
ANCHOREVAL_DEFINE_ERROR(ConfigError);
ANCHOREVAL_DEFINE_ERROR(MalformedJudgeOutput);
ANCHOREVAL_DEFINE_ERROR(PreconditionError);
ANCHOREVAL_DEFINE_ERROR(MixedCandidatesError);
ANCHOREVAL_DEFINE_ERROR(DegenerateError);
ANCHOREVAL_DEFINE_ERROR(UnknownModelError);

#undef ANCHOREVAL_DEFINE_ERROR

}  // namespace anchoreval

#endif  // ANCHOREVAL_ERROR_H_
