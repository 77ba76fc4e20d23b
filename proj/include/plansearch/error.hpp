// Copyright 2026 The plansearch Authors
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

#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace plansearch {

/// Failure categories. Each maps to a distinct, testable condition; the CLI
/// maps them onto exit codes.
enum class ErrorCode {
  kInput,              // caller supplied invalid data
  kConfig,             // invalid or inconsistent configuration
  kNumeric,            // non-finite intermediate or result
  kTransport,          // remote service unreachable or non-200
  kTimeout,            // remote service did not answer in time
  kMalformedResponse,  // remote service answered with an unusable payload
  kBuild,              // index build failed for a specific chunk
  kTraining,           // training diverged
  kVersionMismatch,    // persisted artifact has an unsupported format version
  kTruncated,          // persisted artifact is shorter than its manifest says
  kChecksum,           // persisted artifact failed its CRC32 check
  kEvaluation,         // evaluation inputs are inconsistent or degenerate
  kRerank,             // external reranker failed
  kIo,                 // filesystem failure
};

std::string_view to_string(ErrorCode code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& message) {
  throw Error(code, message);
}

}  // namespace plansearch
