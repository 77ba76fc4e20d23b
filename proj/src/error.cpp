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

#include "plansearch/error.hpp"

namespace plansearch {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::kInput: return "input error";
    case ErrorCode::kConfig: return "config error";
    case ErrorCode::kNumeric: return "numeric error";
    case ErrorCode::kTransport: return "transport error";
    case ErrorCode::kTimeout: return "timeout error";
    case ErrorCode::kMalformedResponse: return "malformed response";
    case ErrorCode::kBuild: return "build error";
    case ErrorCode::kTraining: return "training error";
    case ErrorCode::kVersionMismatch: return "version mismatch";
    case ErrorCode::kTruncated: return "truncated file";
    case ErrorCode::kChecksum: return "checksum failure";
    case ErrorCode::kEvaluation: return "evaluation error";
    case ErrorCode::kRerank: return "rerank error";
    case ErrorCode::kIo: return "io error";
  }
  return "unknown error";
}

}  // namespace plansearch
