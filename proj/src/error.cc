// Copyright 2026 The Transcriptor Authors. All Rights Reserved.
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

#include "transcriptor/error.h"

namespace transcriptor {

std::string_view ErrorCodeName(ErrorCode code) {
  switch (code) {
    case ErrorCode::kMissingFile: return "MissingFile";
    case ErrorCode::kUnsupportedFormat: return "UnsupportedFormat";
    case ErrorCode::kCorruptHeader: return "CorruptHeader";
    case ErrorCode::kIoFailure: return "IoFailure";
    case ErrorCode::kInvalidParam: return "InvalidParam";
    case ErrorCode::kShapeMismatch: return "ShapeMismatch";
    case ErrorCode::kEmptyImage: return "EmptyImage";
    case ErrorCode::kInsufficientLines: return "InsufficientLines";
    case ErrorCode::kIndexOutOfRange: return "IndexOutOfRange";
    case ErrorCode::kDegenerateCell: return "DegenerateCell";
    case ErrorCode::kTemplateTooLarge: return "TemplateTooLarge";
    case ErrorCode::kBadMagic: return "BadMagic";
    case ErrorCode::kUnsupportedVersion: return "UnsupportedVersion";
    case ErrorCode::kMissingTensor: return "MissingTensor";
    case ErrorCode::kExtraTensor: return "ExtraTensor";
    case ErrorCode::kTruncatedFile: return "TruncatedFile";
    case ErrorCode::kExtraData: return "ExtraData";
    case ErrorCode::kIncompleteWeights: return "IncompleteWeights";
    case ErrorCode::kTargetTooLong: return "TargetTooLong";
    case ErrorCode::kInvalidTarget: return "InvalidTarget";
    case ErrorCode::kInvalidFormat: return "InvalidFormat";
    case ErrorCode::kOutOfRange: return "OutOfRange";
    case ErrorCode::kExternalCommandFailed: return "ExternalCommandFailed";
    case ErrorCode::kTruthMismatch: return "TruthMismatch";
    case ErrorCode::kConfigError: return "ConfigError";
  }
  return "Unknown";
}

Error::Error(ErrorCode code, const std::string& message, std::string subject)
    : std::runtime_error(std::string(ErrorCodeName(code)) + ": " + message),
      code_(code),
      subject_(std::move(subject)) {}

}  // namespace transcriptor
