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

#ifndef TRANSCRIPTOR_ERROR_H_
#define TRANSCRIPTOR_ERROR_H_

#include <stdexcept>
#include <string>
#include <string_view>

namespace transcriptor {

enum class ErrorCode {
  // raster
  kMissingFile,
  kUnsupportedFormat,
  kCorruptHeader,
  kIoFailure,
  // shared
  kInvalidParam,
  kShapeMismatch,
  kEmptyImage,
  // grid
  kInsufficientLines,
  kIndexOutOfRange,
  kDegenerateCell,
  kTemplateTooLarge,
  // weights
  kBadMagic,
  kUnsupportedVersion,
  kMissingTensor,
  kExtraTensor,
  kTruncatedFile,
  kExtraData,
  kIncompleteWeights,
  // ctc
  kTargetTooLong,
  kInvalidTarget,
  // pipeline
  kInvalidFormat,
  kOutOfRange,
  kExternalCommandFailed,
  kTruthMismatch,
  kConfigError,
};

std::string_view ErrorCodeName(ErrorCode code);

// Every failure in the library surfaces as this exception. `subject` carries
// the offending entity where one exists (a tensor name, a file path).
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message, std::string subject = {});

  ErrorCode code() const noexcept { return code_; }
  const std::string& subject() const noexcept { return subject_; }

 private:
  ErrorCode code_;
  std::string subject_;
};

}  // namespace transcriptor

#endif  // TRANSCRIPTOR_ERROR_H_
