// SPDX-License-Identifier: Apache-2.0
// Copyright Contributors to the rgbw-remosaic project.

#pragma once

#include <stdexcept>
#include <string>

namespace rgbw {

enum class ErrorCode {
  kInvalidArgument,
  kMissingChannel,
  kDescriptorMismatch,
  kDescriptorShape,
  kDimensionMismatch,
  kOddDimension,
  kLevelRange,
  kDimensionOverflow,
  kBadMagic,
  kTruncated,
  kUnknownCfa,
  kCropTooLarge,
  kUnknownKind,
  kUnregisteredGain,
  kInsufficientData,
  kNonConvergence,
  kOutOfRange,
  kProviderFailed,
  kProviderParse,
  kProviderTimeout,
  kEmptyDataset,
  kMalformedDataset,
  kDuplicateEntry,
  kIo,
};

const char* to_string(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace rgbw
