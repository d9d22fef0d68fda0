// SPDX-License-Identifier: Apache-2.0
// Copyright Contributors to the rgbw-remosaic project.

#include "rgbw/error.hpp"

#include <thread>

#include "rgbw/parallel.hpp"

namespace rgbw {

const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidArgument: return "invalid-argument";
    case ErrorCode::kMissingChannel: return "missing-channel";
    case ErrorCode::kDescriptorMismatch: return "descriptor-mismatch";
    case ErrorCode::kDescriptorShape: return "descriptor-shape";
    case ErrorCode::kDimensionMismatch: return "dimension-mismatch";
    case ErrorCode::kOddDimension: return "odd-dimension";
    case ErrorCode::kLevelRange: return "level-range";
    case ErrorCode::kDimensionOverflow: return "dimension-overflow";
    case ErrorCode::kBadMagic: return "bad-magic";
    case ErrorCode::kTruncated: return "truncated";
    case ErrorCode::kUnknownCfa: return "unknown-cfa";
    case ErrorCode::kCropTooLarge: return "crop-too-large";
    case ErrorCode::kUnknownKind: return "unknown-kind";
    case ErrorCode::kUnregisteredGain: return "unregistered-gain";
    case ErrorCode::kInsufficientData: return "insufficient-data";
    case ErrorCode::kNonConvergence: return "non-convergence";
    case ErrorCode::kOutOfRange: return "out-of-range";
    case ErrorCode::kProviderFailed: return "provider-failed";
    case ErrorCode::kProviderParse: return "provider-parse";
    case ErrorCode::kProviderTimeout: return "provider-timeout";
    case ErrorCode::kEmptyDataset: return "empty-dataset";
    case ErrorCode::kMalformedDataset: return "malformed-dataset";
    case ErrorCode::kDuplicateEntry: return "duplicate-entry";
    case ErrorCode::kIo: return "io";
  }
  return "unknown";
}

int default_threads() {
  const unsigned n = std::thread::hardware_concurrency();
  return n == 0 ? 1 : static_cast<int>(n);
}

}  // namespace rgbw
