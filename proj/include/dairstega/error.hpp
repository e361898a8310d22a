#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace dairstega {

enum class ErrorCode {
  kInvalidArgument,
  // bitstream
  kPayloadTooLarge,
  kBadMagic,
  kBadVersion,
  kTruncatedPayload,
  kNonByteAlignedLength,
  // lm_provider
  kEmptyCorpus,
  kAllZero,
  kBadModelFile,
  kRemoteUnavailable,
  kProtocolError,
  // allocation
  kDegenerateDistribution,
  kZeroWeightVector,
  kCountMismatch,
  // codec
  kCapacityExhausted,
  kProviderMismatch,
  kConfigDigestMismatch,
  kTokenNotInPool,
  // metrics
  kDimensionMismatch,
  kZeroVector,
  // cli
  kConfigError,
  kIoError,
};

std::string_view to_string(ErrorCode code);

// Coarse grouping used for process exit codes.
enum class ErrorClass { kConfig, kProvider, kCodec };

ErrorClass classify(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(to_string(code)) + ": " + message),
        code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace dairstega
