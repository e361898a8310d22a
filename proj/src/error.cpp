#include "dairstega/error.hpp"

namespace dairstega {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidArgument: return "InvalidArgument";
    case ErrorCode::kPayloadTooLarge: return "PayloadTooLarge";
    case ErrorCode::kBadMagic: return "BadMagic";
    case ErrorCode::kBadVersion: return "BadVersion";
    case ErrorCode::kTruncatedPayload: return "TruncatedPayload";
    case ErrorCode::kNonByteAlignedLength: return "NonByteAlignedLength";
    case ErrorCode::kEmptyCorpus: return "EmptyCorpus";
    case ErrorCode::kAllZero: return "AllZero";
    case ErrorCode::kBadModelFile: return "BadModelFile";
    case ErrorCode::kRemoteUnavailable: return "RemoteUnavailable";
    case ErrorCode::kProtocolError: return "ProtocolError";
    case ErrorCode::kDegenerateDistribution: return "DegenerateDistribution";
    case ErrorCode::kZeroWeightVector: return "ZeroWeightVector";
    case ErrorCode::kCountMismatch: return "CountMismatch";
    case ErrorCode::kCapacityExhausted: return "CapacityExhausted";
    case ErrorCode::kProviderMismatch: return "ProviderMismatch";
    case ErrorCode::kConfigDigestMismatch: return "ConfigDigestMismatch";
    case ErrorCode::kTokenNotInPool: return "TokenNotInPool";
    case ErrorCode::kDimensionMismatch: return "DimensionMismatch";
    case ErrorCode::kZeroVector: return "ZeroVector";
    case ErrorCode::kConfigError: return "ConfigError";
    case ErrorCode::kIoError: return "IoError";
  }
  return "Unknown";
}

ErrorClass classify(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidArgument:
    case ErrorCode::kConfigError:
    case ErrorCode::kIoError:
      return ErrorClass::kConfig;
    case ErrorCode::kEmptyCorpus:
    case ErrorCode::kBadModelFile:
    case ErrorCode::kRemoteUnavailable:
    case ErrorCode::kProtocolError:
    case ErrorCode::kProviderMismatch:
      return ErrorClass::kProvider;
    default:
      return ErrorClass::kCodec;
  }
}

}  // namespace dairstega
