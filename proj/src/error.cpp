#include "mbinet/error.hpp"

namespace mbinet {

const char* error_kind_name(ErrorKind k) {
  switch (k) {
    case ErrorKind::MalformedWav: return "MalformedWav";
    case ErrorKind::UnsupportedEncoding: return "UnsupportedEncoding";
    case ErrorKind::SignalTooShort: return "SignalTooShort";
    case ErrorKind::FixtureMissing: return "FixtureMissing";
    case ErrorKind::DimensionMismatch: return "DimensionMismatch";
    case ErrorKind::IoError: return "IoError";
    case ErrorKind::ShapeMismatch: return "ShapeMismatch";
    case ErrorKind::CheckpointMismatch: return "CheckpointMismatch";
    case ErrorKind::EmptyFrames: return "EmptyFrames";
    case ErrorKind::EmptyBatch: return "EmptyBatch";
    case ErrorKind::MissingTarget: return "MissingTarget";
    case ErrorKind::LengthMismatch: return "LengthMismatch";
    case ErrorKind::EmptyInput: return "EmptyInput";
    case ErrorKind::DegenerateInput: return "DegenerateInput";
    case ErrorKind::SchemaError: return "SchemaError";
    case ErrorKind::RangeError: return "RangeError";
    case ErrorKind::DuplicateId: return "DuplicateId";
    case ErrorKind::TooFewEntries: return "TooFewEntries";
    case ErrorKind::ConfigError: return "ConfigError";
    case ErrorKind::NonFiniteLoss: return "NonFiniteLoss";
    case ErrorKind::UsageError: return "UsageError";
  }
  return "UnknownError";
}

}  // namespace mbinet
