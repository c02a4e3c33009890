#ifndef MBINET_ERROR_HPP
#define MBINET_ERROR_HPP

#include <stdexcept>
#include <string>

namespace mbinet {

enum class ErrorKind {
  // wav / dsp
  MalformedWav,
  UnsupportedEncoding,
  SignalTooShort,
  // embedding provider
  FixtureMissing,
  DimensionMismatch,
  IoError,
  // model
  ShapeMismatch,
  CheckpointMismatch,
  // objectives
  EmptyFrames,
  EmptyBatch,
  MissingTarget,
  // metrics
  LengthMismatch,
  EmptyInput,
  DegenerateInput,
  // manifest / config
  SchemaError,
  RangeError,
  DuplicateId,
  TooFewEntries,
  ConfigError,
  // training
  NonFiniteLoss,
  // cli
  UsageError,
};

const char* error_kind_name(ErrorKind k);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& msg)
      : std::runtime_error(std::string(error_kind_name(kind)) + ": " + msg),
        kind_(kind) {}

  ErrorKind kind() const { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& msg) {
  throw Error(kind, msg);
}

}  // namespace mbinet

#endif  // MBINET_ERROR_HPP
