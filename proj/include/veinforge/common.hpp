#pragma once

#include <stdexcept>
#include <string>

namespace vf {

// One code per failure mode the library can report. CLI maps these to exit 3
// (or exit 2 for flag-level problems caught before the library is reached).
enum class Err {
  // raster / file I/O
  MissingFile,
  MalformedHeader,
  UnsupportedFormat,
  TruncatedPayload,
  IoFailure,
  CoordinateOutOfBounds,
  // preprocess
  WindowTooLarge,
  NoContrast,
  // linalg
  NonFinite,
  NotPSD,
  // veinspace
  DimensionMismatch,
  EmptyCoordinateList,
  InsufficientCoordinates,
  InsufficientSamples,
  AllZeroSpectrum,
  // matching
  EmptyModel,
  UnknownLabel,
  BothEmpty,
  // evaluation
  NoAttempts,
  EmptyScoreList,
  ProtocolViolation,
  InsufficientData,
  // synthgen
  InvalidSpec,
  // modelstore
  BadMagic,
  UnsupportedVersion,
  CorruptLength,
};

const char* err_name(Err e);

class Error : public std::runtime_error {
 public:
  Error(Err code, const std::string& msg)
      : std::runtime_error(std::string(err_name(code)) + ": " + msg),
        code_(code) {}
  Err code() const { return code_; }

 private:
  Err code_;
};

[[noreturn]] inline void raise(Err code, const std::string& msg) {
  throw Error(code, msg);
}

}  // namespace vf
