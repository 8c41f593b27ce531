#pragma once

#include <stdexcept>
#include <string>

namespace matra {

// Stable failure identifiers. The message carries the context (file, row,
// offending value); the code is what callers and tests dispatch on.
enum class Errc {
  // notation
  RowGroupMalformed,
  WidthMismatch,
  InvalidToken,
  UnknownLine,
  DanglingContinuation,
  VibhagMismatch,
  InvalidTala,
  // audio / dsp
  BadAudioFile,
  ClipTooShort,
  BandOutOfRange,
  DegenerateKernel,
  // onset
  EmptyReference,
  // grid
  TooFewAnchors,
  AnchorOrderViolation,
  AlternationViolation,
  OutOfGridRange,
  // align
  EmptySearchRange,
  ScheduleExhaustsLabels,
  // synth
  TempoOutOfRange,
  // io / config
  IoError,
  MalformedInput,
  ConfigUnknownKey,
  ConfigBadValue,
  InvalidArgument,
};

const char* errc_name(Errc code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& message);
  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

[[noreturn]] void raise(Errc code, const std::string& message);

}  // namespace matra
