#include "matra/error.hpp"

namespace matra {

const char* errc_name(Errc code) noexcept {
  switch (code) {
    case Errc::RowGroupMalformed: return "RowGroupMalformed";
    case Errc::WidthMismatch: return "WidthMismatch";
    case Errc::InvalidToken: return "InvalidToken";
    case Errc::UnknownLine: return "UnknownLine";
    case Errc::DanglingContinuation: return "DanglingContinuation";
    case Errc::VibhagMismatch: return "VibhagMismatch";
    case Errc::InvalidTala: return "InvalidTala";
    case Errc::BadAudioFile: return "BadAudioFile";
    case Errc::ClipTooShort: return "ClipTooShort";
    case Errc::BandOutOfRange: return "BandOutOfRange";
    case Errc::DegenerateKernel: return "DegenerateKernel";
    case Errc::EmptyReference: return "EmptyReference";
    case Errc::TooFewAnchors: return "TooFewAnchors";
    case Errc::AnchorOrderViolation: return "AnchorOrderViolation";
    case Errc::AlternationViolation: return "AlternationViolation";
    case Errc::OutOfGridRange: return "OutOfGridRange";
    case Errc::EmptySearchRange: return "EmptySearchRange";
    case Errc::ScheduleExhaustsLabels: return "ScheduleExhaustsLabels";
    case Errc::TempoOutOfRange: return "TempoOutOfRange";
    case Errc::IoError: return "IoError";
    case Errc::MalformedInput: return "MalformedInput";
    case Errc::ConfigUnknownKey: return "ConfigUnknownKey";
    case Errc::ConfigBadValue: return "ConfigBadValue";
    case Errc::InvalidArgument: return "InvalidArgument";
  }
  return "UnknownError";
}

Error::Error(Errc code, const std::string& message)
    : std::runtime_error(std::string(errc_name(code)) + ": " + message), code_(code) {}

void raise(Errc code, const std::string& message) { throw Error(code, message); }

}  // namespace matra
