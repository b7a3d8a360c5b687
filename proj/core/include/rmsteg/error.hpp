#pragma once

#include <stdexcept>
#include <string>

namespace rmsteg {

/// Error categories surfaced by the library. Each maps to one failure
/// condition of a public operation.
enum class Errc {
  not_wav,
  unsupported_format,
  truncated_file,
  io_failure,
  too_short,
  length_mismatch,
  payload_too_large,
  no_target,
  signal_too_short,
  out_of_band,
  bad_config,
  bank_mismatch,
  too_few_frames,
  dim_mismatch,
  single_class,
  version_mismatch,
};

const char* errc_name(Errc c);

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& msg)
      : std::runtime_error(std::string(errc_name(code)) + ": " + msg), code_(code) {}

  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

[[noreturn]] inline void raise(Errc code, const std::string& msg) { throw Error(code, msg); }

inline const char* errc_name(Errc c) {
  switch (c) {
    case Errc::not_wav: return "NotWav";
    case Errc::unsupported_format: return "UnsupportedFormat";
    case Errc::truncated_file: return "TruncatedFile";
    case Errc::io_failure: return "IoFailure";
    case Errc::too_short: return "TooShort";
    case Errc::length_mismatch: return "LengthMismatch";
    case Errc::payload_too_large: return "PayloadTooLarge";
    case Errc::no_target: return "NoTarget";
    case Errc::signal_too_short: return "SignalTooShort";
    case Errc::out_of_band: return "OutOfBand";
    case Errc::bad_config: return "BadConfig";
    case Errc::bank_mismatch: return "BankMismatch";
    case Errc::too_few_frames: return "TooFewFrames";
    case Errc::dim_mismatch: return "DimMismatch";
    case Errc::single_class: return "SingleClass";
    case Errc::version_mismatch: return "VersionMismatch";
  }
  return "Unknown";
}

}  // namespace rmsteg
