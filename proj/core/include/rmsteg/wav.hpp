#pragma once

#include <filesystem>

#include "rmsteg/audio.hpp"

namespace rmsteg {

/// Reads a RIFF/WAVE file: PCM, mono, 8 or 16 bit. Unknown chunks before the
/// data chunk are skipped. No resampling, no format conversion.
AudioSignal read_wav(const std::filesystem::path& path);

/// Writes a canonical 44-byte-header PCM WAV. Round-trips raw samples,
/// sample rate and bit depth exactly.
void write_wav(const AudioSignal& signal, const std::filesystem::path& path);

}  // namespace rmsteg
