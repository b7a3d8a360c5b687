#pragma once

#include <cstdint>

#include "rmsteg/audio.hpp"

namespace rmsteg {

/// Deterministic synthetic cover: a mixture of 2-5 random sinusoids plus
/// low-pass filtered noise at a random level, peak-normalized to 0.9 and
/// quantized to 16 bits. The noise level spans several decades, so some
/// covers have a strongly structured low-amplitude plane (quiet, tonal
/// material) and some are noise-dominated.
AudioSignal synth_cover(double duration_s, int sample_rate, uint64_t seed);

}  // namespace rmsteg
