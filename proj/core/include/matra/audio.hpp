#pragma once

#include <filesystem>
#include <vector>

#include "matra/error.hpp"

namespace matra {

struct AudioClip {
  std::vector<double> samples;  // mono, nominally in [-1, 1]
  double sample_rate = 0.0;

  double duration() const {
    return sample_rate > 0 ? static_cast<double>(samples.size()) / sample_rate : 0.0;
  }
};

// Reads a PCM WAV file (16-bit integer or 32-bit float, plain or extensible
// header); multi-channel content is averaged down to mono.
AudioClip read_wav(const std::filesystem::path& path);

// Serialized mono WAV; bits must be 16 (PCM) or 32 (IEEE float). Samples are
// clamped to [-1, 1].
std::string wav_bytes(const AudioClip& clip, int bits = 16);
void write_wav(const std::filesystem::path& path, const AudioClip& clip, int bits = 16);

// Windowed-sinc resampler (Hann window, 32 taps per side, cutoff at 45% of
// the lower Nyquist). Returns the input unchanged when rates already match.
AudioClip resample(const AudioClip& clip, double target_rate);

}  // namespace matra
