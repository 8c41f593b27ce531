#pragma once

#include <cstddef>
#include <span>
#include <utility>
#include <vector>

#include "matra/audio.hpp"

namespace matra {

// Frame-level features on a uniform timebase: the value of channel c at
// frame i sits at time start_offset + i * hop.
struct FrameSeries {
  std::vector<double> values;  // row-major, n_frames x n_channels
  std::size_t n_frames = 0;
  std::size_t n_channels = 0;
  double hop = 0.0;           // seconds
  double start_offset = 0.0;  // seconds, centre of frame 0

  double at(std::size_t frame, std::size_t channel) const {
    return values[frame * n_channels + channel];
  }
  double& at(std::size_t frame, std::size_t channel) {
    return values[frame * n_channels + channel];
  }
  double frame_time(std::size_t frame) const { return start_offset + frame * hop; }
};

struct BandSpec {
  std::vector<std::pair<double, double>> bands;  // (low_hz, high_hz), low < high

  // {(0,640), (640,2800), (2800,8000)}: the discriminative mid band with its
  // flanking context bands.
  static BandSpec default_three_band();
};

// Zero-sum smoothing differentiator: a positive Gaussian lobe ahead of a
// negative one, so correlation peaks where the input steps upward.
struct BiphasicKernel {
  std::vector<double> taps;
  std::ptrdiff_t center_index = 0;
};

struct NoveltyCurve {
  std::vector<double> values;  // >= 0 after rectification
  double hop = 0.0;
  double start_offset = 0.0;

  double time(std::size_t i) const { return start_offset + i * hop; }
};

// Log-compressed band energies, one channel per band. Energies are
// normalized so a full-scale sine reads about 0.5; the log floor epsilon is
// 1e-10 of full scale, so digital silence reads exactly log(1e-10).
FrameSeries band_energies(const AudioClip& clip, const BandSpec& bands, double frame_len,
                          double hop);

// Mel-frequency cepstral coefficients 1..n_coeffs (coefficient 0 excluded,
// so the features are invariant to amplitude scaling).
FrameSeries mfcc(const AudioClip& clip, int n_mels, int n_coeffs, double frame_len, double hop);

BiphasicKernel make_biphasic_kernel(double rise_sigma, double fall_sigma, double separation,
                                    double hop);

// Correlates one sequence with the kernel (clamp-to-edge padding), no
// rectification. This is the linear stage shared by both novelty models.
std::vector<double> correlate_biphasic(std::span<const double> x, const BiphasicKernel& kernel);

// Per-channel correlate + half-wave rectify, then weighted sum across
// channels. Empty weights mean unit weights; weights must be non-negative.
NoveltyCurve novelty_subband(const FrameSeries& energies, const BiphasicKernel& kernel,
                             std::span<const double> weights = {});

// Per-channel correlate, then the Euclidean norm across channels per frame.
NoveltyCurve novelty_mfcc(const FrameSeries& coeffs, const BiphasicKernel& kernel);

}  // namespace matra
