#include "matra/dsp.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <string>

namespace matra {
namespace {

constexpr double kLogFloor = 1e-10;  // relative to full-scale energy
// The mel floor sits far below any in-signal filter energy so that amplitude
// scaling shifts every log mel energy by the same constant, keeping DCT
// coefficients 1..n invariant to better than 1e-6.
constexpr double kMelLogFloor = 1e-20;
constexpr double kTwoPi = 2.0 * std::numbers::pi;

std::size_t next_pow2(std::size_t n) {
  std::size_t p = 1;
  while (p < n) p <<= 1;
  return p;
}

// Iterative radix-2 FFT, in place. Size must be a power of two.
void fft_inplace(std::vector<std::complex<double>>& a) {
  const std::size_t n = a.size();
  for (std::size_t i = 1, j = 0; i < n; ++i) {
    std::size_t bit = n >> 1;
    for (; j & bit; bit >>= 1) j ^= bit;
    j ^= bit;
    if (i < j) std::swap(a[i], a[j]);
  }
  for (std::size_t len = 2; len <= n; len <<= 1) {
    const double angle = -kTwoPi / static_cast<double>(len);
    const std::complex<double> wl(std::cos(angle), std::sin(angle));
    for (std::size_t i = 0; i < n; i += len) {
      std::complex<double> w(1.0, 0.0);
      for (std::size_t k = 0; k < len / 2; ++k) {
        const std::complex<double> u = a[i + k];
        const std::complex<double> v = a[i + k + len / 2] * w;
        a[i + k] = u + v;
        a[i + k + len / 2] = u - v;
        w *= wl;
      }
    }
  }
}

std::vector<double> hann_window(std::size_t n) {
  std::vector<double> w(n);
  for (std::size_t i = 0; i < n; ++i)
    w[i] = 0.5 * (1.0 - std::cos(kTwoPi * static_cast<double>(i) / static_cast<double>(n - 1)));
  return w;
}

struct FrameLayout {
  std::size_t frame_samps = 0;
  std::size_t hop_samps = 0;
  std::size_t n_frames = 0;
  std::size_t fft_size = 0;
};

FrameLayout make_layout(const AudioClip& clip, double frame_len, double hop) {
  if (clip.sample_rate <= 0 || clip.samples.empty())
    raise(Errc::InvalidArgument, "empty audio clip");
  if (frame_len <= 0 || hop <= 0) raise(Errc::InvalidArgument, "frame_len and hop must be > 0");
  if (frame_len < hop) raise(Errc::InvalidArgument, "frame_len must be >= hop");
  FrameLayout layout;
  layout.frame_samps = static_cast<std::size_t>(std::lround(frame_len * clip.sample_rate));
  layout.hop_samps = static_cast<std::size_t>(std::lround(hop * clip.sample_rate));
  if (layout.frame_samps < 2 || layout.hop_samps < 1)
    raise(Errc::InvalidArgument, "frame/hop too small for the sample rate");
  if (clip.samples.size() < layout.frame_samps)
    raise(Errc::ClipTooShort, "clip has " + std::to_string(clip.samples.size()) +
                                  " samples, needs at least " +
                                  std::to_string(layout.frame_samps));
  layout.n_frames = (clip.samples.size() - layout.frame_samps) / layout.hop_samps + 1;
  layout.fft_size = next_pow2(layout.frame_samps);
  return layout;
}

// Per-frame one-sided power spectrum, scaled by 2/(N*U) so that the summed
// power of a full-scale sine is about 0.5 (its mean square).
class PowerSpectra {
 public:
  PowerSpectra(const AudioClip& clip, const FrameLayout& layout)
      : clip_(clip), layout_(layout), window_(hann_window(layout.frame_samps)) {
    double u = 0.0;
    for (double w : window_) u += w * w;
    scale_ = 2.0 / (static_cast<double>(layout.fft_size) * u);
    bin_hz_ = clip.sample_rate / static_cast<double>(layout.fft_size);
    buffer_.resize(layout.fft_size);
    power_.resize(layout.fft_size / 2 + 1);
  }

  std::span<const double> frame(std::size_t i) {
    const std::size_t begin = i * layout_.hop_samps;
    for (std::size_t k = 0; k < layout_.frame_samps; ++k)
      buffer_[k] = clip_.samples[begin + k] * window_[k];
    std::fill(buffer_.begin() + static_cast<std::ptrdiff_t>(layout_.frame_samps), buffer_.end(),
              std::complex<double>(0.0, 0.0));
    fft_inplace(buffer_);
    for (std::size_t k = 0; k < power_.size(); ++k) power_[k] = scale_ * std::norm(buffer_[k]);
    return power_;
  }

  double bin_hz() const { return bin_hz_; }

 private:
  const AudioClip& clip_;
  FrameLayout layout_;
  std::vector<double> window_;
  std::vector<std::complex<double>> buffer_;
  std::vector<double> power_;
  double scale_ = 0.0;
  double bin_hz_ = 0.0;
};

double frames_start_offset(const FrameLayout& layout, double sample_rate) {
  return 0.5 * static_cast<double>(layout.frame_samps) / sample_rate;
}

double hz_to_mel(double hz) { return 2595.0 * std::log10(1.0 + hz / 700.0); }
double mel_to_hz(double mel) { return 700.0 * (std::pow(10.0, mel / 2595.0) - 1.0); }

}  // namespace

BandSpec BandSpec::default_three_band() {
  return BandSpec{{{0.0, 640.0}, {640.0, 2800.0}, {2800.0, 8000.0}}};
}

FrameSeries band_energies(const AudioClip& clip, const BandSpec& bands, double frame_len,
                          double hop) {
  if (bands.bands.empty()) raise(Errc::InvalidArgument, "band spec is empty");
  const double nyquist = clip.sample_rate / 2.0;
  for (const auto& [lo, hi] : bands.bands) {
    if (!(lo >= 0.0 && lo < hi && hi <= nyquist))
      raise(Errc::BandOutOfRange, "band " + std::to_string(lo) + "-" + std::to_string(hi) +
                                      " Hz invalid for sample rate " +
                                      std::to_string(clip.sample_rate));
  }
  const FrameLayout layout = make_layout(clip, frame_len, hop);
  PowerSpectra spectra(clip, layout);

  FrameSeries out;
  out.n_frames = layout.n_frames;
  out.n_channels = bands.bands.size();
  out.hop = hop;
  out.start_offset = frames_start_offset(layout, clip.sample_rate);
  out.values.resize(out.n_frames * out.n_channels);

  for (std::size_t i = 0; i < layout.n_frames; ++i) {
    const std::span<const double> power = spectra.frame(i);
    for (std::size_t b = 0; b < bands.bands.size(); ++b) {
      const auto& [lo, hi] = bands.bands[b];
      double energy = 0.0;
      for (std::size_t k = 0; k < power.size(); ++k) {
        const double f = static_cast<double>(k) * spectra.bin_hz();
        if (f >= lo && f < hi) energy += power[k];
      }
      out.at(i, b) = std::log(kLogFloor + energy);
    }
  }
  return out;
}

FrameSeries mfcc(const AudioClip& clip, int n_mels, int n_coeffs, double frame_len, double hop) {
  if (n_mels < 2) raise(Errc::InvalidArgument, "n_mels must be >= 2");
  if (n_coeffs < 1 || n_coeffs > n_mels)
    raise(Errc::InvalidArgument, "n_coeffs must lie in [1, n_mels]");
  const FrameLayout layout = make_layout(clip, frame_len, hop);
  PowerSpectra spectra(clip, layout);

  const double f_max = std::min(8000.0, clip.sample_rate / 2.0);
  const int m = n_mels;
  std::vector<double> edges(static_cast<std::size_t>(m) + 2);
  const double mel_hi = hz_to_mel(f_max);
  for (int k = 0; k < m + 2; ++k) edges[k] = mel_to_hz(mel_hi * k / (m + 1));

  FrameSeries out;
  out.n_frames = layout.n_frames;
  out.n_channels = static_cast<std::size_t>(n_coeffs);
  out.hop = hop;
  out.start_offset = frames_start_offset(layout, clip.sample_rate);
  out.values.resize(out.n_frames * out.n_channels);

  std::vector<double> mel_log(static_cast<std::size_t>(m));
  for (std::size_t i = 0; i < layout.n_frames; ++i) {
    const std::span<const double> power = spectra.frame(i);
    for (int f = 0; f < m; ++f) {
      const double lo = edges[f], c = edges[f + 1], hi = edges[f + 2];
      double energy = 0.0;
      for (std::size_t k = 0; k < power.size(); ++k) {
        const double hz = static_cast<double>(k) * spectra.bin_hz();
        if (hz <= lo || hz >= hi) continue;
        const double weight = (hz <= c) ? (hz - lo) / (c - lo) : (hi - hz) / (hi - c);
        energy += power[k] * weight;
      }
      mel_log[f] = std::log(kMelLogFloor + energy);
    }
    for (int j = 1; j <= n_coeffs; ++j) {
      double acc = 0.0;
      for (int f = 0; f < m; ++f)
        acc += mel_log[f] * std::cos(std::numbers::pi * j * (f + 0.5) / m);
      out.at(i, static_cast<std::size_t>(j - 1)) = acc;
    }
  }
  return out;
}

BiphasicKernel make_biphasic_kernel(double rise_sigma, double fall_sigma, double separation,
                                    double hop) {
  if (rise_sigma <= 0 || fall_sigma <= 0 || separation <= 0 || hop <= 0)
    raise(Errc::InvalidArgument, "kernel parameters must be positive");
  const double extent = 4.0 * std::max(rise_sigma, fall_sigma);
  const std::ptrdiff_t half_taps =
      static_cast<std::ptrdiff_t>(std::floor(extent / hop + 1e-9));
  if (half_taps < 1)
    raise(Errc::DegenerateKernel, "hop " + std::to_string(hop) +
                                      " s too coarse for kernel extent " + std::to_string(extent) +
                                      " s (fewer than 3 taps)");
  BiphasicKernel kernel;
  kernel.center_index = half_taps;
  kernel.taps.resize(static_cast<std::size_t>(2 * half_taps + 1));
  auto lobe = [](double t, double mu, double sigma) {
    const double z = (t - mu) / sigma;
    return std::exp(-0.5 * z * z) / (sigma * std::sqrt(kTwoPi));
  };
  for (std::size_t j = 0; j < kernel.taps.size(); ++j) {
    const double t = (static_cast<std::ptrdiff_t>(j) - half_taps) * hop;
    kernel.taps[j] = lobe(t, separation / 2.0, rise_sigma) - lobe(t, -separation / 2.0, fall_sigma);
  }
  double mean = 0.0;
  for (double tap : kernel.taps) mean += tap;
  mean /= static_cast<double>(kernel.taps.size());
  for (double& tap : kernel.taps) tap -= mean;
  return kernel;
}

std::vector<double> correlate_biphasic(std::span<const double> x, const BiphasicKernel& kernel) {
  if (x.empty()) raise(Errc::InvalidArgument, "empty input sequence");
  const std::ptrdiff_t n = static_cast<std::ptrdiff_t>(x.size());
  std::vector<double> y(x.size(), 0.0);
  auto sample = [&](std::ptrdiff_t i) {
    return x[static_cast<std::size_t>(std::clamp<std::ptrdiff_t>(i, 0, n - 1))];
  };
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    double acc = 0.0;
    for (std::size_t j = 0; j < kernel.taps.size(); ++j)
      acc += kernel.taps[j] * sample(i + static_cast<std::ptrdiff_t>(j) - kernel.center_index);
    y[static_cast<std::size_t>(i)] = acc;
  }
  return y;
}

NoveltyCurve novelty_subband(const FrameSeries& energies, const BiphasicKernel& kernel,
                             std::span<const double> weights) {
  if (energies.n_frames == 0 || energies.n_channels == 0)
    raise(Errc::InvalidArgument, "empty frame series");
  std::vector<double> w(weights.begin(), weights.end());
  if (w.empty()) w.assign(energies.n_channels, 1.0);
  if (w.size() != energies.n_channels)
    raise(Errc::InvalidArgument, "weight count must match channel count");
  for (double wi : w)
    if (wi < 0) raise(Errc::InvalidArgument, "channel weights must be non-negative");

  NoveltyCurve out;
  out.hop = energies.hop;
  out.start_offset = energies.start_offset;
  out.values.assign(energies.n_frames, 0.0);
  std::vector<double> channel(energies.n_frames);
  for (std::size_t c = 0; c < energies.n_channels; ++c) {
    for (std::size_t i = 0; i < energies.n_frames; ++i) channel[i] = energies.at(i, c);
    const std::vector<double> response = correlate_biphasic(channel, kernel);
    for (std::size_t i = 0; i < energies.n_frames; ++i)
      out.values[i] += w[c] * std::max(response[i], 0.0);
  }
  return out;
}

NoveltyCurve novelty_mfcc(const FrameSeries& coeffs, const BiphasicKernel& kernel) {
  if (coeffs.n_frames == 0 || coeffs.n_channels == 0)
    raise(Errc::InvalidArgument, "empty frame series");
  NoveltyCurve out;
  out.hop = coeffs.hop;
  out.start_offset = coeffs.start_offset;
  out.values.assign(coeffs.n_frames, 0.0);
  std::vector<double> channel(coeffs.n_frames);
  for (std::size_t c = 0; c < coeffs.n_channels; ++c) {
    for (std::size_t i = 0; i < coeffs.n_frames; ++i) channel[i] = coeffs.at(i, c);
    const std::vector<double> response = correlate_biphasic(channel, kernel);
    for (std::size_t i = 0; i < coeffs.n_frames; ++i)
      out.values[i] += response[i] * response[i];
  }
  for (double& v : out.values) v = std::sqrt(v);
  return out;
}

}  // namespace matra
