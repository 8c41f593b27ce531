#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>

#include "doctest.h"
#include "matra/dsp.hpp"
#include "support/oracles.hpp"

using namespace matra;

namespace {

AudioClip sine_clip(double freq, double seconds, double amplitude = 1.0, double rate = 16000.0) {
  AudioClip clip;
  clip.sample_rate = rate;
  const std::size_t n = static_cast<std::size_t>(seconds * rate);
  clip.samples.resize(n);
  for (std::size_t i = 0; i < n; ++i)
    clip.samples[i] = amplitude * std::sin(2.0 * std::numbers::pi * freq * i / rate);
  return clip;
}

AudioClip silence_clip(double seconds, double rate = 16000.0) {
  AudioClip clip;
  clip.sample_rate = rate;
  clip.samples.assign(static_cast<std::size_t>(seconds * rate), 0.0);
  return clip;
}

// Two synthetic vowels abutting at a known change point.
AudioClip two_vowel_clip(double change_at, double seconds) {
  AudioClip clip;
  clip.sample_rate = 16000.0;
  const std::size_t n = static_cast<std::size_t>(seconds * clip.sample_rate);
  clip.samples.resize(n);
  const double first[3] = {660.0, 880.0, 1100.0};
  const double second[3] = {350.0, 700.0, 2400.0};
  for (std::size_t i = 0; i < n; ++i) {
    const double t = i / clip.sample_rate;
    const double* partials = (t < change_at) ? first : second;
    double v = 0.0;
    for (int p = 0; p < 3; ++p) v += std::sin(2.0 * std::numbers::pi * partials[p] * t);
    clip.samples[i] = 0.3 * v;
  }
  return clip;
}

FrameSeries constant_series(std::size_t frames, std::size_t channels, double value) {
  FrameSeries fs;
  fs.n_frames = frames;
  fs.n_channels = channels;
  fs.hop = 0.010;
  fs.start_offset = 0.015;
  fs.values.assign(frames * channels, value);
  return fs;
}

BiphasicKernel default_kernel(double hop = 0.010) {
  return make_biphasic_kernel(0.020, 0.020, 0.040, hop);
}

}  // namespace

TEST_CASE("band energies separate a sine's band from an empty band") {
  const AudioClip clip = sine_clip(1000.0, 0.5);
  const BandSpec bands{{{640.0, 2800.0}, {3000.0, 5000.0}}};
  const FrameSeries series = band_energies(clip, bands, 0.030, 0.010);
  REQUIRE(series.n_channels == 2);
  REQUIRE(series.n_frames > 10);
  for (std::size_t i = 0; i < series.n_frames; ++i)
    CHECK(series.at(i, 0) - series.at(i, 1) >= 20.0);

  // Cross-check a few frames against the direct-DFT oracle.
  const std::size_t frame_samps = 480, hop_samps = 160;
  for (std::size_t i : {std::size_t{0}, std::size_t{7}, series.n_frames - 1}) {
    std::span<const double> frame(clip.samples.data() + i * hop_samps, frame_samps);
    const double oracle_mid = oracle::band_log_energy(frame, clip.sample_rate, 640.0, 2800.0);
    const double oracle_high = oracle::band_log_energy(frame, clip.sample_rate, 3000.0, 5000.0);
    CHECK(series.at(i, 0) == doctest::Approx(oracle_mid).epsilon(1e-9));
    CHECK(series.at(i, 1) == doctest::Approx(oracle_high).epsilon(1e-9));
    CHECK(oracle_mid - oracle_high >= 20.0);
  }
}

TEST_CASE("digital silence reads exactly the log floor") {
  const FrameSeries series =
      band_energies(silence_clip(0.3), BandSpec::default_three_band(), 0.030, 0.010);
  const double floor = std::log(1e-10);
  for (std::size_t i = 0; i < series.n_frames; ++i)
    for (std::size_t c = 0; c < series.n_channels; ++c) CHECK(series.at(i, c) == floor);
}

TEST_CASE("doubling amplitude adds log 4 to band energy") {
  const FrameSeries one = band_energies(sine_clip(1000.0, 0.3, 0.5),
                                        BandSpec{{{640.0, 2800.0}}}, 0.030, 0.010);
  const FrameSeries two = band_energies(sine_clip(1000.0, 0.3, 1.0),
                                        BandSpec{{{640.0, 2800.0}}}, 0.030, 0.010);
  for (std::size_t i = 0; i < one.n_frames; ++i)
    CHECK(two.at(i, 0) - one.at(i, 0) == doctest::Approx(std::log(4.0)).epsilon(1e-9));
}

TEST_CASE("band and frame validation errors") {
  const AudioClip clip = sine_clip(1000.0, 0.2);
  CHECK_THROWS_AS(band_energies(clip, BandSpec{{{640.0, 9000.0}}}, 0.030, 0.010), Error);
  CHECK_THROWS_AS(
      band_energies(sine_clip(1000.0, 0.001), BandSpec::default_three_band(), 0.030, 0.010),
      Error);
  try {
    band_energies(sine_clip(1000.0, 0.001), BandSpec::default_three_band(), 0.030, 0.010);
  } catch (const Error& e) {
    CHECK(e.code() == Errc::ClipTooShort);
  }
}

TEST_CASE("mfcc basics") {
  SUBCASE("silence gives identical frames") {
    const FrameSeries coeffs = mfcc(silence_clip(0.3), 40, 13, 0.030, 0.010);
    REQUIRE(coeffs.n_channels == 13);
    for (std::size_t i = 1; i < coeffs.n_frames; ++i)
      for (std::size_t c = 0; c < coeffs.n_channels; ++c)
        CHECK(coeffs.at(i, c) == coeffs.at(0, c));
  }
  SUBCASE("amplitude scaling leaves coefficients 1..n unchanged") {
    std::mt19937_64 rng(5);
    std::normal_distribution<double> noise(0.0, 0.2);
    AudioClip clip = silence_clip(0.25);
    for (double& s : clip.samples) s = noise(rng);
    AudioClip scaled = clip;
    for (double& s : scaled.samples) s *= 3.7;
    const FrameSeries a = mfcc(clip, 40, 13, 0.030, 0.010);
    const FrameSeries b = mfcc(scaled, 40, 13, 0.030, 0.010);
    for (std::size_t i = 0; i < a.n_frames; ++i)
      for (std::size_t c = 0; c < a.n_channels; ++c)
        CHECK(std::abs(a.at(i, c) - b.at(i, c)) < 1e-6);
  }
  SUBCASE("a vowel change moves the coefficients far more than steady noise") {
    const AudioClip clip = two_vowel_clip(0.25, 0.5);
    const FrameSeries coeffs = mfcc(clip, 40, 13, 0.030, 0.010);
    auto frame_delta = [&](std::size_t i) {
      double acc = 0.0;
      for (std::size_t c = 0; c < coeffs.n_channels; ++c) {
        const double d = coeffs.at(i + 1, c) - coeffs.at(i, c);
        acc += d * d;
      }
      return std::sqrt(acc);
    };
    // Steady region: frames well before the change.
    double steady = 0.0;
    for (std::size_t i = 2; i < 18; ++i) steady = std::max(steady, frame_delta(i));
    // Change region: the frame straddling t = 0.25 s.
    double change = 0.0;
    for (std::size_t i = 20; i < 28; ++i) change = std::max(change, frame_delta(i));
    CHECK(change > 10.0 * steady);
  }
  SUBCASE("n_coeffs must not exceed n_mels") {
    CHECK_THROWS_AS(mfcc(silence_clip(0.2), 10, 11, 0.030, 0.010), Error);
  }
}

TEST_CASE("biphasic kernel shape") {
  const BiphasicKernel kernel = default_kernel();
  REQUIRE(kernel.taps.size() >= 3);

  double sum = 0.0;
  for (double t : kernel.taps) sum += t;
  CHECK(std::abs(sum) < 1e-9);

  int sign_changes = 0;
  double prev = 0.0;
  for (double t : kernel.taps) {
    if (t == 0.0) continue;
    if (prev != 0.0 && (t > 0) != (prev > 0)) ++sign_changes;
    prev = t;
  }
  CHECK(sign_changes == 1);
  // Negative lobe first in tap order (the past side), positive lobe after.
  CHECK(kernel.taps.front() < 0.0);
  CHECK(kernel.taps.back() > 0.0);

  CHECK_THROWS_AS(make_biphasic_kernel(0.002, 0.002, 0.004, 0.010), Error);
  try {
    make_biphasic_kernel(0.002, 0.002, 0.004, 0.010);
  } catch (const Error& e) {
    CHECK(e.code() == Errc::DegenerateKernel);
  }
}

TEST_CASE("kernel responses to canonical inputs") {
  const BiphasicKernel kernel = default_kernel();
  SUBCASE("constant input gives zeros") {
    const std::vector<double> x(60, 3.25);
    for (double y : correlate_biphasic(x, kernel)) CHECK(std::abs(y) < 1e-9);
  }
  SUBCASE("upward step gives a single positive peak decaying to zero") {
    std::vector<double> x(80, 0.0);
    for (std::size_t i = 40; i < x.size(); ++i) x[i] = 1.0;
    const std::vector<double> y = correlate_biphasic(x, kernel);
    const std::size_t peak =
        static_cast<std::size_t>(std::max_element(y.begin(), y.end()) - y.begin());
    CHECK(peak == 40);
    CHECK(y[peak] > 0.0);
    for (double v : y) CHECK(v >= -1e-9);  // response never dips below zero
    CHECK(std::abs(y.front()) < 1e-9);
    CHECK(std::abs(y.back()) < 1e-9);
  }
  SUBCASE("downward step mirrors the upward response") {
    std::vector<double> up(80, 0.0), down(80, 1.0);
    for (std::size_t i = 40; i < 80; ++i) {
      up[i] = 1.0;
      down[i] = 0.0;
    }
    const std::vector<double> yu = correlate_biphasic(up, kernel);
    const std::vector<double> yd = correlate_biphasic(down, kernel);
    for (std::size_t i = 0; i < yu.size(); ++i) CHECK(yu[i] == doctest::Approx(-yd[i]).epsilon(1e-12));
  }
  SUBCASE("linearity of the pre-rectification stage") {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> val(-2.0, 2.0);
    std::vector<double> a(50), b(50), ab(50);
    for (std::size_t i = 0; i < 50; ++i) {
      a[i] = val(rng);
      b[i] = val(rng);
      ab[i] = a[i] + b[i];
    }
    const std::vector<double> ya = correlate_biphasic(a, kernel);
    const std::vector<double> yb = correlate_biphasic(b, kernel);
    const std::vector<double> yab = correlate_biphasic(ab, kernel);
    for (std::size_t i = 0; i < 50; ++i)
      CHECK(yab[i] == doctest::Approx(ya[i] + yb[i]).epsilon(1e-9));
  }
  SUBCASE("matches the direct-correlation oracle") {
    std::mt19937_64 rng(13);
    std::uniform_real_distribution<double> val(-1.0, 1.0);
    std::vector<double> x(64);
    for (double& v : x) v = val(rng);
    const std::vector<double> got = correlate_biphasic(x, kernel);
    const std::vector<double> want =
        oracle::correlate_clamped(x, kernel.taps, kernel.center_index);
    for (std::size_t i = 0; i < x.size(); ++i)
      CHECK(got[i] == doctest::Approx(want[i]).epsilon(1e-12));
  }
}

TEST_CASE("novelty of constant inputs is zero") {
  const BiphasicKernel kernel = default_kernel();
  const FrameSeries flat = constant_series(70, 3, -4.2);
  for (double v : novelty_subband(flat, kernel).values) CHECK(v < 1e-9);
  for (double v : novelty_mfcc(flat, kernel).values) CHECK(v < 1e-9);
}

TEST_CASE("novelty peaks localize steps") {
  const BiphasicKernel kernel = default_kernel();
  SUBCASE("single channel step at frame k") {
    FrameSeries fs = constant_series(100, 1, 0.0);
    for (std::size_t i = 55; i < fs.n_frames; ++i) fs.at(i, 0) = 4.0;
    const NoveltyCurve nov = novelty_subband(fs, kernel);
    CHECK(nov.hop == fs.hop);
    const std::size_t peak = static_cast<std::size_t>(
        std::max_element(nov.values.begin(), nov.values.end()) - nov.values.begin());
    CHECK(std::abs(static_cast<long>(peak) - 55L) <= 1);

    const NoveltyCurve novm = novelty_mfcc(fs, kernel);
    const std::size_t peakm = static_cast<std::size_t>(
        std::max_element(novm.values.begin(), novm.values.end()) - novm.values.begin());
    CHECK(std::abs(static_cast<long>(peakm) - 55L) <= 1);
  }
  SUBCASE("two steps 200 ms apart give two localized maxima") {
    FrameSeries fs = constant_series(120, 1, 0.0);
    for (std::size_t i = 40; i < fs.n_frames; ++i) fs.at(i, 0) += 2.0;
    for (std::size_t i = 60; i < fs.n_frames; ++i) fs.at(i, 0) += 2.0;  // 20 frames = 200 ms later
    const NoveltyCurve nov = novelty_subband(fs, kernel);

    // Verify against a locally computed response: channel 0 correlated and
    // rectified is the whole curve here.
    std::vector<double> channel(fs.n_frames);
    for (std::size_t i = 0; i < fs.n_frames; ++i) channel[i] = fs.at(i, 0);
    const std::vector<double> reference =
        oracle::correlate_clamped(channel, kernel.taps, kernel.center_index);
    for (std::size_t i = 0; i < fs.n_frames; ++i)
      CHECK(nov.values[i] == doctest::Approx(std::max(reference[i], 0.0)).epsilon(1e-12));

    // Local maxima sit within one frame of each step.
    std::vector<std::size_t> maxima;
    for (std::size_t i = 1; i + 1 < nov.values.size(); ++i)
      if (nov.values[i] > nov.values[i - 1] && nov.values[i] > nov.values[i + 1] &&
          nov.values[i] > 0.1)
        maxima.push_back(i);
    REQUIRE(maxima.size() == 2);
    CHECK(std::abs(static_cast<long>(maxima[0]) - 40L) <= 1);
    CHECK(std::abs(static_cast<long>(maxima[1]) - 60L) <= 1);
  }
  SUBCASE("weights scale channel contributions") {
    FrameSeries fs = constant_series(60, 2, 0.0);
    for (std::size_t i = 30; i < fs.n_frames; ++i) fs.at(i, 1) = 1.0;
    const std::vector<double> weights{0.0, 2.0};
    const NoveltyCurve strong = novelty_subband(fs, kernel, weights);
    const std::vector<double> unit_weights{0.0, 1.0};
    const NoveltyCurve weak = novelty_subband(fs, kernel, unit_weights);
    for (std::size_t i = 0; i < strong.values.size(); ++i)
      CHECK(strong.values[i] == doctest::Approx(2.0 * weak.values[i]).epsilon(1e-12));
    CHECK_THROWS_AS(novelty_subband(fs, kernel, std::vector<double>{1.0}), Error);
  }
}

TEST_CASE("mfcc novelty is amplitude invariant and localizes a vowel change") {
  const AudioClip clip = two_vowel_clip(0.30, 0.6);
  AudioClip scaled = clip;
  for (double& s : scaled.samples) s *= 2.5;
  const BiphasicKernel kernel = default_kernel();
  const NoveltyCurve nov = novelty_mfcc(mfcc(clip, 40, 13, 0.030, 0.010), kernel);
  const NoveltyCurve nov_scaled = novelty_mfcc(mfcc(scaled, 40, 13, 0.030, 0.010), kernel);
  REQUIRE(nov.values.size() == nov_scaled.values.size());
  for (std::size_t i = 0; i < nov.values.size(); ++i)
    CHECK(std::abs(nov.values[i] - nov_scaled.values[i]) < 1e-6);

  const std::size_t peak = static_cast<std::size_t>(
      std::max_element(nov.values.begin(), nov.values.end()) - nov.values.begin());
  CHECK(std::abs(nov.time(peak) - 0.30) <= 0.050);
}

TEST_CASE("timebase is preserved through the pipeline") {
  const AudioClip clip = sine_clip(800.0, 0.4);
  const FrameSeries series = band_energies(clip, BandSpec::default_three_band(), 0.030, 0.010);
  CHECK(series.hop == 0.010);
  CHECK(series.start_offset == doctest::Approx(0.015));
  CHECK(series.frame_time(10) == doctest::Approx(series.start_offset + 0.100));
  const NoveltyCurve nov = novelty_subband(series, default_kernel());
  CHECK(nov.hop == series.hop);
  CHECK(nov.start_offset == series.start_offset);
}
