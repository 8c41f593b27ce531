#include "matra/audio.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <numbers>
#include <string>

namespace matra {
namespace {

constexpr std::uint16_t kFormatPcm = 1;
constexpr std::uint16_t kFormatFloat = 3;
constexpr std::uint16_t kFormatExtensible = 0xFFFE;

template <typename T>
T read_le(const unsigned char* p) {
  T value;
  std::memcpy(&value, p, sizeof(T));
  return value;  // little-endian host assumed
}

template <typename T>
void append_le(std::string& out, T value) {
  char buf[sizeof(T)];
  std::memcpy(buf, &value, sizeof(T));
  out.append(buf, sizeof(T));
}

double clamp_sample(double s) { return std::clamp(s, -1.0, 1.0); }

}  // namespace

AudioClip read_wav(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) raise(Errc::IoError, "cannot open audio file " + path.string());
  std::vector<unsigned char> bytes{std::istreambuf_iterator<char>(in),
                                   std::istreambuf_iterator<char>()};
  if (bytes.size() < 44 || std::memcmp(bytes.data(), "RIFF", 4) != 0 ||
      std::memcmp(bytes.data() + 8, "WAVE", 4) != 0)
    raise(Errc::BadAudioFile, path.string() + " is not a RIFF/WAVE file");

  std::uint16_t format = 0, channels = 0, bits = 0;
  std::uint32_t rate = 0;
  const unsigned char* data = nullptr;
  std::size_t data_size = 0;

  std::size_t pos = 12;
  while (pos + 8 <= bytes.size()) {
    const std::uint32_t chunk_size = read_le<std::uint32_t>(bytes.data() + pos + 4);
    const unsigned char* chunk = bytes.data() + pos + 8;
    if (pos + 8 + chunk_size > bytes.size())
      raise(Errc::BadAudioFile, path.string() + ": truncated chunk");
    if (std::memcmp(bytes.data() + pos, "fmt ", 4) == 0) {
      if (chunk_size < 16) raise(Errc::BadAudioFile, path.string() + ": short fmt chunk");
      format = read_le<std::uint16_t>(chunk);
      channels = read_le<std::uint16_t>(chunk + 2);
      rate = read_le<std::uint32_t>(chunk + 4);
      bits = read_le<std::uint16_t>(chunk + 14);
      if (format == kFormatExtensible && chunk_size >= 26)
        format = read_le<std::uint16_t>(chunk + 24);  // first bytes of the sub-format GUID
    } else if (std::memcmp(bytes.data() + pos, "data", 4) == 0) {
      data = chunk;
      data_size = chunk_size;
    }
    pos += 8 + chunk_size + (chunk_size & 1);  // chunks are word-aligned
  }

  if (!data || channels == 0 || rate == 0)
    raise(Errc::BadAudioFile, path.string() + ": missing fmt or data chunk");

  AudioClip clip;
  clip.sample_rate = rate;
  const std::size_t bytes_per_sample = bits / 8;
  if (bytes_per_sample == 0) raise(Errc::BadAudioFile, path.string() + ": zero sample width");
  const std::size_t n_frames = data_size / (bytes_per_sample * channels);
  clip.samples.resize(n_frames);

  if (format == kFormatPcm && bits == 16) {
    for (std::size_t i = 0; i < n_frames; ++i) {
      double acc = 0.0;
      for (std::uint16_t c = 0; c < channels; ++c)
        acc += read_le<std::int16_t>(data + (i * channels + c) * 2) / 32768.0;
      clip.samples[i] = acc / channels;
    }
  } else if (format == kFormatFloat && bits == 32) {
    for (std::size_t i = 0; i < n_frames; ++i) {
      double acc = 0.0;
      for (std::uint16_t c = 0; c < channels; ++c)
        acc += read_le<float>(data + (i * channels + c) * 4);
      clip.samples[i] = clamp_sample(acc / channels);
    }
  } else {
    raise(Errc::BadAudioFile, path.string() + ": unsupported format (need 16-bit PCM or " +
                                  "32-bit float, got format " + std::to_string(format) + ", " +
                                  std::to_string(bits) + " bits)");
  }
  if (clip.samples.empty()) raise(Errc::BadAudioFile, path.string() + ": no samples");
  return clip;
}

std::string wav_bytes(const AudioClip& clip, int bits) {
  if (clip.sample_rate <= 0 || clip.samples.empty())
    raise(Errc::InvalidArgument, "cannot write an empty clip");
  if (bits != 16 && bits != 32)
    raise(Errc::InvalidArgument, "write_wav supports 16 (PCM) or 32 (float) bits");

  const std::uint16_t format = (bits == 16) ? kFormatPcm : kFormatFloat;
  const std::uint32_t rate = static_cast<std::uint32_t>(std::lround(clip.sample_rate));
  const std::uint16_t block = static_cast<std::uint16_t>(bits / 8);
  const std::uint32_t data_size = static_cast<std::uint32_t>(clip.samples.size() * block);

  std::string out;
  out.reserve(44 + data_size);
  out += "RIFF";
  append_le<std::uint32_t>(out, 36 + data_size);
  out += "WAVEfmt ";
  append_le<std::uint32_t>(out, 16);
  append_le<std::uint16_t>(out, format);
  append_le<std::uint16_t>(out, 1);  // mono
  append_le<std::uint32_t>(out, rate);
  append_le<std::uint32_t>(out, rate * block);
  append_le<std::uint16_t>(out, block);
  append_le<std::uint16_t>(out, static_cast<std::uint16_t>(bits));
  out += "data";
  append_le<std::uint32_t>(out, data_size);
  for (double s : clip.samples) {
    const double v = clamp_sample(s);
    if (bits == 16)
      append_le<std::int16_t>(out, static_cast<std::int16_t>(std::lround(v * 32767.0)));
    else
      append_le<float>(out, static_cast<float>(v));
  }
  return out;
}

void write_wav(const std::filesystem::path& path, const AudioClip& clip, int bits) {
  const std::string bytes = wav_bytes(clip, bits);
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) raise(Errc::IoError, "cannot open " + path.string() + " for writing");
  f.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!f) raise(Errc::IoError, "short write to " + path.string());
}

AudioClip resample(const AudioClip& clip, double target_rate) {
  if (clip.sample_rate <= 0 || clip.samples.empty())
    raise(Errc::InvalidArgument, "cannot resample an empty clip");
  if (target_rate <= 0) raise(Errc::InvalidArgument, "target rate must be positive");
  if (std::abs(target_rate - clip.sample_rate) < 1e-9 * clip.sample_rate) return clip;

  constexpr int kHalfTaps = 32;
  const double cutoff = 0.45 * std::min(clip.sample_rate, target_rate);
  const double c = 2.0 * cutoff / clip.sample_rate;  // normalized cutoff, <= 0.9

  AudioClip out;
  out.sample_rate = target_rate;
  const std::size_t n_out =
      static_cast<std::size_t>(std::floor(static_cast<double>(clip.samples.size() - 1) *
                                          target_rate / clip.sample_rate)) +
      1;
  out.samples.resize(n_out);

  const std::ptrdiff_t n_in = static_cast<std::ptrdiff_t>(clip.samples.size());
  for (std::size_t i = 0; i < n_out; ++i) {
    const double src = static_cast<double>(i) * clip.sample_rate / target_rate;
    const std::ptrdiff_t k0 = static_cast<std::ptrdiff_t>(std::floor(src)) - kHalfTaps + 1;
    const std::ptrdiff_t k1 = static_cast<std::ptrdiff_t>(std::floor(src)) + kHalfTaps;
    double acc = 0.0;
    for (std::ptrdiff_t k = std::max<std::ptrdiff_t>(k0, 0); k <= std::min(k1, n_in - 1); ++k) {
      const double x = src - static_cast<double>(k);
      const double window = 0.5 * (1.0 + std::cos(std::numbers::pi * x / kHalfTaps));
      double sinc;
      if (std::abs(x) < 1e-12) {
        sinc = c;
      } else {
        sinc = std::sin(std::numbers::pi * c * x) / (std::numbers::pi * x);
      }
      acc += clip.samples[static_cast<std::size_t>(k)] * sinc * window;
    }
    out.samples[i] = acc;
  }
  return out;
}

}  // namespace matra
