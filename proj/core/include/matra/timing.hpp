#pragma once

#include <array>
#include <cstddef>
#include <vector>

#include "matra/align.hpp"
#include "matra/grid.hpp"

namespace matra {

struct DeviationRecord {
  int line_id = 0;
  int cycle_index = 0;
  int beat_index = 0;  // 1..beats_per_cycle
  double sub_beat = 0.0;
  double canonical_time = 0.0;
  double onset_time = 0.0;
  double deviation_matras = 0.0;  // signed; positive means late
};

// One record per aligned pair: (onset - canonical) / local matra duration,
// measured in the half-cycle holding the canonical position. Ordered by
// onset time.
std::vector<DeviationRecord> deviations(const AlignmentMap& map, const TalaGrid& grid);

struct FingerprintBin {
  double mean = 0.0;   // meaningful only when count > 0
  double stddev = 0.0; // population standard deviation
  std::size_t count = 0;
};

struct Fingerprint {
  std::vector<FingerprintBin> bins;  // bins[0] is beat 1

  int beats_per_cycle() const { return static_cast<int>(bins.size()); }
  const FingerprintBin& at_beat(int beat_index) const { return bins.at(beat_index - 1); }
};

// Per-beat-position aggregates across cycles; sub-beat records bin with
// their host beat.
Fingerprint fingerprint(const std::vector<DeviationRecord>& records, int beats_per_cycle = 16);

struct ProfilePoint {
  double cycle_position = 0.0;  // beat + sub_beat + beats_per_cycle * repetition
  double deviation_matras = 0.0;
};

// Plot-ready scatter for one line: repetitions of the line are laid side by
// side along the x axis.
std::vector<ProfilePoint> line_profile(const std::vector<DeviationRecord>& records, int line_id,
                                       int beats_per_cycle = 16);

// Deviations rounded to the nearest whole matra: counts for -2..+2 plus
// overflow bins on both sides.
struct ShiftHistogram {
  static constexpr int kMinShift = -2;
  static constexpr int kMaxShift = 2;
  std::array<std::size_t, 5> bins{};  // bins[k] counts shift kMinShift + k
  std::size_t underflow = 0;
  std::size_t overflow = 0;

  std::size_t at_shift(int shift) const { return bins.at(static_cast<std::size_t>(shift - kMinShift)); }
  std::size_t total() const;
};

ShiftHistogram structural_shift_summary(const std::vector<DeviationRecord>& records);

}  // namespace matra
