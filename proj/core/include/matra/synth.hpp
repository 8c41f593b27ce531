#pragma once

#include <cstdint>

#include "matra/align.hpp"
#include "matra/audio.hpp"
#include "matra/grid.hpp"
#include "matra/timing.hpp"

namespace matra {

// Lag-and-compress timing model: each half-cycle starts late by initial_lag
// matras and absorbs the lag linearly by compression_onset_beat, plus
// Gaussian jitter (truncated at 3 sigma and at 0.9 matra). With probability
// structural_shift_prob a half-cycle is displaced by a whole matra. The last
// syllable before a sam or khali is clamped to +/- 0.2 matra, mirroring the
// tight cycle boundaries of real performances.
struct RubatoModel {
  double initial_lag = 0.0;        // matras, >= 0
  int compression_onset_beat = 8;  // lag fully absorbed by this beat of the half
  double jitter_std = 0.0;         // matras
  double structural_shift_prob = 0.0;
  std::uint64_t seed = 1;
};

struct SynthOutput {
  AudioClip audio;
  std::vector<LabeledOnset> labels;
  std::vector<TalaAnchor> anchors;
  std::vector<ScheduleEntry> schedule;
  TalaGrid grid;  // built from anchors, kept for convenience
  AlignmentMap truth;
  std::vector<DeviationRecord> truth_deviations;
};

// Renders n_cycles of the composition (lines cycled in order) at a constant
// tempo. Each syllable becomes a 20 ms noise burst followed by a harmonic
// vowel tone with energy in the 640-2800 Hz band, so band-energy novelty
// rises at every label time. Deterministic for a fixed seed.
SynthOutput synthesize(const Composition& composition, double tempo_matra_per_min,
                       const RubatoModel& model, int n_cycles);

// Randomly deletes true labels and inserts spurious ones; the truth map is
// updated so deleted events become unmatched canonical and inserted labels
// unmatched labeled. Audio and anchors are untouched.
SynthOutput degrade(const SynthOutput& input, double insert_prob, double delete_prob,
                    std::uint64_t seed);

// Seeded teentaal composition with a representative mix of syllable, rest,
// continuation, and multi-syllable cells; used as test-corpus material.
Composition random_composition(std::uint64_t seed, int n_lines = 4);

}  // namespace matra
