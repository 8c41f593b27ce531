#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "matra/grid.hpp"
#include "matra/notation.hpp"

namespace matra {

struct LabeledOnset {
  double time = 0.0;  // seconds
  std::string syllable;

  bool operator==(const LabeledOnset&) const = default;
};

// Lowercases, strips diacritics (IAST transliteration marks and combining
// accents), and folds long-vowel digraphs aa/ii/uu to their short forms.
// A terminal inherent 'a' is kept as written.
std::string normalize_syllable(std::string_view s);

// 1 - edit_distance / max_length on normalized tokens; 1.0 iff equal.
double syllable_similarity(std::string_view a, std::string_view b);

struct ScheduleEntry {
  int cycle_index = 0;
  int line_id = 0;
  HalfCycle half = HalfCycle::First;

  bool operator==(const ScheduleEntry&) const = default;
};

// Expands one (line_id, cycle_index) per performed cycle into the two
// half-cycle schedule entries the aligner works with.
std::vector<ScheduleEntry> expand_cycle_schedule(
    const std::vector<std::pair<int, int>>& line_per_cycle);

struct ScheduledEvent {
  CanonicalEvent event;
  int cycle_index = 0;  // performed cycle realizing the event

  bool operator==(const ScheduledEvent&) const = default;
};

struct WindowMatch {
  std::size_t begin = 0;  // [begin, end) into the labeled sequence
  std::size_t end = 0;
  double score = 0.0;
};

// Slides a window start across [search_begin, search_end) and scores an
// order-preserving alignment of the canonical syllables against the labels
// from that start (gap_penalty per skipped item, free end). Returns the
// best-scoring placement, ties to the earliest start.
WindowMatch match_half_cycle(const std::vector<std::string>& canonical,
                             const std::vector<LabeledOnset>& labeled, std::size_t search_begin,
                             std::size_t search_end, double gap_penalty = 0.4);

struct AlignParams {
  double gap_penalty = 0.4;    // per skipped item in window matching
  double shift_weight = 0.25;  // score penalty per matra of timing offset
  double max_shift = 2.0;      // matras; pairs offset further are rejected
};

struct AlignedPair {
  std::size_t event_index = 0;
  std::size_t label_index = 0;
  double similarity = 0.0;
};

struct WindowPlacement {
  std::size_t schedule_index = 0;
  std::size_t label_begin = 0;
  std::size_t label_end = 0;
  double score = 0.0;
};

struct AlignmentMap {
  std::vector<ScheduledEvent> events;
  std::vector<LabeledOnset> labels;
  std::vector<AlignedPair> pairs;                // ordered by event_index
  std::vector<std::size_t> unmatched_events;     // indices into events
  std::vector<std::size_t> unmatched_labels;     // label indices inside placed windows
  std::vector<WindowPlacement> placements;
};

// Order-preserving one-to-one assignment inside one placed window,
// maximizing sum(similarity - shift_weight * |offset in matras|) with pairs
// beyond max_shift rejected. Labels just beyond the window edges (within the
// shift allowance) are eligible.
AlignmentMap refine(const WindowMatch& placement, const std::vector<ScheduledEvent>& events,
                    const std::vector<LabeledOnset>& labels, const TalaGrid& grid,
                    const AlignParams& params = {});

// Full pipeline: per schedule entry, window-match then refine, with search
// ranges progressing monotonically through the labeled sequence.
AlignmentMap align_performance(const Composition& composition,
                               const std::vector<ScheduleEntry>& schedule,
                               const std::vector<LabeledOnset>& labels, const TalaGrid& grid,
                               const AlignParams& params = {});

}  // namespace matra
