#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "matra/error.hpp"

namespace matra {

// Canonical bandish notation: a composition is a list of tala-cycle lines,
// each beat of a line holding lyric syllable(s), a rest (empty cell), or a
// continuation of the previous note (the token "s"), plus note and ornament
// rows carried verbatim.

enum class CellKind { Syllable, Rest, Continuation };
enum class Verse { Sthayi, Antara };
enum class HalfCycle { First, Second };

struct BeatCell {
  CellKind kind = CellKind::Rest;
  std::vector<std::string> syllables;  // non-empty only when kind == Syllable
  std::string note;                    // sargam text, verbatim (may be compound)
  std::string ornament;
  int subdivisions = 1;                // == syllables.size() for Syllable cells

  bool operator==(const BeatCell&) const = default;
};

struct TalaSpec {
  std::string name;
  int beats_per_cycle = 0;
  std::vector<int> vibhag_starts;  // strictly increasing, first entry 1
  int sam_index = 1;
  int khali_index = 1;

  static TalaSpec teentaal();

  bool operator==(const TalaSpec&) const = default;
};

void validate(const TalaSpec& tala);

struct CompositionLine {
  int line_id = 0;  // 1-based position in the source file
  std::vector<BeatCell> cells;
  Verse verse = Verse::Sthayi;

  bool operator==(const CompositionLine&) const = default;
};

struct Composition {
  std::string title;
  std::string raga;
  std::string laya;
  TalaSpec tala;
  std::vector<CompositionLine> lines;

  const CompositionLine& line(int line_id) const;  // throws UnknownLine

  bool operator==(const Composition&) const = default;
};

void validate(const Composition& composition);

// One syllable token placed on the tala grid. Multi-syllable cells expand to
// k events at sub-beat offsets {0, 1/k, ..., (k-1)/k}; the fraction is kept
// exact as sub_index / sub_count.
struct CanonicalEvent {
  int line_id = 0;
  int cycle_beat = 0;  // 1..beats_per_cycle
  int sub_index = 0;
  int sub_count = 1;
  std::string syllable;
  std::string note;

  double sub_beat() const { return static_cast<double>(sub_index) / sub_count; }

  bool operator==(const CanonicalEvent&) const = default;
};

// Grid-CSV parsing and serialization. The file is an optional "key,value"
// metadata block (title, raga, tala, laya, verses) terminated by a blank
// line, then four rows per composition line tagged LYR, VIB, ORN, NOT with
// one data column per beat. Rest cells are empty, continuations are "s".
Composition parse_notation(const std::string& csv_text, const TalaSpec& tala);
std::string serialize_notation(const Composition& composition);

std::vector<CanonicalEvent> canonical_events(const Composition& composition, int line_id);
std::vector<CanonicalEvent> canonical_events(const Composition& composition);  // all lines

std::vector<CanonicalEvent> half_cycle_events(const Composition& composition, int line_id,
                                              HalfCycle half);
std::vector<std::string> half_cycle_syllables(const Composition& composition, int line_id,
                                              HalfCycle half);

}  // namespace matra
