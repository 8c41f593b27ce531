#pragma once

#include <vector>

#include "matra/notation.hpp"

namespace matra {

enum class AnchorKind { Sam, Khali };

struct TalaAnchor {
  double time = 0.0;  // seconds
  AnchorKind kind = AnchorKind::Sam;
  int cycle_index = 0;

  bool operator==(const TalaAnchor&) const = default;
};

// Assigns cycle indices and checks the Sam/Khali alternation. The first
// anchor opens cycle 0; each Sam after a Khali starts the next cycle.
std::vector<TalaAnchor> number_anchors(const std::vector<std::pair<double, AnchorKind>>& raw);

struct GridBeat {
  double time = 0.0;
  int cycle_index = 0;
  int beat_index = 0;  // 1..beats_per_cycle
  double matra = 0.0;  // local matra duration of the half-cycle this beat sits in
};

struct GridPosition {
  int cycle_index = 0;
  int beat_index = 0;
  double fraction = 0.0;  // [0,1) into the beat

  bool operator==(const GridPosition&) const = default;
};

struct TempoPoint {
  int cycle_index = 0;
  double matra_per_minute = 0.0;
};

// Beat timeline interpolated between annotated anchors: each anchor interval
// is split into equal parts (eight for teentaal half-cycles). Times outside
// [start_time, end_time] are out of range, never extrapolated.
class TalaGrid {
 public:
  const std::vector<GridBeat>& beats() const { return beats_; }
  const TalaSpec& tala() const { return tala_; }
  double start_time() const { return beats_.front().time; }
  double end_time() const { return beats_.back().time; }
  bool covers(double t) const { return t >= start_time() && t <= end_time(); }

  double canonical_time(int cycle_index, int beat_index, double sub_beat) const;
  double matra_at(int cycle_index, int beat_index) const;
  GridPosition locate(double t) const;
  std::vector<TempoPoint> tempo_profile() const;

 private:
  friend TalaGrid build_grid(const std::vector<TalaAnchor>&, const TalaSpec&);
  std::vector<GridBeat> beats_;
  TalaSpec tala_;

  std::size_t beat_position(int cycle_index, int beat_index) const;
};

TalaGrid build_grid(const std::vector<TalaAnchor>& anchors, const TalaSpec& tala);

}  // namespace matra
