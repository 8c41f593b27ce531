#include "matra/grid.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace matra {
namespace {

std::string fmt_pos(int cycle, int beat) {
  return "cycle " + std::to_string(cycle) + " beat " + std::to_string(beat);
}

}  // namespace

std::vector<TalaAnchor> number_anchors(const std::vector<std::pair<double, AnchorKind>>& raw) {
  std::vector<TalaAnchor> anchors;
  anchors.reserve(raw.size());
  int cycle = 0;
  for (std::size_t i = 0; i < raw.size(); ++i) {
    if (i > 0) {
      if (raw[i].first <= raw[i - 1].first)
        raise(Errc::AnchorOrderViolation,
              "anchor times must be strictly increasing near t=" + std::to_string(raw[i].first));
      if (raw[i].second == raw[i - 1].second)
        raise(Errc::AlternationViolation,
              "anchors must alternate sam/khali near t=" + std::to_string(raw[i].first));
      if (raw[i].second == AnchorKind::Sam) ++cycle;
    }
    anchors.push_back({raw[i].first, raw[i].second, cycle});
  }
  return anchors;
}

TalaGrid build_grid(const std::vector<TalaAnchor>& anchors, const TalaSpec& tala) {
  validate(tala);
  if (anchors.size() < 2)
    raise(Errc::TooFewAnchors, "need at least 2 anchors, got " + std::to_string(anchors.size()));
  for (std::size_t i = 1; i < anchors.size(); ++i) {
    if (anchors[i].time <= anchors[i - 1].time)
      raise(Errc::AnchorOrderViolation,
            "anchor times must be strictly increasing near t=" + std::to_string(anchors[i].time));
    if (anchors[i].kind == anchors[i - 1].kind)
      raise(Errc::AlternationViolation,
            "anchors must alternate sam/khali near t=" + std::to_string(anchors[i].time));
    const int expected_cycle =
        anchors[i - 1].cycle_index + (anchors[i].kind == AnchorKind::Sam ? 1 : 0);
    if (anchors[i].cycle_index != expected_cycle)
      raise(Errc::AnchorOrderViolation, "anchor cycle indices are not consecutive");
  }

  // Divisions per half-cycle; eight on both sides for teentaal.
  const int sam_to_khali = tala.khali_index - tala.sam_index;
  const int khali_to_sam = tala.beats_per_cycle + 1 - tala.khali_index;

  TalaGrid grid;
  grid.tala_ = tala;
  for (std::size_t i = 0; i + 1 < anchors.size(); ++i) {
    const TalaAnchor& a = anchors[i];
    const TalaAnchor& b = anchors[i + 1];
    const int divisions = (a.kind == AnchorKind::Sam) ? sam_to_khali : khali_to_sam;
    const int first_beat = (a.kind == AnchorKind::Sam) ? tala.sam_index : tala.khali_index;
    const double matra = (b.time - a.time) / divisions;
    for (int k = 0; k < divisions; ++k) {
      GridBeat beat;
      beat.time = (k == 0) ? a.time : a.time + k * (b.time - a.time) / divisions;
      beat.cycle_index = a.cycle_index;
      beat.beat_index = first_beat + k;
      beat.matra = matra;
      grid.beats_.push_back(beat);
    }
  }
  // The final anchor closes the grid with its own beat.
  const TalaAnchor& last = anchors.back();
  GridBeat closing;
  closing.time = last.time;
  closing.cycle_index = last.cycle_index;
  closing.beat_index = (last.kind == AnchorKind::Sam) ? tala.sam_index : tala.khali_index;
  closing.matra = grid.beats_.back().matra;
  grid.beats_.push_back(closing);
  return grid;
}

std::size_t TalaGrid::beat_position(int cycle_index, int beat_index) const {
  const auto key = std::make_pair(cycle_index, beat_index);
  auto it = std::lower_bound(beats_.begin(), beats_.end(), key,
                             [](const GridBeat& b, const std::pair<int, int>& k) {
                               return std::make_pair(b.cycle_index, b.beat_index) < k;
                             });
  if (it == beats_.end() ||
      std::make_pair(it->cycle_index, it->beat_index) != key)
    raise(Errc::OutOfGridRange, fmt_pos(cycle_index, beat_index) + " is not on the grid");
  return static_cast<std::size_t>(it - beats_.begin());
}

double TalaGrid::matra_at(int cycle_index, int beat_index) const {
  return beats_[beat_position(cycle_index, beat_index)].matra;
}

double TalaGrid::canonical_time(int cycle_index, int beat_index, double sub_beat) const {
  if (sub_beat < 0.0 || sub_beat >= 1.0)
    raise(Errc::InvalidArgument, "sub_beat must lie in [0,1)");
  const std::size_t pos = beat_position(cycle_index, beat_index);
  const GridBeat& beat = beats_[pos];
  if (sub_beat == 0.0) return beat.time;
  if (pos + 1 == beats_.size())
    raise(Errc::OutOfGridRange,
          fmt_pos(cycle_index, beat_index) + " is the grid end; no room for a sub-beat offset");
  return beat.time + sub_beat * beat.matra;
}

GridPosition TalaGrid::locate(double t) const {
  if (!covers(t))
    raise(Errc::OutOfGridRange, "t=" + std::to_string(t) + " outside grid span [" +
                                    std::to_string(start_time()) + ", " +
                                    std::to_string(end_time()) + "]");
  // Last beat whose time is <= t.
  auto it = std::upper_bound(beats_.begin(), beats_.end(), t,
                             [](double value, const GridBeat& b) { return value < b.time; });
  std::size_t pos = static_cast<std::size_t>(it - beats_.begin());
  if (pos > 0) --pos;
  const GridBeat& beat = beats_[pos];
  GridPosition result;
  result.cycle_index = beat.cycle_index;
  result.beat_index = beat.beat_index;
  if (pos + 1 < beats_.size()) {
    const double gap = beats_[pos + 1].time - beat.time;
    result.fraction = (t - beat.time) / gap;
  } else {
    result.fraction = 0.0;  // exactly at the closing beat
  }
  return result;
}

std::vector<TempoPoint> TalaGrid::tempo_profile() const {
  // Every anchor beat except the closing one starts a half-cycle segment.
  std::vector<TempoPoint> profile;
  for (std::size_t i = 0; i + 1 < beats_.size(); ++i) {
    if (beats_[i].beat_index == tala_.sam_index || beats_[i].beat_index == tala_.khali_index)
      profile.push_back({beats_[i].cycle_index, 60.0 / beats_[i].matra});
  }
  return profile;
}

}  // namespace matra
