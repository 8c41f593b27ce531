#include "matra/timing.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <string>

namespace matra {

std::vector<DeviationRecord> deviations(const AlignmentMap& map, const TalaGrid& grid) {
  std::vector<DeviationRecord> records;
  records.reserve(map.pairs.size());
  for (const AlignedPair& pair : map.pairs) {
    const ScheduledEvent& se = map.events.at(pair.event_index);
    const LabeledOnset& onset = map.labels.at(pair.label_index);
    if (!grid.covers(onset.time))
      raise(Errc::OutOfGridRange,
            "paired onset at t=" + std::to_string(onset.time) + " outside the grid span");
    DeviationRecord rec;
    rec.line_id = se.event.line_id;
    rec.cycle_index = se.cycle_index;
    rec.beat_index = se.event.cycle_beat;
    rec.sub_beat = se.event.sub_beat();
    rec.canonical_time = grid.canonical_time(se.cycle_index, se.event.cycle_beat, rec.sub_beat);
    rec.onset_time = onset.time;
    const double matra = grid.matra_at(se.cycle_index, se.event.cycle_beat);
    rec.deviation_matras = (rec.onset_time - rec.canonical_time) / matra;
    records.push_back(rec);
  }
  std::stable_sort(records.begin(), records.end(),
                   [](const DeviationRecord& a, const DeviationRecord& b) {
                     return a.onset_time < b.onset_time;
                   });
  return records;
}

Fingerprint fingerprint(const std::vector<DeviationRecord>& records, int beats_per_cycle) {
  if (beats_per_cycle < 1) raise(Errc::InvalidArgument, "beats_per_cycle must be positive");
  Fingerprint fp;
  fp.bins.resize(static_cast<std::size_t>(beats_per_cycle));
  std::vector<double> sums(fp.bins.size(), 0.0);
  for (const DeviationRecord& rec : records) {
    if (rec.beat_index < 1 || rec.beat_index > beats_per_cycle)
      raise(Errc::InvalidArgument, "record beat_index " + std::to_string(rec.beat_index) +
                                       " outside 1.." + std::to_string(beats_per_cycle));
    FingerprintBin& bin = fp.bins[static_cast<std::size_t>(rec.beat_index - 1)];
    ++bin.count;
    sums[static_cast<std::size_t>(rec.beat_index - 1)] += rec.deviation_matras;
  }
  for (std::size_t b = 0; b < fp.bins.size(); ++b)
    if (fp.bins[b].count > 0) fp.bins[b].mean = sums[b] / static_cast<double>(fp.bins[b].count);
  std::vector<double> sq(fp.bins.size(), 0.0);
  for (const DeviationRecord& rec : records) {
    const std::size_t b = static_cast<std::size_t>(rec.beat_index - 1);
    const double d = rec.deviation_matras - fp.bins[b].mean;
    sq[b] += d * d;
  }
  for (std::size_t b = 0; b < fp.bins.size(); ++b)
    if (fp.bins[b].count > 0)
      fp.bins[b].stddev = std::sqrt(sq[b] / static_cast<double>(fp.bins[b].count));
  return fp;
}

std::vector<ProfilePoint> line_profile(const std::vector<DeviationRecord>& records, int line_id,
                                       int beats_per_cycle) {
  bool line_seen = false;
  std::map<int, int> repetition;  // cycle_index -> 0-based repetition ordinal
  for (const DeviationRecord& rec : records) {
    if (rec.line_id != line_id) continue;
    line_seen = true;
    repetition.emplace(rec.cycle_index, 0);
  }
  if (!line_seen) raise(Errc::UnknownLine, "no records for line " + std::to_string(line_id));
  int ordinal = 0;
  for (auto& [cycle, rep] : repetition) rep = ordinal++;

  std::vector<ProfilePoint> points;
  for (const DeviationRecord& rec : records) {
    if (rec.line_id != line_id) continue;
    ProfilePoint p;
    p.cycle_position = rec.beat_index + rec.sub_beat +
                       static_cast<double>(beats_per_cycle) * repetition.at(rec.cycle_index);
    p.deviation_matras = rec.deviation_matras;
    points.push_back(p);
  }
  return points;
}

std::size_t ShiftHistogram::total() const {
  std::size_t n = underflow + overflow;
  for (std::size_t c : bins) n += c;
  return n;
}

ShiftHistogram structural_shift_summary(const std::vector<DeviationRecord>& records) {
  ShiftHistogram hist;
  for (const DeviationRecord& rec : records) {
    const long shift = std::lround(rec.deviation_matras);
    if (shift < ShiftHistogram::kMinShift) ++hist.underflow;
    else if (shift > ShiftHistogram::kMaxShift) ++hist.overflow;
    else ++hist.bins[static_cast<std::size_t>(shift - ShiftHistogram::kMinShift)];
  }
  return hist;
}

}  // namespace matra
