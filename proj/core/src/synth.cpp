#include "matra/synth.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <string>

namespace matra {
namespace {

constexpr double kSampleRate = 16000.0;
constexpr double kLeadIn = 1.0;        // seconds before the first sam
constexpr double kBurstLen = 0.020;    // consonant noise burst
// Emitted labels keep at least this gap so each onset owns a clean band-energy
// rise; 60 ms still clears the densest legal canonical spacing (3 syllables on
// one beat at 300 matra/min).
constexpr double kMinOnsetGap = 0.060;
constexpr double kBoundaryClamp = 0.2; // matras, last syllable before sam/khali

struct HalfGeometry {
  int start_beat = 0;
  int divisions = 0;
};

HalfGeometry half_geometry(const TalaSpec& tala, HalfCycle half) {
  if (half == HalfCycle::First)
    return {tala.sam_index, tala.khali_index - tala.sam_index};
  return {tala.khali_index, tala.beats_per_cycle + 1 - tala.khali_index};
}

double truncated_normal(std::mt19937_64& rng, double stddev, double hard_cap) {
  if (stddev <= 0.0) return 0.0;
  std::normal_distribution<double> dist(0.0, stddev);
  const double cap = std::min(3.0 * stddev, hard_cap);
  return std::clamp(dist(rng), -cap, cap);
}

}  // namespace

SynthOutput synthesize(const Composition& composition, double tempo_matra_per_min,
                       const RubatoModel& model, int n_cycles) {
  if (tempo_matra_per_min < 60.0 || tempo_matra_per_min > 300.0)
    raise(Errc::TempoOutOfRange,
          "tempo " + std::to_string(tempo_matra_per_min) + " outside [60, 300] matra/min");
  if (n_cycles < 1) raise(Errc::InvalidArgument, "need at least one cycle");
  if (model.initial_lag < 0 || model.jitter_std < 0)
    raise(Errc::InvalidArgument, "initial_lag and jitter_std must be >= 0");
  if (model.structural_shift_prob < 0 || model.structural_shift_prob >= 1)
    raise(Errc::InvalidArgument, "structural_shift_prob must lie in [0, 1)");
  if (model.compression_onset_beat < 2)
    raise(Errc::InvalidArgument, "compression_onset_beat must be >= 2");
  validate(composition);

  const TalaSpec& tala = composition.tala;
  const int bpc = tala.beats_per_cycle;
  const double matra = 60.0 / tempo_matra_per_min;
  auto beat_time = [&](int cycle, int beat, double sub) {
    return kLeadIn + (static_cast<double>(cycle) * bpc + (beat - 1) + sub) * matra;
  };

  SynthOutput out;
  for (int c = 0; c < n_cycles; ++c) {
    out.anchors.push_back({beat_time(c, tala.sam_index, 0.0), AnchorKind::Sam, c});
    out.anchors.push_back({beat_time(c, tala.khali_index, 0.0), AnchorKind::Khali, c});
  }
  out.anchors.push_back({beat_time(n_cycles, tala.sam_index, 0.0), AnchorKind::Sam, n_cycles});
  out.grid = build_grid(out.anchors, tala);

  const int n_lines = static_cast<int>(composition.lines.size());
  for (int c = 0; c < n_cycles; ++c) {
    const int line_id = composition.lines[static_cast<std::size_t>(c % n_lines)].line_id;
    out.schedule.push_back({c, line_id, HalfCycle::First});
    out.schedule.push_back({c, line_id, HalfCycle::Second});
  }

  std::mt19937_64 rng(model.seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  struct PlannedEvent {
    ScheduledEvent scheduled;
    double canonical = 0.0;
    double onset = 0.0;
    double amplitude = 0.0;
    double burst_atten_db = 0.0;
  };
  std::vector<PlannedEvent> planned;
  std::vector<std::pair<std::size_t, std::size_t>> entry_ranges;  // per schedule entry

  for (const ScheduleEntry& entry : out.schedule) {
    const HalfGeometry geom = half_geometry(tala, entry.half);
    const bool shifted = unit(rng) < model.structural_shift_prob;
    std::vector<CanonicalEvent> events =
        half_cycle_events(composition, entry.line_id, entry.half);
    const std::size_t first = planned.size();
    const int comp_beat = std::min(model.compression_onset_beat, geom.divisions);
    for (std::size_t e = 0; e < events.size(); ++e) {
      const CanonicalEvent& ev = events[e];
      const double pos = (ev.cycle_beat - geom.start_beat) + ev.sub_beat();
      const double ramp = std::max(0.0, (comp_beat - 1 - pos) / (comp_beat - 1));
      double dev = std::max(model.initial_lag * ramp, shifted ? ramp : 0.0);
      dev += truncated_normal(rng, model.jitter_std, 0.9);
      if (e + 1 == events.size()) dev = std::clamp(dev, -kBoundaryClamp, kBoundaryClamp);

      PlannedEvent p;
      p.scheduled = {ev, entry.cycle_index};
      p.canonical = beat_time(entry.cycle_index, ev.cycle_beat, ev.sub_beat());
      p.onset = p.canonical + dev * matra;
      p.amplitude = 0.2 + 0.7 * unit(rng);
      p.burst_atten_db = 10.0 + 15.0 * unit(rng);
      planned.push_back(std::move(p));
    }
    entry_ranges.emplace_back(first, planned.size());
  }

  // Keep emitted onsets inside the grid and strictly increasing. The span is
  // inclusive, so an exactly on-grid first beat stays put.
  const double lo_bound = out.grid.start_time();
  const double hi_bound = out.grid.end_time();
  double prev = lo_bound - kMinOnsetGap;
  for (PlannedEvent& p : planned) {
    p.onset = std::max({p.onset, lo_bound, prev + kMinOnsetGap});
    prev = p.onset;
  }
  for (std::size_t i = planned.size(); i-- > 0;) {
    const double cap = (i + 1 < planned.size()) ? planned[i + 1].onset - kMinOnsetGap : hi_bound;
    planned[i].onset = std::min(planned[i].onset, cap);
  }
  if (!planned.empty() && planned.front().onset < lo_bound)
    raise(Errc::InvalidArgument, "rubato model pushes onsets outside the grid span");

  for (const PlannedEvent& p : planned) {
    out.labels.push_back({p.onset, p.scheduled.event.syllable});
    out.truth.events.push_back(p.scheduled);

    DeviationRecord rec;
    rec.line_id = p.scheduled.event.line_id;
    rec.cycle_index = p.scheduled.cycle_index;
    rec.beat_index = p.scheduled.event.cycle_beat;
    rec.sub_beat = p.scheduled.event.sub_beat();
    rec.canonical_time = p.canonical;
    rec.onset_time = p.onset;
    rec.deviation_matras = (p.onset - p.canonical) / matra;
    out.truth_deviations.push_back(rec);
  }
  out.truth.labels = out.labels;
  for (std::size_t i = 0; i < planned.size(); ++i) out.truth.pairs.push_back({i, i, 1.0});
  for (std::size_t k = 0; k < out.schedule.size(); ++k) {
    const auto [first, last] = entry_ranges[k];
    if (first == last) continue;  // all-rest half, no placement
    out.truth.placements.push_back({k, first, last, static_cast<double>(last - first)});
  }

  // Audio: a lowpass noise murmur with a weak broadband component for each
  // consonant, then a three-partial vowel tone (660/880/1100 Hz) carrying the
  // mid-band energy the sub-band detector keys on.
  const std::size_t n_samples =
      static_cast<std::size_t>(std::lround((out.grid.end_time() + 0.5) * kSampleRate));
  out.audio.sample_rate = kSampleRate;
  out.audio.samples.assign(n_samples, 0.0);
  std::normal_distribution<double> noise(0.0, 1.0);
  for (double& s : out.audio.samples) s = 5e-5 * noise(rng);

  constexpr double kPartials[3] = {660.0, 880.0, 1100.0};
  for (std::size_t i = 0; i < planned.size(); ++i) {
    const PlannedEvent& p = planned[i];
    const double next_onset =
        (i + 1 < planned.size()) ? planned[i + 1].onset : out.grid.end_time();

    const std::size_t burst_begin = static_cast<std::size_t>(
        std::lround(std::max(0.0, p.onset - kBurstLen) * kSampleRate));
    const std::size_t burst_end =
        std::min(n_samples, static_cast<std::size_t>(std::lround(p.onset * kSampleRate)));
    const double broadband = std::pow(10.0, -p.burst_atten_db / 20.0);
    double lp = 0.0;
    for (std::size_t s = burst_begin; s < burst_end; ++s) {
      const double w = noise(rng);
      lp = 0.88 * lp + 0.12 * w;  // one-pole lowpass around 300 Hz
      const double frac =
          static_cast<double>(s - burst_begin) / std::max<std::size_t>(1, burst_end - burst_begin);
      const double env = 0.5 * (1.0 - std::cos(2.0 * std::numbers::pi * frac));
      out.audio.samples[s] += p.amplitude * env * (0.5 * lp + broadband * 0.4 * w);
    }

    const double vowel_len = std::clamp(next_onset - p.onset - 0.025, 0.050, 0.800);
    const std::size_t v_begin =
        static_cast<std::size_t>(std::lround(p.onset * kSampleRate));
    const std::size_t v_end = std::min(
        n_samples, static_cast<std::size_t>(std::lround((p.onset + vowel_len) * kSampleRate)));
    for (std::size_t s = v_begin; s < v_end; ++s) {
      const double t = static_cast<double>(s) / kSampleRate - p.onset;
      double env = 1.0;
      if (t < 0.005) env = 0.5 * (1.0 - std::cos(std::numbers::pi * t / 0.005));
      const double tail = vowel_len - t;
      if (tail < 0.015) env *= std::max(0.0, tail / 0.015);
      double tone = 0.0;
      for (double f : kPartials) tone += std::sin(2.0 * std::numbers::pi * f * t);
      out.audio.samples[s] += p.amplitude * env * tone / 3.0;
    }
  }
  for (double& s : out.audio.samples) s = std::clamp(s, -1.0, 1.0);
  return out;
}

SynthOutput degrade(const SynthOutput& input, double insert_prob, double delete_prob,
                    std::uint64_t seed) {
  if (insert_prob < 0 || insert_prob >= 1 || delete_prob < 0 || delete_prob >= 1)
    raise(Errc::InvalidArgument, "degrade probabilities must lie in [0, 1)");
  if (insert_prob == 0.0 && delete_prob == 0.0) return input;

  static const char* kSpuriousPool[] = {"a", "ra", "ga", "na", "ta", "ma", "sa", "ha"};
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  struct NewLabel {
    LabeledOnset label;
    std::ptrdiff_t old_index;  // -1 for inserted
  };
  std::vector<NewLabel> rebuilt;
  const std::vector<LabeledOnset>& old_labels = input.labels;
  for (std::size_t i = 0; i < old_labels.size(); ++i) {
    if (unit(rng) >= delete_prob)
      rebuilt.push_back({old_labels[i], static_cast<std::ptrdiff_t>(i)});
    if (unit(rng) < insert_prob) {
      const double gap = (i + 1 < old_labels.size())
                             ? old_labels[i + 1].time - old_labels[i].time
                             : 0.25;
      LabeledOnset spurious;
      spurious.time = old_labels[i].time + (0.3 + 0.4 * unit(rng)) * gap;
      spurious.syllable =
          kSpuriousPool[static_cast<std::size_t>(unit(rng) * 8.0) % 8];
      rebuilt.push_back({spurious, -1});
    }
  }
  std::stable_sort(rebuilt.begin(), rebuilt.end(),
                   [](const NewLabel& a, const NewLabel& b) { return a.label.time < b.label.time; });
  // Drop rebuilt entries that collide in time (keeps the list strictly increasing).
  std::vector<NewLabel> clean;
  for (NewLabel& nl : rebuilt) {
    if (!clean.empty() && nl.label.time - clean.back().label.time < 0.002) {
      if (nl.old_index >= 0 && clean.back().old_index < 0) clean.back() = std::move(nl);
      continue;
    }
    clean.push_back(std::move(nl));
  }

  SynthOutput out;
  out.audio = input.audio;
  out.anchors = input.anchors;
  out.schedule = input.schedule;
  out.grid = input.grid;

  std::vector<std::ptrdiff_t> new_index_of_old(old_labels.size(), -1);
  for (std::size_t j = 0; j < clean.size(); ++j) {
    out.labels.push_back(clean[j].label);
    if (clean[j].old_index >= 0)
      new_index_of_old[static_cast<std::size_t>(clean[j].old_index)] =
          static_cast<std::ptrdiff_t>(j);
  }

  out.truth.events = input.truth.events;
  out.truth.labels = out.labels;
  out.truth.unmatched_events = input.truth.unmatched_events;
  // truth_deviations stays parallel to truth.pairs, which also keeps repeated
  // degradation consistent.
  for (std::size_t pi = 0; pi < input.truth.pairs.size(); ++pi) {
    const AlignedPair& pair = input.truth.pairs[pi];
    const std::ptrdiff_t nj = new_index_of_old[pair.label_index];
    if (nj < 0) {
      out.truth.unmatched_events.push_back(pair.event_index);
    } else {
      out.truth.pairs.push_back({pair.event_index, static_cast<std::size_t>(nj), pair.similarity});
      out.truth_deviations.push_back(input.truth_deviations[pi]);
    }
  }
  for (std::size_t j = 0; j < clean.size(); ++j)
    if (clean[j].old_index < 0) out.truth.unmatched_labels.push_back(j);

  // Placement index ranges translate through the surviving labels' times.
  for (const WindowPlacement& wp : input.truth.placements) {
    if (wp.label_begin >= wp.label_end) continue;
    const double t_begin = old_labels[wp.label_begin].time;
    const double t_end = old_labels[wp.label_end - 1].time;
    auto lo = std::lower_bound(out.labels.begin(), out.labels.end(), t_begin,
                               [](const LabeledOnset& l, double t) { return l.time < t; });
    auto hi = std::upper_bound(out.labels.begin(), out.labels.end(), t_end,
                               [](double t, const LabeledOnset& l) { return t < l.time; });
    WindowPlacement np = wp;
    np.label_begin = static_cast<std::size_t>(lo - out.labels.begin());
    np.label_end = static_cast<std::size_t>(hi - out.labels.begin());
    out.truth.placements.push_back(np);
  }
  return out;
}

Composition random_composition(std::uint64_t seed, int n_lines) {
  if (n_lines < 1) raise(Errc::InvalidArgument, "need at least one line");
  static const char* kSyllables[] = {"ye", "ri", "aa", "li",  "pi", "ya", "bi", "na",
                                     "sa", "khi", "ka", "la", "mo", "he", "ja", "ba",
                                     "se", "de",  "ga", "va", "ta", "re", "ni", "dha"};
  static const char* kNotes[] = {"S", "R", "G", "m", "M", "P", "D", "N", "S'", "N.", "G R", "m G"};
  static const char* kOrnaments[] = {"~", "kn", "mi"};

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  auto pick = [&](auto& pool) {
    return pool[static_cast<std::size_t>(unit(rng) * std::size(pool)) % std::size(pool)];
  };

  Composition comp;
  comp.title = "synthetic bandish " + std::to_string(seed);
  comp.raga = "yaman";
  comp.laya = "madhyalay";
  comp.tala = TalaSpec::teentaal();

  for (int li = 0; li < n_lines; ++li) {
    CompositionLine line;
    line.line_id = li + 1;
    line.verse = (li < (n_lines + 1) / 2) ? Verse::Sthayi : Verse::Antara;
    bool sound_seen = false;
    for (int b = 0; b < comp.tala.beats_per_cycle; ++b) {
      BeatCell cell;
      const double roll = unit(rng);
      const bool continuation_legal = sound_seen || (li > 0 && b == 0);
      const bool force_syllable = (li == 0 && b == 0);
      if (!force_syllable && roll < 0.20) {
        cell.kind = CellKind::Rest;
      } else if (!force_syllable && roll < 0.45 && continuation_legal) {
        cell.kind = CellKind::Continuation;
        cell.note = "s";
      } else {
        cell.kind = CellKind::Syllable;
        const double k_roll = unit(rng);
        const int k = k_roll < 0.85 ? 1 : (k_roll < 0.97 ? 2 : 3);
        for (int s = 0; s < k; ++s) cell.syllables.push_back(pick(kSyllables));
        cell.subdivisions = k;
        cell.note = pick(kNotes);
        if (unit(rng) < 0.10) cell.ornament = pick(kOrnaments);
      }
      if (cell.kind != CellKind::Rest) sound_seen = true;
      line.cells.push_back(std::move(cell));
    }
    comp.lines.push_back(std::move(line));
  }
  validate(comp);
  return comp;
}

}  // namespace matra
