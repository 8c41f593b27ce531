#include "matra/align.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <string>

namespace matra {
namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

// Permissive UTF-8 decode; bad bytes fall through as single code points.
std::vector<std::uint32_t> decode_utf8(std::string_view s) {
  std::vector<std::uint32_t> out;
  for (std::size_t i = 0; i < s.size();) {
    const unsigned char c = static_cast<unsigned char>(s[i]);
    std::uint32_t cp = c;
    std::size_t extra = 0;
    if ((c & 0xE0) == 0xC0) { cp = c & 0x1F; extra = 1; }
    else if ((c & 0xF0) == 0xE0) { cp = c & 0x0F; extra = 2; }
    else if ((c & 0xF8) == 0xF0) { cp = c & 0x07; extra = 3; }
    bool ok = i + extra < s.size();
    for (std::size_t k = 1; ok && k <= extra; ++k) {
      const unsigned char cc = static_cast<unsigned char>(s[i + k]);
      if ((cc & 0xC0) != 0x80) ok = false;
      else cp = (cp << 6) | (cc & 0x3F);
    }
    if (!ok) {
      out.push_back(c);
      ++i;
    } else {
      out.push_back(cp);
      i += extra + 1;
    }
  }
  return out;
}

void encode_utf8(std::uint32_t cp, std::string& out) {
  if (cp < 0x80) out += static_cast<char>(cp);
  else if (cp < 0x800) {
    out += static_cast<char>(0xC0 | (cp >> 6));
    out += static_cast<char>(0x80 | (cp & 0x3F));
  } else if (cp < 0x10000) {
    out += static_cast<char>(0xE0 | (cp >> 12));
    out += static_cast<char>(0x80 | ((cp >> 6) & 0x3F));
    out += static_cast<char>(0x80 | (cp & 0x3F));
  } else {
    out += static_cast<char>(0xF0 | (cp >> 18));
    out += static_cast<char>(0x80 | ((cp >> 12) & 0x3F));
    out += static_cast<char>(0x80 | ((cp >> 6) & 0x3F));
    out += static_cast<char>(0x80 | (cp & 0x3F));
  }
}

// Accented Latin letters seen in IAST/ISO-15919 transliteration, folded to
// their base letter.
char fold_diacritic(std::uint32_t cp) {
  switch (cp) {
    case 0x100: case 0x101: case 0xC0: case 0xC1: case 0xC2: case 0xC3: case 0xC4:
    case 0xE0: case 0xE1: case 0xE2: case 0xE3: case 0xE4: case 0x102: case 0x103:
      return 'a';
    case 0x12A: case 0x12B: case 0xCC: case 0xCD: case 0xCE: case 0xCF:
    case 0xEC: case 0xED: case 0xEE: case 0xEF:
      return 'i';
    case 0x16A: case 0x16B: case 0xD9: case 0xDA: case 0xDB: case 0xDC:
    case 0xF9: case 0xFA: case 0xFB: case 0xFC:
      return 'u';
    case 0x112: case 0x113: case 0xC8: case 0xC9: case 0xCA: case 0xCB:
    case 0xE8: case 0xE9: case 0xEA: case 0xEB:
      return 'e';
    case 0x14C: case 0x14D: case 0xD2: case 0xD3: case 0xD4: case 0xD5: case 0xD6:
    case 0xF2: case 0xF3: case 0xF4: case 0xF5: case 0xF6:
      return 'o';
    case 0x154: case 0x155: case 0x1E5A: case 0x1E5B: case 0x1E5C: case 0x1E5D:
      return 'r';
    case 0xD1: case 0xF1: case 0x1E44: case 0x1E45: case 0x1E46: case 0x1E47:
      return 'n';
    case 0x15A: case 0x15B: case 0x160: case 0x161: case 0x1E62: case 0x1E63:
      return 's';
    case 0x1E6C: case 0x1E6D: return 't';
    case 0x1E0C: case 0x1E0D: return 'd';
    case 0x1E24: case 0x1E25: return 'h';
    case 0x1E40: case 0x1E41: case 0x1E42: case 0x1E43: return 'm';
    case 0x1E36: case 0x1E37: return 'l';
    default: return 0;
  }
}

std::size_t edit_distance(std::string_view a, std::string_view b) {
  const std::size_t n = a.size(), m = b.size();
  std::vector<std::size_t> prev(m + 1), cur(m + 1);
  for (std::size_t j = 0; j <= m; ++j) prev[j] = j;
  for (std::size_t i = 1; i <= n; ++i) {
    cur[0] = i;
    for (std::size_t j = 1; j <= m; ++j) {
      const std::size_t subst = prev[j - 1] + (a[i - 1] == b[j - 1] ? 0 : 1);
      cur[j] = std::min({prev[j] + 1, cur[j - 1] + 1, subst});
    }
    std::swap(prev, cur);
  }
  return prev[m];
}

std::vector<std::string> normalize_all(const std::vector<std::string>& tokens) {
  std::vector<std::string> out;
  out.reserve(tokens.size());
  for (const std::string& t : tokens) out.push_back(normalize_syllable(t));
  return out;
}

struct EventTiming {
  double canonical_time = 0.0;
  double matra = 0.0;
};

std::vector<EventTiming> event_timings(const std::vector<ScheduledEvent>& events,
                                       const TalaGrid& grid, std::size_t begin, std::size_t end) {
  std::vector<EventTiming> timings(end - begin);
  for (std::size_t i = begin; i < end; ++i) {
    const ScheduledEvent& se = events[i];
    timings[i - begin].canonical_time =
        grid.canonical_time(se.cycle_index, se.event.cycle_beat, se.event.sub_beat());
    timings[i - begin].matra = grid.matra_at(se.cycle_index, se.event.cycle_beat);
  }
  return timings;
}

struct RefineOutcome {
  std::vector<AlignedPair> pairs;  // event_index relative to the events vector
  double score = 0.0;
};

// Weighted order-preserving assignment: DP over (event, label) with skips
// free, a pair contributing similarity - shift_weight * |offset|, offsets
// beyond max_shift inadmissible.
RefineOutcome refine_assignment(const std::vector<ScheduledEvent>& events, std::size_t ev_begin,
                                std::size_t ev_end, const std::vector<EventTiming>& timings,
                                const std::vector<LabeledOnset>& labels,
                                const std::vector<std::string>& label_norms, std::size_t lab_begin,
                                std::size_t lab_end, const AlignParams& params) {
  const std::size_t n = ev_end - ev_begin;
  const std::size_t m = lab_end - lab_begin;
  RefineOutcome out;
  if (n == 0 || m == 0) return out;

  std::vector<std::string> event_norms(n);
  for (std::size_t i = 0; i < n; ++i)
    event_norms[i] = normalize_syllable(events[ev_begin + i].event.syllable);

  auto weight = [&](std::size_t i, std::size_t j) {
    const double offset =
        (labels[lab_begin + j].time - timings[i].canonical_time) / timings[i].matra;
    if (std::abs(offset) > params.max_shift) return kNegInf;
    const double sim = syllable_similarity(event_norms[i], label_norms[lab_begin + j]);
    return sim - params.shift_weight * std::abs(offset);
  };

  std::vector<std::vector<double>> dp(n + 1, std::vector<double>(m + 1, 0.0));
  for (std::size_t i = 1; i <= n; ++i) {
    for (std::size_t j = 1; j <= m; ++j) {
      double best = std::max(dp[i - 1][j], dp[i][j - 1]);
      const double w = weight(i - 1, j - 1);
      if (w != kNegInf) best = std::max(best, dp[i - 1][j - 1] + w);
      dp[i][j] = best;
    }
  }
  out.score = dp[n][m];

  // Backtrack, preferring skips on ties so zero-gain pairs are not forced.
  // dp[i][j] is bitwise one of its three sources, so the equality tests are
  // exact.
  std::size_t i = n, j = m;
  while (i > 0 && j > 0) {
    if (dp[i][j] == dp[i - 1][j]) {
      --i;
    } else if (dp[i][j] == dp[i][j - 1]) {
      --j;
    } else {
      out.pairs.push_back({ev_begin + i - 1, lab_begin + j - 1,
                           syllable_similarity(event_norms[i - 1], label_norms[lab_begin + j - 1])});
      --i;
      --j;
    }
  }
  std::reverse(out.pairs.begin(), out.pairs.end());
  return out;
}

// Eligible label range for a placed window: the window itself plus
// neighbours within the shift allowance of the window's canonical span.
std::pair<std::size_t, std::size_t> eligible_range(const WindowMatch& placement,
                                                   const std::vector<EventTiming>& timings,
                                                   const std::vector<LabeledOnset>& labels,
                                                   double max_shift, std::size_t floor_index) {
  const double t_lo = timings.front().canonical_time - max_shift * timings.front().matra;
  const double t_hi = timings.back().canonical_time + max_shift * timings.back().matra;
  auto lo_it = std::lower_bound(labels.begin(), labels.end(), t_lo,
                                [](const LabeledOnset& l, double t) { return l.time < t; });
  auto hi_it = std::upper_bound(labels.begin(), labels.end(), t_hi,
                                [](double t, const LabeledOnset& l) { return t < l.time; });
  std::size_t lo = std::min<std::size_t>(lo_it - labels.begin(), placement.begin);
  std::size_t hi = std::max<std::size_t>(hi_it - labels.begin(), placement.end);
  lo = std::max(lo, floor_index);
  hi = std::max(hi, lo);
  return {lo, hi};
}

void check_labels_sorted(const std::vector<LabeledOnset>& labels) {
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i].syllable.empty())
      raise(Errc::InvalidArgument, "labeled onset without syllable text at t=" +
                                       std::to_string(labels[i].time));
    if (i > 0 && labels[i].time <= labels[i - 1].time)
      raise(Errc::InvalidArgument, "labeled onsets must be strictly increasing in time near t=" +
                                       std::to_string(labels[i].time));
  }
}

}  // namespace

std::string normalize_syllable(std::string_view s) {
  std::string folded;
  for (std::uint32_t cp : decode_utf8(s)) {
    if (cp >= 0x300 && cp <= 0x36F) continue;  // combining marks
    if (cp < 0x80) {
      const char c = static_cast<char>(cp);
      folded += (c >= 'A' && c <= 'Z') ? static_cast<char>(c - 'A' + 'a') : c;
      continue;
    }
    if (const char base = fold_diacritic(cp)) {
      folded += base;
      continue;
    }
    encode_utf8(cp, folded);
  }
  // Collapse long-vowel digraphs: aa -> a, ii -> i, uu -> u.
  std::string out;
  for (char c : folded) {
    if (!out.empty() && out.back() == c && (c == 'a' || c == 'i' || c == 'u')) continue;
    out += c;
  }
  return out;
}

double syllable_similarity(std::string_view a, std::string_view b) {
  if (a.empty() && b.empty()) return 1.0;
  const std::size_t longest = std::max(a.size(), b.size());
  const std::size_t dist = edit_distance(a, b);
  return 1.0 - static_cast<double>(dist) / static_cast<double>(longest);
}

std::vector<ScheduleEntry> expand_cycle_schedule(
    const std::vector<std::pair<int, int>>& line_per_cycle) {
  std::vector<ScheduleEntry> schedule;
  schedule.reserve(line_per_cycle.size() * 2);
  for (const auto& [line_id, cycle_index] : line_per_cycle) {
    schedule.push_back({cycle_index, line_id, HalfCycle::First});
    schedule.push_back({cycle_index, line_id, HalfCycle::Second});
  }
  return schedule;
}

WindowMatch match_half_cycle(const std::vector<std::string>& canonical,
                             const std::vector<LabeledOnset>& labeled, std::size_t search_begin,
                             std::size_t search_end, double gap_penalty) {
  if (canonical.empty()) raise(Errc::InvalidArgument, "canonical syllable sequence is empty");
  search_end = std::min(search_end, labeled.size());
  if (search_begin >= search_end)
    raise(Errc::EmptySearchRange, "no candidate window starts in [" +
                                      std::to_string(search_begin) + ", " +
                                      std::to_string(search_end) + ")");

  const std::vector<std::string> canon = normalize_all(canonical);
  std::vector<std::string> label_norms(labeled.size());
  for (std::size_t i = 0; i < labeled.size(); ++i)
    label_norms[i] = normalize_syllable(labeled[i].syllable);

  const std::size_t n = canon.size();
  WindowMatch best;
  best.score = kNegInf;
  for (std::size_t s = search_begin; s < search_end; ++s) {
    const std::size_t window = std::min(labeled.size() - s, 2 * n + 4);
    // Alignment anchored at window start, free on the right.
    std::vector<std::vector<double>> dp(n + 1, std::vector<double>(window + 1));
    for (std::size_t j = 0; j <= window; ++j) dp[0][j] = -gap_penalty * static_cast<double>(j);
    for (std::size_t i = 1; i <= n; ++i) {
      dp[i][0] = -gap_penalty * static_cast<double>(i);
      for (std::size_t j = 1; j <= window; ++j) {
        const double sim = syllable_similarity(canon[i - 1], label_norms[s + j - 1]);
        dp[i][j] = std::max({dp[i - 1][j - 1] + sim, dp[i - 1][j] - gap_penalty,
                             dp[i][j - 1] - gap_penalty});
      }
    }
    double score = dp[n][0];
    std::size_t extent = 0;
    for (std::size_t j = 1; j <= window; ++j) {
      if (dp[n][j] > score) {
        score = dp[n][j];
        extent = j;
      }
    }
    if (score > best.score) {
      best.begin = s;
      best.end = s + extent;
      best.score = score;
    }
  }
  return best;
}

AlignmentMap refine(const WindowMatch& placement, const std::vector<ScheduledEvent>& events,
                    const std::vector<LabeledOnset>& labels, const TalaGrid& grid,
                    const AlignParams& params) {
  check_labels_sorted(labels);
  AlignmentMap map;
  map.events = events;
  map.labels = labels;
  map.placements.push_back({0, placement.begin, placement.end, placement.score});
  if (!events.empty()) {
    const std::vector<EventTiming> timings = event_timings(events, grid, 0, events.size());
    const auto [lab_lo, lab_hi] =
        eligible_range(placement, timings, labels, params.max_shift, 0);
    std::vector<std::string> label_norms(labels.size());
    for (std::size_t i = 0; i < labels.size(); ++i)
      label_norms[i] = normalize_syllable(labels[i].syllable);
    RefineOutcome outcome = refine_assignment(events, 0, events.size(), timings, labels,
                                              label_norms, lab_lo, lab_hi, params);
    map.pairs = std::move(outcome.pairs);
  }

  std::vector<bool> event_paired(events.size(), false), label_paired(labels.size(), false);
  for (const AlignedPair& p : map.pairs) {
    event_paired[p.event_index] = true;
    label_paired[p.label_index] = true;
  }
  for (std::size_t i = 0; i < events.size(); ++i)
    if (!event_paired[i]) map.unmatched_events.push_back(i);
  for (std::size_t i = placement.begin; i < std::min(placement.end, labels.size()); ++i)
    if (!label_paired[i]) map.unmatched_labels.push_back(i);
  return map;
}

AlignmentMap align_performance(const Composition& composition,
                               const std::vector<ScheduleEntry>& schedule,
                               const std::vector<LabeledOnset>& labels, const TalaGrid& grid,
                               const AlignParams& params) {
  check_labels_sorted(labels);
  for (std::size_t i = 1; i < schedule.size(); ++i) {
    const auto key = [](const ScheduleEntry& e) {
      return std::make_pair(e.cycle_index, e.half == HalfCycle::Second ? 1 : 0);
    };
    if (key(schedule[i]) <= key(schedule[i - 1]))
      raise(Errc::InvalidArgument, "schedule entries must progress through cycles and halves");
  }

  AlignmentMap map;
  map.labels = labels;
  std::vector<std::string> label_norms(labels.size());
  for (std::size_t i = 0; i < labels.size(); ++i)
    label_norms[i] = normalize_syllable(labels[i].syllable);

  struct EntryRange {
    std::size_t ev_begin = 0, ev_end = 0;
  };
  std::vector<EntryRange> ranges(schedule.size());
  for (std::size_t k = 0; k < schedule.size(); ++k) {
    const ScheduleEntry& entry = schedule[k];
    ranges[k].ev_begin = map.events.size();
    for (CanonicalEvent& ev : half_cycle_events(composition, entry.line_id, entry.half))
      map.events.push_back({std::move(ev), entry.cycle_index});
    ranges[k].ev_end = map.events.size();
  }

  std::vector<bool> in_core(labels.size(), false);
  std::size_t next_start = 0;   // window starts never move backwards
  std::size_t pair_floor = 0;   // labels below this are claimed by earlier windows
  for (std::size_t k = 0; k < schedule.size(); ++k) {
    const std::size_t ev_begin = ranges[k].ev_begin, ev_end = ranges[k].ev_end;
    if (ev_begin == ev_end) continue;  // all-rest half: no placement
    if (next_start >= labels.size())
      raise(Errc::ScheduleExhaustsLabels,
            "labeled onsets run out before schedule entry " + std::to_string(k));

    const std::vector<EventTiming> timings = event_timings(map.events, grid, ev_begin, ev_end);
    const double t_lo = timings.front().canonical_time - params.max_shift * timings.front().matra;
    const double t_hi = timings.back().canonical_time + params.max_shift * timings.back().matra;
    auto lo_it = std::lower_bound(labels.begin(), labels.end(), t_lo,
                                  [](const LabeledOnset& l, double t) { return l.time < t; });
    auto hi_it = std::upper_bound(labels.begin(), labels.end(), t_hi,
                                  [](double t, const LabeledOnset& l) { return t < l.time; });
    const std::size_t s_begin = std::max<std::size_t>(lo_it - labels.begin(), next_start);
    const std::size_t s_end = static_cast<std::size_t>(hi_it - labels.begin());
    if (s_begin >= s_end) continue;  // nothing plausible in range; events stay unmatched

    std::vector<std::string> syllables;
    syllables.reserve(ev_end - ev_begin);
    for (std::size_t i = ev_begin; i < ev_end; ++i)
      syllables.push_back(map.events[i].event.syllable);

    const WindowMatch wm =
        match_half_cycle(syllables, labels, s_begin, s_end, params.gap_penalty);
    map.placements.push_back({k, wm.begin, wm.end, wm.score});
    for (std::size_t i = wm.begin; i < wm.end; ++i) in_core[i] = true;

    const auto [lab_lo, lab_hi] =
        eligible_range(wm, timings, labels, params.max_shift, pair_floor);
    RefineOutcome outcome = refine_assignment(map.events, ev_begin, ev_end, timings, labels,
                                              label_norms, lab_lo, lab_hi, params);
    for (const AlignedPair& p : outcome.pairs) {
      map.pairs.push_back(p);
      pair_floor = std::max(pair_floor, p.label_index + 1);
    }
    next_start = std::max(next_start, wm.end);
  }

  std::vector<bool> event_paired(map.events.size(), false), label_paired(labels.size(), false);
  for (const AlignedPair& p : map.pairs) {
    event_paired[p.event_index] = true;
    label_paired[p.label_index] = true;
  }
  for (std::size_t i = 0; i < map.events.size(); ++i)
    if (!event_paired[i]) map.unmatched_events.push_back(i);
  for (std::size_t i = 0; i < labels.size(); ++i)
    if (in_core[i] && !label_paired[i]) map.unmatched_labels.push_back(i);
  return map;
}

}  // namespace matra
