#include <cmath>
#include <limits>
#include <random>

#include "doctest.h"
#include "matra/align.hpp"
#include "matra/synth.hpp"
#include "support/oracles.hpp"

using namespace matra;

namespace {

TalaGrid two_cycle_grid(double matra = 0.5) {
  std::vector<TalaAnchor> anchors;
  for (int c = 0; c < 3; ++c) {
    anchors.push_back({16.0 * c * matra, AnchorKind::Sam, c});
    if (c < 2) anchors.push_back({(16.0 * c + 8.0) * matra, AnchorKind::Khali, c});
  }
  return build_grid(anchors, TalaSpec::teentaal());
}

ScheduledEvent event_at(int beat, const std::string& syllable, int cycle = 0) {
  CanonicalEvent ev;
  ev.line_id = 1;
  ev.cycle_beat = beat;
  ev.syllable = syllable;
  return {ev, cycle};
}

std::vector<LabeledOnset> labels_of(std::vector<std::pair<double, std::string>> raw) {
  std::vector<LabeledOnset> labels;
  for (auto& [t, s] : raw) labels.push_back({t, std::move(s)});
  return labels;
}

// Achieved objective of a refinement result, recomputed from first
// principles: sum of similarity - shift_weight * |offset| over its pairs.
double achieved_score(const AlignmentMap& map, const TalaGrid& grid, const AlignParams& params) {
  double score = 0.0;
  for (const AlignedPair& p : map.pairs) {
    const ScheduledEvent& se = map.events[p.event_index];
    const double canonical =
        grid.canonical_time(se.cycle_index, se.event.cycle_beat, se.event.sub_beat());
    const double offset = (map.labels[p.label_index].time - canonical) /
                          grid.matra_at(se.cycle_index, se.event.cycle_beat);
    score += syllable_similarity(normalize_syllable(se.event.syllable),
                                 normalize_syllable(map.labels[p.label_index].syllable)) -
             params.shift_weight * std::abs(offset);
  }
  return score;
}

double oracle_refine_score(const std::vector<ScheduledEvent>& events,
                           const std::vector<LabeledOnset>& labels, const TalaGrid& grid,
                           const AlignParams& params) {
  std::vector<std::vector<double>> weights(events.size(),
                                           std::vector<double>(labels.size(), 0.0));
  for (std::size_t i = 0; i < events.size(); ++i) {
    const ScheduledEvent& se = events[i];
    const double canonical =
        grid.canonical_time(se.cycle_index, se.event.cycle_beat, se.event.sub_beat());
    const double matra = grid.matra_at(se.cycle_index, se.event.cycle_beat);
    for (std::size_t j = 0; j < labels.size(); ++j) {
      const double offset = (labels[j].time - canonical) / matra;
      if (std::abs(offset) > params.max_shift)
        weights[i][j] = -std::numeric_limits<double>::infinity();
      else
        weights[i][j] = syllable_similarity(normalize_syllable(se.event.syllable),
                                            normalize_syllable(labels[j].syllable)) -
                        params.shift_weight * std::abs(offset);
    }
  }
  return oracle::exhaustive_assignment_score(weights);
}

}  // namespace

TEST_CASE("normalize_syllable folds case, diacritics and long vowels") {
  CHECK(normalize_syllable("Aa") == "a");
  CHECK(normalize_syllable("r\xc4\xab") == "ri");   // r + ī
  CHECK(normalize_syllable("aali") == "ali");
  CHECK(normalize_syllable("ali") == "ali");
  CHECK(normalize_syllable("GHA") == "gha");
  CHECK(normalize_syllable("p\xc4\x81") == "pa");   // pā
  CHECK(normalize_syllable("s\xcc\xa3") == "s");    // s + combining dot below
  CHECK(normalize_syllable("moo") == "moo");        // oo is not folded
  CHECK(normalize_syllable("na") == "na");          // terminal inherent vowel kept
}

TEST_CASE("syllable_similarity worked examples") {
  CHECK(syllable_similarity("ri", "ri") == 1.0);
  CHECK(syllable_similarity("ye", "ri") == 0.0);
  CHECK(syllable_similarity(normalize_syllable("ali"), normalize_syllable("aali")) == 1.0);
  CHECK(syllable_similarity("kala", "kela") == doctest::Approx(0.75));
  CHECK(syllable_similarity("", "") == 1.0);
}

TEST_CASE("match_half_cycle finds the best window") {
  const std::vector<std::string> canonical{"ye", "ri", "a", "li"};
  SUBCASE("unique exact run") {
    const std::vector<LabeledOnset> labeled = labels_of({{0.0, "ma"},
                                                         {0.5, "no"},
                                                         {1.0, "ta"},
                                                         {1.5, "ki"},
                                                         {2.0, "dha"},
                                                         {2.5, "ye"},
                                                         {3.0, "ri"},
                                                         {3.5, "a"},
                                                         {4.0, "li"},
                                                         {4.5, "ma"}});
    const WindowMatch wm = match_half_cycle(canonical, labeled, 0, labeled.size());
    CHECK(wm.begin == 5);
    CHECK(wm.end == 9);
    CHECK(wm.score == doctest::Approx(4.0));
  }
  SUBCASE("a deleted syllable still matches, verified against the oracle") {
    const std::vector<LabeledOnset> labeled = labels_of(
        {{0.0, "ta"}, {0.5, "ye"}, {1.0, "ri"}, {1.5, "li"}, {2.0, "dha"}, {2.5, "na"}});
    const WindowMatch wm = match_half_cycle(canonical, labeled, 0, labeled.size());
    CHECK(wm.begin == 1);

    double best_oracle = -std::numeric_limits<double>::infinity();
    for (std::size_t s = 0; s < labeled.size(); ++s) {
      std::vector<std::vector<double>> sim(canonical.size());
      for (std::size_t i = 0; i < canonical.size(); ++i)
        for (std::size_t j = s; j < labeled.size(); ++j)
          sim[i].push_back(syllable_similarity(normalize_syllable(canonical[i]),
                                               normalize_syllable(labeled[j].syllable)));
      best_oracle = std::max(best_oracle, oracle::exhaustive_window_score(sim, 0.4));
    }
    CHECK(wm.score == doctest::Approx(best_oracle).epsilon(1e-12));
  }
  SUBCASE("ties go to the earliest placement") {
    const std::vector<LabeledOnset> labeled = labels_of({{0.0, "ye"},
                                                         {0.5, "ri"},
                                                         {1.0, "a"},
                                                         {1.5, "li"},
                                                         {2.0, "xx"},
                                                         {2.5, "ye"},
                                                         {3.0, "ri"},
                                                         {3.5, "a"},
                                                         {4.0, "li"}});
    const WindowMatch wm = match_half_cycle(canonical, labeled, 0, labeled.size());
    CHECK(wm.begin == 0);
  }
  SUBCASE("empty search range") {
    const std::vector<LabeledOnset> labeled = labels_of({{0.0, "ye"}});
    CHECK_THROWS_AS(match_half_cycle(canonical, labeled, 1, 1), Error);
  }
}

TEST_CASE("refine pairs events inside a placed window") {
  const TalaGrid grid = two_cycle_grid();  // matra 0.5 s
  const AlignParams params;
  const std::vector<ScheduledEvent> events{event_at(1, "ye"), event_at(2, "ri"),
                                           event_at(3, "a"), event_at(4, "li")};
  SUBCASE("an exact on-grid run pairs fully") {
    const std::vector<LabeledOnset> labels =
        labels_of({{0.02, "ye"}, {0.55, "ri"}, {1.0, "a"}, {1.52, "li"}});
    const AlignmentMap map = refine({0, 4, 4.0}, events, labels, grid, params);
    CHECK(map.pairs.size() == 4);
    CHECK(map.unmatched_events.empty());
    CHECK(map.unmatched_labels.empty());
    for (std::size_t k = 0; k < 4; ++k) {
      CHECK(map.pairs[k].event_index == k);
      CHECK(map.pairs[k].label_index == k);
    }
  }
  SUBCASE("an inserted extra syllable stays unmatched") {
    const std::vector<LabeledOnset> labels =
        labels_of({{0.0, "ye"}, {0.5, "ri"}, {0.7, "a"}, {1.0, "a"}, {1.5, "li"}});
    const AlignmentMap map = refine({0, 5, 0.0}, events, labels, grid, params);
    CHECK(map.pairs.size() == 4);
    REQUIRE(map.unmatched_labels.size() == 1);
    CHECK(map.unmatched_labels[0] == 2);  // the 0.7 s extra
    CHECK(map.unmatched_events.empty());
    CHECK(achieved_score(map, grid, params) ==
          doctest::Approx(oracle_refine_score(events, labels, grid, params)).epsilon(1e-12));
  }
  SUBCASE("a syllable three matras away is rejected") {
    const std::vector<ScheduledEvent> sparse{event_at(1, "ye"), event_at(2, "ga"),
                                             event_at(4, "li")};
    // "ga" appears only 3 matras late (1.0 s canonical, label at 2.5 s).
    const std::vector<LabeledOnset> labels =
        labels_of({{0.0, "ye"}, {1.5, "li"}, {2.5, "ga"}});
    const AlignmentMap map = refine({0, 3, 0.0}, sparse, labels, grid, params);
    CHECK(map.pairs.size() == 2);
    REQUIRE(map.unmatched_events.size() == 1);
    CHECK(sparse[map.unmatched_events[0]].event.syllable == "ga");
  }
  SUBCASE("labels just beyond the window edge are eligible") {
    // Placement covers only indices 1..3; the first syllable onset sits just
    // before the window, shifted from the neighbouring interval.
    const std::vector<LabeledOnset> labels =
        labels_of({{-0.4, "ye"}, {0.5, "ri"}, {1.0, "a"}, {1.5, "li"}});
    const AlignmentMap map = refine({1, 4, 0.0}, events, labels, grid, params);
    CHECK(map.pairs.size() == 4);
  }
  SUBCASE("random windows match the exhaustive assignment oracle") {
    std::mt19937_64 rng(99);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    static const char* pool[] = {"ye", "ri", "a", "li", "sa", "ga"};
    for (int trial = 0; trial < 60; ++trial) {
      std::vector<ScheduledEvent> evs;
      const int n = 2 + static_cast<int>(unit(rng) * 6.0);  // up to 8 events
      for (int i = 0; i < n; ++i)
        evs.push_back(event_at(i + 1, pool[static_cast<int>(unit(rng) * 6.0) % 6]));
      std::vector<LabeledOnset> labels;
      double t = -0.3;
      const int m = 2 + static_cast<int>(unit(rng) * 8.0);
      for (int j = 0; j < m; ++j) {
        t += 0.15 + 0.5 * unit(rng);
        labels.push_back({t, pool[static_cast<int>(unit(rng) * 6.0) % 6]});
      }
      const AlignmentMap map =
          refine({0, labels.size(), 0.0}, evs, labels, grid, params);
      const double got = achieved_score(map, grid, params);
      const double want = oracle_refine_score(evs, labels, grid, params);
      CHECK(got == doctest::Approx(want).epsilon(1e-9));
    }
  }
}

TEST_CASE("align_performance runs the full pipeline") {
  const Composition comp = random_composition(42, 2);
  const int cycles = 3;
  std::vector<TalaAnchor> anchors;
  const double matra = 0.45;
  for (int c = 0; c < cycles; ++c) {
    anchors.push_back({16.0 * c * matra, AnchorKind::Sam, c});
    anchors.push_back({(16.0 * c + 8.0) * matra, AnchorKind::Khali, c});
  }
  anchors.push_back({16.0 * cycles * matra, AnchorKind::Sam, cycles});
  const TalaGrid grid = build_grid(anchors, TalaSpec::teentaal());

  std::vector<ScheduleEntry> schedule;
  std::vector<LabeledOnset> labels;
  for (int c = 0; c < cycles; ++c) {
    const int line_id = comp.lines[c % comp.lines.size()].line_id;
    schedule.push_back({c, line_id, HalfCycle::First});
    schedule.push_back({c, line_id, HalfCycle::Second});
    for (const CanonicalEvent& ev : canonical_events(comp, line_id))
      labels.push_back({grid.canonical_time(c, ev.cycle_beat, ev.sub_beat()), ev.syllable});
  }

  SUBCASE("a perfectly on-grid performance pairs every event") {
    const AlignmentMap map = align_performance(comp, schedule, labels, grid);
    CHECK(map.events.size() == labels.size());
    CHECK(map.pairs.size() == map.events.size());
    CHECK(map.unmatched_events.empty());
    CHECK(map.unmatched_labels.empty());

    // Conservation and order preservation.
    CHECK(map.pairs.size() + map.unmatched_events.size() == map.events.size());
    for (std::size_t k = 1; k < map.pairs.size(); ++k) {
      CHECK(map.pairs[k].event_index > map.pairs[k - 1].event_index);
      CHECK(map.labels[map.pairs[k].label_index].time >
            map.labels[map.pairs[k - 1].label_index].time);
    }
  }
  SUBCASE("placements progress through the label sequence") {
    const AlignmentMap map = align_performance(comp, schedule, labels, grid);
    for (std::size_t k = 1; k < map.placements.size(); ++k)
      CHECK(map.placements[k].label_begin >= map.placements[k - 1].label_end);
  }
  SUBCASE("labels running out raises ScheduleExhaustsLabels") {
    std::vector<LabeledOnset> truncated(labels.begin(),
                                        labels.begin() + static_cast<std::ptrdiff_t>(4));
    try {
      align_performance(comp, schedule, truncated, grid);
      FAIL("expected ScheduleExhaustsLabels");
    } catch (const Error& e) {
      CHECK(e.code() == Errc::ScheduleExhaustsLabels);
    }
  }
  SUBCASE("unknown line in the schedule") {
    std::vector<ScheduleEntry> bad = schedule;
    bad[0].line_id = 99;
    CHECK_THROWS_AS(align_performance(comp, bad, labels, grid), Error);
  }
}

TEST_CASE("align_performance skips all-rest halves") {
  // A line whose second half is all rests.
  Composition comp;
  comp.tala = TalaSpec::teentaal();
  CompositionLine line;
  line.line_id = 1;
  line.cells.assign(16, BeatCell{});
  const char* syl[4] = {"ye", "ri", "a", "li"};
  for (int b = 0; b < 4; ++b) {
    line.cells[b].kind = CellKind::Syllable;
    line.cells[b].syllables = {syl[b]};
    line.cells[b].subdivisions = 1;
  }
  comp.lines.push_back(line);

  const TalaGrid grid = two_cycle_grid();
  const std::vector<ScheduleEntry> schedule{{0, 1, HalfCycle::First}, {0, 1, HalfCycle::Second}};
  const std::vector<LabeledOnset> labels =
      labels_of({{0.0, "ye"}, {0.5, "ri"}, {1.0, "a"}, {1.5, "li"}});
  const AlignmentMap map = align_performance(comp, schedule, labels, grid);
  CHECK(map.placements.size() == 1);  // the rest half produced none
  CHECK(map.pairs.size() == 4);
}

TEST_CASE("three repetitions of the same line place in label order") {
  const Composition comp = random_composition(7, 1);
  SynthOutput synth_out = synthesize(comp, 120.0, RubatoModel{0.0, 8, 0.05, 0.0, 21}, 3);
  const AlignmentMap map =
      align_performance(comp, synth_out.schedule, synth_out.labels, synth_out.grid);
  REQUIRE(map.placements.size() >= 3);
  for (std::size_t k = 1; k < map.placements.size(); ++k)
    CHECK(map.placements[k].label_begin >= map.placements[k - 1].label_end);
  CHECK(map.pairs.size() == synth_out.truth.pairs.size());
}
