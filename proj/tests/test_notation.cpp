#include <string>
#include <vector>

#include "doctest.h"
#include "matra/notation.hpp"
#include "matra/synth.hpp"

using namespace matra;

namespace {

std::string row(const std::string& tag, std::vector<std::string> cells) {
  cells.resize(16);
  std::string out = tag;
  for (const std::string& c : cells) out += "," + c;
  return out + "\n";
}

std::string vib_row() { return row("VIB", {"x", "", "", "", "2", "", "", "", "0", "", "", "", "3"}); }

// The running example: four syllables opening the cycle, a continuation, a
// rest, more text in the second half.
std::string sample_csv() {
  std::string text;
  text += "title,Yeri Aali\n";
  text += "raga,yaman\n";
  text += "tala,teentaal\n";
  text += "laya,madhyalay\n";
  text += "\n";
  text += row("LYR", {"ye", "ri", "aa", "li", "s", "", "pi", "ya", "bi", "na", "s", "", "mo", "he"});
  text += vib_row();
  text += row("ORN", {"", "", "", "~"});
  text += row("NOT", {"N.", "R", "G", "m", "s", "", "P", "m", "G", "R", "s", "", "G", "R"});
  return text;
}

Errc code_of(const std::string& text) {
  try {
    parse_notation(text, TalaSpec::teentaal());
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected parse_notation to throw");
  return Errc::IoError;
}

}  // namespace

TEST_CASE("parse_notation reads the grid layout") {
  const Composition comp = parse_notation(sample_csv(), TalaSpec::teentaal());
  REQUIRE(comp.lines.size() == 1);
  CHECK(comp.title == "Yeri Aali");
  CHECK(comp.raga == "yaman");
  CHECK(comp.laya == "madhyalay");
  const CompositionLine& line = comp.lines[0];
  REQUIRE(line.cells.size() == 16);

  CHECK(line.cells[0].kind == CellKind::Syllable);
  CHECK(line.cells[0].syllables == std::vector<std::string>{"ye"});
  CHECK(line.cells[0].note == "N.");
  CHECK(line.cells[3].ornament == "~");
  CHECK(line.cells[4].kind == CellKind::Continuation);  // "s"
  CHECK(line.cells[5].kind == CellKind::Rest);          // empty string
  CHECK(line.cells[5].syllables.empty());
  CHECK(line.cells[15].kind == CellKind::Rest);
}

TEST_CASE("parse_notation accepts multi-syllable cells") {
  std::string text;
  text += row("LYR", {"sa khi", "ri"});
  text += vib_row();
  text += row("ORN", {});
  text += row("NOT", {"G m", "P"});
  const Composition comp = parse_notation(text, TalaSpec::teentaal());
  const BeatCell& cell = comp.lines[0].cells[0];
  CHECK(cell.kind == CellKind::Syllable);
  CHECK(cell.syllables == std::vector<std::string>{"sa", "khi"});
  CHECK(cell.subdivisions == 2);
  CHECK(cell.note == "G m");
}

TEST_CASE("parse_notation error cases") {
  SUBCASE("missing row in a group") {
    CHECK(code_of(row("LYR", {"ye"}) + vib_row() + row("ORN", {})) == Errc::RowGroupMalformed);
  }
  SUBCASE("wrong width") {
    CHECK(code_of("LYR,ye,ri\n" + vib_row() + row("ORN", {}) + row("NOT", {})) ==
          Errc::WidthMismatch);
  }
  SUBCASE("continuation marker with trailing text") {
    CHECK(code_of(row("LYR", {"ye", "s ga"}) + vib_row() + row("ORN", {}) + row("NOT", {})) ==
          Errc::InvalidToken);
  }
  SUBCASE("leading continuation on the first line") {
    CHECK(code_of(row("LYR", {"s", "ye"}) + vib_row() + row("ORN", {}) + row("NOT", {})) ==
          Errc::DanglingContinuation);
  }
  SUBCASE("continuation after only rests") {
    CHECK(code_of(row("LYR", {"", "s"}) + vib_row() + row("ORN", {}) + row("NOT", {})) ==
          Errc::DanglingContinuation);
  }
  SUBCASE("vibhag markers must sit at the vibhag starts") {
    const std::string text = row("LYR", {"ye"}) +
                             row("VIB", {"", "x", "", "", "2", "", "", "", "0", "", "", "", "3"}) +
                             row("ORN", {}) + row("NOT", {});
    CHECK(code_of(text) == Errc::VibhagMismatch);
  }
  SUBCASE("unknown metadata key rejected") {
    const std::string text =
        "tempo,140\n\n" + row("LYR", {"ye"}) + vib_row() + row("ORN", {}) + row("NOT", {});
    CHECK(code_of(text) == Errc::MalformedInput);
  }
}

TEST_CASE("leading continuation is legal on a later line") {
  std::string text;
  text += row("LYR", {"ye", "ri"}) + vib_row() + row("ORN", {}) + row("NOT", {"G", "R"});
  text += row("LYR", {"s", "ga"}) + vib_row() + row("ORN", {}) + row("NOT", {"s", "P"});
  const Composition comp = parse_notation(text, TalaSpec::teentaal());
  REQUIRE(comp.lines.size() == 2);
  CHECK(comp.lines[1].cells[0].kind == CellKind::Continuation);
}

TEST_CASE("serialize round-trips") {
  SUBCASE("the sample composition") {
    const Composition comp = parse_notation(sample_csv(), TalaSpec::teentaal());
    CHECK(parse_notation(serialize_notation(comp), comp.tala) == comp);
  }
  SUBCASE("an all-rest line serializes to 16 empty lyric cells") {
    Composition comp;
    comp.tala = TalaSpec::teentaal();
    CompositionLine line;
    line.line_id = 1;
    line.cells.assign(16, BeatCell{});
    comp.lines.push_back(line);
    const std::string text = serialize_notation(comp);
    CHECK(text.find("LYR,,,,,,,,,,,,,,,,\n") != std::string::npos);
    CHECK(parse_notation(text, comp.tala) == comp);
  }
  SUBCASE("multi-syllable cells and verses survive") {
    Composition comp = random_composition(7, 4);
    comp.lines[3].verse = Verse::Antara;
    const Composition back = parse_notation(serialize_notation(comp), comp.tala);
    CHECK(back == comp);
  }
  SUBCASE("random corpus") {
    for (std::uint64_t seed = 1; seed <= 25; ++seed) {
      const Composition comp = random_composition(seed, 1 + static_cast<int>(seed % 5));
      CHECK(parse_notation(serialize_notation(comp), comp.tala) == comp);
    }
  }
}

TEST_CASE("canonical_events expands cells") {
  const Composition comp = parse_notation(sample_csv(), TalaSpec::teentaal());
  const std::vector<CanonicalEvent> events = canonical_events(comp, 1);
  REQUIRE(events.size() == 10);  // ye ri aa li pi ya bi na mo he
  CHECK(events[0].cycle_beat == 1);
  CHECK(events[0].syllable == "ye");
  CHECK(events[0].sub_beat() == 0.0);

  SUBCASE("line with only leading syllables") {
    std::string text = row("LYR", {"ye", "ri", "aa", "li", "s"}) + vib_row() + row("ORN", {}) +
                       row("NOT", {"N", "R", "G", "m", "s"});
    const Composition c2 = parse_notation(text, TalaSpec::teentaal());
    const std::vector<CanonicalEvent> ev = canonical_events(c2, 1);
    REQUIRE(ev.size() == 4);
    for (int b = 0; b < 4; ++b) {
      CHECK(ev[b].cycle_beat == b + 1);
      CHECK(ev[b].sub_beat() == 0.0);
    }
  }
  SUBCASE("two syllables share a beat at equal subdivisions") {
    std::string text = row("LYR", {"ye", "ri", "ra ja"}) + vib_row() + row("ORN", {}) +
                       row("NOT", {"N", "R", "G m"});
    const Composition c2 = parse_notation(text, TalaSpec::teentaal());
    const std::vector<CanonicalEvent> ev = canonical_events(c2, 1);
    REQUIRE(ev.size() == 4);
    CHECK(ev[2].cycle_beat == 3);
    CHECK(ev[2].sub_beat() == 0.0);
    CHECK(ev[2].note == "G");
    CHECK(ev[3].cycle_beat == 3);
    CHECK(ev[3].sub_beat() == 0.5);
    CHECK(ev[3].note == "m");
  }
  SUBCASE("all-rest line gives no events") {
    std::string text = row("LYR", {}) + vib_row() + row("ORN", {}) + row("NOT", {});
    const Composition c2 = parse_notation(text, TalaSpec::teentaal());
    CHECK(canonical_events(c2, 1).empty());
  }
  SUBCASE("unknown line id") {
    CHECK_THROWS_AS(canonical_events(comp, 42), Error);
  }
}

TEST_CASE("half-cycle syllables split at the khali") {
  const Composition comp = parse_notation(sample_csv(), TalaSpec::teentaal());
  CHECK(half_cycle_syllables(comp, 1, HalfCycle::First) ==
        std::vector<std::string>{"ye", "ri", "aa", "li", "pi", "ya"});
  CHECK(half_cycle_syllables(comp, 1, HalfCycle::Second) ==
        std::vector<std::string>{"bi", "na", "mo", "he"});

  SUBCASE("a multi-syllable beat 8 lands entirely in the first half") {
    std::string text = row("LYR", {"ye", "", "", "", "", "", "", "ra ja"}) + vib_row() +
                       row("ORN", {}) + row("NOT", {});
    const Composition c2 = parse_notation(text, TalaSpec::teentaal());
    CHECK(half_cycle_syllables(c2, 1, HalfCycle::First) ==
          std::vector<std::string>{"ye", "ra", "ja"});
    CHECK(half_cycle_syllables(c2, 1, HalfCycle::Second).empty());
  }
}

TEST_CASE("partition and event-count invariants hold on random compositions") {
  for (std::uint64_t seed = 100; seed < 110; ++seed) {
    const Composition comp = random_composition(seed, 3);
    std::size_t total_tokens = 0;
    for (const CompositionLine& line : comp.lines)
      for (const BeatCell& cell : line.cells) total_tokens += cell.syllables.size();
    CHECK(canonical_events(comp).size() == total_tokens);

    for (const CompositionLine& line : comp.lines) {
      std::vector<std::string> joined = half_cycle_syllables(comp, line.line_id, HalfCycle::First);
      const std::vector<std::string> second =
          half_cycle_syllables(comp, line.line_id, HalfCycle::Second);
      joined.insert(joined.end(), second.begin(), second.end());
      std::vector<std::string> full;
      for (const CanonicalEvent& ev : canonical_events(comp, line.line_id))
        full.push_back(ev.syllable);
      CHECK(joined == full);
    }
  }
}

TEST_CASE("teentaal spec must carry the canonical layout") {
  TalaSpec broken = TalaSpec::teentaal();
  broken.khali_index = 8;
  CHECK_THROWS_AS(validate(broken), Error);
}
