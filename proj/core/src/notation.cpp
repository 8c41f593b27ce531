#include "matra/notation.hpp"

#include <algorithm>
#include <array>
#include <sstream>

#include "matra/textio.hpp"

namespace matra {
namespace {

constexpr std::array<const char*, 4> kRowTags = {"LYR", "VIB", "ORN", "NOT"};
constexpr const char* kContinuationToken = "s";

bool is_row_tag(const std::string& field) {
  return std::find(kRowTags.begin(), kRowTags.end(), field) != kRowTags.end();
}

void check_cell_text(const std::string& text, const std::string& where) {
  if (text.find_first_of("\",\n") != std::string::npos)
    raise(Errc::InvalidToken, where + ": cell text may not contain quotes, commas or newlines");
}

// Vibhag markers follow the clap convention: sam is "x", khali is "0",
// the remaining vibhags are numbered by clap count.
std::string vibhag_symbol(const TalaSpec& tala, int vibhag_ordinal, int start_beat) {
  if (start_beat == tala.sam_index) return "x";
  if (start_beat == tala.khali_index) return "0";
  return std::to_string(vibhag_ordinal + 1);
}

BeatCell parse_lyric_cell(const std::string& raw, const std::string& where) {
  BeatCell cell;
  const std::string text = trim(raw);
  if (text.empty()) {
    cell.kind = CellKind::Rest;
    return cell;
  }
  const std::vector<std::string> tokens = split_whitespace(text);
  if (tokens.size() == 1 && tokens[0] == kContinuationToken) {
    cell.kind = CellKind::Continuation;
    return cell;
  }
  for (const std::string& tok : tokens) {
    if (tok == kContinuationToken)
      raise(Errc::InvalidToken,
            where + ": continuation marker 's' cannot share a cell with other text");
  }
  cell.kind = CellKind::Syllable;
  cell.syllables = tokens;
  cell.subdivisions = static_cast<int>(tokens.size());
  return cell;
}

std::string lyric_cell_text(const BeatCell& cell) {
  switch (cell.kind) {
    case CellKind::Rest: return "";
    case CellKind::Continuation: return kContinuationToken;
    case CellKind::Syllable: break;
  }
  std::string out;
  for (std::size_t i = 0; i < cell.syllables.size(); ++i) {
    if (i) out += ' ';
    out += cell.syllables[i];
  }
  return out;
}

std::string normalize_spaces(const std::string& raw) {
  const std::vector<std::string> tokens = split_whitespace(trim(raw));
  std::string out;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    if (i) out += ' ';
    out += tokens[i];
  }
  return out;
}

int second_half_begin(const TalaSpec& tala) { return tala.khali_index; }

}  // namespace

TalaSpec TalaSpec::teentaal() {
  TalaSpec spec;
  spec.name = "teentaal";
  spec.beats_per_cycle = 16;
  spec.vibhag_starts = {1, 5, 9, 13};
  spec.sam_index = 1;
  spec.khali_index = 9;
  return spec;
}

void validate(const TalaSpec& tala) {
  if (tala.beats_per_cycle < 2)
    raise(Errc::InvalidTala, "beats_per_cycle must be at least 2, got " +
                                 std::to_string(tala.beats_per_cycle));
  auto in_range = [&](int idx) { return idx >= 1 && idx <= tala.beats_per_cycle; };
  if (!in_range(tala.sam_index) || !in_range(tala.khali_index))
    raise(Errc::InvalidTala, "sam/khali index out of range for tala '" + tala.name + "'");
  if (tala.khali_index <= tala.sam_index)
    raise(Errc::InvalidTala, "khali must come after sam within the cycle");
  if (tala.vibhag_starts.empty() || tala.vibhag_starts.front() != 1)
    raise(Errc::InvalidTala, "vibhag_starts must begin with beat 1");
  for (std::size_t i = 0; i < tala.vibhag_starts.size(); ++i) {
    if (!in_range(tala.vibhag_starts[i]))
      raise(Errc::InvalidTala, "vibhag start out of range");
    if (i > 0 && tala.vibhag_starts[i] <= tala.vibhag_starts[i - 1])
      raise(Errc::InvalidTala, "vibhag_starts must be strictly increasing");
  }
  if (tala.name == "teentaal") {
    const TalaSpec ref = TalaSpec::teentaal();
    if (tala.beats_per_cycle != ref.beats_per_cycle || tala.vibhag_starts != ref.vibhag_starts ||
        tala.sam_index != ref.sam_index || tala.khali_index != ref.khali_index)
      raise(Errc::InvalidTala, "tala named 'teentaal' must carry the canonical teentaal layout");
  }
}

const CompositionLine& Composition::line(int line_id) const {
  for (const CompositionLine& l : lines)
    if (l.line_id == line_id) return l;
  raise(Errc::UnknownLine, "no line with id " + std::to_string(line_id));
}

void validate(const Composition& composition) {
  validate(composition.tala);
  if (composition.lines.empty())
    raise(Errc::MalformedInput, "composition must have at least one line");
  const int bpc = composition.tala.beats_per_cycle;
  for (std::size_t li = 0; li < composition.lines.size(); ++li) {
    const CompositionLine& line = composition.lines[li];
    const std::string where = "line " + std::to_string(line.line_id);
    if (static_cast<int>(line.cells.size()) != bpc)
      raise(Errc::WidthMismatch, where + " has " + std::to_string(line.cells.size()) +
                                     " cells, expected " + std::to_string(bpc));
    bool sound_seen = false;  // any non-Rest cell earlier in this line
    for (std::size_t b = 0; b < line.cells.size(); ++b) {
      const BeatCell& cell = line.cells[b];
      const std::string cell_where = where + " beat " + std::to_string(b + 1);
      switch (cell.kind) {
        case CellKind::Syllable:
          if (cell.syllables.empty())
            raise(Errc::InvalidToken, cell_where + ": syllable cell without tokens");
          if (cell.subdivisions != static_cast<int>(cell.syllables.size()))
            raise(Errc::InvalidToken, cell_where + ": subdivisions must match syllable count");
          for (const std::string& tok : cell.syllables) {
            if (tok.empty() || tok == kContinuationToken ||
                tok.find_first_of(" \t\",\n") != std::string::npos)
              raise(Errc::InvalidToken, cell_where + ": bad syllable token '" + tok + "'");
          }
          break;
        case CellKind::Rest:
        case CellKind::Continuation:
          if (!cell.syllables.empty() || cell.subdivisions != 1)
            raise(Errc::InvalidToken, cell_where + ": rest/continuation cells carry no syllables");
          break;
      }
      check_cell_text(cell.note, cell_where);
      check_cell_text(cell.ornament, cell_where);
      if (cell.kind == CellKind::Continuation && !sound_seen) {
        // A leading continuation is only meaningful when it can continue the
        // previous line; the first line has nothing to continue, and a
        // continuation preceded by rests alone continues silence.
        if (li == 0 || b > 0)
          raise(Errc::DanglingContinuation, cell_where + ": continuation has nothing to continue");
      }
      if (cell.kind != CellKind::Rest) sound_seen = true;
    }
  }
}

Composition parse_notation(const std::string& csv_text, const TalaSpec& tala) {
  validate(tala);
  Composition comp;
  comp.tala = tala;

  const std::vector<std::string> lines = split_lines(csv_text);
  std::size_t row = 0;
  std::string verses;

  // Optional metadata block, terminated by a blank line. Absent when the
  // file opens directly with a tagged notation row.
  if (row < lines.size()) {
    const std::vector<std::string> first = split_csv_line(lines[row]);
    const bool has_metadata = !first.empty() && !is_row_tag(first[0]) && !trim(lines[row]).empty();
    if (has_metadata) {
      for (; row < lines.size() && !trim(lines[row]).empty(); ++row) {
        const std::vector<std::string> kv = split_csv_line(lines[row]);
        if (kv.size() != 2)
          raise(Errc::MalformedInput,
                "metadata row " + std::to_string(row + 1) + " is not a key,value pair");
        const std::string key = to_lower(kv[0]);
        if (key == "title") comp.title = kv[1];
        else if (key == "raga") comp.raga = kv[1];
        else if (key == "laya") comp.laya = kv[1];
        else if (key == "tala") { /* informational; the TalaSpec argument governs */ }
        else if (key == "verses") verses = to_lower(kv[1]);
        else
          raise(Errc::MalformedInput, "unknown metadata key '" + kv[0] + "'");
      }
    }
  }

  // Row groups: LYR, VIB, ORN, NOT per composition line. Blank lines between
  // groups are tolerated.
  std::vector<std::vector<std::string>> group;
  int next_line_id = 1;
  auto flush_group = [&](std::size_t end_row) {
    if (group.empty()) return;
    if (group.size() != 4)
      raise(Errc::RowGroupMalformed, "row group ending at row " + std::to_string(end_row) +
                                         " has " + std::to_string(group.size()) +
                                         " rows, expected 4 (LYR, VIB, ORN, NOT)");
    CompositionLine line;
    line.line_id = next_line_id++;
    const std::string where = "line " + std::to_string(line.line_id);
    for (std::size_t r = 0; r < 4; ++r) {
      if (group[r].empty() || group[r][0] != kRowTags[r])
        raise(Errc::RowGroupMalformed,
              where + ": expected row tag " + kRowTags[r] + " at position " + std::to_string(r + 1));
      const int width = static_cast<int>(group[r].size()) - 1;
      if (width != tala.beats_per_cycle)
        raise(Errc::WidthMismatch, where + " " + kRowTags[r] + " row has " + std::to_string(width) +
                                       " data columns, expected " +
                                       std::to_string(tala.beats_per_cycle));
    }
    line.cells.resize(tala.beats_per_cycle);
    for (int b = 0; b < tala.beats_per_cycle; ++b) {
      const std::string cell_where = where + " beat " + std::to_string(b + 1);
      line.cells[b] = parse_lyric_cell(group[0][b + 1], cell_where);
      const bool vibhag_here =
          std::find(tala.vibhag_starts.begin(), tala.vibhag_starts.end(), b + 1) !=
          tala.vibhag_starts.end();
      const bool marker_present = !trim(group[1][b + 1]).empty();
      if (vibhag_here != marker_present)
        raise(Errc::VibhagMismatch,
              cell_where + ": vibhag markers must appear exactly at beats " +
                  [&] {
                    std::string s;
                    for (int v : tala.vibhag_starts) s += std::to_string(v) + " ";
                    return s;
                  }());
      line.cells[b].ornament = normalize_spaces(group[2][b + 1]);
      line.cells[b].note = normalize_spaces(group[3][b + 1]);
    }
    comp.lines.push_back(std::move(line));
    group.clear();
  };

  for (; row < lines.size(); ++row) {
    if (trim(lines[row]).empty()) {
      flush_group(row);
      continue;
    }
    const std::vector<std::string> fields = split_csv_line(lines[row]);
    if (fields.empty() || !is_row_tag(fields[0]))
      raise(Errc::RowGroupMalformed,
            "row " + std::to_string(row + 1) + " does not start with a LYR/VIB/ORN/NOT tag");
    if (fields[0] == kRowTags[0]) flush_group(row);  // a new LYR row opens a group
    group.push_back(fields);
    if (group.size() == 4) flush_group(row + 1);
  }
  flush_group(lines.size());

  if (!verses.empty()) {
    if (verses.size() != comp.lines.size())
      raise(Errc::MalformedInput, "verses metadata lists " + std::to_string(verses.size()) +
                                      " entries for " + std::to_string(comp.lines.size()) +
                                      " lines");
    for (std::size_t i = 0; i < verses.size(); ++i) {
      if (verses[i] == 's') comp.lines[i].verse = Verse::Sthayi;
      else if (verses[i] == 'a') comp.lines[i].verse = Verse::Antara;
      else
        raise(Errc::MalformedInput, "verses metadata may only contain 's' and 'a'");
    }
  }

  validate(comp);
  return comp;
}

std::string serialize_notation(const Composition& composition) {
  validate(composition);
  const TalaSpec& tala = composition.tala;
  std::string out;
  auto meta = [&](const char* key, const std::string& value) {
    if (!value.empty()) out += std::string(key) + "," + csv_field(value) + "\n";
  };
  meta("title", composition.title);
  meta("raga", composition.raga);
  meta("tala", tala.name);
  meta("laya", composition.laya);
  const bool any_antara = std::any_of(composition.lines.begin(), composition.lines.end(),
                                      [](const CompositionLine& l) { return l.verse == Verse::Antara; });
  if (any_antara) {
    std::string verses;
    for (const CompositionLine& l : composition.lines)
      verses += (l.verse == Verse::Antara) ? 'a' : 's';
    out += "verses," + verses + "\n";
  }
  out += "\n";

  std::vector<std::string> vibhag_row(tala.beats_per_cycle);
  for (std::size_t v = 0; v < tala.vibhag_starts.size(); ++v)
    vibhag_row[tala.vibhag_starts[v] - 1] =
        vibhag_symbol(tala, static_cast<int>(v), tala.vibhag_starts[v]);

  for (const CompositionLine& line : composition.lines) {
    auto emit_row = [&](const char* tag, auto&& cell_text) {
      out += tag;
      for (int b = 0; b < tala.beats_per_cycle; ++b) {
        out += ',';
        out += csv_field(cell_text(b));
      }
      out += '\n';
    };
    emit_row("LYR", [&](int b) { return lyric_cell_text(line.cells[b]); });
    emit_row("VIB", [&](int b) { return vibhag_row[b]; });
    emit_row("ORN", [&](int b) { return line.cells[b].ornament; });
    emit_row("NOT", [&](int b) { return line.cells[b].note; });
  }
  return out;
}

std::vector<CanonicalEvent> canonical_events(const Composition& composition, int line_id) {
  const CompositionLine& line = composition.line(line_id);
  std::vector<CanonicalEvent> events;
  for (std::size_t b = 0; b < line.cells.size(); ++b) {
    const BeatCell& cell = line.cells[b];
    if (cell.kind != CellKind::Syllable) continue;
    const std::vector<std::string> note_tokens = split_whitespace(cell.note);
    const bool split_notes = note_tokens.size() == cell.syllables.size();
    for (std::size_t k = 0; k < cell.syllables.size(); ++k) {
      CanonicalEvent ev;
      ev.line_id = line_id;
      ev.cycle_beat = static_cast<int>(b) + 1;
      ev.sub_index = static_cast<int>(k);
      ev.sub_count = cell.subdivisions;
      ev.syllable = cell.syllables[k];
      ev.note = split_notes ? note_tokens[k] : cell.note;
      events.push_back(std::move(ev));
    }
  }
  return events;
}

std::vector<CanonicalEvent> canonical_events(const Composition& composition) {
  std::vector<CanonicalEvent> events;
  for (const CompositionLine& line : composition.lines) {
    std::vector<CanonicalEvent> line_events = canonical_events(composition, line.line_id);
    events.insert(events.end(), line_events.begin(), line_events.end());
  }
  return events;
}

std::vector<CanonicalEvent> half_cycle_events(const Composition& composition, int line_id,
                                              HalfCycle half) {
  const int split = second_half_begin(composition.tala);
  std::vector<CanonicalEvent> events = canonical_events(composition, line_id);
  std::erase_if(events, [&](const CanonicalEvent& ev) {
    const bool in_second = ev.cycle_beat >= split;
    return (half == HalfCycle::First) ? in_second : !in_second;
  });
  return events;
}

std::vector<std::string> half_cycle_syllables(const Composition& composition, int line_id,
                                              HalfCycle half) {
  std::vector<std::string> out;
  for (const CanonicalEvent& ev : half_cycle_events(composition, line_id, half))
    out.push_back(ev.syllable);
  return out;
}

}  // namespace matra
