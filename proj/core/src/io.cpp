#include "matra/io.hpp"

#include <algorithm>
#include <cctype>
#include <cerrno>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <random>
#include <sstream>
#include <system_error>

namespace matra {

// ---------------------------------------------------------------------------
// textio primitives

std::string trim(std::string_view s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return std::string(s.substr(b, e - b));
}

std::string to_lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

std::vector<std::string> split_whitespace(std::string_view s) {
  std::vector<std::string> out;
  std::size_t i = 0;
  while (i < s.size()) {
    while (i < s.size() && std::isspace(static_cast<unsigned char>(s[i]))) ++i;
    std::size_t j = i;
    while (j < s.size() && !std::isspace(static_cast<unsigned char>(s[j]))) ++j;
    if (j > i) out.emplace_back(s.substr(i, j - i));
    i = j;
  }
  return out;
}

std::vector<std::string> split_csv_line(std::string_view line) {
  std::vector<std::string> fields;
  std::string cur;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          cur += '"';
          ++i;
        } else {
          quoted = false;
        }
      } else {
        cur += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      fields.push_back(trim(cur));
      cur.clear();
    } else {
      cur += c;
    }
  }
  fields.push_back(trim(cur));
  return fields;
}

std::string csv_field(std::string_view value) {
  if (value.find_first_of(",\"\n") == std::string_view::npos) return std::string(value);
  std::string out = "\"";
  for (char c : value) {
    if (c == '"') out += "\"\"";
    else out += c;
  }
  out += '"';
  return out;
}

std::vector<std::string> split_lines(std::string_view text) {
  std::vector<std::string> lines;
  std::size_t start = 0;
  for (std::size_t i = 0; i <= text.size(); ++i) {
    if (i == text.size() || text[i] == '\n') {
      std::string_view line = text.substr(start, i - start);
      if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
      lines.emplace_back(line);
      start = i + 1;
    }
  }
  if (!lines.empty() && lines.back().empty()) lines.pop_back();
  return lines;
}

double parse_double(std::string_view token, std::string_view what) {
  const std::string t = trim(token);
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), value);
  if (ec != std::errc() || ptr != t.data() + t.size())
    raise(Errc::MalformedInput, std::string(what) + ": expected a number, got '" + t + "'");
  return value;
}

long parse_long(std::string_view token, std::string_view what) {
  const std::string t = trim(token);
  long value = 0;
  const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), value);
  if (ec != std::errc() || ptr != t.data() + t.size())
    raise(Errc::MalformedInput, std::string(what) + ": expected an integer, got '" + t + "'");
  return value;
}

std::string format_double(double value, int decimals) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*f", decimals, value);
  return buf;
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) raise(Errc::IoError, "cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

AtomicFile::AtomicFile(std::filesystem::path target) : target_(std::move(target)) {
  static std::mt19937_64 rng{std::random_device{}()};
  temp_ = target_;
  temp_ += ".tmp" + std::to_string(rng() & 0xFFFFFF);
}

AtomicFile::~AtomicFile() {
  if (!committed_ && written_) {
    std::error_code ec;
    std::filesystem::remove(temp_, ec);
  }
}

void AtomicFile::write(std::string_view content) {
  std::ofstream out(temp_, std::ios::binary | std::ios::trunc);
  if (!out) raise(Errc::IoError, "cannot open " + temp_.string() + " for writing");
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
  out.close();
  if (!out) raise(Errc::IoError, "short write to " + temp_.string());
  written_ = true;
}

void AtomicFile::commit() {
  if (!written_) raise(Errc::IoError, "nothing written for " + target_.string());
  std::error_code ec;
  std::filesystem::rename(temp_, target_, ec);
  if (ec) raise(Errc::IoError, "cannot move " + temp_.string() + " to " + target_.string() +
                                   ": " + ec.message());
  committed_ = true;
}

// ---------------------------------------------------------------------------
// typed formats

namespace {

struct TsvRow {
  double time = 0.0;
  std::string label;
};

std::vector<TsvRow> read_tsv_rows(const std::filesystem::path& path) {
  const std::string text = read_text_file(path);
  std::vector<TsvRow> rows;
  const std::vector<std::string> lines = split_lines(text);
  for (std::size_t i = 0; i < lines.size(); ++i) {
    if (trim(lines[i]).empty() || lines[i][0] == '#') continue;
    const std::string where = path.string() + ":" + std::to_string(i + 1);
    const std::size_t tab = lines[i].find('\t');
    TsvRow row;
    if (tab == std::string::npos) {
      row.time = parse_double(lines[i], where);
    } else {
      row.time = parse_double(lines[i].substr(0, tab), where);
      row.label = trim(lines[i].substr(tab + 1));
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace

OnsetList read_onset_tsv(const std::filesystem::path& path, OnsetSource source) {
  OnsetList list;
  list.source = source;
  for (const TsvRow& row : read_tsv_rows(path)) list.times.push_back(row.time);
  try {
    validate(list);
  } catch (const Error& e) {
    raise(Errc::MalformedInput, path.string() + ": " + e.what());
  }
  return list;
}

std::string onset_tsv(const OnsetList& list) {
  std::string out;
  for (double t : list.times) out += format_double(t) + "\n";
  return out;
}

std::vector<LabeledOnset> read_labels_tsv(const std::filesystem::path& path) {
  std::vector<LabeledOnset> labels;
  for (TsvRow& row : read_tsv_rows(path)) {
    if (row.label.empty())
      raise(Errc::MalformedInput, path.string() + ": labeled onset at t=" +
                                      format_double(row.time, 3) + " has no syllable");
    labels.push_back({row.time, std::move(row.label)});
  }
  for (std::size_t i = 1; i < labels.size(); ++i)
    if (labels[i].time <= labels[i - 1].time)
      raise(Errc::MalformedInput, path.string() + ": onset times must increase strictly");
  return labels;
}

std::string labels_tsv(std::span<const LabeledOnset> labels) {
  std::string out;
  for (const LabeledOnset& l : labels) out += format_double(l.time) + "\t" + l.syllable + "\n";
  return out;
}

std::vector<TalaAnchor> read_anchors_tsv(const std::filesystem::path& path) {
  std::vector<std::pair<double, AnchorKind>> raw;
  for (const TsvRow& row : read_tsv_rows(path)) {
    const std::string label = to_lower(row.label);
    if (label == "sam") raw.emplace_back(row.time, AnchorKind::Sam);
    else if (label == "khali") raw.emplace_back(row.time, AnchorKind::Khali);
    else
      raise(Errc::MalformedInput,
            path.string() + ": anchor label must be sam or khali, got '" + row.label + "'");
  }
  return number_anchors(raw);
}

std::string anchors_tsv(std::span<const TalaAnchor> anchors) {
  std::string out;
  for (const TalaAnchor& a : anchors)
    out += format_double(a.time) + "\t" + (a.kind == AnchorKind::Sam ? "sam" : "khali") + "\n";
  return out;
}

std::vector<ScheduleEntry> read_schedule_csv(const std::filesystem::path& path) {
  const std::vector<std::string> lines = split_lines(read_text_file(path));
  std::vector<ScheduleEntry> schedule;
  for (std::size_t i = 0; i < lines.size(); ++i) {
    if (trim(lines[i]).empty()) continue;
    const std::vector<std::string> fields = split_csv_line(lines[i]);
    if (i == 0 && !fields.empty() && to_lower(fields[0]) == "cycle_index") continue;  // header
    const std::string where = path.string() + ":" + std::to_string(i + 1);
    if (fields.size() != 3)
      raise(Errc::MalformedInput, where + ": expected cycle_index,line_id,half");
    ScheduleEntry entry;
    entry.cycle_index = static_cast<int>(parse_long(fields[0], where));
    entry.line_id = static_cast<int>(parse_long(fields[1], where));
    const std::string half = to_lower(fields[2]);
    if (half == "first") entry.half = HalfCycle::First;
    else if (half == "second") entry.half = HalfCycle::Second;
    else raise(Errc::MalformedInput, where + ": half must be 'first' or 'second'");
    schedule.push_back(entry);
  }
  return schedule;
}

std::string schedule_csv(std::span<const ScheduleEntry> schedule) {
  std::string out = "cycle_index,line_id,half\n";
  for (const ScheduleEntry& e : schedule)
    out += std::to_string(e.cycle_index) + "," + std::to_string(e.line_id) + "," +
           (e.half == HalfCycle::First ? "first" : "second") + "\n";
  return out;
}

std::string novelty_csv(const NoveltyCurve& curve) {
  std::string out = "time,novelty\n";
  for (std::size_t i = 0; i < curve.values.size(); ++i)
    out += format_double(curve.time(i), 6) + "," + format_double(curve.values[i], 9) + "\n";
  return out;
}

std::string frames_csv(const FrameSeries& frames) {
  std::string out = "time";
  for (std::size_t c = 0; c < frames.n_channels; ++c) out += ",ch" + std::to_string(c);
  out += "\n";
  for (std::size_t i = 0; i < frames.n_frames; ++i) {
    out += format_double(frames.frame_time(i), 6);
    for (std::size_t c = 0; c < frames.n_channels; ++c)
      out += "," + format_double(frames.at(i, c), 9);
    out += "\n";
  }
  return out;
}

std::string grid_csv(const TalaGrid& grid) {
  std::string out = "time,cycle_index,beat_index,matra\n";
  for (const GridBeat& b : grid.beats())
    out += format_double(b.time) + "," + std::to_string(b.cycle_index) + "," +
           std::to_string(b.beat_index) + "," + format_double(b.matra) + "\n";
  return out;
}

std::string alignment_csv(const AlignmentMap& map) {
  std::string out = "line_id,cycle_beat,sub_beat,canonical_syllable,onset_time,labeled_syllable,status\n";
  auto event_cols = [&](std::size_t ev) {
    const CanonicalEvent& e = map.events[ev].event;
    return std::to_string(e.line_id) + "," + std::to_string(e.cycle_beat) + "," +
           format_double(e.sub_beat(), 6) + "," + csv_field(e.syllable);
  };
  for (const AlignedPair& p : map.pairs) {
    const LabeledOnset& l = map.labels[p.label_index];
    out += event_cols(p.event_index) + "," + format_double(l.time) + "," +
           csv_field(l.syllable) + ",paired\n";
  }
  for (std::size_t ev : map.unmatched_events)
    out += event_cols(ev) + ",,,unmatched_canonical\n";
  for (std::size_t li : map.unmatched_labels) {
    const LabeledOnset& l = map.labels[li];
    out += ",,,," + format_double(l.time) + "," + csv_field(l.syllable) + ",unmatched_labeled\n";
  }
  return out;
}

std::string deviations_csv(std::span<const DeviationRecord> records) {
  std::string out = "line_id,cycle_index,beat_index,sub_beat,canonical_time,onset_time,deviation_matras\n";
  for (const DeviationRecord& r : records) {
    out += std::to_string(r.line_id) + "," + std::to_string(r.cycle_index) + "," +
           std::to_string(r.beat_index) + "," + format_double(r.sub_beat, 6) + "," +
           format_double(r.canonical_time) + "," + format_double(r.onset_time) + "," +
           format_double(r.deviation_matras) + "\n";
  }
  return out;
}

std::vector<DeviationRecord> read_deviations_csv(const std::filesystem::path& path) {
  const std::vector<std::string> lines = split_lines(read_text_file(path));
  std::vector<DeviationRecord> records;
  for (std::size_t i = 0; i < lines.size(); ++i) {
    if (trim(lines[i]).empty()) continue;
    if (i == 0 && to_lower(lines[i]).starts_with("line_id")) continue;
    const std::string where = path.string() + ":" + std::to_string(i + 1);
    const std::vector<std::string> f = split_csv_line(lines[i]);
    if (f.size() != 7) raise(Errc::MalformedInput, where + ": expected 7 columns");
    DeviationRecord r;
    r.line_id = static_cast<int>(parse_long(f[0], where));
    r.cycle_index = static_cast<int>(parse_long(f[1], where));
    r.beat_index = static_cast<int>(parse_long(f[2], where));
    r.sub_beat = parse_double(f[3], where);
    r.canonical_time = parse_double(f[4], where);
    r.onset_time = parse_double(f[5], where);
    r.deviation_matras = parse_double(f[6], where);
    records.push_back(r);
  }
  return records;
}

std::string fingerprint_csv(const Fingerprint& fp) {
  std::string out = "beat_index,mean,std,count\n";
  for (std::size_t b = 0; b < fp.bins.size(); ++b) {
    const FingerprintBin& bin = fp.bins[b];
    out += std::to_string(b + 1) + ",";
    if (bin.count > 0)
      out += format_double(bin.mean) + "," + format_double(bin.stddev);
    else
      out += ",";
    out += "," + std::to_string(bin.count) + "\n";
  }
  return out;
}

std::string shift_histogram_csv(const ShiftHistogram& hist) {
  std::string out = "shift_matras,count\n";
  out += "<" + std::to_string(ShiftHistogram::kMinShift) + "," + std::to_string(hist.underflow) + "\n";
  for (int s = ShiftHistogram::kMinShift; s <= ShiftHistogram::kMaxShift; ++s)
    out += std::to_string(s) + "," + std::to_string(hist.at_shift(s)) + "\n";
  out += ">" + std::to_string(ShiftHistogram::kMaxShift) + "," + std::to_string(hist.overflow) + "\n";
  return out;
}

}  // namespace matra
