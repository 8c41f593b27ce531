#pragma once

#include <filesystem>
#include <span>
#include <vector>

#include "matra/align.hpp"
#include "matra/dsp.hpp"
#include "matra/grid.hpp"
#include "matra/onset.hpp"
#include "matra/textio.hpp"
#include "matra/timing.hpp"

namespace matra {

// Onset and anchor files share one physical format: "time<TAB>label" rows,
// times in seconds, the label column optional for detected onsets.

OnsetList read_onset_tsv(const std::filesystem::path& path, OnsetSource source);
std::string onset_tsv(const OnsetList& list);

std::vector<LabeledOnset> read_labels_tsv(const std::filesystem::path& path);
std::string labels_tsv(std::span<const LabeledOnset> labels);

// Anchor labels are "sam" / "khali", case-insensitive.
std::vector<TalaAnchor> read_anchors_tsv(const std::filesystem::path& path);
std::string anchors_tsv(std::span<const TalaAnchor> anchors);

// Schedule CSV: header "cycle_index,line_id,half", half being first|second.
std::vector<ScheduleEntry> read_schedule_csv(const std::filesystem::path& path);
std::string schedule_csv(std::span<const ScheduleEntry> schedule);

// Plot-ready exports.
std::string novelty_csv(const NoveltyCurve& curve);
std::string frames_csv(const FrameSeries& frames);
std::string grid_csv(const TalaGrid& grid);
std::string alignment_csv(const AlignmentMap& map);
std::string deviations_csv(std::span<const DeviationRecord> records);
std::string fingerprint_csv(const Fingerprint& fp);
std::string shift_histogram_csv(const ShiftHistogram& hist);

std::vector<DeviationRecord> read_deviations_csv(const std::filesystem::path& path);

}  // namespace matra
