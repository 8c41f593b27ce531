#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "matra/align.hpp"
#include "matra/dsp.hpp"

namespace matra {

// Every knob of the analysis pipeline in one flat struct. The text form is
// one "key = value" per line; unknown keys are rejected so a config file
// cannot silently drift from the binary reading it.
struct PipelineConfig {
  double frame_len = 0.030;
  double hop = 0.010;
  std::vector<std::pair<double, double>> bands = BandSpec::default_three_band().bands;
  std::vector<double> band_weights = {0.25, 1.0, 0.25};
  int n_mels = 40;
  int n_mfcc = 13;
  double rise_sigma = 0.020;
  double fall_sigma = 0.020;
  double separation = 0.040;
  double peak_threshold = -1.0;      // absolute; negative selects relative mode
  double peak_threshold_rel = 0.10;  // fraction of the curve maximum
  double min_separation = 0.050;
  double tolerance = 0.050;
  double target_recall = 0.80;
  double gap_penalty = 0.4;
  double shift_weight = 0.25;
  double max_shift = 2.0;
  double resample_rate = 16000.0;
  std::string model = "subband";  // or "mfcc"

  BandSpec band_spec() const { return BandSpec{bands}; }
  AlignParams align_params() const { return {gap_penalty, shift_weight, max_shift}; }
};

// The recognized keys, in dump order.
std::vector<std::string> config_keys();

// Applies one key/value; raises ConfigUnknownKey / ConfigBadValue.
void apply_config_value(PipelineConfig& config, std::string_view key, std::string_view value);

void validate(const PipelineConfig& config);

PipelineConfig parse_config(const std::string& text);
PipelineConfig load_config(const std::filesystem::path& path);
std::string dump_config(const PipelineConfig& config);

}  // namespace matra
