#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>

#include "matra/config.hpp"
#include "matra/onset.hpp"
#include "matra/synth.hpp"

namespace matra::cli {

using std::filesystem::path;

// Each command reads its inputs, writes its outputs through temp-and-rename
// so failures leave nothing partial behind, and logs a short human summary.
// Errors surface as matra::Error with the offending stage and path in the
// message.

void cmd_detect(const path& audio, const path& onsets_out, const path& novelty_out,
                const PipelineConfig& config, std::ostream& log, const path& features_out = {});

EvalReport cmd_evaluate(const path& detected, const path& reference, double tolerance,
                        std::ostream& out, const path& json_out = {});

void cmd_sweep(const path& audio, const path& reference, const path& sweep_out,
               const PipelineConfig& config, std::ostream& out);

void cmd_parse_notation(const path& notation, const path& events_out, std::ostream& out);

void cmd_build_grid(const path& anchors, const path& grid_out, std::ostream& out);

void cmd_align(const path& notation, const path& labels, const path& anchors,
               const path& schedule, const path& alignment_out, const PipelineConfig& config,
               std::ostream& out);

void cmd_analyze(const path& notation, const path& labels, const path& anchors,
                 const path& schedule, const path& out_dir, const PipelineConfig& config,
                 std::ostream& out);

struct SynthParams {
  double tempo = 140.0;
  int cycles = 8;
  RubatoModel model;
  double insert_prob = 0.0;
  double delete_prob = 0.0;
  std::uint64_t degrade_seed = 99;
};

void cmd_synth(const path& notation, const path& out_dir, const SynthParams& params,
               std::ostream& out);

}  // namespace matra::cli
