#include <iostream>
#include <map>
#include <string>

#include "CLI11.hpp"
#include "matra/commands.hpp"
#include "matra/config.hpp"
#include "matra/textio.hpp"

namespace {

// Config resolution order: defaults, then --config file, then per-key flags.
struct ConfigCli {
  std::string config_path;
  std::string dump_path;
  std::map<std::string, std::string> overrides;

  void add_options(CLI::App* cmd) {
    cmd->add_option("--config", config_path, "Config file: one 'key = value' per line");
    cmd->add_option("--dump-config", dump_path, "Write the effective config to this path");
    for (const std::string& key : matra::config_keys()) {
      cmd->add_option_function<std::string>(
          "--" + key,
          [this, key](const std::string& value) { overrides[key] = value; },
          "Override config key '" + key + "'");
    }
  }

  matra::PipelineConfig resolve() const {
    matra::PipelineConfig config;
    if (!config_path.empty()) config = matra::load_config(config_path);
    for (const auto& [key, value] : overrides) matra::apply_config_value(config, key, value);
    matra::validate(config);
    if (!dump_path.empty()) {
      matra::AtomicFile f(dump_path);
      f.write(matra::dump_config(config));
      f.commit();
    }
    return config;
  }
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"matra: syllable-onset detection and expressive-timing analysis\n"
               "for Hindustani vocal performances on the tala grid"};
  app.require_subcommand(1);

  // detect
  auto* detect = app.add_subcommand("detect", "Detect syllable onsets in a vocals WAV");
  std::string detect_audio, detect_onsets, detect_novelty, detect_features;
  detect->add_option("audio", detect_audio, "Input WAV (vocals)")->required();
  detect->add_option("--onsets", detect_onsets, "Output onset TSV")->required();
  detect->add_option("--novelty", detect_novelty, "Output novelty CSV")->required();
  detect->add_option("--features", detect_features, "Optional feature dump CSV");
  ConfigCli detect_cfg;
  detect_cfg.add_options(detect);
  detect->callback([&] {
    matra::cli::cmd_detect(detect_audio, detect_onsets, detect_novelty, detect_cfg.resolve(),
                           std::cout, detect_features);
  });

  // evaluate
  auto* evaluate = app.add_subcommand("evaluate", "Score detected onsets against a reference");
  std::string eval_det, eval_ref, eval_json;
  double eval_tolerance = 0.050;
  evaluate->add_option("detected", eval_det, "Detected onset TSV")->required();
  evaluate->add_option("reference", eval_ref, "Reference onset TSV")->required();
  evaluate->add_option("--tolerance", eval_tolerance, "Match tolerance in seconds");
  evaluate->add_option("--json", eval_json, "Also write a JSON report");
  evaluate->callback([&] {
    matra::cli::cmd_evaluate(eval_det, eval_ref, eval_tolerance, std::cout, eval_json);
  });

  // sweep
  auto* sweep = app.add_subcommand("sweep", "Sweep detection thresholds against a reference");
  std::string sweep_audio, sweep_ref, sweep_out;
  sweep->add_option("audio", sweep_audio, "Input WAV")->required();
  sweep->add_option("reference", sweep_ref, "Reference onset TSV")->required();
  sweep->add_option("--out", sweep_out, "Output sweep CSV");
  ConfigCli sweep_cfg;
  sweep_cfg.add_options(sweep);
  sweep->callback([&] {
    matra::cli::cmd_sweep(sweep_audio, sweep_ref, sweep_out, sweep_cfg.resolve(), std::cout);
  });

  // parse-notation
  auto* parse = app.add_subcommand("parse-notation", "Validate a bandish notation CSV");
  std::string parse_in, parse_events;
  parse->add_option("notation", parse_in, "Notation CSV")->required();
  parse->add_option("--events", parse_events, "Write canonical events CSV");
  parse->callback([&] { matra::cli::cmd_parse_notation(parse_in, parse_events, std::cout); });

  // build-grid
  auto* grid = app.add_subcommand("build-grid", "Interpolate the tala grid from sam/khali anchors");
  std::string grid_anchors, grid_out;
  grid->add_option("anchors", grid_anchors, "Anchor TSV (time, sam|khali)")->required();
  grid->add_option("--out", grid_out, "Output grid CSV");
  grid->callback([&] { matra::cli::cmd_build_grid(grid_anchors, grid_out, std::cout); });

  // align
  auto* align = app.add_subcommand("align", "Align labeled syllables to the canonical score");
  std::string align_notation, align_labels, align_anchors, align_schedule, align_out;
  align->add_option("notation", align_notation, "Notation CSV")->required();
  align->add_option("labels", align_labels, "Labeled onset TSV")->required();
  align->add_option("anchors", align_anchors, "Anchor TSV")->required();
  align->add_option("schedule", align_schedule, "Schedule CSV (cycle_index,line_id,half)")->required();
  align->add_option("--out", align_out, "Output alignment CSV");
  ConfigCli align_cfg;
  align_cfg.add_options(align);
  align->callback([&] {
    matra::cli::cmd_align(align_notation, align_labels, align_anchors, align_schedule, align_out,
                          align_cfg.resolve(), std::cout);
  });

  // analyze
  auto* analyze = app.add_subcommand("analyze", "Full pipeline: alignment + timing deviations");
  std::string an_notation, an_labels, an_anchors, an_schedule, an_outdir;
  analyze->add_option("notation", an_notation, "Notation CSV")->required();
  analyze->add_option("labels", an_labels, "Labeled onset TSV")->required();
  analyze->add_option("anchors", an_anchors, "Anchor TSV")->required();
  analyze->add_option("schedule", an_schedule, "Schedule CSV")->required();
  analyze->add_option("--out-dir", an_outdir, "Output directory")->required();
  ConfigCli analyze_cfg;
  analyze_cfg.add_options(analyze);
  analyze->callback([&] {
    matra::cli::cmd_analyze(an_notation, an_labels, an_anchors, an_schedule, an_outdir,
                            analyze_cfg.resolve(), std::cout);
  });

  // synth
  auto* synth = app.add_subcommand("synth", "Generate a synthetic performance with ground truth");
  std::string synth_notation, synth_outdir;
  matra::cli::SynthParams params;
  synth->add_option("notation", synth_notation, "Notation CSV")->required();
  synth->add_option("--out-dir", synth_outdir, "Output directory")->required();
  synth->add_option("--tempo", params.tempo, "Tempo in matra per minute");
  synth->add_option("--cycles", params.cycles, "Number of tala cycles");
  synth->add_option("--seed", params.model.seed, "Random seed");
  synth->add_option("--initial-lag", params.model.initial_lag, "Starting lag in matras");
  synth->add_option("--compression-beat", params.model.compression_onset_beat,
                    "Beat of the half-cycle by which the lag is absorbed");
  synth->add_option("--jitter", params.model.jitter_std, "Per-syllable jitter std in matras");
  synth->add_option("--shift-prob", params.model.structural_shift_prob,
                    "Probability of a one-matra structural shift per half-cycle");
  synth->add_option("--insert-prob", params.insert_prob, "Spurious label insertion probability");
  synth->add_option("--delete-prob", params.delete_prob, "True label deletion probability");
  synth->add_option("--degrade-seed", params.degrade_seed, "Seed for insert/delete degradation");
  synth->callback([&] {
    matra::cli::cmd_synth(synth_notation, synth_outdir, params, std::cout);
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  } catch (const matra::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
