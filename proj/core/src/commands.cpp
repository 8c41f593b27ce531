#include "matra/commands.hpp"

#include <algorithm>
#include <ostream>
#include <vector>

#include "json.hpp"
#include "matra/io.hpp"

namespace matra::cli {
namespace {

template <typename F>
auto stage(const char* name, F&& fn) -> decltype(fn()) {
  try {
    return fn();
  } catch (const Error& e) {
    throw Error(e.code(), std::string("[") + name + "] " + e.what());
  }
}

NoveltyCurve compute_novelty(const AudioClip& raw, const PipelineConfig& config) {
  const AudioClip clip = resample(raw, config.resample_rate);
  const BiphasicKernel kernel =
      make_biphasic_kernel(config.rise_sigma, config.fall_sigma, config.separation, config.hop);
  if (config.model == "mfcc") {
    const FrameSeries coeffs =
        mfcc(clip, config.n_mels, config.n_mfcc, config.frame_len, config.hop);
    return novelty_mfcc(coeffs, kernel);
  }
  const FrameSeries energies =
      band_energies(clip, config.band_spec(), config.frame_len, config.hop);
  return novelty_subband(energies, kernel, config.band_weights);
}

double effective_threshold(const NoveltyCurve& curve, const PipelineConfig& config) {
  if (config.peak_threshold >= 0.0) return config.peak_threshold;
  const double top =
      curve.values.empty() ? 0.0 : *std::max_element(curve.values.begin(), curve.values.end());
  // The absolute floor keeps numerical ripple on silent input from counting
  // as peaks.
  return std::max(config.peak_threshold_rel * top, 1e-9);
}

std::string percent_line(const EvalReport& r) {
  return "precision recall f1 (%): " + format_double(100.0 * r.precision, 1) + " " +
         format_double(100.0 * r.recall, 1) + " " + format_double(100.0 * r.f1, 1);
}

std::string events_csv(const Composition& comp) {
  std::string out = "line_id,cycle_beat,sub_beat,syllable,note\n";
  for (const CanonicalEvent& ev : canonical_events(comp)) {
    out += std::to_string(ev.line_id) + "," + std::to_string(ev.cycle_beat) + "," +
           format_double(ev.sub_beat(), 6) + "," + csv_field(ev.syllable) + "," +
           csv_field(ev.note) + "\n";
  }
  return out;
}

struct AnalysisInputs {
  Composition composition;
  TalaGrid grid;
  std::vector<LabeledOnset> labels;
  std::vector<ScheduleEntry> schedule;
};

AnalysisInputs load_analysis_inputs(const path& notation, const path& labels, const path& anchors,
                                    const path& schedule) {
  AnalysisInputs in;
  in.composition = stage("notation", [&] {
    return parse_notation(read_text_file(notation), TalaSpec::teentaal());
  });
  in.grid = stage("grid", [&] {
    return build_grid(read_anchors_tsv(anchors), in.composition.tala);
  });
  in.labels = stage("labels", [&] { return read_labels_tsv(labels); });
  in.schedule = stage("schedule", [&] { return read_schedule_csv(schedule); });
  return in;
}

}  // namespace

void cmd_detect(const path& audio, const path& onsets_out, const path& novelty_out,
                const PipelineConfig& config, std::ostream& log, const path& features_out) {
  validate(config);
  const AudioClip raw = stage("audio", [&] { return read_wav(audio); });
  const NoveltyCurve novelty = stage("novelty", [&] { return compute_novelty(raw, config); });
  const OnsetList onsets =
      pick_peaks(novelty, effective_threshold(novelty, config), config.min_separation);

  AtomicFile onset_file(onsets_out);
  AtomicFile novelty_file(novelty_out);
  onset_file.write(onset_tsv(onsets));
  novelty_file.write(novelty_csv(novelty));
  if (!features_out.empty()) {
    const AudioClip clip = resample(raw, config.resample_rate);
    AtomicFile feature_file(features_out);
    feature_file.write(frames_csv(
        config.model == "mfcc"
            ? mfcc(clip, config.n_mels, config.n_mfcc, config.frame_len, config.hop)
            : band_energies(clip, config.band_spec(), config.frame_len, config.hop)));
    feature_file.commit();
  }
  onset_file.commit();
  novelty_file.commit();
  log << "detected " << onsets.times.size() << " onsets (" << config.model << ") from "
      << audio.string() << "\n";
}

EvalReport cmd_evaluate(const path& detected, const path& reference, double tolerance,
                        std::ostream& out, const path& json_out) {
  const OnsetList det =
      stage("detected", [&] { return read_onset_tsv(detected, OnsetSource::Detected); });
  const OnsetList ref =
      stage("reference", [&] { return read_onset_tsv(reference, OnsetSource::Annotated); });
  const EvalReport report = evaluate(det, ref, tolerance);
  out << "reference " << report.n_ref << "  detected " << report.n_det << "  matched "
      << report.true_positives << "\n"
      << percent_line(report) << "\n";
  if (!json_out.empty()) {
    nlohmann::json j = {
        {"n_ref", report.n_ref},         {"n_det", report.n_det},
        {"true_positives", report.true_positives}, {"precision", report.precision},
        {"recall", report.recall},       {"f1", report.f1},
        {"tolerance", report.tolerance},
    };
    AtomicFile f(json_out);
    f.write(j.dump(2) + "\n");
    f.commit();
  }
  return report;
}

void cmd_sweep(const path& audio, const path& reference, const path& sweep_out,
               const PipelineConfig& config, std::ostream& out) {
  validate(config);
  const AudioClip raw = stage("audio", [&] { return read_wav(audio); });
  const OnsetList ref =
      stage("reference", [&] { return read_onset_tsv(reference, OnsetSource::Annotated); });
  const NoveltyCurve novelty = stage("novelty", [&] { return compute_novelty(raw, config); });

  const std::vector<OperatingPoint> sweep =
      sweep_operating_points(novelty, ref, config.tolerance, config.min_separation);
  if (!sweep_out.empty()) {
    std::string csv = "threshold,precision,recall,f1,true_positives,n_det,n_ref\n";
    for (const OperatingPoint& p : sweep) {
      csv += format_double(p.threshold, 6) + "," + format_double(p.report.precision, 6) + "," +
             format_double(p.report.recall, 6) + "," + format_double(p.report.f1, 6) + "," +
             std::to_string(p.report.true_positives) + "," + std::to_string(p.report.n_det) + "," +
             std::to_string(p.report.n_ref) + "\n";
    }
    AtomicFile f(sweep_out);
    f.write(csv);
    f.commit();
  }

  const OperatingPoint& best = sweep[max_f1_index(sweep)];
  out << "max F1:          threshold " << format_double(best.threshold, 4) << "  "
      << percent_line(best.report) << "\n";
  const OperatingPoint fixed =
      fixed_recall_point({&novelty, 1}, {&ref, 1}, config.tolerance, config.min_separation,
                         config.target_recall);
  out << "fixed recall >= " << format_double(100.0 * config.target_recall, 1) << ": threshold "
      << format_double(fixed.threshold, 4) << "  " << percent_line(fixed.report) << "\n";
}

void cmd_parse_notation(const path& notation, const path& events_out, std::ostream& out) {
  const Composition comp = stage("notation", [&] {
    return parse_notation(read_text_file(notation), TalaSpec::teentaal());
  });
  const Composition reparsed = parse_notation(serialize_notation(comp), comp.tala);
  const std::size_t n_events = canonical_events(comp).size();
  out << "parsed '" << comp.title << "' (" << comp.raga << "): " << comp.lines.size()
      << " lines, " << n_events << " canonical syllables, round-trip "
      << (reparsed == comp ? "ok" : "MISMATCH") << "\n";
  if (!events_out.empty()) {
    AtomicFile f(events_out);
    f.write(events_csv(comp));
    f.commit();
  }
}

void cmd_build_grid(const path& anchors, const path& grid_out, std::ostream& out) {
  const TalaGrid grid = stage("grid", [&] {
    return build_grid(read_anchors_tsv(anchors), TalaSpec::teentaal());
  });
  if (!grid_out.empty()) {
    AtomicFile f(grid_out);
    f.write(grid_csv(grid));
    f.commit();
  }
  const std::vector<TempoPoint> tempo = grid.tempo_profile();
  double lo = tempo.front().matra_per_minute, hi = lo;
  for (const TempoPoint& t : tempo) {
    lo = std::min(lo, t.matra_per_minute);
    hi = std::max(hi, t.matra_per_minute);
  }
  out << grid.beats().size() << " grid beats over " << tempo.size() << " half-cycles, tempo "
      << format_double(lo, 1) << "-" << format_double(hi, 1) << " matra/min\n";
}

void cmd_align(const path& notation, const path& labels, const path& anchors,
               const path& schedule, const path& alignment_out, const PipelineConfig& config,
               std::ostream& out) {
  validate(config);
  const AnalysisInputs in = load_analysis_inputs(notation, labels, anchors, schedule);
  const AlignmentMap map = stage("align", [&] {
    return align_performance(in.composition, in.schedule, in.labels, in.grid,
                             config.align_params());
  });
  if (!alignment_out.empty()) {
    AtomicFile f(alignment_out);
    f.write(alignment_csv(map));
    f.commit();
  }
  out << "aligned " << map.pairs.size() << "/" << map.events.size() << " canonical events, "
      << map.unmatched_labels.size() << " unmatched labels in windows\n";
}

void cmd_analyze(const path& notation, const path& labels, const path& anchors,
                 const path& schedule, const path& out_dir, const PipelineConfig& config,
                 std::ostream& out) {
  validate(config);
  const AnalysisInputs in = load_analysis_inputs(notation, labels, anchors, schedule);
  const AlignmentMap map = stage("align", [&] {
    return align_performance(in.composition, in.schedule, in.labels, in.grid,
                             config.align_params());
  });
  const std::vector<DeviationRecord> records =
      stage("timing", [&] { return deviations(map, in.grid); });
  const Fingerprint fp = fingerprint(records, in.composition.tala.beats_per_cycle);
  const ShiftHistogram hist = structural_shift_summary(records);

  std::filesystem::create_directories(out_dir);
  AtomicFile alignment_file(out_dir / "alignment.csv");
  AtomicFile deviation_file(out_dir / "deviations.csv");
  AtomicFile fingerprint_file(out_dir / "fingerprint.csv");
  AtomicFile shift_file(out_dir / "shift_histogram.csv");
  alignment_file.write(alignment_csv(map));
  deviation_file.write(deviations_csv(records));
  fingerprint_file.write(fingerprint_csv(fp));
  shift_file.write(shift_histogram_csv(hist));
  alignment_file.commit();
  deviation_file.commit();
  fingerprint_file.commit();
  shift_file.commit();

  out << "aligned " << map.pairs.size() << "/" << map.events.size() << " events; wrote "
      << records.size() << " deviation records to " << out_dir.string() << "\n";
}

void cmd_synth(const path& notation, const path& out_dir, const SynthParams& params,
               std::ostream& out) {
  const Composition comp = stage("notation", [&] {
    return parse_notation(read_text_file(notation), TalaSpec::teentaal());
  });
  SynthOutput synth_out = stage("synth", [&] {
    SynthOutput s = synthesize(comp, params.tempo, params.model, params.cycles);
    if (params.insert_prob > 0 || params.delete_prob > 0)
      s = degrade(s, params.insert_prob, params.delete_prob, params.degrade_seed);
    return s;
  });

  std::filesystem::create_directories(out_dir);
  AtomicFile audio_file(out_dir / "audio.wav");
  AtomicFile labels_file(out_dir / "labels.tsv");
  AtomicFile anchors_file(out_dir / "anchors.tsv");
  AtomicFile schedule_file(out_dir / "schedule.csv");
  AtomicFile truth_alignment_file(out_dir / "truth_alignment.csv");
  AtomicFile truth_deviation_file(out_dir / "truth_deviations.csv");
  audio_file.write(wav_bytes(synth_out.audio, 16));
  labels_file.write(labels_tsv(synth_out.labels));
  anchors_file.write(anchors_tsv(synth_out.anchors));
  schedule_file.write(schedule_csv(synth_out.schedule));
  truth_alignment_file.write(alignment_csv(synth_out.truth));
  truth_deviation_file.write(deviations_csv(synth_out.truth_deviations));
  audio_file.commit();
  labels_file.commit();
  anchors_file.commit();
  schedule_file.commit();
  truth_alignment_file.commit();
  truth_deviation_file.commit();

  out << "synthesized " << synth_out.labels.size() << " labeled onsets over " << params.cycles
      << " cycles at " << format_double(params.tempo, 1) << " matra/min into "
      << out_dir.string() << "\n";
}

}  // namespace matra::cli
