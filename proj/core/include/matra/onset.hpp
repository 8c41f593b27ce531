#pragma once

#include <cstddef>
#include <span>
#include <utility>
#include <vector>

#include "matra/dsp.hpp"
#include "matra/error.hpp"

namespace matra {

enum class OnsetSource { Detected, Annotated };

struct OnsetList {
  std::vector<double> times;  // strictly increasing, seconds >= 0
  OnsetSource source = OnsetSource::Detected;
};

void validate(const OnsetList& list);

struct EvalReport {
  std::size_t n_ref = 0;
  std::size_t n_det = 0;
  std::size_t true_positives = 0;
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  double tolerance = 0.0;
  std::vector<std::pair<double, double>> matched_pairs;  // (ref_time, det_time)
};

// Strict local maxima at or above the threshold; of two qualifying peaks
// closer than min_separation the larger survives, ties going to the earlier.
OnsetList pick_peaks(const NoveltyCurve& novelty, double threshold, double min_separation);

// One-to-one matching within the tolerance window, greedy by nearest pair
// distance. Precision/recall read 1.0 when both lists are empty.
EvalReport evaluate(const OnsetList& detected, const OnsetList& reference, double tolerance);

struct OperatingPoint {
  double threshold = 0.0;
  EvalReport report;
};

// Evaluates pick_peaks over a descending grid of n_thresholds values spanning
// the novelty range. The corpus overload applies one global threshold across
// clips and aggregates counts.
std::vector<OperatingPoint> sweep_operating_points(const NoveltyCurve& novelty,
                                                   const OnsetList& reference, double tolerance,
                                                   double min_separation = 0.050,
                                                   int n_thresholds = 200);
std::vector<OperatingPoint> sweep_operating_points(std::span<const NoveltyCurve> curves,
                                                   std::span<const OnsetList> references,
                                                   double tolerance, double min_separation = 0.050,
                                                   int n_thresholds = 200);

// Operating-point selectors for the two reporting modes.
std::size_t max_f1_index(std::span<const OperatingPoint> sweep);

// The highest threshold whose recall still reaches the target, i.e. the first
// crossing in the descending sweep, refined by bisection between the
// bracketing grid thresholds so the recall lands just above the target. Falls
// back to the lowest-threshold point when the target is never reached.
OperatingPoint fixed_recall_point(std::span<const NoveltyCurve> curves,
                                  std::span<const OnsetList> references, double tolerance,
                                  double min_separation = 0.050, double target_recall = 0.80,
                                  int n_thresholds = 200);

}  // namespace matra
