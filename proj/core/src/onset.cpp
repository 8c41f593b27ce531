#include "matra/onset.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <tuple>

namespace matra {
namespace {

struct Candidate {
  double time;
  double value;
};

EvalReport combine_counts(std::size_t tp, std::size_t n_ref, std::size_t n_det, double tolerance) {
  EvalReport report;
  report.n_ref = n_ref;
  report.n_det = n_det;
  report.true_positives = tp;
  report.tolerance = tolerance;
  report.precision = n_det > 0 ? static_cast<double>(tp) / static_cast<double>(n_det)
                               : (n_ref == 0 ? 1.0 : 0.0);
  report.recall = n_ref > 0 ? static_cast<double>(tp) / static_cast<double>(n_ref)
                            : (n_det == 0 ? 1.0 : 0.0);
  report.f1 = (report.precision + report.recall > 0.0)
                  ? 2.0 * report.precision * report.recall / (report.precision + report.recall)
                  : 0.0;
  return report;
}

}  // namespace

void validate(const OnsetList& list) {
  for (std::size_t i = 0; i < list.times.size(); ++i) {
    if (list.times[i] < 0.0)
      raise(Errc::InvalidArgument, "onset times must be >= 0, got " +
                                       std::to_string(list.times[i]));
    if (i > 0 && list.times[i] <= list.times[i - 1])
      raise(Errc::InvalidArgument, "onset times must be strictly increasing near t=" +
                                       std::to_string(list.times[i]));
  }
}

OnsetList pick_peaks(const NoveltyCurve& novelty, double threshold, double min_separation) {
  if (novelty.hop <= 0) raise(Errc::InvalidArgument, "novelty curve has no timebase");
  if (min_separation < novelty.hop)
    raise(Errc::InvalidArgument, "min_separation must be >= the novelty hop");

  std::vector<Candidate> candidates;
  const std::vector<double>& v = novelty.values;
  for (std::size_t i = 1; i + 1 < v.size(); ++i) {
    if (v[i] >= threshold && v[i] > v[i - 1] && v[i] > v[i + 1])
      candidates.push_back({novelty.time(i), v[i]});
  }
  // Larger peaks claim their neighbourhood first; ties go to the earlier.
  std::stable_sort(candidates.begin(), candidates.end(), [](const Candidate& a, const Candidate& b) {
    return std::make_pair(-a.value, a.time) < std::make_pair(-b.value, b.time);
  });
  std::vector<double> accepted;
  for (const Candidate& c : candidates) {
    const bool clear = std::none_of(accepted.begin(), accepted.end(), [&](double t) {
      return std::abs(t - c.time) < min_separation;
    });
    if (clear) accepted.push_back(c.time);
  }
  std::sort(accepted.begin(), accepted.end());

  OnsetList out;
  out.times = std::move(accepted);
  out.source = OnsetSource::Detected;
  return out;
}

EvalReport evaluate(const OnsetList& detected, const OnsetList& reference, double tolerance) {
  validate(detected);
  validate(reference);
  if (tolerance < 0) raise(Errc::InvalidArgument, "tolerance must be >= 0");

  const std::vector<double>& det = detected.times;
  const std::vector<double>& ref = reference.times;

  // All pairs within the window, nearest first; ties broken by time so the
  // matching is deterministic.
  struct PairCandidate {
    double distance;
    std::size_t ref_index;
    std::size_t det_index;
  };
  std::vector<PairCandidate> pairs;
  for (std::size_t r = 0; r < ref.size(); ++r) {
    const auto lo = std::lower_bound(det.begin(), det.end(), ref[r] - tolerance);
    for (auto it = lo; it != det.end() && *it <= ref[r] + tolerance; ++it)
      pairs.push_back({std::abs(*it - ref[r]), r, static_cast<std::size_t>(it - det.begin())});
  }
  std::sort(pairs.begin(), pairs.end(), [&](const PairCandidate& a, const PairCandidate& b) {
    return std::make_tuple(a.distance, ref[a.ref_index], det[a.det_index]) <
           std::make_tuple(b.distance, ref[b.ref_index], det[b.det_index]);
  });

  std::vector<bool> ref_used(ref.size(), false), det_used(det.size(), false);
  std::vector<std::pair<double, double>> matched;
  for (const PairCandidate& p : pairs) {
    if (ref_used[p.ref_index] || det_used[p.det_index]) continue;
    ref_used[p.ref_index] = true;
    det_used[p.det_index] = true;
    matched.emplace_back(ref[p.ref_index], det[p.det_index]);
  }
  std::sort(matched.begin(), matched.end());

  EvalReport report = combine_counts(matched.size(), ref.size(), det.size(), tolerance);
  report.matched_pairs = std::move(matched);
  return report;
}

std::vector<OperatingPoint> sweep_operating_points(const NoveltyCurve& novelty,
                                                   const OnsetList& reference, double tolerance,
                                                   double min_separation, int n_thresholds) {
  const NoveltyCurve* curve = &novelty;
  const OnsetList* ref = &reference;
  return sweep_operating_points(std::span<const NoveltyCurve>(curve, 1),
                                std::span<const OnsetList>(ref, 1), tolerance, min_separation,
                                n_thresholds);
}

namespace {

EvalReport evaluate_at(std::span<const NoveltyCurve> curves, std::span<const OnsetList> references,
                       double threshold, double tolerance, double min_separation) {
  std::size_t tp = 0, n_ref = 0, n_det = 0;
  for (std::size_t i = 0; i < curves.size(); ++i) {
    const OnsetList det = pick_peaks(curves[i], threshold, min_separation);
    const EvalReport r = evaluate(det, references[i], tolerance);
    tp += r.true_positives;
    n_ref += r.n_ref;
    n_det += r.n_det;
  }
  return combine_counts(tp, n_ref, n_det, tolerance);
}

std::pair<double, double> value_range(std::span<const NoveltyCurve> curves) {
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();
  for (const NoveltyCurve& c : curves) {
    for (double v : c.values) {
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
  }
  if (!std::isfinite(lo) || !std::isfinite(hi)) raise(Errc::InvalidArgument, "empty novelty");
  return {lo, hi};
}

void check_sweep_inputs(std::span<const NoveltyCurve> curves,
                        std::span<const OnsetList> references) {
  if (curves.size() != references.size() || curves.empty())
    raise(Errc::InvalidArgument, "need one reference list per novelty curve");
  std::size_t total_ref = 0;
  for (const OnsetList& r : references) total_ref += r.times.size();
  if (total_ref == 0) raise(Errc::EmptyReference, "reference onset lists are all empty");
}

}  // namespace

std::vector<OperatingPoint> sweep_operating_points(std::span<const NoveltyCurve> curves,
                                                   std::span<const OnsetList> references,
                                                   double tolerance, double min_separation,
                                                   int n_thresholds) {
  check_sweep_inputs(curves, references);
  if (n_thresholds < 2) raise(Errc::InvalidArgument, "need at least 2 thresholds");
  const auto [lo, hi] = value_range(curves);

  std::vector<OperatingPoint> sweep;
  sweep.reserve(static_cast<std::size_t>(n_thresholds));
  for (int k = 0; k < n_thresholds; ++k) {
    const double threshold = hi - (hi - lo) * k / (n_thresholds - 1);
    OperatingPoint point;
    point.threshold = threshold;
    point.report = evaluate_at(curves, references, threshold, tolerance, min_separation);
    sweep.push_back(std::move(point));
  }
  return sweep;
}

std::size_t max_f1_index(std::span<const OperatingPoint> sweep) {
  if (sweep.empty()) raise(Errc::InvalidArgument, "empty sweep");
  std::size_t best = 0;
  for (std::size_t i = 1; i < sweep.size(); ++i)
    if (sweep[i].report.f1 > sweep[best].report.f1) best = i;
  return best;
}

OperatingPoint fixed_recall_point(std::span<const NoveltyCurve> curves,
                                  std::span<const OnsetList> references, double tolerance,
                                  double min_separation, double target_recall, int n_thresholds) {
  check_sweep_inputs(curves, references);
  const std::vector<OperatingPoint> sweep =
      sweep_operating_points(curves, references, tolerance, min_separation, n_thresholds);

  std::size_t crossing = sweep.size();
  for (std::size_t i = 0; i < sweep.size(); ++i) {
    if (sweep[i].report.recall >= target_recall) {
      crossing = i;
      break;
    }
  }
  if (crossing == sweep.size()) return sweep.back();  // target never reached
  if (crossing == 0) return sweep.front();

  // Bisect between the bracketing grid thresholds for the highest threshold
  // that still reaches the target.
  double lo_thr = sweep[crossing].threshold;        // recall >= target here
  double hi_thr = sweep[crossing - 1].threshold;    // recall < target here
  for (int iter = 0; iter < 48 && hi_thr - lo_thr > 0; ++iter) {
    const double mid = 0.5 * (lo_thr + hi_thr);
    if (mid <= lo_thr || mid >= hi_thr) break;
    const EvalReport r = evaluate_at(curves, references, mid, tolerance, min_separation);
    if (r.recall >= target_recall) lo_thr = mid;
    else hi_thr = mid;
  }
  OperatingPoint point;
  point.threshold = lo_thr;
  point.report = evaluate_at(curves, references, lo_thr, tolerance, min_separation);
  return point;
}

}  // namespace matra
