#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "cellflow/segment_ledger.hpp"
#include "cellflow/self_intersection.hpp"
#include "cellflow/trajectory.hpp"

namespace cellflow {

enum class ExtractionMethod { DisappearedSegments, SelfIntersections, WholeTrajectory };

std::string to_string(ExtractionMethod method);

inline constexpr std::size_t kMinRandomPoints = 5;

/// Contiguous slice of a recorded trajectory classified as random motion.
struct RandomSubTrajectory {
  std::string source_id;
  ExtractionMethod method = ExtractionMethod::DisappearedSegments;
  std::size_t first_record = 0;  // index of points[0] in the source trajectory
  std::vector<Vec2> points;
  std::vector<double> times;
  double frame_interval = kDefaultFrameInterval;

  std::size_t size() const { return points.size(); }
  /// K: number of frame intervals between first and last sample.
  std::size_t final_lag() const;
};

/// Maximal runs of disappeared segments, widened by one recorded point on
/// each side; slices shorter than 5 points are dropped.
std::vector<RandomSubTrajectory> extract_by_disappearance(const SegmentLedger& ledger, const Trajectory& trajectory);

/// Segments covered by each self-intersection span of the resampled
/// (unsmoothed) trajectory. A span starting on a shared segment endpoint
/// begins with the later segment; one ending on a shared endpoint stops
/// with the earlier segment.
std::vector<RandomSubTrajectory> extract_by_self_intersection(const Trajectory& trajectory, double hbar);

/// Same mapping with precomputed spans and ledger (grid indices of the resampled curve).
std::vector<RandomSubTrajectory> extract_by_self_intersection(const Trajectory& trajectory,
                                                              const SegmentLedger& resampled_ledger,
                                                              std::span<const IntersectionSpan> spans);

/// The whole trajectory as one random sample (if it has ≥5 points).
std::vector<RandomSubTrajectory> whole_trajectory(const Trajectory& trajectory);

struct MsdSeries {
  std::vector<double> abscissae;  // minutes
  std::vector<double> values;     // µm²
  std::vector<std::size_t> counts;
  double alpha = 0.0;
  double hurst = 0.0;
  double intercept = 0.0;  // natural-log intercept of the fit
};

/// ρ(t) = (1/N_t) Σ |x_i(t) − x_i⁰|² with every clock restarted at the sub-trajectory's first point.
MsdSeries eamsd(std::span<const RandomSubTrajectory> subs);

/// Largest lag n with n ≤ (K + 1) / 4.
std::size_t max_valid_lag(const RandomSubTrajectory& sub);

/// ρ̄(nΔT) averaged over the windows with both samples present; nullopt when
/// the lag is outside 1 ≤ n ≤ (K+1)/4.
std::optional<double> tamsd(const RandomSubTrajectory& sub, std::size_t lag);

/// Same without the validity bound (still nullopt if no window exists).
std::optional<double> tamsd_unchecked(const RandomSubTrajectory& sub, std::size_t lag);

/// Ensemble average of TAMSDs over lags valid for ≥ N/4 sub-trajectories.
/// Throws Error(InsufficientData) when no lag survives.
MsdSeries eatamsd(std::span<const RandomSubTrajectory> subs);

struct HurstFit {
  double alpha = 0.0;
  double hurst = 0.0;
  double intercept = 0.0;
  std::size_t points_used = 0;
};

/// Ordinary least squares of ln ρ against ln t; non-positive values are
/// skipped. Throws Error(InsufficientData) with fewer than two usable lags.
HurstFit fit_hurst(const MsdSeries& series);

/// fit_hurst and store the result back into the series.
void apply_fit(MsdSeries& series);

}  // namespace cellflow
