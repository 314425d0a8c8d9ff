#pragma once

#include <span>
#include <string>
#include <vector>

#include "cellflow/geometry.hpp"
#include "cellflow/segment_ledger.hpp"

namespace cellflow {

inline constexpr double kDefaultPixelSize = 0.319489;  // µm per pixel
inline constexpr double kDefaultFrameInterval = 2.5;   // minutes
inline constexpr double kDefaultHbar = 1.0;            // µm

/// Time-stamped track as delivered by the tracker (the "original curve").
struct Trajectory {
  std::string id;
  std::vector<Vec2> points;   // µm
  std::vector<double> times;  // minutes, frame index × frame_interval
  double frame_interval = kDefaultFrameInterval;

  std::size_t size() const { return points.size(); }
  /// Throws Error(InvalidInput) unless ≥2 points, equal lengths, strictly increasing times.
  void validate() const;
};

/// Resampled polyline being evolved. Grid points 0 and n+1 are the fixed
/// endpoints of the recorded track.
struct DiscreteCurve {
  std::vector<Vec2> points;
  double hbar = kDefaultHbar;

  std::size_t size() const { return points.size(); }
  /// Number of movable grid points n.
  std::size_t interior_count() const { return points.size() < 2 ? 0 : points.size() - 2; }
  /// h_i = |x_i − x_{i−1}| for i = 1..n+1; slot 0 is 0.
  std::vector<double> element_lengths() const;
  double length() const;
};

double polyline_length(std::span<const Vec2> points);

struct ResampleResult {
  DiscreteCurve curve;
  SegmentLedger ledger;
  std::vector<std::string> warnings;
};

/// Subdivides each recorded segment into ceil(length / hbar) equal elements.
/// Consecutive duplicate points are merged first; their time is credited to
/// the following segment.
ResampleResult resample(const Trajectory& trajectory, double hbar);

}  // namespace cellflow
