#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "cellflow/geometry.hpp"

namespace cellflow {

struct DiscreteCurve;
struct SegmentLedger;

/// Grid-index range [first, last] of a self-intersecting part of the curve.
struct IntersectionSpan {
  std::size_t first = 0;
  std::size_t last = 0;
  friend bool operator==(const IntersectionSpan&, const IntersectionSpan&) = default;
};

/// Minimum index distance between two points sharing a cell for the pair to count.
inline constexpr std::size_t kMinIntersectionGap = 5;

struct DetectionStats {
  std::size_t cell_visits = 0;  // point grids: one per point per grid per pass; element grid: one per covered cell
  std::size_t pair_tests = 0;   // exact element-pair tests
};

/// Two hashed background grids with cell size 2·hbar, the second shifted by
/// hbar in both axes. Points j > i landing in a cell last stamped by i with
/// j − i > 4 are reported; overlapping pairs from both grids merge into
/// maximal spans, returned sorted.
std::vector<IntersectionSpan> detect_self_intersections(std::span<const Vec2> points, double hbar,
                                                        DetectionStats* stats = nullptr);

/// Sorts spans and fuses the overlapping ones.
std::vector<IntersectionSpan> merge_spans(std::vector<IntersectionSpan> spans);

/// Proper crossing of the closed segments [a, b] and [c, d] (touching does not count).
bool elements_cross(const Vec2& a, const Vec2& b, const Vec2& c, const Vec2& d);

/// Exact crossings between non-adjacent elements (broad phase on a hashed
/// grid of cell 2·hbar). A crossing of elements (i, i+1) and (j, j+1) is
/// reported as [i, j+1]; spans are merged. Catches the knots the point grid
/// misses: index gaps of at most 4, or elements that cross without two
/// points sharing a cell.
std::vector<IntersectionSpan> find_crossings(std::span<const Vec2> points, double hbar,
                                             DetectionStats* stats = nullptr);

/// The intersection test of the smoothing loop: both of the above, merged.
std::vector<IntersectionSpan> detect_intersections(std::span<const Vec2> points, double hbar,
                                                   DetectionStats* stats = nullptr);

/// Drops every second interior grid point when the mean element length is
/// below hbar/2. Fixed endpoints and segment endpoints recorded in the
/// ledger are kept; ledger indices are remapped. Returns true if thinned.
bool thin_points(DiscreteCurve& curve, SegmentLedger& ledger, double hbar);

/// Local clean-up after endpoint relocation: a grid point closer than
/// min_length to its predecessor is merged away (whichever of the two is not
/// a protected endpoint), and elements longer than max_length are split
/// evenly. Ledger indices are remapped. Returns true if the curve changed.
bool respace_points(DiscreteCurve& curve, SegmentLedger& ledger, double min_length, double max_length);

/// Per-grid-point smoothing weights.
struct PointParams {
  std::vector<double> delta;
  std::vector<double> lambda;
};

PointParams constant_params(std::size_t point_count, double delta, double lambda);

/// Full weight inside every span, six-step linear ramps on both sides and
/// zero elsewhere. Overlapping ramps combine by pointwise maximum; ramps are
/// clipped to the curve.
PointParams adaptive_params(std::span<const IntersectionSpan> spans, std::size_t point_count,
                            double delta_max, double lambda_max);

}  // namespace cellflow
