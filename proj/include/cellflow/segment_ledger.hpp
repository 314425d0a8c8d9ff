#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "cellflow/geometry.hpp"

namespace cellflow {

struct DiscreteCurve;

/// State of one originally recorded segment while the curve evolves.
///
/// The segment's model length follows the curvature-driven length law with
/// the tangential velocity switched off; its endpoints on the evolving curve
/// are the grid indices `start_idx` / `end_idx`.
struct Segment {
  double length = 0.0;           // model length L_j
  double discrete_length = 0.0;  // L_j rescaled so the ledger sums to the curve length
  double ratio = 0.0;            // L_j / sum of all L
  std::size_t start_idx = 0;
  std::size_t end_idx = 0;
  bool disappeared = false;
  double time_budget = 0.0;  // minutes
  Vec2 origin_start;         // recorded endpoints of the segment (µm)
  Vec2 origin_end;
  std::size_t record_start = 0;  // indices into the recorded trajectory
  std::size_t record_end = 0;
};

struct SegmentLedger {
  std::vector<Segment> segments;

  std::size_t size() const { return segments.size(); }
  bool empty() const { return segments.empty(); }
  Segment& operator[](std::size_t j) { return segments[j]; }
  const Segment& operator[](std::size_t j) const { return segments[j]; }

  bool all_disappeared() const;
  std::size_t live_count() const;
  double total_discrete_length() const;
};

/// Displacements from evolving grid points to their partners on the
/// recorded polyline, and their normal projections w_i.
struct AttractingField {
  std::vector<Vec2> targets;  // partner point x⁰_i on the recorded polyline
  std::vector<Vec2> vectors;  // x⁰_i − x_i
  std::vector<double> w;      // (x⁰_i − x_i) · N_i, zero at the fixed endpoints
};

/// Advances every live model length by τ·Σ h_i k_i β_i over the elements the
/// segment owns. Segments falling below the mean element length vanish and
/// never come back. Element arrays are indexed 1..n+1 (slot 0 unused).
void evolve_segment_lengths(SegmentLedger& ledger, std::span<const double> element_lengths,
                            std::span<const double> curvature, std::span<const double> normal_velocity,
                            double tau);

/// Sets ratio r_j = L_j / ΣL and discrete length Ld_j = r_j · curve_length.
/// The last live segment takes the rounding residue so Σ Ld_j is exact.
/// Throws Error(Degenerate) when every segment has disappeared.
void normalize_discrete_lengths(SegmentLedger& ledger, double curve_length);

/// Walks the cumulative element lengths of `curve` and places each segment
/// end at arclength Σ_{l≤j} Ld_l. Mid-element targets pull the nearer grid
/// point of that element onto the exact position (a new point is inserted
/// when neither neighbour may move). Afterwards L_j ← Ld_j.
void relocate_endpoints(SegmentLedger& ledger, DiscreteCurve& curve);

/// Pairs grid points with uniformly spread partners on their recorded
/// segment; points where a run of segments collapsed are attracted to the
/// run's length-weighted centre of mass.
AttractingField build_attracting_field(const SegmentLedger& ledger, const DiscreteCurve& curve);

/// Discrete unit normal N_i = ((x_{i+1} − x_{i−1}) / (h_i + h_{i+1}))^⊥ at interior points.
Vec2 discrete_normal(std::span<const Vec2> points, std::size_t i);

/// Index of the segment owning grid point i: I(u_{j−1}) < i ≤ I(u_j); point
/// 0 goes to the first live segment. Disappeared segments own no points.
std::vector<int> point_segment_ids(const SegmentLedger& ledger, std::size_t point_count);

}  // namespace cellflow
