#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "cellflow/self_intersection.hpp"
#include "cellflow/trajectory.hpp"

namespace cellflow {

/// Parameters of the evolution x_t = −δ k N + λ w N + α T.
///
/// The scheme runs in dimensionless coordinates x / length_scale. The
/// parameter defaults (δ, λ, ω, τ) are calibrated for curves living in a
/// unit-sized frame, so microscopy tracks are divided by a reference frame
/// width (1000 pixels at 0.319489 µm) before evolving and scaled back after.
struct EvolutionParams {
  double delta_min = 0.003;  // curvature weight after the loops are gone (and constant-mode δ)
  double delta_max = 0.01;   // curvature weight inside self-intersections
  double lambda_max = 20.0;  // attraction weight
  double tau = 1e-6;
  double omega = 50.0;  // tangential redistribution speed
  int extra_steps = 50;
  bool adaptive = true;
  long max_iterations = 200000;
  double length_scale = 1000.0 * kDefaultPixelSize;  // µm per evolution unit
  // After relocation, points closer than this fraction of hbar are merged and
  // elements longer than the factor times hbar are split. Pinned segment ends
  // otherwise let tangential flow squeeze neighbouring elements to nothing.
  double min_element_fraction = 0.1;
  double max_element_factor = 2.0;

  /// Throws Error(InvalidInput) outside the documented ranges.
  void validate() const;
};

/// Per-step quantities. Element arrays (curvature, normal_velocity,
/// element_lengths) are indexed 1..n+1; point arrays 0..n+1.
struct StepState {
  std::vector<double> element_lengths;
  std::vector<double> curvature;
  std::vector<double> normal_velocity;
  std::vector<double> tangential_velocity;
  std::vector<double> w;
  double total_length = 0.0;
};

/// k_i = sgn(h_{i−1} ∧ h_{i+1}) · arccos(ĥ_{i−1} · ĥ_{i+1}) / (2 h_i) for
/// elements i = 2..n, copied to the first and last element. Needs n ≥ 2.
std::vector<double> compute_curvature(const DiscreteCurve& curve);

/// Asymptotically uniform redistribution:
///   α_i = α_{i−1} + h_i k_i β_i − h_i ⟨kβ⟩ + ω (L/(n+1) − h_i),  α_0 = 0,
/// with ⟨kβ⟩ = Σ h_l k_l β_l / L, so α_{n+1} = 0 up to rounding (then forced).
std::vector<double> compute_tangential_velocity(std::span<const double> element_lengths,
                                                std::span<const double> curvature,
                                                std::span<const double> normal_velocity, double omega);

/// β on element i from the averaged per-point δ, λ, w of its two endpoints.
std::vector<double> element_normal_velocity(std::span<const double> curvature, const PointParams& params,
                                            std::span<const double> w);

StepState compute_step_state(const DiscreteCurve& curve, const PointParams& params, std::span<const double> w,
                             double omega);

/// Tridiagonal system for the n movable points; both coordinates share the matrix.
struct TridiagonalSystem {
  std::vector<double> lower;   // coefficient of x_{i−1}
  std::vector<double> diag;    // coefficient of x_i
  std::vector<double> upper;   // coefficient of x_{i+1}
  std::vector<double> rhs_x;   // includes fixed-endpoint contributions
  std::vector<double> rhs_y;
  std::vector<bool> upwind;    // row uses the first-order implicit upwind form

  std::size_t size() const { return diag.size(); }
};

/// Interior angle ∠(x_{i−1}, x_i, x_{i+1}) in degrees below which a row switches to upwind.
inline constexpr double kUpwindAngleDegrees = 120.0;

/// True when grid point i is a sharp corner (interior angle < 120°) or an
/// adjacent element is shorter than 1e−12·hbar.
bool needs_upwind(std::span<const Vec2> points, std::size_t i, double hbar);

/// Inflow-implicit / outflow-explicit rows with the implicit upwind form at
/// sharp corners.
TridiagonalSystem assemble_system(const DiscreteCurve& curve, const StepState& state, const PointParams& params,
                                  double tau);

/// Thomas algorithm; the matrix must be diagonally dominant.
std::vector<double> solve_tridiagonal(std::span<const double> lower, std::span<const double> diag,
                                      std::span<const double> upper, std::span<const double> rhs);

/// One time step; endpoints are copied bit for bit. Throws Error(Numerical)
/// on non-finite coefficients or results.
DiscreteCurve evolve_step(const DiscreteCurve& curve, const StepState& state, const PointParams& params, double tau);

struct SpanRecord {
  long step = 0;
  IntersectionSpan span;
};

struct SmoothingOptions {
  bool record_spans = false;
  /// Called after every step with the step index and the new curve (evolution units × length_scale = µm).
  std::function<void(long, const DiscreteCurve&)> observer;
};

struct SmoothingResult {
  DiscreteCurve curve;  // µm
  SegmentLedger ledger;  // lengths in µm
  long steps = 0;
  long steps_with_intersections = 0;
  bool converged = false;
  std::size_t final_intersections = 0;
  std::vector<SpanRecord> span_log;
  std::vector<std::string> warnings;
};

/// Full smoothing loop: thin → detect → choose δ, λ → update the segment
/// ledger → evolve. Once a step detects no self-intersection, `extra_steps`
/// more steps run with δ_min and λ_max everywhere.
SmoothingResult smooth_trajectory(const Trajectory& trajectory, const EvolutionParams& params, double hbar,
                                  const SmoothingOptions& options = {});

}  // namespace cellflow
