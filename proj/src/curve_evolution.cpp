#include "cellflow/curve_evolution.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "cellflow/error.hpp"

namespace cellflow {

void EvolutionParams::validate() const {
  auto fail = [](const char* what) { throw Error(ErrorCode::InvalidInput, what); };
  if (!(delta_min >= 0.0 && delta_min < delta_max)) fail("need 0 <= delta_min < delta_max");
  if (!(lambda_max > 0.0)) fail("lambda_max must be positive");
  if (!(tau > 0.0)) fail("tau must be positive");
  if (!(omega >= 0.0)) fail("omega must be non-negative");
  if (extra_steps < 0) fail("extra_steps must be non-negative");
  if (max_iterations < 0) fail("max_iterations must be non-negative");
  if (!(length_scale > 0.0)) fail("length_scale must be positive");
  if (!(min_element_fraction >= 0.0 && min_element_fraction < 0.5)) fail("min_element_fraction must lie in [0, 0.5)");
  if (!(max_element_factor > 1.0)) fail("max_element_factor must exceed 1");
}

std::vector<double> compute_curvature(const DiscreteCurve& curve) {
  const auto& P = curve.points;
  const std::size_t n = curve.interior_count();
  if (n < 2) throw Error(ErrorCode::InvalidInput, "curvature needs at least two interior grid points");
  std::vector<double> k(n + 2, 0.0);
  for (std::size_t i = 2; i <= n; ++i) {
    const Vec2 before = P[i - 1] - P[i - 2];  // h_{i−1}
    const Vec2 after = P[i + 1] - P[i];       // h_{i+1}
    const double h = distance(P[i - 1], P[i]);
    const double denom = norm(before) * norm(after);
    const double c = std::clamp(dot(before, after) / denom, -1.0, 1.0);
    const double sign = cross(before, after) >= 0.0 ? 1.0 : -1.0;
    k[i] = sign * std::acos(c) / (2.0 * h);
  }
  k[1] = k[2];
  k[n + 1] = k[n];
  return k;
}

std::vector<double> compute_tangential_velocity(std::span<const double> element_lengths,
                                                std::span<const double> curvature,
                                                std::span<const double> normal_velocity, double omega) {
  const std::size_t points = element_lengths.size();
  std::vector<double> alpha(points, 0.0);
  if (points < 3) return alpha;
  const std::size_t elements = points - 1;
  double total = 0.0;
  double source = 0.0;
  for (std::size_t i = 1; i <= elements; ++i) {
    total += element_lengths[i];
    source += element_lengths[i] * curvature[i] * normal_velocity[i];
  }
  const double mean_source = source / total;
  const double uniform = total / static_cast<double>(elements);
  for (std::size_t i = 1; i + 1 < points; ++i) {
    const double h = element_lengths[i];
    alpha[i] = alpha[i - 1] + h * curvature[i] * normal_velocity[i] - h * mean_source + omega * (uniform - h);
  }
  alpha[points - 1] = 0.0;
  return alpha;
}

std::vector<double> element_normal_velocity(std::span<const double> curvature, const PointParams& params,
                                            std::span<const double> w) {
  std::vector<double> beta(curvature.size(), 0.0);
  for (std::size_t i = 1; i < curvature.size(); ++i) {
    const double delta = 0.5 * (params.delta[i - 1] + params.delta[i]);
    const double lambda = 0.5 * (params.lambda[i - 1] + params.lambda[i]);
    const double attract = 0.5 * (w[i - 1] + w[i]);
    beta[i] = -delta * curvature[i] + lambda * attract;
  }
  return beta;
}

StepState compute_step_state(const DiscreteCurve& curve, const PointParams& params, std::span<const double> w,
                             double omega) {
  StepState state;
  state.element_lengths = curve.element_lengths();
  state.total_length = std::accumulate(state.element_lengths.begin(), state.element_lengths.end(), 0.0);
  state.w.assign(w.begin(), w.end());
  if (curve.interior_count() >= 2) {
    state.curvature = compute_curvature(curve);
  } else {
    state.curvature.assign(curve.size(), 0.0);
  }
  state.normal_velocity = element_normal_velocity(state.curvature, params, w);
  state.tangential_velocity =
      compute_tangential_velocity(state.element_lengths, state.curvature, state.normal_velocity, omega);
  return state;
}

bool needs_upwind(std::span<const Vec2> points, std::size_t i, double hbar) {
  const Vec2 back = points[i - 1] - points[i];
  const Vec2 ahead = points[i + 1] - points[i];
  const double lb = norm(back);
  const double la = norm(ahead);
  const double tiny = 1e-12 * hbar;
  if (lb < tiny || la < tiny) return true;
  // Interior angle below 120° ⇔ cos(angle) > cos(120°) = −1/2.
  return dot(back, ahead) / (lb * la) > -0.5;
}

TridiagonalSystem assemble_system(const DiscreteCurve& curve, const StepState& state, const PointParams& params,
                                  double tau) {
  const auto& P = curve.points;
  const std::size_t n = curve.interior_count();
  TridiagonalSystem sys;
  sys.lower.resize(n);
  sys.diag.resize(n);
  sys.upper.resize(n);
  sys.rhs_x.resize(n);
  sys.rhs_y.resize(n);
  sys.upwind.resize(n);

  for (std::size_t i = 1; i <= n; ++i) {
    const std::size_t r = i - 1;
    const double hl = state.element_lengths[i];
    const double hr = state.element_lengths[i + 1];
    const double a = state.tangential_velocity[i];
    const double delta = params.delta[i];
    const double mass = (hl + hr) / (2.0 * tau);
    const double in_left = std::max(-a, 0.0);
    const double out_left = std::min(-a, 0.0);
    const double in_right = std::max(a, 0.0);
    const double out_right = std::min(a, 0.0);
    const Vec2 attract = perp((P[i + 1] - P[i - 1]) * 0.5) * (params.lambda[i] * state.w[i]);

    const bool upwind = needs_upwind(P, i, curve.hbar);
    const double advect = upwind ? 1.0 : 0.5;
    sys.upwind[r] = upwind;
    sys.lower[r] = -delta / hl - advect * in_left;
    sys.upper[r] = -delta / hr - advect * in_right;
    sys.diag[r] = mass + delta / hl + delta / hr + advect * (in_left + in_right);
    Vec2 rhs = P[i] * mass + attract;
    if (!upwind) {
      rhs -= (P[i] - P[i + 1]) * (0.5 * out_right);
      rhs -= (P[i] - P[i - 1]) * (0.5 * out_left);
    }
    if (i == 1) rhs -= P[0] * sys.lower[r];
    if (i == n) rhs -= P[n + 1] * sys.upper[r];
    sys.rhs_x[r] = rhs.x;
    sys.rhs_y[r] = rhs.y;

    if (!std::isfinite(sys.lower[r]) || !std::isfinite(sys.upper[r]) || !std::isfinite(sys.diag[r]) ||
        !std::isfinite(rhs.x) || !std::isfinite(rhs.y)) {
      std::ostringstream msg;
      msg << "non-finite matrix entry at grid point " << i << " (h_i=" << hl << ", h_i+1=" << hr
          << "); the element collapsed";
      throw Error(ErrorCode::Numerical, msg.str());
    }
  }
  return sys;
}

std::vector<double> solve_tridiagonal(std::span<const double> lower, std::span<const double> diag,
                                      std::span<const double> upper, std::span<const double> rhs) {
  const std::size_t n = diag.size();
  std::vector<double> c(n, 0.0);
  std::vector<double> d(n, 0.0);
  if (n == 0) return d;
  c[0] = n > 1 ? upper[0] / diag[0] : 0.0;
  d[0] = rhs[0] / diag[0];
  for (std::size_t i = 1; i < n; ++i) {
    const double m = diag[i] - lower[i] * c[i - 1];
    c[i] = i + 1 < n ? upper[i] / m : 0.0;
    d[i] = (rhs[i] - lower[i] * d[i - 1]) / m;
  }
  for (std::size_t i = n - 1; i-- > 0;) d[i] -= c[i] * d[i + 1];
  return d;
}

DiscreteCurve evolve_step(const DiscreteCurve& curve, const StepState& state, const PointParams& params, double tau) {
  DiscreteCurve next = curve;
  const std::size_t n = curve.interior_count();
  if (n == 0) return next;
  const TridiagonalSystem sys = assemble_system(curve, state, params, tau);
  const auto xs = solve_tridiagonal(sys.lower, sys.diag, sys.upper, sys.rhs_x);
  const auto ys = solve_tridiagonal(sys.lower, sys.diag, sys.upper, sys.rhs_y);
  for (std::size_t i = 1; i <= n; ++i) {
    if (!std::isfinite(xs[i - 1]) || !std::isfinite(ys[i - 1])) {
      throw Error(ErrorCode::Numerical, "non-finite grid point after the tridiagonal solve");
    }
    next.points[i] = {xs[i - 1], ys[i - 1]};
  }
  return next;
}

namespace {

DiscreteCurve to_physical(const DiscreteCurve& curve, double scale, const Vec2& first, const Vec2& last) {
  DiscreteCurve out = curve;
  for (auto& p : out.points) p *= scale;
  out.hbar *= scale;
  out.points.front() = first;
  out.points.back() = last;
  return out;
}

}  // namespace

SmoothingResult smooth_trajectory(const Trajectory& trajectory, const EvolutionParams& params, double hbar,
                                  const SmoothingOptions& options) {
  params.validate();
  auto sampled = resample(trajectory, hbar);
  SmoothingResult result;
  result.warnings = std::move(sampled.warnings);

  const double scale = params.length_scale;
  const Vec2 first = sampled.curve.points.front();
  const Vec2 last = sampled.curve.points.back();
  const SegmentLedger physical_ledger = sampled.ledger;

  DiscreteCurve curve = sampled.curve;
  for (auto& p : curve.points) p = p / scale;
  curve.hbar = hbar / scale;
  SegmentLedger ledger = sampled.ledger;
  for (auto& seg : ledger.segments) {
    seg.length /= scale;
    seg.discrete_length /= scale;
    seg.origin_start = seg.origin_start / scale;
    seg.origin_end = seg.origin_end / scale;
  }

  long step = 0;
  long extra_left = -1;  // ≥ 0 once the curve is free of self-intersections
  for (;;) {
    if (extra_left == 0) {
      result.converged = true;
      break;
    }
    if (step >= params.max_iterations) {
      result.converged = false;
      std::ostringstream msg;
      msg << "trajectory " << trajectory.id << ": iteration cap " << params.max_iterations << " reached";
      result.warnings.push_back(msg.str());
      break;
    }
    thin_points(curve, ledger, curve.hbar);

    std::vector<IntersectionSpan> spans;
    if (extra_left < 0) {
      spans = detect_intersections(curve.points, curve.hbar);
      if (spans.empty()) {
        extra_left = params.extra_steps;
        if (extra_left == 0) continue;
      } else {
        ++result.steps_with_intersections;
        if (options.record_spans) {
          for (const auto& s : spans) result.span_log.push_back({step, s});
        }
      }
    }

    PointParams point_params;
    if (extra_left < 0 && params.adaptive) {
      point_params = adaptive_params(spans, curve.size(), params.delta_max, params.lambda_max);
    } else {
      point_params = constant_params(curve.size(), params.delta_min, params.lambda_max);
    }

    const AttractingField field = build_attracting_field(ledger, curve);
    const StepState state = compute_step_state(curve, point_params, field.w, params.omega);
    evolve_segment_lengths(ledger, state.element_lengths, state.curvature, state.normal_velocity, params.tau);
    curve = evolve_step(curve, state, point_params, params.tau);
    normalize_discrete_lengths(ledger, curve.length());
    relocate_endpoints(ledger, curve);
    respace_points(curve, ledger, params.min_element_fraction * curve.hbar, params.max_element_factor * curve.hbar);

    ++step;
    if (extra_left > 0) --extra_left;
    if (options.observer) options.observer(step, to_physical(curve, scale, first, last));
  }

  result.steps = step;
  result.final_intersections = detect_intersections(curve.points, curve.hbar).size();
  result.curve = to_physical(curve, scale, first, last);
  result.ledger = ledger;
  for (std::size_t j = 0; j < ledger.size(); ++j) {
    auto& seg = result.ledger[j];
    seg.length *= scale;
    seg.discrete_length *= scale;
    seg.origin_start = physical_ledger[j].origin_start;
    seg.origin_end = physical_ledger[j].origin_end;
  }
  return result;
}

}  // namespace cellflow
