#include "cellflow/trajectory.hpp"

#include <cmath>
#include <sstream>

#include "cellflow/error.hpp"

namespace cellflow {

void Trajectory::validate() const {
  if (points.size() != times.size()) {
    throw Error(ErrorCode::InvalidInput, "trajectory " + id + ": points and times differ in length");
  }
  if (points.size() < 2) {
    throw Error(ErrorCode::InvalidInput, "trajectory " + id + ": needs at least 2 points");
  }
  for (std::size_t i = 1; i < times.size(); ++i) {
    if (!(times[i] > times[i - 1])) {
      throw Error(ErrorCode::InvalidInput, "trajectory " + id + ": times must increase strictly");
    }
  }
  if (!(frame_interval > 0.0)) {
    throw Error(ErrorCode::InvalidInput, "trajectory " + id + ": frame interval must be positive");
  }
}

double polyline_length(std::span<const Vec2> points) {
  double total = 0.0;
  for (std::size_t i = 1; i < points.size(); ++i) total += distance(points[i - 1], points[i]);
  return total;
}

std::vector<double> DiscreteCurve::element_lengths() const {
  std::vector<double> h(points.size(), 0.0);
  for (std::size_t i = 1; i < points.size(); ++i) h[i] = distance(points[i - 1], points[i]);
  return h;
}

double DiscreteCurve::length() const { return polyline_length(points); }

ResampleResult resample(const Trajectory& trajectory, double hbar) {
  trajectory.validate();
  if (!(hbar > 0.0)) throw Error(ErrorCode::InvalidInput, "hbar must be positive");

  ResampleResult out;
  out.curve.hbar = hbar;

  // First occurrence of each run of identical consecutive points.
  std::vector<std::size_t> kept;
  kept.push_back(0);
  std::size_t merged = 0;
  for (std::size_t i = 1; i < trajectory.size(); ++i) {
    if (trajectory.points[i] == trajectory.points[kept.back()]) {
      ++merged;
      continue;
    }
    kept.push_back(i);
  }
  if (merged > 0) {
    std::ostringstream msg;
    msg << "trajectory " << trajectory.id << ": merged " << merged << " duplicate point(s)";
    out.warnings.push_back(msg.str());
  }
  if (kept.size() < 2) {
    throw Error(ErrorCode::InvalidInput, "trajectory " + trajectory.id + ": all points coincide");
  }

  auto& pts = out.curve.points;
  pts.push_back(trajectory.points[kept[0]]);
  for (std::size_t s = 0; s + 1 < kept.size(); ++s) {
    const Vec2 a = trajectory.points[kept[s]];
    const Vec2 b = trajectory.points[kept[s + 1]];
    const double len = distance(a, b);
    // A tiny slack keeps lengths that are an exact multiple of hbar from
    // picking up an extra subdivision through rounding.
    const auto pieces = static_cast<std::size_t>(std::max(1.0, std::ceil(len / hbar - 1e-9)));

    Segment seg;
    seg.length = len;
    seg.discrete_length = len;
    seg.start_idx = pts.size() - 1;
    for (std::size_t k = 1; k < pieces; ++k) {
      pts.push_back(lerp(a, b, static_cast<double>(k) / static_cast<double>(pieces)));
    }
    pts.push_back(b);
    seg.end_idx = pts.size() - 1;
    seg.origin_start = a;
    seg.origin_end = b;
    seg.record_start = kept[s];
    // The last segment also absorbs trailing duplicates of the final point.
    seg.record_end = (s + 2 == kept.size()) ? trajectory.size() - 1 : kept[s + 1];
    seg.time_budget = trajectory.times[seg.record_end] - trajectory.times[seg.record_start];
    out.ledger.segments.push_back(seg);
  }

  const double total = out.curve.length();
  for (auto& seg : out.ledger.segments) seg.ratio = total > 0.0 ? seg.length / total : 0.0;
  return out;
}

}  // namespace cellflow
