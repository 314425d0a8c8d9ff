#include "cellflow/segment_ledger.hpp"

#include <cmath>
#include <numeric>
#include <sstream>

#include "cellflow/error.hpp"
#include "cellflow/trajectory.hpp"

namespace cellflow {

bool SegmentLedger::all_disappeared() const { return live_count() == 0; }

std::size_t SegmentLedger::live_count() const {
  std::size_t live = 0;
  for (const auto& s : segments) live += s.disappeared ? 0 : 1;
  return live;
}

double SegmentLedger::total_discrete_length() const {
  double sum = 0.0;
  for (const auto& s : segments) sum += s.discrete_length;
  return sum;
}

void evolve_segment_lengths(SegmentLedger& ledger, std::span<const double> element_lengths,
                            std::span<const double> curvature, std::span<const double> normal_velocity,
                            double tau) {
  const std::size_t elements = element_lengths.size() - 1;
  if (elements == 0) return;
  const double total = std::accumulate(element_lengths.begin() + 1, element_lengths.end(), 0.0);
  const double h_mean = total / static_cast<double>(elements);

  for (auto& seg : ledger.segments) {
    if (seg.disappeared) continue;
    double rate = 0.0;
    for (std::size_t i = seg.start_idx + 1; i <= seg.end_idx; ++i) {
      rate += element_lengths[i] * curvature[i] * normal_velocity[i];
    }
    const double next = seg.length + tau * rate;
    if (!(next >= h_mean)) {
      seg.length = 0.0;
      seg.disappeared = true;
    } else {
      seg.length = next;
    }
  }
}

void normalize_discrete_lengths(SegmentLedger& ledger, double curve_length) {
  double sum = 0.0;
  for (const auto& seg : ledger.segments) sum += seg.length;
  if (!(sum > 0.0)) {
    throw Error(ErrorCode::Degenerate, "every segment disappeared; the curve degenerated");
  }
  std::size_t last_live = 0;
  double assigned = 0.0;
  for (std::size_t j = 0; j < ledger.size(); ++j) {
    auto& seg = ledger[j];
    seg.ratio = seg.length / sum;
    seg.discrete_length = seg.ratio * curve_length;
    if (seg.length > 0.0) last_live = j;
  }
  for (std::size_t j = 0; j < ledger.size(); ++j) {
    if (j != last_live) assigned += ledger[j].discrete_length;
  }
  ledger[last_live].discrete_length = curve_length - assigned;
}

void relocate_endpoints(SegmentLedger& ledger, DiscreteCurve& curve) {
  const auto& P = curve.points;
  const std::size_t count = P.size();
  const std::size_t M = ledger.size();
  if (M == 0 || count < 2) return;

  std::vector<double> prefix(count, 0.0);
  for (std::size_t i = 1; i < count; ++i) prefix[i] = prefix[i - 1] + distance(P[i - 1], P[i]);
  const double total = prefix.back();
  const double eps = 1e-12 * std::max(total, 1e-300);

  // Cumulative targets of the inner segment ends.
  std::vector<double> cumulative(M, 0.0);
  double run = 0.0;
  for (std::size_t j = 0; j < M; ++j) {
    run += ledger[j].discrete_length;
    cumulative[j] = run;
  }
  if (M >= 2 && cumulative[M - 2] > total + 1e-9 * std::max(1.0, total)) {
    std::ostringstream msg;
    msg << "segment walk overshoots the curve (" << cumulative[M - 2] << " > " << total << ")";
    throw Error(ErrorCode::Internal, msg.str());
  }

  std::vector<Vec2> out;
  out.reserve(count + M);
  out.push_back(P[0]);
  std::vector<std::size_t> ends(M, 0);
  std::size_t prev_end = 0;
  bool last_movable = false;  // out.back() is an unmoved interior grid point no segment ends on
  std::size_t next = 0;       // next segment whose end gets placed (0..M−2; the last ends on the final point)

  auto place_disappeared = [&] {
    while (next + 1 < M && ledger[next].ratio == 0.0) ends[next++] = prev_end;
  };

  for (std::size_t k = 1; k < count; ++k) {
    const bool last_element = k + 1 == count;
    bool consumed = false;    // P[k] was already emitted at a relocated position
    bool lands_on_k = false;  // some segment ends exactly on P[k]
    for (;;) {
      place_disappeared();
      if (next + 1 >= M) break;
      const double target = cumulative[next];
      if (!last_element && target > prefix[k] + eps) break;
      if (std::abs(target - prefix[k]) <= eps || (last_element && target >= prefix[k] - eps)) {
        lands_on_k = true;
        prev_end = ends[next++] = out.size();  // index P[k] is about to receive
        continue;
      }
      const double extent = prefix[k] - prefix[k - 1];
      const double t = extent > 0.0 ? (target - prefix[k - 1]) / extent : 0.0;
      const Vec2 landing = lerp(P[k - 1], P[k], t);
      bool has_later_target = false;
      for (std::size_t q = next + 1; q + 1 < M; ++q) {
        if (ledger[q].ratio == 0.0) continue;
        has_later_target = cumulative[q] < prefix[k] - eps;
        break;
      }
      const bool can_move_prev = last_movable;
      const bool can_move_next = !last_element && !consumed && !has_later_target;
      const bool prefer_prev = t <= 0.5;
      if (can_move_prev && (prefer_prev || !can_move_next)) {
        out.back() = landing;
      } else if (can_move_next) {
        out.push_back(landing);
        consumed = true;
      } else {
        out.push_back(landing);  // neither neighbour may move: insert a grid point
      }
      prev_end = ends[next++] = out.size() - 1;
      last_movable = false;
    }
    if (!consumed || lands_on_k) {
      out.push_back(P[k]);
      last_movable = !last_element && !lands_on_k;
    }
  }
  // Segments after the last live one collapse onto the final point.
  for (; next + 1 < M; ++next) ends[next] = out.size() - 1;
  ends[M - 1] = out.size() - 1;

  std::size_t start = 0;
  for (std::size_t j = 0; j < M; ++j) {
    auto& seg = ledger[j];
    seg.start_idx = start;
    seg.end_idx = std::max(ends[j], start);
    start = seg.end_idx;
    seg.length = seg.discrete_length;
  }
  curve.points = std::move(out);
}

Vec2 discrete_normal(std::span<const Vec2> points, std::size_t i) {
  const double h_left = distance(points[i - 1], points[i]);
  const double h_right = distance(points[i], points[i + 1]);
  const double denom = h_left + h_right;
  if (!(denom > 0.0)) return {};
  return perp((points[i + 1] - points[i - 1]) / denom);
}

AttractingField build_attracting_field(const SegmentLedger& ledger, const DiscreteCurve& curve) {
  const auto& P = curve.points;
  const std::size_t count = P.size();
  AttractingField field;
  field.targets = P;
  field.vectors.assign(count, Vec2{});
  field.w.assign(count, 0.0);

  for (const auto& seg : ledger.segments) {
    if (seg.disappeared || seg.end_idx <= seg.start_idx) continue;
    const double span = static_cast<double>(seg.end_idx - seg.start_idx);
    for (std::size_t i = seg.start_idx; i <= seg.end_idx && i < count; ++i) {
      field.targets[i] = lerp(seg.origin_start, seg.origin_end, static_cast<double>(i - seg.start_idx) / span);
    }
  }
  // Collapsed runs attract their merged point to the run's centre of mass.
  for (std::size_t j = 0; j < ledger.size();) {
    if (!ledger[j].disappeared) {
      ++j;
      continue;
    }
    Vec2 weighted;
    double weight = 0.0;
    const std::size_t at = ledger[j].start_idx;
    for (; j < ledger.size() && ledger[j].disappeared; ++j) {
      const double len = distance(ledger[j].origin_start, ledger[j].origin_end);
      weighted += (ledger[j].origin_start + ledger[j].origin_end) * (0.5 * len);
      weight += len;
    }
    if (at < count && weight > 0.0) field.targets[at] = weighted / weight;
  }

  for (std::size_t i = 0; i < count; ++i) field.vectors[i] = field.targets[i] - P[i];
  for (std::size_t i = 1; i + 1 < count; ++i) field.w[i] = dot(field.vectors[i], discrete_normal(P, i));
  return field;
}

std::vector<int> point_segment_ids(const SegmentLedger& ledger, std::size_t point_count) {
  std::vector<int> ids(point_count, -1);
  bool first = true;
  for (std::size_t j = 0; j < ledger.size(); ++j) {
    const auto& seg = ledger[j];
    if (seg.disappeared || seg.end_idx <= seg.start_idx) continue;
    if (first && seg.start_idx < point_count) ids[seg.start_idx] = static_cast<int>(j);
    first = false;
    for (std::size_t i = seg.start_idx + 1; i <= seg.end_idx && i < point_count; ++i) ids[i] = static_cast<int>(j);
  }
  return ids;
}

}  // namespace cellflow
