#include "cellflow/self_intersection.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <unordered_map>

#include "cellflow/error.hpp"
#include "cellflow/segment_ledger.hpp"
#include "cellflow/trajectory.hpp"

namespace cellflow {

namespace {

constexpr long kUnvisited = -1;

std::uint64_t cell_key(const Vec2& p, double offset, double cell) {
  const auto cx = static_cast<std::int64_t>(std::floor((p.x - offset) / cell));
  const auto cy = static_cast<std::int64_t>(std::floor((p.y - offset) / cell));
  return (static_cast<std::uint64_t>(static_cast<std::uint32_t>(cx)) << 32) |
         static_cast<std::uint64_t>(static_cast<std::uint32_t>(cy));
}

void scan_grid(std::span<const Vec2> points, double offset, double cell, std::vector<IntersectionSpan>& pairs,
               DetectionStats* stats) {
  std::unordered_map<std::uint64_t, long> stamps;
  stamps.reserve(points.size());
  for (const auto& p : points) stamps[cell_key(p, offset, cell)] = kUnvisited;
  for (std::size_t j = 0; j < points.size(); ++j) {
    long& stamp = stamps[cell_key(points[j], offset, cell)];
    if (stamp != kUnvisited && j - static_cast<std::size_t>(stamp) >= kMinIntersectionGap) {
      pairs.push_back({static_cast<std::size_t>(stamp), j});
    }
    stamp = static_cast<long>(j);
  }
  if (stats) stats->cell_visits += 2 * points.size();
}

}  // namespace

std::vector<IntersectionSpan> detect_self_intersections(std::span<const Vec2> points, double hbar,
                                                        DetectionStats* stats) {
  if (!(hbar > 0.0)) throw Error(ErrorCode::InvalidInput, "hbar must be positive");
  std::vector<IntersectionSpan> pairs;
  if (points.size() < 2) return pairs;
  const double cell = 2.0 * hbar;
  scan_grid(points, 0.0, cell, pairs, stats);
  scan_grid(points, hbar, cell, pairs, stats);

  return merge_spans(std::move(pairs));
}

std::vector<IntersectionSpan> merge_spans(std::vector<IntersectionSpan> spans) {
  std::sort(spans.begin(), spans.end(),
            [](const auto& a, const auto& b) { return a.first != b.first ? a.first < b.first : a.last < b.last; });
  std::vector<IntersectionSpan> merged;
  for (const auto& s : spans) {
    if (!merged.empty() && s.first <= merged.back().last) {
      merged.back().last = std::max(merged.back().last, s.last);
    } else {
      merged.push_back(s);
    }
  }
  return merged;
}

bool elements_cross(const Vec2& a, const Vec2& b, const Vec2& c, const Vec2& d) {
  const double d1 = cross(b - a, c - a);
  const double d2 = cross(b - a, d - a);
  const double d3 = cross(d - c, a - c);
  const double d4 = cross(d - c, b - c);
  return ((d1 > 0 && d2 < 0) || (d1 < 0 && d2 > 0)) && ((d3 > 0 && d4 < 0) || (d3 < 0 && d4 > 0));
}

std::vector<IntersectionSpan> find_crossings(std::span<const Vec2> points, double hbar, DetectionStats* stats) {
  if (!(hbar > 0.0)) throw Error(ErrorCode::InvalidInput, "hbar must be positive");
  std::vector<IntersectionSpan> spans;
  if (points.size() < 4) return spans;
  const double cell = 2.0 * hbar;
  std::unordered_map<std::uint64_t, std::vector<std::size_t>> buckets;
  buckets.reserve(2 * points.size());
  auto coord = [cell](double v) { return static_cast<std::int64_t>(std::floor(v / cell)); };
  for (std::size_t j = 0; j + 1 < points.size(); ++j) {
    const Vec2& c = points[j];
    const Vec2& d = points[j + 1];
    for (auto cx = coord(std::min(c.x, d.x)); cx <= coord(std::max(c.x, d.x)); ++cx) {
      for (auto cy = coord(std::min(c.y, d.y)); cy <= coord(std::max(c.y, d.y)); ++cy) {
        const auto key = (static_cast<std::uint64_t>(static_cast<std::uint32_t>(cx)) << 32) |
                         static_cast<std::uint64_t>(static_cast<std::uint32_t>(cy));
        auto& bucket = buckets[key];
        if (stats) {
          ++stats->cell_visits;
          stats->pair_tests += bucket.size();
        }
        for (const std::size_t i : bucket) {
          if (j - i >= 2 && elements_cross(points[i], points[i + 1], c, d)) spans.push_back({i, j + 1});
        }
        bucket.push_back(j);
      }
    }
  }
  return merge_spans(std::move(spans));
}

std::vector<IntersectionSpan> detect_intersections(std::span<const Vec2> points, double hbar, DetectionStats* stats) {
  auto spans = detect_self_intersections(points, hbar, stats);
  const auto knots = find_crossings(points, hbar, stats);
  spans.insert(spans.end(), knots.begin(), knots.end());
  return merge_spans(std::move(spans));
}

bool thin_points(DiscreteCurve& curve, SegmentLedger& ledger, double hbar) {
  const std::size_t count = curve.size();
  if (count < 3) return false;
  const double mean = curve.length() / static_cast<double>(count - 1);
  if (!(mean < 0.5 * hbar)) return false;

  std::vector<std::uint8_t> keep(count, 1);
  std::vector<std::uint8_t> protect(count, 0);
  protect.front() = protect.back() = 1;
  for (const auto& seg : ledger.segments) {
    protect[std::min(seg.start_idx, count - 1)] = 1;
    protect[std::min(seg.end_idx, count - 1)] = 1;
  }
  for (std::size_t i = 1; i + 1 < count; i += 2) {
    if (!protect[i]) keep[i] = 0;
  }

  std::vector<std::size_t> remap(count, 0);
  std::vector<Vec2> thinned;
  thinned.reserve(count / 2 + 2);
  for (std::size_t i = 0; i < count; ++i) {
    remap[i] = thinned.size();
    if (keep[i]) thinned.push_back(curve.points[i]);
  }
  for (auto& seg : ledger.segments) {
    seg.start_idx = remap[seg.start_idx];
    seg.end_idx = remap[seg.end_idx];
  }
  const bool changed = thinned.size() != count;
  curve.points = std::move(thinned);
  return changed;
}

bool respace_points(DiscreteCurve& curve, SegmentLedger& ledger, double min_length, double max_length) {
  const std::size_t count = curve.size();
  if (count < 3) return false;
  std::vector<std::uint8_t> protect(count, 0);
  protect.front() = protect.back() = 1;
  for (const auto& seg : ledger.segments) {
    protect[std::min(seg.start_idx, count - 1)] = 1;
    protect[std::min(seg.end_idx, count - 1)] = 1;
  }

  const auto& P = curve.points;
  std::vector<std::size_t> remap(count, 0);
  std::vector<Vec2> out;
  std::vector<std::uint8_t> out_protect;
  out.reserve(count + count / 4);
  bool changed = false;
  for (std::size_t i = 0; i < count; ++i) {
    if (!out.empty()) {
      const double gap = distance(out.back(), P[i]);
      if (gap < min_length) {
        if (!protect[i]) {
          remap[i] = out.size() - 1;
          changed = true;
          continue;
        }
        if (!out_protect.back()) {
          out.pop_back();
          out_protect.pop_back();
          changed = true;
        }
      } else if (gap > max_length) {
        const auto pieces = static_cast<std::size_t>(std::ceil(gap / max_length));
        const Vec2 from = out.back();
        for (std::size_t q = 1; q < pieces; ++q) {
          out.push_back(lerp(from, P[i], static_cast<double>(q) / static_cast<double>(pieces)));
          out_protect.push_back(0);
        }
        changed = true;
      }
    }
    remap[i] = out.size();
    out.push_back(P[i]);
    out_protect.push_back(protect[i]);
  }
  if (!changed) return false;
  for (auto& seg : ledger.segments) {
    seg.start_idx = remap[seg.start_idx];
    seg.end_idx = remap[seg.end_idx];
  }
  curve.points = std::move(out);
  return true;
}

PointParams constant_params(std::size_t point_count, double delta, double lambda) {
  return {std::vector<double>(point_count, delta), std::vector<double>(point_count, lambda)};
}

PointParams adaptive_params(std::span<const IntersectionSpan> spans, std::size_t point_count, double delta_max,
                            double lambda_max) {
  PointParams out = constant_params(point_count, 0.0, 0.0);
  if (point_count == 0) return out;
  auto raise = [&](long i, double fraction) {
    if (i < 0 || i >= static_cast<long>(point_count)) return;
    out.delta[i] = std::max(out.delta[i], fraction * delta_max);
    out.lambda[i] = std::max(out.lambda[i], fraction * lambda_max);
  };
  for (const auto& span : spans) {
    const long first = static_cast<long>(span.first);
    const long last = static_cast<long>(span.last);
    for (long k = 0; k < 5; ++k) {
      const double fraction = static_cast<double>(k + 1) / 6.0;
      raise(first - 5 + k, fraction);
      raise(last + 5 - k, fraction);
    }
    for (long i = first; i <= last; ++i) raise(i, 1.0);
  }
  return out;
}

}  // namespace cellflow
