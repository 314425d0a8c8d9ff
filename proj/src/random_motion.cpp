#include "cellflow/random_motion.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "cellflow/error.hpp"

namespace cellflow {

std::string to_string(ExtractionMethod method) {
  switch (method) {
    case ExtractionMethod::DisappearedSegments:
      return "disappeared-segments";
    case ExtractionMethod::SelfIntersections:
      return "self-intersections";
    case ExtractionMethod::WholeTrajectory:
      return "whole-trajectory";
  }
  return "unknown";
}

namespace {

long frame_offset(double t, double t0, double dt) { return std::lround((t - t0) / dt); }

RandomSubTrajectory slice(const Trajectory& trajectory, std::size_t first, std::size_t last,
                          ExtractionMethod method) {
  RandomSubTrajectory sub;
  sub.source_id = trajectory.id;
  sub.method = method;
  sub.first_record = first;
  sub.frame_interval = trajectory.frame_interval;
  sub.points.assign(trajectory.points.begin() + static_cast<long>(first),
                    trajectory.points.begin() + static_cast<long>(last) + 1);
  sub.times.assign(trajectory.times.begin() + static_cast<long>(first),
                   trajectory.times.begin() + static_cast<long>(last) + 1);
  return sub;
}

void push_if_long_enough(std::vector<RandomSubTrajectory>& out, const Trajectory& trajectory, std::size_t first,
                         std::size_t last, ExtractionMethod method) {
  if (last < first || last - first + 1 < kMinRandomPoints) return;
  out.push_back(slice(trajectory, first, last, method));
}

// Frame offset of every sample relative to the first one.
std::vector<long> frame_offsets(const RandomSubTrajectory& sub) {
  std::vector<long> frames(sub.size());
  for (std::size_t p = 0; p < sub.size(); ++p) frames[p] = frame_offset(sub.times[p], sub.times[0], sub.frame_interval);
  return frames;
}

double common_frame_interval(std::span<const RandomSubTrajectory> subs) {
  const double dt = subs.front().frame_interval;
  for (const auto& s : subs) {
    if (s.frame_interval != dt) throw Error(ErrorCode::InvalidInput, "sub-trajectories mix frame intervals");
  }
  return dt;
}

}  // namespace

std::size_t RandomSubTrajectory::final_lag() const {
  if (points.size() < 2) return 0;
  const long k = frame_offset(times.back(), times.front(), frame_interval);
  return k > 0 ? static_cast<std::size_t>(k) : 0;
}

std::vector<RandomSubTrajectory> extract_by_disappearance(const SegmentLedger& ledger, const Trajectory& trajectory) {
  std::vector<RandomSubTrajectory> out;
  const std::size_t last_record = trajectory.size() - 1;
  for (std::size_t j = 0; j < ledger.size();) {
    if (!ledger[j].disappeared) {
      ++j;
      continue;
    }
    const std::size_t run_start = j;
    while (j < ledger.size() && ledger[j].disappeared) ++j;
    const std::size_t first = ledger[run_start].record_start;
    const std::size_t last = ledger[j - 1].record_end;
    push_if_long_enough(out, trajectory, first > 0 ? first - 1 : 0, std::min(last + 1, last_record),
                        ExtractionMethod::DisappearedSegments);
  }
  return out;
}

std::vector<RandomSubTrajectory> extract_by_self_intersection(const Trajectory& trajectory,
                                                              const SegmentLedger& resampled_ledger,
                                                              std::span<const IntersectionSpan> spans) {
  std::vector<RandomSubTrajectory> out;
  const auto& segs = resampled_ledger.segments;
  if (segs.empty()) return out;

  // First segment in parametrization order whose end lies beyond grid index g.
  auto opening_segment = [&](std::size_t g) {
    for (std::size_t j = 0; j < segs.size(); ++j) {
      if (g < segs[j].end_idx) return j;
    }
    return segs.size() - 1;
  };
  // Last segment whose start lies before grid index g.
  auto closing_segment = [&](std::size_t g) {
    for (std::size_t j = segs.size(); j-- > 0;) {
      if (segs[j].start_idx < g) return j;
    }
    return std::size_t{0};
  };

  for (const auto& span : spans) {
    const std::size_t js = opening_segment(span.first);
    const std::size_t je = closing_segment(span.last);
    if (je < js) continue;
    push_if_long_enough(out, trajectory, segs[js].record_start, segs[je].record_end,
                        ExtractionMethod::SelfIntersections);
  }
  return out;
}

std::vector<RandomSubTrajectory> extract_by_self_intersection(const Trajectory& trajectory, double hbar) {
  const auto sampled = resample(trajectory, hbar);
  const auto spans = detect_self_intersections(sampled.curve.points, hbar);
  return extract_by_self_intersection(trajectory, sampled.ledger, spans);
}

std::vector<RandomSubTrajectory> whole_trajectory(const Trajectory& trajectory) {
  std::vector<RandomSubTrajectory> out;
  if (trajectory.size() > 0) {
    push_if_long_enough(out, trajectory, 0, trajectory.size() - 1, ExtractionMethod::WholeTrajectory);
  }
  return out;
}

MsdSeries eamsd(std::span<const RandomSubTrajectory> subs) {
  if (subs.empty()) throw Error(ErrorCode::InsufficientData, "insufficient data: no sub-trajectories");
  const double dt = common_frame_interval(subs);
  std::map<long, std::pair<double, std::size_t>> buckets;
  for (const auto& sub : subs) {
    const auto frames = frame_offsets(sub);
    for (std::size_t p = 1; p < sub.size(); ++p) {
      auto& [sum, count] = buckets[frames[p]];
      sum += norm2(sub.points[p] - sub.points[0]);
      ++count;
    }
  }
  MsdSeries series;
  for (const auto& [k, acc] : buckets) {
    if (k < 1) continue;
    series.abscissae.push_back(static_cast<double>(k) * dt);
    series.values.push_back(acc.first / static_cast<double>(acc.second));
    series.counts.push_back(acc.second);
  }
  return series;
}

std::size_t max_valid_lag(const RandomSubTrajectory& sub) { return (sub.final_lag() + 1) / 4; }

std::optional<double> tamsd_unchecked(const RandomSubTrajectory& sub, std::size_t lag) {
  if (lag == 0 || sub.size() < 2) return std::nullopt;
  const auto frames = frame_offsets(sub);
  const long K = frames.back();
  const long n = static_cast<long>(lag);
  if (n > K) return std::nullopt;
  std::vector<long> at(static_cast<std::size_t>(K) + 1, -1);  // frame → sample index
  for (std::size_t p = 0; p < sub.size(); ++p) {
    if (frames[p] >= 0 && frames[p] <= K) at[static_cast<std::size_t>(frames[p])] = static_cast<long>(p);
  }
  double sum = 0.0;
  std::size_t windows = 0;
  for (long j = 0; j + n <= K; ++j) {
    const long a = at[static_cast<std::size_t>(j)];
    const long b = at[static_cast<std::size_t>(j + n)];
    if (a < 0 || b < 0) continue;
    sum += norm2(sub.points[static_cast<std::size_t>(b)] - sub.points[static_cast<std::size_t>(a)]);
    ++windows;
  }
  if (windows == 0) return std::nullopt;
  return sum / static_cast<double>(windows);
}

std::optional<double> tamsd(const RandomSubTrajectory& sub, std::size_t lag) {
  if (lag == 0 || lag > max_valid_lag(sub)) return std::nullopt;
  return tamsd_unchecked(sub, lag);
}

MsdSeries eatamsd(std::span<const RandomSubTrajectory> subs) {
  if (subs.empty()) throw Error(ErrorCode::InsufficientData, "insufficient data: no sub-trajectories");
  const double dt = common_frame_interval(subs);
  const std::size_t N = subs.size();
  std::size_t longest = 0;
  for (const auto& s : subs) longest = std::max(longest, max_valid_lag(s));

  MsdSeries series;
  for (std::size_t n = 1; n <= longest; ++n) {
    double sum = 0.0;
    std::size_t count = 0;
    for (const auto& s : subs) {
      if (const auto v = tamsd(s, n)) {
        sum += *v;
        ++count;
      }
    }
    if (count == 0 || 4 * count < N) continue;
    series.abscissae.push_back(static_cast<double>(n) * dt);
    series.values.push_back(sum / static_cast<double>(count));
    series.counts.push_back(count);
  }
  if (series.values.empty()) {
    throw Error(ErrorCode::InsufficientData, "insufficient data: no lag satisfies n <= (K+1)/4 and N_n >= N/4");
  }
  return series;
}

HurstFit fit_hurst(const MsdSeries& series) {
  std::vector<double> xs;
  std::vector<double> ys;
  for (std::size_t i = 0; i < series.values.size(); ++i) {
    if (series.values[i] > 0.0 && series.abscissae[i] > 0.0) {
      xs.push_back(std::log(series.abscissae[i]));
      ys.push_back(std::log(series.values[i]));
    }
  }
  if (xs.size() < 2) throw Error(ErrorCode::InsufficientData, "insufficient data: fewer than two positive MSD values");
  const double m = static_cast<double>(xs.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    mx += xs[i];
    my += ys[i];
  }
  mx /= m;
  my /= m;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxx += (xs[i] - mx) * (xs[i] - mx);
    sxy += (xs[i] - mx) * (ys[i] - my);
  }
  if (!(sxx > 0.0)) throw Error(ErrorCode::InsufficientData, "insufficient data: all lags coincide");
  HurstFit fit;
  fit.alpha = sxy / sxx;
  fit.hurst = fit.alpha / 2.0;
  fit.intercept = my - fit.alpha * mx;
  fit.points_used = xs.size();
  return fit;
}

void apply_fit(MsdSeries& series) {
  const auto fit = fit_hurst(series);
  series.alpha = fit.alpha;
  series.hurst = fit.hurst;
  series.intercept = fit.intercept;
}

}  // namespace cellflow
