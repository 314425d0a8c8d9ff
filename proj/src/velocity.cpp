#include "cellflow/velocity.hpp"

#include <sstream>

#include "cellflow/error.hpp"

namespace cellflow {

void redistribute_time(SegmentLedger& ledger) {
  const std::size_t M = ledger.size();
  if (ledger.live_count() == 0) {
    throw Error(ErrorCode::Degenerate, "no live segment left; velocity is undefined");
  }
  std::vector<double> budget(M, 0.0);
  for (std::size_t j = 0; j < M; ++j) {
    if (!ledger[j].disappeared) budget[j] += ledger[j].time_budget;
  }
  for (std::size_t j = 0; j < M; ++j) {
    if (!ledger[j].disappeared) continue;
    long before = static_cast<long>(j) - 1;
    while (before >= 0 && ledger[static_cast<std::size_t>(before)].disappeared) --before;
    std::size_t after = j + 1;
    while (after < M && ledger[after].disappeared) ++after;
    const double dt = ledger[j].time_budget;
    if (before >= 0 && after < M) {
      budget[static_cast<std::size_t>(before)] += dt / 2.0;
      budget[after] += dt / 2.0;
    } else if (before >= 0) {
      budget[static_cast<std::size_t>(before)] += dt;
    } else {
      budget[after] += dt;
    }
  }
  for (std::size_t j = 0; j < M; ++j) ledger[j].time_budget = budget[j];
}

VelocityResult compute_velocities(const DiscreteCurve& curve, const SegmentLedger& ledger,
                                  const std::string& source_id) {
  VelocityResult out;
  const auto& P = curve.points;
  bool first_live = true;
  for (std::size_t j = 0; j < ledger.size(); ++j) {
    const auto& seg = ledger[j];
    if (seg.disappeared || seg.end_idx <= seg.start_idx) continue;
    if (!(seg.time_budget > 0.0)) {
      std::ostringstream msg;
      msg << "track " << source_id << ": segment " << j << " has no time budget";
      throw Error(ErrorCode::InvalidInput, msg.str());
    }
    const double speed = seg.discrete_length / seg.time_budget;
    const std::size_t begin = first_live ? seg.start_idx : seg.start_idx + 1;
    first_live = false;
    for (std::size_t i = begin; i <= seg.end_idx && i < P.size(); ++i) {
      // The first point of the track borrows the direction of the element after it.
      const std::size_t e = i == seg.start_idx ? i + 1 : i;
      const Vec2 d = P[e] - P[e - 1];
      const double h = norm(d);
      if (!(h > 0.0)) {
        std::ostringstream msg;
        msg << "track " << source_id << ": zero-length element at grid point " << i << " skipped";
        out.warnings.push_back(msg.str());
        continue;
      }
      out.samples.push_back({P[i], d * (speed / h), source_id, j});
    }
  }
  return out;
}

}  // namespace cellflow
