#pragma once

#include <string>
#include <vector>

#include "cellflow/segment_ledger.hpp"
#include "cellflow/trajectory.hpp"

namespace cellflow {

struct VelocitySample {
  Vec2 position;  // µm
  Vec2 velocity;  // µm/min
  std::string source_id;
  std::size_t segment_id = 0;
};

/// Disappeared segments hand half of their time budget to the nearest live
/// segment on each side (all of it when one side has none left).
/// Throws Error(Degenerate) when no segment is alive.
void redistribute_time(SegmentLedger& ledger);

struct VelocityResult {
  std::vector<VelocitySample> samples;
  std::vector<std::string> warnings;
};

/// Speed Ld_j / Δt_j of each live segment along the local element direction
/// of every grid point it owns.
VelocityResult compute_velocities(const DiscreteCurve& curve, const SegmentLedger& ledger,
                                  const std::string& source_id = {});

}  // namespace cellflow
