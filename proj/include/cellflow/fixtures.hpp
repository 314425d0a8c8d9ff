#pragma once

#include <cstdint>
#include <vector>

#include "cellflow/field_reconstruction.hpp"
#include "cellflow/random_motion.hpp"
#include "cellflow/trajectory.hpp"

namespace cellflow::fixtures {

/// Places recorded points every `step` µm of arclength along a densely
/// sampled parametric path (first and last samples always kept).
Trajectory sample_path(const std::vector<Vec2>& dense, double step, const std::string& id,
                       double frame_interval = kDefaultFrameInterval);

/// Lead-in, a lemniscate lobe pair crossing once at its centre, lead-out.
Trajectory figure_eight(double radius = 8.0, double step = 1.5);

/// Straight run with `loops` consecutive drifting loops of the given radius.
Trajectory loop_track(int loops, double radius = 4.0, double step = 1.5, const std::string& id = "loops");

inline Trajectory triple_loop(double radius = 4.0, double step = 1.5) { return loop_track(3, radius, step, "triple-loop"); }

/// 2D Brownian walkers with diffusion coefficient D (µm²/min): Gaussian steps of variance 2DΔT per axis.
std::vector<RandomSubTrajectory> brownian_ensemble(std::size_t walkers, std::size_t steps, double diffusion,
                                                   double frame_interval, std::uint64_t seed);

/// Straight-line walkers with constant speed (µm/min) and random heading.
std::vector<RandomSubTrajectory> ballistic_ensemble(std::size_t walkers, std::size_t steps, double speed,
                                                    double frame_interval, std::uint64_t seed);

/// Brownian walkers reflected at the walls of a square box of side `box` µm.
std::vector<RandomSubTrajectory> confined_ensemble(std::size_t walkers, std::size_t steps, double diffusion,
                                                   double frame_interval, double box, std::uint64_t seed);

/// Tracks in pixels of a synthetic wound-migration movie plus its mask
/// (one cell per pixel).
struct SyntheticDataset {
  std::vector<Trajectory> tracks;  // positions in µm
  DomainMask mask;                 // cell_size = pixel size
};

SyntheticDataset synthetic_dataset(std::uint64_t seed, double pixel_size = kDefaultPixelSize);

}  // namespace cellflow::fixtures
