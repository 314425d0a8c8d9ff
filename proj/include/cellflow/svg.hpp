#pragma once

#include <string>
#include <vector>

#include "cellflow/field_reconstruction.hpp"
#include "cellflow/random_motion.hpp"
#include "cellflow/trajectory.hpp"

namespace cellflow::svg {

/// Log-log scatter of an MSD series with its fitted line (when alpha is set).
std::string msd_plot(const MsdSeries& series, const std::string& title, bool has_fit);

struct TrackLayer {
  std::vector<std::vector<Vec2>> lines;
  std::string colour;
  double width = 1.0;
};

/// Polylines in µm, y downwards like the image they came from.
std::string track_plot(const std::vector<TrackLayer>& layers, const std::string& title);

/// Arrows every `stride` vertices, coloured by speed.
std::string quiver_plot(const VectorField& field, const DomainMask& mask, std::size_t stride, const std::string& title);

/// One coloured square per vertex value; excluded vertices stay blank.
std::string heatmap(const ScalarField& field, const std::string& title);

/// Viridis-like ramp for t in [0, 1] as "#rrggbb".
std::string ramp_colour(double t);

}  // namespace cellflow::svg
