#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>

#include "cellflow/curve_evolution.hpp"
#include "cellflow/error.hpp"
#include "cellflow/field_reconstruction.hpp"
#include "cellflow/random_motion.hpp"

namespace cellflow::cli {

enum ExitCode : int {
  kOk = 0,
  kFailure = 1,
  kInvalidInput = 2,
  kInsufficientData = 3,
  kBoundaryContact = 4,
  kNonConvergence = 5,
};

int exit_code_for(ErrorCode code);

struct PipelineConfig {
  std::string tracks_path;      // track_id,frame,x,y in pixels
  std::string mask_path;        // P2 PGM, one value per pixel
  std::string out_dir = "out";
  std::string velocities_path;  // empty: <out_dir>/velocities.csv
  double pixel_size = kDefaultPixelSize;
  double frame_interval = kDefaultFrameInterval;
  double hbar = kDefaultHbar;
  EvolutionParams evolution;
  ExtractionMethod method = ExtractionMethod::DisappearedSegments;
  std::size_t downscale = 8;  // mask pixels per reconstruction cell side
  SolverOptions solver;
  std::size_t quiver_stride = 2;
  unsigned threads = 1;  // 0: one per hardware thread
  bool record_spans = false;
  std::uint64_t seed = 7;

  /// Throws Error(InvalidInput) naming the first bad field.
  void validate() const;
  std::string velocities_file() const;
};

ExtractionMethod parse_method(const std::string& name);

/// Stages write into cfg.out_dir and report progress on `log`. They throw
/// Error on failure; exit_code_for maps the code.
void smooth(const PipelineConfig& cfg, std::ostream& log);
void analyze(const PipelineConfig& cfg, std::ostream& log);
void velocities(const PipelineConfig& cfg, std::ostream& log);
void reconstruct(const PipelineConfig& cfg, std::ostream& log);
void pipeline(const PipelineConfig& cfg, std::ostream& log);
/// Synthetic dataset (tracks.csv, mask.pgm) plus the loop fixtures, all seeded by cfg.seed.
void gen_fixtures(const PipelineConfig& cfg, std::ostream& log);

/// Full command line: parses, dispatches and maps errors to exit codes.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace cellflow::cli
