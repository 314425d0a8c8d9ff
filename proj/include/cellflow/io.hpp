#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "cellflow/field_reconstruction.hpp"
#include "cellflow/segment_ledger.hpp"
#include "cellflow/trajectory.hpp"
#include "cellflow/velocity.hpp"

namespace cellflow::io {

/// Shortest round-trip decimal form; stable across runs and locales.
std::string format_double(double value);

/// Comma-joined row terminated by '\n'.
class CsvWriter {
 public:
  explicit CsvWriter(std::ostream& out) : out_(out) {}
  CsvWriter& cell(const std::string& text);
  CsvWriter& cell(double value);
  CsvWriter& cell(long long value);
  CsvWriter& cell(std::size_t value) { return cell(static_cast<long long>(value)); }
  CsvWriter& cell(int value) { return cell(static_cast<long long>(value)); }
  void end_row();

 private:
  std::ostream& out_;
  bool first_ = true;
};

/// Splits one CSV line on commas (no quoting; ids must not contain commas).
std::vector<std::string> split_csv_line(const std::string& line);

/// `track_id,frame,x,y` with positions in pixels. Tracks keep the order of
/// their first appearance; rows inside a track are sorted by frame. Throws
/// Error(InvalidInput) naming the offending line.
std::vector<Trajectory> read_trajectories(std::istream& in, double pixel_size = kDefaultPixelSize,
                                          double frame_interval = kDefaultFrameInterval);
std::vector<Trajectory> read_trajectories_file(const std::string& path, double pixel_size = kDefaultPixelSize,
                                               double frame_interval = kDefaultFrameInterval);
void write_trajectories(std::ostream& out, const std::vector<Trajectory>& tracks, double pixel_size);

struct SmoothedCurve {
  std::string track_id;
  std::vector<Vec2> points;
  std::vector<int> segment_ids;  // −1 where no live segment owns the point
};

/// `track_id,point_index,x,y,segment_id`, positions in µm.
std::vector<SmoothedCurve> read_smoothed(std::istream& in);
void write_smoothed_header(std::ostream& out);
void write_smoothed_rows(std::ostream& out, const SmoothedCurve& curve);

/// Lengths in µm, time budget in minutes; record_* index the recorded track.
void write_ledger(std::ostream& out, const SegmentLedger& ledger);
SegmentLedger read_ledger(std::istream& in);

void write_velocities_header(std::ostream& out);
void write_velocity_rows(std::ostream& out, const std::vector<VelocitySample>& samples);
std::vector<VelocitySample> read_velocities(std::istream& in);

/// Plain-text PGM (P2). Pixels ≥ half of maxval are inside. With downscale
/// f > 1 a cell covers f × f pixels and is inside only if all of them are.
DomainMask read_pgm_mask(std::istream& in, double pixel_size, std::size_t downscale = 1);
DomainMask read_pgm_mask_file(const std::string& path, double pixel_size, std::size_t downscale = 1);
void write_pgm_mask(std::ostream& out, const DomainMask& mask);

void write_text_file(const std::string& path, const std::string& content);
std::string read_text_file(const std::string& path);

}  // namespace cellflow::io
