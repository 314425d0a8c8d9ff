#include "cellflow/io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <map>
#include <numeric>
#include <ostream>
#include <sstream>

#include "cellflow/error.hpp"

namespace cellflow::io {

std::string format_double(double value) {
  if (value == 0.0) return "0";  // folds −0 as well
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, value);
  return std::string(buf, res.ptr);
}

CsvWriter& CsvWriter::cell(const std::string& text) {
  if (!first_) out_ << ',';
  out_ << text;
  first_ = false;
  return *this;
}

CsvWriter& CsvWriter::cell(double value) { return cell(format_double(value)); }

CsvWriter& CsvWriter::cell(long long value) { return cell(std::to_string(value)); }

void CsvWriter::end_row() {
  out_ << '\n';
  first_ = true;
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  for (char c : line) {
    if (c == ',') {
      out.push_back(field);
      field.clear();
    } else if (c != '\r') {
      field.push_back(c);
    }
  }
  out.push_back(field);
  for (auto& f : out) {
    const auto b = f.find_first_not_of(" \t");
    const auto e = f.find_last_not_of(" \t");
    f = b == std::string::npos ? std::string{} : f.substr(b, e - b + 1);
  }
  return out;
}

namespace {

[[noreturn]] void parse_error(const std::string& what, std::size_t line) {
  std::ostringstream msg;
  msg << "line " << line << ": " << what;
  throw Error(ErrorCode::InvalidInput, msg.str());
}

double to_double(const std::string& s, std::size_t line, const char* name) {
  double v = 0.0;
  const char* begin = s.data();
  const char* end = s.data() + s.size();
  if (!s.empty() && *begin == '+') ++begin;
  const auto res = std::from_chars(begin, end, v);
  if (res.ec != std::errc{} || res.ptr != end || !std::isfinite(v)) {
    parse_error(std::string("bad ") + name + " value '" + s + "'", line);
  }
  return v;
}

long long to_integer(const std::string& s, std::size_t line, const char* name) {
  long long v = 0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc{} || res.ptr != s.data() + s.size()) {
    parse_error(std::string("bad ") + name + " value '" + s + "'", line);
  }
  return v;
}

// Reads the header, checks the expected columns and returns data rows with line numbers.
std::vector<std::pair<std::size_t, std::vector<std::string>>> read_table(std::istream& in,
                                                                         const std::vector<std::string>& columns) {
  std::string line;
  std::size_t number = 0;
  bool have_header = false;
  std::vector<std::pair<std::size_t, std::vector<std::string>>> rows;
  while (std::getline(in, line)) {
    ++number;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    auto fields = split_csv_line(line);
    if (!have_header) {
      if (fields != columns) {
        std::string expected;
        for (const auto& c : columns) expected += (expected.empty() ? "" : ",") + c;
        parse_error("expected header '" + expected + "'", number);
      }
      have_header = true;
      continue;
    }
    if (fields.size() != columns.size()) {
      std::ostringstream msg;
      msg << "expected " << columns.size() << " fields, found " << fields.size();
      parse_error(msg.str(), number);
    }
    rows.emplace_back(number, std::move(fields));
  }
  if (!have_header) throw Error(ErrorCode::InvalidInput, "empty file: missing header");
  return rows;
}

std::ifstream open_input(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::InvalidInput, "cannot open " + path);
  return in;
}

}  // namespace

std::vector<Trajectory> read_trajectories(std::istream& in, double pixel_size, double frame_interval) {
  if (!(pixel_size > 0.0)) throw Error(ErrorCode::InvalidInput, "pixel size must be positive");
  if (!(frame_interval > 0.0)) throw Error(ErrorCode::InvalidInput, "frame interval must be positive");
  const auto rows = read_table(in, {"track_id", "frame", "x", "y"});
  if (rows.empty()) throw Error(ErrorCode::InvalidInput, "no trajectories");

  struct Row {
    long long frame;
    Vec2 p;
    std::size_t line;
  };
  std::vector<std::string> order;
  std::map<std::string, std::vector<Row>> by_id;
  for (const auto& [line, f] : rows) {
    if (f[0].empty()) parse_error("empty track_id", line);
    Row r{to_integer(f[1], line, "frame"), {to_double(f[2], line, "x") * pixel_size, to_double(f[3], line, "y") * pixel_size}, line};
    auto [it, inserted] = by_id.try_emplace(f[0]);
    if (inserted) order.push_back(f[0]);
    it->second.push_back(r);
  }

  std::vector<Trajectory> out;
  for (const auto& id : order) {
    auto& list = by_id[id];
    std::stable_sort(list.begin(), list.end(), [](const Row& a, const Row& b) { return a.frame < b.frame; });
    Trajectory t;
    t.id = id;
    t.frame_interval = frame_interval;
    for (std::size_t k = 0; k < list.size(); ++k) {
      if (k > 0 && list[k].frame == list[k - 1].frame) {
        parse_error("track " + id + " repeats frame " + std::to_string(list[k].frame), list[k].line);
      }
      t.points.push_back(list[k].p);
      t.times.push_back(static_cast<double>(list[k].frame) * frame_interval);
    }
    if (t.size() < 2) parse_error("track " + id + " has fewer than 2 points", list.front().line);
    out.push_back(std::move(t));
  }
  return out;
}

std::vector<Trajectory> read_trajectories_file(const std::string& path, double pixel_size, double frame_interval) {
  auto in = open_input(path);
  try {
    return read_trajectories(in, pixel_size, frame_interval);
  } catch (const Error& e) {
    throw Error(e.code(), path + ": " + e.what());
  }
}

void write_trajectories(std::ostream& out, const std::vector<Trajectory>& tracks, double pixel_size) {
  // Micro-pixel rounding hides the µm → px conversion noise.
  auto px = [pixel_size](double um) { return std::round(um / pixel_size * 1e6) / 1e6; };
  out << "track_id,frame,x,y\n";
  CsvWriter w(out);
  for (const auto& t : tracks) {
    for (std::size_t k = 0; k < t.size(); ++k) {
      w.cell(t.id)
          .cell(static_cast<long long>(std::llround(t.times[k] / t.frame_interval)))
          .cell(px(t.points[k].x))
          .cell(px(t.points[k].y))
          .end_row();
    }
  }
}

void write_smoothed_header(std::ostream& out) { out << "track_id,point_index,x,y,segment_id\n"; }

void write_smoothed_rows(std::ostream& out, const SmoothedCurve& curve) {
  CsvWriter w(out);
  for (std::size_t i = 0; i < curve.points.size(); ++i) {
    const int seg = i < curve.segment_ids.size() ? curve.segment_ids[i] : -1;
    w.cell(curve.track_id).cell(i).cell(curve.points[i].x).cell(curve.points[i].y).cell(seg).end_row();
  }
}

std::vector<SmoothedCurve> read_smoothed(std::istream& in) {
  const auto rows = read_table(in, {"track_id", "point_index", "x", "y", "segment_id"});
  std::vector<SmoothedCurve> out;
  for (const auto& [line, f] : rows) {
    if (out.empty() || out.back().track_id != f[0]) {
      for (const auto& c : out) {
        if (c.track_id == f[0]) parse_error("rows of track " + f[0] + " are not contiguous", line);
      }
      out.push_back({f[0], {}, {}});
    }
    auto& c = out.back();
    if (to_integer(f[1], line, "point_index") != static_cast<long long>(c.points.size())) {
      parse_error("point_index out of sequence", line);
    }
    c.points.push_back({to_double(f[2], line, "x"), to_double(f[3], line, "y")});
    c.segment_ids.push_back(static_cast<int>(to_integer(f[4], line, "segment_id")));
  }
  return out;
}

void write_ledger(std::ostream& out, const SegmentLedger& ledger) {
  out << "segment_id,L,Ld,start_idx,end_idx,disappeared,record_start,record_end,time_budget_min\n";
  CsvWriter w(out);
  for (std::size_t j = 0; j < ledger.size(); ++j) {
    const auto& s = ledger[j];
    w.cell(j)
        .cell(s.length)
        .cell(s.discrete_length)
        .cell(s.start_idx)
        .cell(s.end_idx)
        .cell(s.disappeared ? 1 : 0)
        .cell(s.record_start)
        .cell(s.record_end)
        .cell(s.time_budget)
        .end_row();
  }
}

SegmentLedger read_ledger(std::istream& in) {
  const auto rows = read_table(
      in, {"segment_id", "L", "Ld", "start_idx", "end_idx", "disappeared", "record_start", "record_end", "time_budget_min"});
  SegmentLedger ledger;
  for (const auto& [line, f] : rows) {
    if (to_integer(f[0], line, "segment_id") != static_cast<long long>(ledger.size())) {
      parse_error("segment_id out of sequence", line);
    }
    Segment s;
    auto index = [&](const std::string& v, const char* name) {
      const long long k = to_integer(v, line, name);
      if (k < 0) parse_error(std::string(name) + " must be non-negative", line);
      return static_cast<std::size_t>(k);
    };
    s.length = to_double(f[1], line, "L");
    s.discrete_length = to_double(f[2], line, "Ld");
    s.start_idx = index(f[3], "start_idx");
    s.end_idx = index(f[4], "end_idx");
    s.disappeared = to_integer(f[5], line, "disappeared") != 0;
    s.record_start = index(f[6], "record_start");
    s.record_end = index(f[7], "record_end");
    s.time_budget = to_double(f[8], line, "time_budget_min");
    ledger.segments.push_back(s);
  }
  return ledger;
}

void write_velocities_header(std::ostream& out) { out << "track_id,x,y,vx,vy\n"; }

void write_velocity_rows(std::ostream& out, const std::vector<VelocitySample>& samples) {
  CsvWriter w(out);
  for (const auto& s : samples) {
    w.cell(s.source_id).cell(s.position.x).cell(s.position.y).cell(s.velocity.x).cell(s.velocity.y).end_row();
  }
}

std::vector<VelocitySample> read_velocities(std::istream& in) {
  const auto rows = read_table(in, {"track_id", "x", "y", "vx", "vy"});
  std::vector<VelocitySample> out;
  out.reserve(rows.size());
  for (const auto& [line, f] : rows) {
    VelocitySample s;
    s.source_id = f[0];
    s.position = {to_double(f[1], line, "x"), to_double(f[2], line, "y")};
    s.velocity = {to_double(f[3], line, "vx"), to_double(f[4], line, "vy")};
    out.push_back(s);
  }
  return out;
}

DomainMask read_pgm_mask(std::istream& in, double pixel_size, std::size_t downscale) {
  if (downscale == 0) throw Error(ErrorCode::InvalidInput, "downscale factor must be at least 1");
  if (!(pixel_size > 0.0)) throw Error(ErrorCode::InvalidInput, "pixel size must be positive");
  // Tokens with '#' comments stripped.
  std::vector<std::string> tokens;
  std::string line;
  while (std::getline(in, line)) {
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::istringstream ls(line);
    std::string tok;
    while (ls >> tok) tokens.push_back(tok);
  }
  if (tokens.size() < 4 || tokens[0] != "P2") throw Error(ErrorCode::InvalidInput, "mask: expected a plain PGM (P2) file");
  auto number = [&](std::size_t k) {
    long long v = 0;
    const auto& s = tokens[k];
    const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc{} || res.ptr != s.data() + s.size() || v < 0) {
      throw Error(ErrorCode::InvalidInput, "mask: bad PGM token '" + s + "'");
    }
    return v;
  };
  const auto width = static_cast<std::size_t>(number(1));
  const auto height = static_cast<std::size_t>(number(2));
  const auto maxval = number(3);
  if (width == 0 || height == 0 || maxval <= 0) throw Error(ErrorCode::InvalidInput, "mask: empty image");
  if (tokens.size() != 4 + width * height) {
    throw Error(ErrorCode::InvalidInput, "mask: pixel count does not match the PGM header");
  }
  const std::size_t cols = width / downscale;
  const std::size_t rows = height / downscale;
  if (cols == 0 || rows == 0) throw Error(ErrorCode::InvalidInput, "mask: downscale factor exceeds image size");
  DomainMask mask(cols, rows, pixel_size * static_cast<double>(downscale), true);
  for (std::size_t y = 0; y < rows * downscale; ++y) {
    for (std::size_t x = 0; x < cols * downscale; ++x) {
      const auto v = number(4 + y * width + x);
      if (2 * v < maxval) mask.set(x / downscale, y / downscale, false);
    }
  }
  return mask;
}

DomainMask read_pgm_mask_file(const std::string& path, double pixel_size, std::size_t downscale) {
  auto in = open_input(path);
  try {
    return read_pgm_mask(in, pixel_size, downscale);
  } catch (const Error& e) {
    throw Error(e.code(), path + ": " + e.what());
  }
}

void write_pgm_mask(std::ostream& out, const DomainMask& mask) {
  out << "P2\n" << mask.cols << ' ' << mask.rows << "\n255\n";
  for (std::size_t j = 0; j < mask.rows; ++j) {
    for (std::size_t i = 0; i < mask.cols; ++i) {
      out << (i ? " " : "") << (mask.contains(static_cast<long>(i), static_cast<long>(j)) ? 255 : 0);
    }
    out << '\n';
  }
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::InvalidInput, "cannot write " + path);
  out << content;
  if (!out) throw Error(ErrorCode::InvalidInput, "write failed for " + path);
}

std::string read_text_file(const std::string& path) {
  auto in = open_input(path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace cellflow::io
