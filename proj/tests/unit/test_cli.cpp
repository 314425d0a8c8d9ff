#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <random>
#include <sstream>

#include "cellflow/cli.hpp"
#include "cellflow/fixtures.hpp"
#include "cellflow/io.hpp"
#include "oracles.hpp"

using namespace cellflow;
namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  explicit TempDir(const std::string& tag) {
    std::random_device rd;
    path = fs::temp_directory_path() / ("cellflow-" + tag + "-" + std::to_string(rd()));
    fs::create_directories(path);
  }
  ~TempDir() {
    std::error_code ec;
    fs::remove_all(path, ec);
  }
  std::string operator/(const std::string& name) const { return (path / name).string(); }
};

struct RunResult {
  int code;
  std::string out;
  std::string err;
};

RunResult run(std::vector<std::string> args) {
  args.insert(args.begin(), "cellflow");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

void write(const std::string& path, const std::string& text) { io::write_text_file(path, text); }

void write_tracks(const std::string& path, const std::vector<Trajectory>& tracks, double pixel_size = 1.0) {
  std::ostringstream s;
  io::write_trajectories(s, tracks, pixel_size);
  write(path, s.str());
}

// Square mask of side n pixels with a 1-pixel outside frame.
std::string framed_pgm(std::size_t n) {
  DomainMask m(n, n, 1.0, false);
  for (std::size_t j = 1; j + 1 < n; ++j) {
    for (std::size_t i = 1; i + 1 < n; ++i) m.set(i, j, true);
  }
  std::ostringstream s;
  io::write_pgm_mask(s, m);
  return s.str();
}

}  // namespace

TEST_SUITE("cli") {
  TEST_CASE("error codes map to exit codes") {
    CHECK(cli::exit_code_for(ErrorCode::InvalidInput) == 2);
    CHECK(cli::exit_code_for(ErrorCode::InsufficientData) == 3);
    CHECK(cli::exit_code_for(ErrorCode::BoundaryContact) == 4);
    CHECK(cli::exit_code_for(ErrorCode::NonConvergence) == 5);
    CHECK(cli::exit_code_for(ErrorCode::Degenerate) == 1);
  }

  TEST_CASE("help succeeds, unknown flags and methods are usage errors") {
    CHECK(run({"--help"}).code == 0);
    CHECK(run({"smooth", "--help"}).code == 0);
    CHECK(run({"smooth", "-t", "x.csv", "--no-such-flag"}).code == 2);
    CHECK(run({"analyze", "-t", "x.csv", "--method", "bogus"}).code == 2);
    CHECK(run({"smooth"}).code == 2);
  }

  TEST_CASE("header-only track file exits 2 with 'no trajectories'") {
    TempDir d("empty");
    write(d / "t.csv", "track_id,frame,x,y\n");
    const auto r = run({"smooth", "-t", d / "t.csv", "-o", d / "out"});
    CHECK(r.code == 2);
    CHECK(r.err.find("no trajectories") != std::string::npos);
  }

  TEST_CASE("parse failure reports the line number") {
    TempDir d("bad");
    write(d / "t.csv", "track_id,frame,x,y\na,0,1,1\na,1,oops,2\n");
    const auto r = run({"smooth", "-t", d / "t.csv", "-o", d / "out"});
    CHECK(r.code == 2);
    CHECK(r.err.find("line 3") != std::string::npos);
  }

  TEST_CASE("straight two-point track comes back as its resampled polyline") {
    TempDir d("line");
    write(d / "t.csv", "track_id,frame,x,y\nl,0,0,0\nl,1,10,0\n");
    REQUIRE(run({"smooth", "-t", d / "t.csv", "-o", d / "out", "--pixel-size", "0.5"}).code == 0);
    std::ifstream in(d / "out/smoothed.csv");
    const auto curves = io::read_smoothed(in);
    REQUIRE(curves.size() == 1);
    const auto expected = resample(oracle::make_track({{0, 0}, {5, 0}}), 1.0).curve.points;
    REQUIRE(curves[0].points.size() == expected.size());
    for (std::size_t i = 0; i < expected.size(); ++i) {
      CHECK(std::abs(curves[0].points[i].x - expected[i].x) <= 1e-12);
      CHECK(std::abs(curves[0].points[i].y) <= 1e-12);
    }
  }

  TEST_CASE("figure-eight smooths to zero intersections and is reproducible") {
    TempDir d("eight");
    write_tracks(d / "t.csv", {fixtures::figure_eight(), fixtures::triple_loop()});
    REQUIRE(run({"smooth", "-t", d / "t.csv", "-o", d / "a", "--pixel-size", "1"}).code == 0);
    REQUIRE(run({"smooth", "-t", d / "t.csv", "-o", d / "b", "--pixel-size", "1", "--threads", "2"}).code == 0);
    const auto meta = nlohmann::json::parse(io::read_text_file(d / "a/run_meta.json"));
    REQUIRE(meta["tracks"].size() == 2);
    for (const auto& t : meta["tracks"]) {
      CHECK(t["converged"].get<bool>());
      CHECK(t["final_intersections"].get<int>() == 0);
    }
    CHECK(io::read_text_file(d / "a/smoothed.csv") == io::read_text_file(d / "b/smoothed.csv"));
    std::ifstream in(d / "a/smoothed.csv");
    for (const auto& c : io::read_smoothed(in)) CHECK(oracle::crossings(c.points).empty());
  }

  TEST_CASE("analyze without random parts exits 3") {
    TempDir d("few");
    write(d / "t.csv", "track_id,frame,x,y\na,0,0,0\na,1,10,0\na,2,20,1\nb,0,0,5\nb,1,9,5\n");
    REQUIRE(run({"smooth", "-t", d / "t.csv", "-o", d / "out"}).code == 0);
    const auto r = run({"analyze", "-t", d / "t.csv", "-o", d / "out"});
    CHECK(r.code == 3);
    CHECK(r.err.find("insufficient data") != std::string::npos);
    CHECK(run({"analyze", "-t", d / "t.csv", "-o", d / "out", "--method", "whole-trajectory"}).code == 3);
  }

  TEST_CASE("analyze on Brownian tracks fits alpha near one") {
    TempDir d("bm");
    std::vector<Trajectory> tracks;
    for (const auto& w : fixtures::brownian_ensemble(60, 200, 0.5, 2.5, 3)) {
      Trajectory t;
      t.id = w.source_id;
      t.points = w.points;
      t.times = w.times;
      tracks.push_back(t);
    }
    write_tracks(d / "t.csv", tracks);
    const auto r = run({"analyze", "-t", d / "t.csv", "-o", d / "out", "--pixel-size", "1", "--method", "whole-trajectory"});
    REQUIRE(r.code == 0);
    const auto fit = io::read_text_file(d / "out/msd_fit.txt");
    const auto pos = fit.find("alpha");
    REQUIRE(pos != std::string::npos);
    std::istringstream s(fit.substr(fit.find_first_of("0123456789-", pos)));
    double alpha = 0.0;
    s >> alpha;
    CHECK(alpha >= 0.9);
    CHECK(alpha <= 1.1);
  }

  TEST_CASE("reconstruct: missing mask, boundary contact, non-convergence") {
    TempDir d("rec");
    write(d / "mask.pgm", framed_pgm(20));
    write(d / "v.csv", "track_id,x,y,vx,vy\na,1.5,10.5,1,0\n");
    CHECK(run({"reconstruct", "-o", d / "out", "--velocities", d / "v.csv"}).code == 2);
    auto r = run({"reconstruct", "-o", d / "out", "-m", d / "mask.pgm", "--velocities", d / "v.csv", "--pixel-size",
                  "1", "--downscale", "1"});
    CHECK(r.code == 4);
    CHECK(r.err.find("too close to boundary") != std::string::npos);
    write(d / "v2.csv", "track_id,x,y,vx,vy\na,5.5,5.5,1,0\nb,14.5,14.5,-1,2\n");
    r = run({"reconstruct", "-o", d / "out", "-m", d / "mask.pgm", "--velocities", d / "v2.csv", "--pixel-size", "1",
             "--downscale", "1", "--max-sweeps", "1"});
    CHECK(r.code == 5);
    CHECK(r.err.find("residual") != std::string::npos);
    r = run({"reconstruct", "-o", d / "out", "-m", d / "mask.pgm", "--velocities", d / "v2.csv", "--pixel-size", "1",
             "--downscale", "1"});
    CHECK(r.code == 0);
    CHECK(fs::exists(d / "out/field.csv"));
    CHECK(fs::exists(d / "out/field_quiver.svg"));
    CHECK(fs::exists(d / "out/heatmap_speed.svg"));
  }

  TEST_CASE("single sample gives a constant reconstructed field") {
    TempDir d("one");
    write(d / "mask.pgm", framed_pgm(16));
    write(d / "v.csv", "track_id,x,y,vx,vy\na,7.5,8.5,0.3,0.4\n");
    REQUIRE(run({"reconstruct", "-o", d / "out", "-m", d / "mask.pgm", "--velocities", d / "v.csv", "--pixel-size",
                 "1", "--downscale", "1"})
                .code == 0);
    std::istringstream field(io::read_text_file(d / "out/field.csv"));
    std::string line;
    std::getline(field, line);
    CHECK(line == "i,j,x,y,vx,vy,speed");
    std::size_t rows = 0;
    while (std::getline(field, line)) {
      const auto f = io::split_csv_line(line);
      CHECK(std::stod(f[4]) == doctest::Approx(0.3).epsilon(1e-9));
      CHECK(std::stod(f[5]) == doctest::Approx(0.4).epsilon(1e-9));
      ++rows;
    }
    CHECK(rows == 15 * 15);
  }

  TEST_CASE("split mask keeps the largest part and warns") {
    TempDir d("split");
    DomainMask m(20, 12, 1.0, false);
    for (std::size_t j = 1; j < 11; ++j) {
      for (std::size_t i = 1; i < 19; ++i) m.set(i, j, i != 6);
    }
    std::ostringstream pgm;
    io::write_pgm_mask(pgm, m);
    write(d / "mask.pgm", pgm.str());
    write(d / "v.csv", "track_id,x,y,vx,vy\na,12.5,5.5,1,0\n");
    const auto r = run({"reconstruct", "-o", d / "out", "-m", d / "mask.pgm", "--velocities", d / "v.csv",
                        "--pixel-size", "1", "--downscale", "1"});
    REQUIRE(r.code == 0);
    const auto meta = nlohmann::json::parse(io::read_text_file(d / "out/reconstruct_meta.json"));
    CHECK(meta["inside_cells"].get<int>() == 12 * 10);
    CHECK_FALSE(meta["warnings"].empty());
  }

  TEST_CASE("pipeline on a missing mask exits 2") {
    TempDir d("nomask");
    write(d / "t.csv", "track_id,frame,x,y\na,0,0,0\na,1,10,0\n");
    CHECK(run({"pipeline", "-t", d / "t.csv", "-o", d / "out"}).code == 2);
    CHECK(run({"pipeline", "-t", d / "t.csv", "-o", d / "out", "-m", d / "nope.pgm"}).code == 2);
  }

  TEST_CASE("gen-fixtures is seeded") {
    TempDir d("gen");
    REQUIRE(run({"gen-fixtures", "-o", d / "a", "--seed", "5"}).code == 0);
    REQUIRE(run({"gen-fixtures", "-o", d / "b", "--seed", "5"}).code == 0);
    REQUIRE(run({"gen-fixtures", "-o", d / "c", "--seed", "6"}).code == 0);
    CHECK(io::read_text_file(d / "a/tracks.csv") == io::read_text_file(d / "b/tracks.csv"));
    CHECK(io::read_text_file(d / "a/tracks.csv") != io::read_text_file(d / "c/tracks.csv"));
    CHECK(fs::exists(d / "a/mask.pgm"));
    CHECK(fs::exists(d / "a/loops.csv"));
  }
}
