#include "cellflow/cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <exception>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>
#include <thread>

#include "cellflow/fixtures.hpp"
#include "cellflow/io.hpp"
#include "cellflow/svg.hpp"
#include "cellflow/velocity.hpp"

namespace cellflow::cli {

namespace fs = std::filesystem;
using nlohmann::ordered_json;

int exit_code_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidInput: return kInvalidInput;
    case ErrorCode::InsufficientData: return kInsufficientData;
    case ErrorCode::BoundaryContact: return kBoundaryContact;
    case ErrorCode::NonConvergence: return kNonConvergence;
    default: return kFailure;
  }
}

void PipelineConfig::validate() const {
  auto fail = [](const std::string& what) { throw Error(ErrorCode::InvalidInput, "invalid configuration: " + what); };
  if (!(pixel_size > 0.0) || !std::isfinite(pixel_size)) fail("pixel size must be positive");
  if (!(frame_interval > 0.0) || !std::isfinite(frame_interval)) fail("frame interval must be positive");
  if (!(hbar > 0.0) || !std::isfinite(hbar)) fail("hbar must be positive");
  if (downscale == 0) fail("downscale must be at least 1");
  if (!(solver.tol > 0.0)) fail("tol must be positive");
  if (!(solver.relaxation > 0.0 && solver.relaxation < 2.0)) fail("relaxation must lie in (0, 2)");
  if (solver.max_sweeps <= 0) fail("max sweeps must be positive");
  if (quiver_stride == 0) fail("quiver stride must be at least 1");
  if (out_dir.empty()) fail("output directory is empty");
  evolution.validate();
}

std::string PipelineConfig::velocities_file() const {
  return velocities_path.empty() ? (fs::path(out_dir) / "velocities.csv").string() : velocities_path;
}

ExtractionMethod parse_method(const std::string& name) {
  for (auto m : {ExtractionMethod::DisappearedSegments, ExtractionMethod::SelfIntersections,
                 ExtractionMethod::WholeTrajectory}) {
    if (to_string(m) == name) return m;
  }
  throw Error(ErrorCode::InvalidInput, "unknown extraction method '" + name + "'");
}

namespace {

fs::path out_path(const PipelineConfig& cfg, const std::string& name) { return fs::path(cfg.out_dir) / name; }

void ensure_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) throw Error(ErrorCode::InvalidInput, "cannot create directory " + dir.string());
}

std::ofstream open_output(const fs::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::InvalidInput, "cannot write " + path.string());
  return out;
}

std::ifstream open_input(const fs::path& path, const std::string& hint) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::InvalidInput, "cannot read " + path.string() + hint);
  return in;
}

std::string ledger_name(const std::string& track_id) {
  std::string safe = track_id;
  for (char& c : safe) {
    const bool ok = std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == '_' || c == '.';
    if (!ok) c = '_';
  }
  return "track_" + safe + ".csv";
}

fs::path ledger_path(const PipelineConfig& cfg, const std::string& track_id) {
  return out_path(cfg, "ledgers") / ledger_name(track_id);
}

SegmentLedger load_ledger(const PipelineConfig& cfg, const std::string& track_id) {
  const auto path = ledger_path(cfg, track_id);
  auto in = open_input(path, " (run `smooth` first)");
  try {
    return io::read_ledger(in);
  } catch (const Error& e) {
    throw Error(e.code(), path.string() + ": " + e.what());
  }
}

/// Runs job(i) for i in [0, count) on up to `threads` workers.
void parallel_for(std::size_t count, unsigned threads, const std::function<void(std::size_t)>& job) {
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, count));
  if (threads <= 1) {
    for (std::size_t i = 0; i < count; ++i) job(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::exception_ptr> failures(count);
  std::vector<std::thread> pool;
  for (unsigned t = 0; t < threads; ++t) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < count; i = next++) {
        try {
          job(i);
        } catch (...) {
          failures[i] = std::current_exception();
        }
      }
    });
  }
  for (auto& th : pool) th.join();
  // Same error as a serial run would report.
  for (const auto& f : failures) {
    if (f) std::rethrow_exception(f);
  }
}

ordered_json evolution_json(const EvolutionParams& p) {
  ordered_json j;
  j["delta_min"] = p.delta_min;
  j["delta_max"] = p.delta_max;
  j["lambda_max"] = p.lambda_max;
  j["tau"] = p.tau;
  j["omega"] = p.omega;
  j["extra_steps"] = p.extra_steps;
  j["adaptive"] = p.adaptive;
  j["max_iterations"] = p.max_iterations;
  j["length_scale_um"] = p.length_scale;
  j["min_element_fraction"] = p.min_element_fraction;
  j["max_element_factor"] = p.max_element_factor;
  return j;
}

std::vector<Trajectory> load_tracks(const PipelineConfig& cfg) {
  if (cfg.tracks_path.empty()) throw Error(ErrorCode::InvalidInput, "missing --tracks");
  return io::read_trajectories_file(cfg.tracks_path, cfg.pixel_size, cfg.frame_interval);
}

void write_msd_csv(std::ostream& out, const std::string& abscissa, const MsdSeries& s) {
  out << abscissa << ",msd_um2,count\n";
  io::CsvWriter w(out);
  for (std::size_t k = 0; k < s.values.size(); ++k) w.cell(s.abscissae[k]).cell(s.values[k]).cell(s.counts[k]).end_row();
}

void write_fit(std::ostream& out, const std::string& estimator, const MsdSeries& s, const std::optional<HurstFit>& fit) {
  out << "[" << estimator << "]\n";
  out << "lags " << s.values.size() << "\n";
  if (!fit) {
    out << "fit unavailable\n";
    return;
  }
  out << "alpha " << io::format_double(fit->alpha) << "\n";
  out << "hurst " << io::format_double(fit->hurst) << "\n";
  out << "ln_intercept " << io::format_double(fit->intercept) << "\n";
  out << "points_used " << fit->points_used << "\n";
}

}  // namespace

void smooth(const PipelineConfig& cfg, std::ostream& log) {
  cfg.validate();
  const auto tracks = load_tracks(cfg);
  ensure_dir(cfg.out_dir);
  ensure_dir(out_path(cfg, "ledgers"));

  std::map<std::string, std::string> names;
  for (const auto& t : tracks) {
    const auto [it, fresh] = names.emplace(ledger_name(t.id), t.id);
    if (!fresh) throw Error(ErrorCode::InvalidInput, "track ids '" + it->second + "' and '" + t.id + "' map to the same file name");
  }

  std::vector<std::optional<SmoothingResult>> results(tracks.size());
  std::vector<std::string> errors(tracks.size());
  SmoothingOptions options;
  options.record_spans = cfg.record_spans;
  std::vector<double> wall_seconds(tracks.size(), 0.0);
  parallel_for(tracks.size(), cfg.threads, [&](std::size_t i) {
    const auto started = std::chrono::steady_clock::now();
    try {
      results[i] = smooth_trajectory(tracks[i], cfg.evolution, cfg.hbar, options);
      wall_seconds[i] = std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
    } catch (const Error& e) {
      if (e.code() == ErrorCode::InvalidInput) throw;
      errors[i] = e.what();
    }
  });

  auto smoothed = open_output(out_path(cfg, "smoothed.csv"));
  io::write_smoothed_header(smoothed);
  std::ofstream spans;
  if (cfg.record_spans) {
    spans = open_output(out_path(cfg, "spans.csv"));
    spans << "track_id,step,i1,i2\n";
  }

  ordered_json meta;
  meta["stage"] = "smooth";
  meta["tracks_file"] = fs::path(cfg.tracks_path).filename().string();
  meta["pixel_size_um"] = cfg.pixel_size;
  meta["frame_interval_min"] = cfg.frame_interval;
  meta["hbar_um"] = cfg.hbar;
  meta["evolution"] = evolution_json(cfg.evolution);
  meta["tracks"] = ordered_json::array();

  svg::TrackLayer raw{{}, "#9a9a9a", 0.6};
  svg::TrackLayer clean{{}, "#1f5fbf", 1.2};
  std::size_t converged = 0, failed = 0;
  for (std::size_t i = 0; i < tracks.size(); ++i) {
    const auto& t = tracks[i];
    raw.lines.push_back(t.points);
    ordered_json entry;
    entry["id"] = t.id;
    entry["recorded_points"] = t.size();
    if (!results[i]) {
      ++failed;
      entry["error"] = errors[i];
      meta["tracks"].push_back(entry);
      log << "warning: track " << t.id << " could not be smoothed: " << errors[i] << "\n";
      continue;
    }
    const auto& r = *results[i];
    io::SmoothedCurve curve{t.id, r.curve.points, point_segment_ids(r.ledger, r.curve.size())};
    io::write_smoothed_rows(smoothed, curve);
    auto ledger_out = open_output(ledger_path(cfg, t.id));
    io::write_ledger(ledger_out, r.ledger);
    io::CsvWriter w(spans);
    for (const auto& rec : r.span_log) w.cell(t.id).cell(static_cast<long long>(rec.step)).cell(rec.span.first).cell(rec.span.last).end_row();
    clean.lines.push_back(r.curve.points);

    converged += r.converged ? 1 : 0;
    entry["grid_points"] = r.curve.size();
    entry["converged"] = r.converged;
    entry["steps"] = r.steps;
    entry["steps_with_intersections"] = r.steps_with_intersections;
    entry["final_intersections"] = r.final_intersections;
    entry["disappeared_segments"] = r.ledger.size() - r.ledger.live_count();
    entry["length_um"] = r.curve.length();
    entry["wall_time_s"] = wall_seconds[i];
    entry["warnings"] = r.warnings;
    for (const auto& wmsg : r.warnings) log << "warning: " << wmsg << "\n";
    meta["tracks"].push_back(entry);
  }
  auto meta_out = open_output(out_path(cfg, "run_meta.json"));
  meta_out << meta.dump(2) << "\n";
  io::write_text_file(out_path(cfg, "tracks.svg").string(), svg::track_plot({raw, clean}, "recorded (grey) and smoothed (blue) tracks"));
  log << "smooth: " << tracks.size() << " tracks, " << converged << " converged";
  if (failed) log << ", " << failed << " failed";
  log << "\n";
  if (failed == tracks.size()) throw Error(ErrorCode::Degenerate, "no track could be smoothed");
}

void analyze(const PipelineConfig& cfg, std::ostream& log) {
  cfg.validate();
  const auto tracks = load_tracks(cfg);
  ensure_dir(cfg.out_dir);

  std::vector<RandomSubTrajectory> parts;
  for (const auto& t : tracks) {
    std::vector<RandomSubTrajectory> found;
    switch (cfg.method) {
      case ExtractionMethod::DisappearedSegments: found = extract_by_disappearance(load_ledger(cfg, t.id), t); break;
      case ExtractionMethod::SelfIntersections: found = extract_by_self_intersection(t, cfg.hbar); break;
      case ExtractionMethod::WholeTrajectory: found = whole_trajectory(t); break;
    }
    parts.insert(parts.end(), std::make_move_iterator(found.begin()), std::make_move_iterator(found.end()));
  }

  {
    auto out = open_output(out_path(cfg, "random_parts.csv"));
    out << "part_id,source_id,method,point_index,frame,x,y\n";
    io::CsvWriter w(out);
    for (std::size_t p = 0; p < parts.size(); ++p) {
      const auto& part = parts[p];
      for (std::size_t k = 0; k < part.size(); ++k) {
        w.cell(p)
            .cell(part.source_id)
            .cell(to_string(part.method))
            .cell(part.first_record + k)
            .cell(static_cast<long long>(std::llround(part.times[k] / part.frame_interval)))
            .cell(part.points[k].x)
            .cell(part.points[k].y)
            .end_row();
      }
    }
  }
  if (parts.empty()) {
    throw Error(ErrorCode::InsufficientData, "insufficient data: no random sub-trajectory with at least " +
                                                 std::to_string(kMinRandomPoints) + " points");
  }

  MsdSeries ea = eatamsd(parts);
  const HurstFit ea_fit = fit_hurst(ea);
  apply_fit(ea);
  MsdSeries ens = eamsd(parts);
  std::optional<HurstFit> ens_fit;
  try {
    ens_fit = fit_hurst(ens);
    apply_fit(ens);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::InsufficientData) throw;
    log << "warning: EAMSD fit skipped: " << e.what() << "\n";
  }

  {
    auto out = open_output(out_path(cfg, "msd.csv"));
    write_msd_csv(out, "lag_minutes", ea);
  }
  {
    auto out = open_output(out_path(cfg, "eamsd.csv"));
    write_msd_csv(out, "t_minutes", ens);
  }
  {
    auto out = open_output(out_path(cfg, "msd_fit.txt"));
    out << "method " << to_string(cfg.method) << "\n";
    out << "parts " << parts.size() << "\n";
    write_fit(out, "eatamsd", ea, ea_fit);
    write_fit(out, "eamsd", ens, ens_fit);
  }
  io::write_text_file(out_path(cfg, "msd.svg").string(), svg::msd_plot(ea, "EATAMSD (" + to_string(cfg.method) + ")", true));
  io::write_text_file(out_path(cfg, "eamsd.svg").string(), svg::msd_plot(ens, "EAMSD (" + to_string(cfg.method) + ")", ens_fit.has_value()));
  log << "analyze: " << parts.size() << " random parts, alpha = " << io::format_double(ea_fit.alpha)
      << ", H = " << io::format_double(ea_fit.hurst) << "\n";
}

void velocities(const PipelineConfig& cfg, std::ostream& log) {
  cfg.validate();
  const auto path = out_path(cfg, "smoothed.csv");
  auto in = open_input(path, " (run `smooth` first)");
  std::vector<io::SmoothedCurve> curves;
  try {
    curves = io::read_smoothed(in);
  } catch (const Error& e) {
    throw Error(e.code(), path.string() + ": " + e.what());
  }
  std::vector<VelocitySample> samples;
  for (const auto& c : curves) {
    SegmentLedger ledger = load_ledger(cfg, c.track_id);
    for (const auto& seg : ledger.segments) {
      if (seg.end_idx >= c.points.size()) throw Error(ErrorCode::InvalidInput, "ledger of track " + c.track_id + " does not match its smoothed curve");
    }
    redistribute_time(ledger);
    DiscreteCurve curve{c.points, cfg.hbar};
    auto result = compute_velocities(curve, ledger, c.track_id);
    for (const auto& w : result.warnings) log << "warning: " << c.track_id << ": " << w << "\n";
    samples.insert(samples.end(), result.samples.begin(), result.samples.end());
  }
  auto out = open_output(cfg.velocities_file());
  io::write_velocities_header(out);
  io::write_velocity_rows(out, samples);
  log << "velocities: " << samples.size() << " samples from " << curves.size() << " curves\n";
}

void reconstruct(const PipelineConfig& cfg, std::ostream& log) {
  cfg.validate();
  if (cfg.mask_path.empty()) throw Error(ErrorCode::InvalidInput, "missing --mask");
  DomainMask mask = io::read_pgm_mask_file(cfg.mask_path, cfg.pixel_size, cfg.downscale);
  std::vector<VelocitySample> samples;
  {
    auto in = open_input(cfg.velocities_file(), " (run `velocities` first)");
    try {
      samples = io::read_velocities(in);
    } catch (const Error& e) {
      throw Error(e.code(), cfg.velocities_file() + ": " + e.what());
    }
  }
  ensure_dir(cfg.out_dir);
  const auto r = reconstruct_field(samples, mask, cfg.solver);
  for (const auto& w : r.warnings) log << "warning: " << w << "\n";

  {
    auto out = open_output(out_path(cfg, "field.csv"));
    out << "i,j,x,y,vx,vy,speed\n";
    io::CsvWriter w(out);
    const auto& f = r.field;
    for (std::size_t vj = 0; vj < f.vertex_rows; ++vj) {
      for (std::size_t vi = 0; vi < f.vertex_cols; ++vi) {
        const std::size_t k = vj * f.vertex_cols + vi;
        if (!f.valid[k]) continue;
        w.cell(vi).cell(vj).cell(vi * f.cell_size).cell(vj * f.cell_size).cell(f.vectors[k].x).cell(f.vectors[k].y).cell(f.speed[k]).end_row();
      }
    }
  }
  io::write_text_file(out_path(cfg, "field_quiver.svg").string(), svg::quiver_plot(r.field, r.domain, cfg.quiver_stride, "reconstructed velocity field"));
  io::write_text_file(out_path(cfg, "heatmap_vx.svg").string(), svg::heatmap(r.vx, "vx (µm/min)"));
  io::write_text_file(out_path(cfg, "heatmap_vy.svg").string(), svg::heatmap(r.vy, "vy (µm/min)"));
  io::write_text_file(out_path(cfg, "heatmap_speed.svg").string(), svg::heatmap(r.speed, "speed (µm/min)"));

  ordered_json meta;
  meta["stage"] = "reconstruct";
  meta["cell_size_um"] = mask.cell_size;
  meta["cells"] = {mask.cols, mask.rows};
  meta["inside_cells"] = r.domain.inside_count();
  meta["samples"] = samples.size();
  meta["samples_outside_domain"] = r.skipped_samples;
  meta["dirichlet_squares"] = r.samples.square_count();
  meta["repaired_squares"] = r.repaired_squares;
  meta["tol"] = cfg.solver.tol;
  meta["relaxation"] = cfg.solver.relaxation;
  meta["residual"] = {{"vx", r.vx.residual}, {"vy", r.vy.residual}, {"speed", r.speed.residual}};
  meta["sweeps"] = {{"vx", r.vx.sweeps}, {"vy", r.vy.sweeps}, {"speed", r.speed.sweeps}};
  meta["clamped_negative_speed"] = r.field.clamped_negative;
  meta["warnings"] = r.warnings;
  auto out = open_output(out_path(cfg, "reconstruct_meta.json"));
  out << meta.dump(2) << "\n";
  log << "reconstruct: " << r.samples.square_count() << " Dirichlet squares (" << r.repaired_squares
      << " repaired), residuals " << io::format_double(r.vx.residual) << " / " << io::format_double(r.vy.residual)
      << " / " << io::format_double(r.speed.residual) << "\n";
}

void pipeline(const PipelineConfig& cfg, std::ostream& log) {
  cfg.validate();
  if (cfg.mask_path.empty()) throw Error(ErrorCode::InvalidInput, "missing --mask");
  if (!fs::is_regular_file(cfg.mask_path)) throw Error(ErrorCode::InvalidInput, "cannot read " + cfg.mask_path);
  smooth(cfg, log);
  analyze(cfg, log);
  velocities(cfg, log);
  reconstruct(cfg, log);
}

void gen_fixtures(const PipelineConfig& cfg, std::ostream& log) {
  if (!(cfg.pixel_size > 0.0)) throw Error(ErrorCode::InvalidInput, "pixel size must be positive");
  ensure_dir(cfg.out_dir);
  const auto data = fixtures::synthetic_dataset(cfg.seed, cfg.pixel_size);
  {
    auto out = open_output(out_path(cfg, "tracks.csv"));
    io::write_trajectories(out, data.tracks, cfg.pixel_size);
  }
  {
    auto out = open_output(out_path(cfg, "mask.pgm"));
    io::write_pgm_mask(out, data.mask);
  }
  {
    auto out = open_output(out_path(cfg, "loops.csv"));
    io::write_trajectories(out, {fixtures::figure_eight(), fixtures::triple_loop()}, cfg.pixel_size);
  }
  log << "gen-fixtures: " << data.tracks.size() << " tracks, " << data.mask.cols << "x" << data.mask.rows
      << " mask, seed " << cfg.seed << "\n";
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  PipelineConfig cfg;
  std::string method = to_string(cfg.method);
  bool constant = false;

  CLI::App app{"cellflow: trajectory smoothing, random-motion statistics and velocity-field reconstruction for cell tracks"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "cellflow 0.1.0");

  auto add_io = [&](CLI::App* sub, bool tracks, bool mask) {
    sub->add_option("-o,--out", cfg.out_dir, "Output directory")->capture_default_str();
    if (tracks) sub->add_option("-t,--tracks", cfg.tracks_path, "Tracks CSV: track_id,frame,x,y (pixels)")->required();
    if (mask) sub->add_option("-m,--mask", cfg.mask_path, "Domain mask, plain PGM (P2), one value per pixel");
    sub->add_option("--pixel-size", cfg.pixel_size, "Micrometres per pixel")->capture_default_str();
    sub->add_option("--frame-interval", cfg.frame_interval, "Minutes between frames")->capture_default_str();
    sub->add_option("--hbar", cfg.hbar, "Resampling spacing in µm")->capture_default_str();
  };
  auto add_smooth = [&](CLI::App* sub) {
    auto& e = cfg.evolution;
    sub->add_option("--delta-min", e.delta_min, "Curvature weight away from loops and during the extra steps")->capture_default_str();
    sub->add_option("--delta-max", e.delta_max, "Curvature weight inside self-intersections")->capture_default_str();
    sub->add_option("--lambda-max", e.lambda_max, "Attraction weight")->capture_default_str();
    sub->add_option("--tau", e.tau, "Time step (evolution units)")->capture_default_str();
    sub->add_option("--omega", e.omega, "Tangential redistribution speed")->capture_default_str();
    sub->add_option("--extra-steps", e.extra_steps, "Steps run after the last self-intersection is gone")->capture_default_str();
    sub->add_option("--max-iterations", e.max_iterations, "Iteration cap per track")->capture_default_str();
    sub->add_option("--length-scale", e.length_scale, "µm per evolution unit")->capture_default_str();
    sub->add_flag("--constant-params", constant, "Use delta-min and lambda-max everywhere instead of the adaptive ramp");
    sub->add_option("--threads", cfg.threads, "Worker threads for per-track smoothing (0: all cores)")->capture_default_str();
    sub->add_flag("--record-spans", cfg.record_spans, "Write every detected self-intersection span to spans.csv");
  };
  auto add_analyze = [&](CLI::App* sub) {
    sub->add_option("--method", method, "Random-part extraction")
        ->check(CLI::IsMember({"disappeared-segments", "self-intersections", "whole-trajectory"}))
        ->capture_default_str();
  };
  auto add_reconstruct = [&](CLI::App* sub) {
    sub->add_option("--velocities", cfg.velocities_path, "Velocity samples CSV (default <out>/velocities.csv)");
    sub->add_option("--downscale", cfg.downscale, "Mask pixels per reconstruction cell side")->capture_default_str();
    sub->add_option("--tol", cfg.solver.tol, "Laplace residual bound relative to the Dirichlet range")->capture_default_str();
    sub->add_option("--relaxation", cfg.solver.relaxation, "SOR over-relaxation factor")->capture_default_str();
    sub->add_option("--max-sweeps", cfg.solver.max_sweeps, "SOR sweep cap")->capture_default_str();
    sub->add_option("--quiver-stride", cfg.quiver_stride, "Draw every n-th vertex in the quiver plot")->capture_default_str();
  };

  auto* s_smooth = app.add_subcommand("smooth", "Remove self-intersections from every track");
  add_io(s_smooth, true, false);
  add_smooth(s_smooth);
  auto* s_analyze = app.add_subcommand("analyze", "Extract random parts and fit the MSD power law");
  add_io(s_analyze, true, false);
  add_analyze(s_analyze);
  auto* s_vel = app.add_subcommand("velocities", "Velocity samples along the smoothed curves");
  add_io(s_vel, false, false);
  auto* s_rec = app.add_subcommand("reconstruct", "Dense velocity field from the samples and the mask");
  add_io(s_rec, false, true);
  add_reconstruct(s_rec);
  auto* s_pipe = app.add_subcommand("pipeline", "smooth, analyze, velocities and reconstruct in one go");
  add_io(s_pipe, true, true);
  add_smooth(s_pipe);
  add_analyze(s_pipe);
  add_reconstruct(s_pipe);
  auto* s_gen = app.add_subcommand("gen-fixtures", "Write the seeded synthetic dataset and loop fixtures");
  s_gen->add_option("-o,--out", cfg.out_dir, "Output directory")->capture_default_str();
  s_gen->add_option("--seed", cfg.seed, "Random seed")->capture_default_str();
  s_gen->add_option("--pixel-size", cfg.pixel_size, "Micrometres per pixel")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kInvalidInput;
  }

  try {
    cfg.method = parse_method(method);
    cfg.evolution.adaptive = !constant;
    if (s_smooth->parsed()) smooth(cfg, out);
    else if (s_analyze->parsed()) analyze(cfg, out);
    else if (s_vel->parsed()) velocities(cfg, out);
    else if (s_rec->parsed()) reconstruct(cfg, out);
    else if (s_pipe->parsed()) pipeline(cfg, out);
    else if (s_gen->parsed()) gen_fixtures(cfg, out);
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return exit_code_for(e.code());
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kFailure;
  }
  return kOk;
}

}  // namespace cellflow::cli
