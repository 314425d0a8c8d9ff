#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "cellflow/cli.hpp"
#include "cellflow/fixtures.hpp"

namespace py = pybind11;
using namespace cellflow;

namespace {

using Array = py::array_t<double, py::array::c_style | py::array::forcecast>;

std::vector<Vec2> to_points(const Array& a) {
  if (a.ndim() != 2 || a.shape(1) != 2) throw Error(ErrorCode::InvalidInput, "points must have shape (n, 2)");
  const auto r = a.unchecked<2>();
  std::vector<Vec2> out(static_cast<std::size_t>(a.shape(0)));
  for (py::ssize_t i = 0; i < a.shape(0); ++i) out[i] = {r(i, 0), r(i, 1)};
  return out;
}

py::array_t<double> from_points(const std::vector<Vec2>& pts) {
  py::array_t<double> a({static_cast<py::ssize_t>(pts.size()), py::ssize_t{2}});
  auto w = a.mutable_unchecked<2>();
  for (std::size_t i = 0; i < pts.size(); ++i) {
    w(i, 0) = pts[i].x;
    w(i, 1) = pts[i].y;
  }
  return a;
}

py::array_t<double> grid_array(const std::vector<double>& values, std::size_t cols, std::size_t rows) {
  py::array_t<double> a({static_cast<py::ssize_t>(rows), static_cast<py::ssize_t>(cols)});
  std::copy(values.begin(), values.end(), a.mutable_data());
  return a;
}

Trajectory make_track(const Array& points, double frame_interval, const std::string& id) {
  Trajectory t;
  t.id = id;
  t.points = to_points(points);
  t.frame_interval = frame_interval;
  for (std::size_t k = 0; k < t.points.size(); ++k) t.times.push_back(frame_interval * static_cast<double>(k));
  return t;
}

RandomSubTrajectory make_part(const Array& points, double frame_interval) {
  RandomSubTrajectory s;
  s.points = to_points(points);
  s.frame_interval = frame_interval;
  for (std::size_t k = 0; k < s.points.size(); ++k) s.times.push_back(frame_interval * static_cast<double>(k));
  return s;
}

py::list spans_to_list(const std::vector<IntersectionSpan>& spans) {
  py::list out;
  for (const auto& s : spans) out.append(py::make_tuple(s.first, s.last));
  return out;
}

py::dict msd_dict(const MsdSeries& m) {
  py::dict d;
  d["lags"] = m.abscissae;
  d["values"] = m.values;
  d["counts"] = m.counts;
  d["alpha"] = m.alpha;
  d["hurst"] = m.hurst;
  d["ln_intercept"] = m.intercept;
  return d;
}

py::list parts_list(const std::vector<RandomSubTrajectory>& parts) {
  py::list out;
  for (const auto& p : parts) out.append(from_points(p.points));
  return out;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Trajectory smoothing, random-motion statistics and velocity-field reconstruction";

  static py::exception<Error> base(m, "Error", PyExc_RuntimeError);
  static py::exception<Error> invalid(m, "InvalidInputError", base.ptr());
  static py::exception<Error> insufficient(m, "InsufficientDataError", base.ptr());
  static py::exception<Error> boundary(m, "BoundaryContactError", base.ptr());
  static py::exception<Error> nonconv(m, "NonConvergenceError", base.ptr());
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const Error& e) {
      switch (e.code()) {
        case ErrorCode::InvalidInput: py::set_error(invalid, e.what()); break;
        case ErrorCode::InsufficientData: py::set_error(insufficient, e.what()); break;
        case ErrorCode::BoundaryContact: py::set_error(boundary, e.what()); break;
        case ErrorCode::NonConvergence: py::set_error(nonconv, e.what()); break;
        default: py::set_error(base, e.what()); break;
      }
    }
  });

  m.attr("DEFAULT_PIXEL_SIZE") = kDefaultPixelSize;
  m.attr("DEFAULT_FRAME_INTERVAL") = kDefaultFrameInterval;

  py::class_<EvolutionParams>(m, "EvolutionParams")
      .def(py::init<>())
      .def_readwrite("delta_min", &EvolutionParams::delta_min)
      .def_readwrite("delta_max", &EvolutionParams::delta_max)
      .def_readwrite("lambda_max", &EvolutionParams::lambda_max)
      .def_readwrite("tau", &EvolutionParams::tau)
      .def_readwrite("omega", &EvolutionParams::omega)
      .def_readwrite("extra_steps", &EvolutionParams::extra_steps)
      .def_readwrite("adaptive", &EvolutionParams::adaptive)
      .def_readwrite("max_iterations", &EvolutionParams::max_iterations)
      .def_readwrite("length_scale", &EvolutionParams::length_scale);

  m.def(
      "smooth",
      [](const Array& points, double frame_interval, double hbar, const EvolutionParams& params) {
        const auto t = make_track(points, frame_interval, "track");
        SmoothingResult r;
        {
          py::gil_scoped_release release;
          r = smooth_trajectory(t, params, hbar);
        }
        py::list ledger;
        for (const auto& s : r.ledger.segments) {
          py::dict d;
          d["L"] = s.length;
          d["Ld"] = s.discrete_length;
          d["start_idx"] = s.start_idx;
          d["end_idx"] = s.end_idx;
          d["disappeared"] = s.disappeared;
          ledger.append(d);
        }
        py::dict out;
        out["points"] = from_points(r.curve.points);
        out["ledger"] = ledger;
        out["steps"] = r.steps;
        out["steps_with_intersections"] = r.steps_with_intersections;
        out["converged"] = r.converged;
        out["final_intersections"] = r.final_intersections;
        out["warnings"] = r.warnings;
        return out;
      },
      py::arg("points"), py::arg("frame_interval") = kDefaultFrameInterval, py::arg("hbar") = kDefaultHbar,
      py::arg("params") = EvolutionParams{},
      "Smooth one recorded track (points in µm, one per frame).");

  m.def(
      "detect_self_intersections",
      [](const Array& points, double hbar) { return spans_to_list(detect_self_intersections(to_points(points), hbar)); },
      py::arg("points"), py::arg("hbar"), "Point-grid spans (i1, i2).");
  m.def(
      "detect_intersections",
      [](const Array& points, double hbar) { return spans_to_list(detect_intersections(to_points(points), hbar)); },
      py::arg("points"), py::arg("hbar"), "Point-grid spans merged with exact element crossings.");

  m.def(
      "extract_by_self_intersection",
      [](const Array& points, double frame_interval, double hbar) {
        return parts_list(extract_by_self_intersection(make_track(points, frame_interval, "track"), hbar));
      },
      py::arg("points"), py::arg("frame_interval") = kDefaultFrameInterval, py::arg("hbar") = kDefaultHbar);

  m.def(
      "tamsd",
      [](const Array& points, std::size_t lag, double frame_interval) {
        return tamsd(make_part(points, frame_interval), lag);
      },
      py::arg("points"), py::arg("lag"), py::arg("frame_interval") = kDefaultFrameInterval,
      "Time-averaged MSD at lag n, or None outside 1 <= n <= (K+1)/4.");
  m.def(
      "eatamsd",
      [](const std::vector<Array>& parts, double frame_interval, bool fit) {
        std::vector<RandomSubTrajectory> subs;
        for (const auto& p : parts) subs.push_back(make_part(p, frame_interval));
        auto e = eatamsd(subs);
        if (fit) apply_fit(e);
        return msd_dict(e);
      },
      py::arg("parts"), py::arg("frame_interval") = kDefaultFrameInterval, py::arg("fit") = true);
  m.def(
      "eamsd",
      [](const std::vector<Array>& parts, double frame_interval) {
        std::vector<RandomSubTrajectory> subs;
        for (const auto& p : parts) subs.push_back(make_part(p, frame_interval));
        return msd_dict(eamsd(subs));
      },
      py::arg("parts"), py::arg("frame_interval") = kDefaultFrameInterval);
  m.def(
      "fit_hurst",
      [](std::vector<double> t, std::vector<double> rho) {
        MsdSeries s;
        s.abscissae = std::move(t);
        s.values = std::move(rho);
        const auto f = fit_hurst(s);
        py::dict d;
        d["alpha"] = f.alpha;
        d["hurst"] = f.hurst;
        d["ln_intercept"] = f.intercept;
        d["points_used"] = f.points_used;
        return d;
      },
      py::arg("t"), py::arg("rho"));

  m.def(
      "velocities",
      [](const Array& points, double frame_interval, double hbar, const EvolutionParams& params) {
        const auto t = make_track(points, frame_interval, "track");
        VelocityResult v;
        {
          py::gil_scoped_release release;
          auto r = smooth_trajectory(t, params, hbar);
          redistribute_time(r.ledger);
          v = compute_velocities(r.curve, r.ledger, t.id);
        }
        std::vector<Vec2> pos, vel;
        for (const auto& s : v.samples) {
          pos.push_back(s.position);
          vel.push_back(s.velocity);
        }
        return py::make_tuple(from_points(pos), from_points(vel));
      },
      py::arg("points"), py::arg("frame_interval") = kDefaultFrameInterval, py::arg("hbar") = kDefaultHbar,
      py::arg("params") = EvolutionParams{}, "Smooth a track and return (positions, velocities) in µm and µm/min.");

  m.def(
      "reconstruct",
      [](const Array& positions, const Array& velocities, py::array_t<bool, py::array::c_style | py::array::forcecast> mask,
         double cell_size, double tol, long max_sweeps) {
        if (mask.ndim() != 2) throw Error(ErrorCode::InvalidInput, "mask must be 2-D (rows, cols)");
        const auto pos = to_points(positions);
        const auto vel = to_points(velocities);
        if (pos.size() != vel.size()) throw Error(ErrorCode::InvalidInput, "positions and velocities differ in length");
        DomainMask dm(static_cast<std::size_t>(mask.shape(1)), static_cast<std::size_t>(mask.shape(0)), cell_size);
        const auto mr = mask.unchecked<2>();
        for (std::size_t j = 0; j < dm.rows; ++j) {
          for (std::size_t i = 0; i < dm.cols; ++i) dm.set(i, j, mr(j, i));
        }
        std::vector<VelocitySample> samples;
        for (std::size_t k = 0; k < pos.size(); ++k) samples.push_back({pos[k], vel[k], "s", 0});
        SolverOptions o;
        o.tol = tol;
        o.max_sweeps = max_sweeps;
        ReconstructionResult r;
        {
          py::gil_scoped_release release;
          r = reconstruct_field(samples, dm, o);
        }
        const auto& f = r.field;
        std::vector<double> vx, vy;
        for (std::size_t k = 0; k < f.vectors.size(); ++k) {
          const bool ok = f.valid[k] != 0;
          vx.push_back(ok ? f.vectors[k].x : std::nan(""));
          vy.push_back(ok ? f.vectors[k].y : std::nan(""));
        }
        py::dict d;
        d["vx"] = grid_array(vx, f.vertex_cols, f.vertex_rows);
        d["vy"] = grid_array(vy, f.vertex_cols, f.vertex_rows);
        d["speed"] = grid_array(f.speed, f.vertex_cols, f.vertex_rows);
        d["residuals"] = py::make_tuple(r.vx.residual, r.vy.residual, r.speed.residual);
        d["repaired_squares"] = r.repaired_squares;
        d["skipped_samples"] = r.skipped_samples;
        d["warnings"] = r.warnings;
        return d;
      },
      py::arg("positions"), py::arg("velocities"), py::arg("mask"), py::arg("cell_size") = 1.0, py::arg("tol") = 1e-8,
      py::arg("max_sweeps") = SolverOptions{}.max_sweeps,
      "Harmonic velocity field on the pixel vertices of a boolean (rows, cols) mask; NaN outside.");

  m.def(
      "run_cli",
      [](const std::vector<std::string>& args) {
        std::vector<std::string> all{"cellflow"};
        all.insert(all.end(), args.begin(), args.end());
        std::vector<const char*> argv;
        for (const auto& a : all) argv.push_back(a.c_str());
        std::ostringstream out, err;
        int code = 0;
        {
          py::gil_scoped_release release;
          code = cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
        }
        return py::make_tuple(code, out.str(), err.str());
      },
      py::arg("args"), "Run the command line in-process; returns (exit_code, stdout, stderr).");

  m.def("figure_eight", [] { return from_points(fixtures::figure_eight().points); });
  m.def("triple_loop", [] { return from_points(fixtures::triple_loop().points); });
  m.def(
      "brownian_ensemble",
      [](std::size_t walkers, std::size_t steps, double diffusion, double frame_interval, std::uint64_t seed) {
        return parts_list(fixtures::brownian_ensemble(walkers, steps, diffusion, frame_interval, seed));
      },
      py::arg("walkers"), py::arg("steps"), py::arg("diffusion"), py::arg("frame_interval") = kDefaultFrameInterval,
      py::arg("seed") = 1);
}
