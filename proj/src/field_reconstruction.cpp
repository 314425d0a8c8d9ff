#include "cellflow/field_reconstruction.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <limits>
#include <sstream>

#include "cellflow/error.hpp"

namespace cellflow {

DomainMask::DomainMask(std::size_t cols, std::size_t rows, double cell_size, bool fill)
    : cols(cols), rows(rows), cell_size(cell_size), inside(cols * rows, fill ? 1 : 0) {
  if (!(cell_size > 0.0)) throw Error(ErrorCode::InvalidInput, "cell size must be positive");
}

bool DomainMask::contains(long i, long j) const {
  if (i < 0 || j < 0 || i >= static_cast<long>(cols) || j >= static_cast<long>(rows)) return false;
  return inside[static_cast<std::size_t>(j) * cols + static_cast<std::size_t>(i)] != 0;
}

std::size_t DomainMask::inside_count() const {
  return static_cast<std::size_t>(std::count(inside.begin(), inside.end(), std::uint8_t{1}));
}

bool DomainMask::vertex_in_domain(std::size_t vi, std::size_t vj) const {
  const long i = static_cast<long>(vi);
  const long j = static_cast<long>(vj);
  return contains(i - 1, j - 1) || contains(i, j - 1) || contains(i - 1, j) || contains(i, j);
}

bool DomainMask::vertex_on_outer_boundary(std::size_t vi, std::size_t vj) const {
  const long i = static_cast<long>(vi);
  const long j = static_cast<long>(vj);
  const int n = contains(i - 1, j - 1) + contains(i, j - 1) + contains(i - 1, j) + contains(i, j);
  return n > 0 && n < 4;
}

std::size_t DomainMask::keep_largest_component() {
  std::vector<int> label(inside.size(), -1);
  std::vector<std::size_t> sizes;
  std::vector<std::size_t> stack;
  for (std::size_t start = 0; start < inside.size(); ++start) {
    if (!inside[start] || label[start] >= 0) continue;
    const int id = static_cast<int>(sizes.size());
    std::size_t size = 0;
    stack.push_back(start);
    label[start] = id;
    while (!stack.empty()) {
      const std::size_t c = stack.back();
      stack.pop_back();
      ++size;
      const long i = static_cast<long>(c % cols);
      const long j = static_cast<long>(c / cols);
      const long nb[4][2] = {{i - 1, j}, {i + 1, j}, {i, j - 1}, {i, j + 1}};
      for (const auto& q : nb) {
        if (!contains(q[0], q[1])) continue;
        const std::size_t k = static_cast<std::size_t>(q[1]) * cols + static_cast<std::size_t>(q[0]);
        if (label[k] < 0) {
          label[k] = id;
          stack.push_back(k);
        }
      }
    }
    sizes.push_back(size);
  }
  if (sizes.size() <= 1) return 0;
  const int best = static_cast<int>(std::max_element(sizes.begin(), sizes.end()) - sizes.begin());
  for (std::size_t c = 0; c < inside.size(); ++c) {
    if (inside[c] && label[c] != best) inside[c] = 0;
  }
  return sizes.size() - 1;
}

bool SparseSampleGrid::is_dirichlet(long i, long j) const {
  if (i < 0 || j < 0 || i >= static_cast<long>(cols) || j >= static_cast<long>(rows)) return false;
  return cells[static_cast<std::size_t>(j) * cols + static_cast<std::size_t>(i)].has_value();
}

std::size_t SparseSampleGrid::square_count() const {
  return static_cast<std::size_t>(std::count_if(cells.begin(), cells.end(), [](const auto& c) { return c.has_value(); }));
}

RasterizeResult rasterize_samples(std::span<const VelocitySample> samples, const DomainMask& mask) {
  RasterizeResult out;
  out.grid = SparseSampleGrid(mask.cols, mask.rows);
  std::vector<std::array<double, 3>> sums(mask.cols * mask.rows, {0.0, 0.0, 0.0});
  std::vector<std::size_t> counts(mask.cols * mask.rows, 0);
  for (const auto& s : samples) {
    const double fi = std::floor(s.position.x / mask.cell_size);
    const double fj = std::floor(s.position.y / mask.cell_size);
    if (!(std::isfinite(fi) && std::isfinite(fj)) || !mask.contains(static_cast<long>(fi), static_cast<long>(fj))) {
      ++out.skipped;
      continue;
    }
    const std::size_t c = static_cast<std::size_t>(fj) * mask.cols + static_cast<std::size_t>(fi);
    sums[c][0] += s.velocity.x;
    sums[c][1] += s.velocity.y;
    sums[c][2] += norm(s.velocity);
    ++counts[c];
  }
  for (std::size_t c = 0; c < counts.size(); ++c) {
    if (counts[c] == 0) continue;
    DirichletSquare sq;
    const double n = static_cast<double>(counts[c]);
    for (int k = 0; k < 3; ++k) sq.values[k] = sums[c][k] / n;
    sq.samples = counts[c];
    out.grid.cells[c] = sq;
  }
  return out;
}

namespace {

bool square_clear_of_boundary(const DomainMask& mask, std::size_t i, std::size_t j) {
  if (!mask.contains(static_cast<long>(i), static_cast<long>(j))) return false;
  for (std::size_t dj = 0; dj < 2; ++dj) {
    for (std::size_t di = 0; di < 2; ++di) {
      if (mask.vertex_on_outer_boundary(i + di, j + dj)) return false;
    }
  }
  return true;
}

[[noreturn]] void boundary_error(std::size_t i, std::size_t j, const char* what) {
  std::ostringstream msg;
  msg << "sample too close to boundary: " << what << " square (" << i << ", " << j << ") touches the domain boundary";
  throw Error(ErrorCode::BoundaryContact, msg.str());
}

DirichletSquare mean_square(const DirichletSquare& a, const DirichletSquare& b) {
  DirichletSquare m;
  for (int k = 0; k < 3; ++k) m.values[k] = (a.values[k] + b.values[k]) / 2.0;
  return m;
}

}  // namespace

std::size_t repair_lipschitz(SparseSampleGrid& grid, const DomainMask& mask) {
  std::size_t added = 0;
  bool changed = true;
  auto fill = [&](std::size_t i, std::size_t j, const DirichletSquare& value) {
    if (!square_clear_of_boundary(mask, i, j)) boundary_error(i, j, "repair");
    grid.at(i, j) = value;
    ++added;
    changed = true;
  };
  while (changed) {
    changed = false;
    for (std::size_t j = 0; j + 1 < grid.rows; ++j) {
      for (std::size_t i = 0; i + 1 < grid.cols; ++i) {
        const bool a = grid.at(i, j).has_value();
        const bool b = grid.at(i + 1, j).has_value();
        const bool c = grid.at(i, j + 1).has_value();
        const bool d = grid.at(i + 1, j + 1).has_value();
        if (a && d && !b && !c) {
          const auto m = mean_square(*grid.at(i, j), *grid.at(i + 1, j + 1));
          fill(i + 1, j, m);
          fill(i, j + 1, m);
        } else if (b && c && !a && !d) {
          const auto m = mean_square(*grid.at(i + 1, j), *grid.at(i, j + 1));
          fill(i, j, m);
          fill(i + 1, j + 1, m);
        }
      }
    }
  }
  return added;
}

void check_boundary_clearance(const SparseSampleGrid& grid, const DomainMask& mask) {
  for (std::size_t j = 0; j < grid.rows; ++j) {
    for (std::size_t i = 0; i < grid.cols; ++i) {
      if (grid.at(i, j) && !square_clear_of_boundary(mask, i, j)) boundary_error(i, j, "Dirichlet");
    }
  }
}

double DirichletTrace::edge_value(std::size_t ai, std::size_t aj, std::size_t bi, std::size_t bj, double t) const {
  const auto a = at(ai, aj);
  const auto b = at(bi, bj);
  if (!a || !b) throw Error(ErrorCode::InvalidInput, "edge endpoints carry no Dirichlet value");
  if (*a == *b) return *a;
  return (1.0 - t) * *a + t * *b;
}

DirichletTrace build_dirichlet_trace(const SparseSampleGrid& grid, ScalarKind kind) {
  DirichletTrace trace;
  trace.vertex_cols = grid.cols + 1;
  trace.vertex_rows = grid.rows + 1;
  trace.vertex_values.assign(trace.vertex_cols * trace.vertex_rows, std::nullopt);
  trace.on_gamma1.assign(trace.vertex_cols * trace.vertex_rows, 0);
  for (std::size_t vj = 0; vj < trace.vertex_rows; ++vj) {
    for (std::size_t vi = 0; vi < trace.vertex_cols; ++vi) {
      double sum = 0.0;
      int squares = 0;
      for (int dj = -1; dj <= 0; ++dj) {
        for (int di = -1; di <= 0; ++di) {
          const long i = static_cast<long>(vi) + di;
          const long j = static_cast<long>(vj) + dj;
          if (!grid.is_dirichlet(i, j)) continue;
          sum += grid.at(static_cast<std::size_t>(i), static_cast<std::size_t>(j))->value(kind);
          ++squares;
        }
      }
      if (squares == 0) continue;
      const std::size_t v = vj * trace.vertex_cols + vi;
      trace.vertex_values[v] = sum / squares;
      trace.on_gamma1[v] = squares < 4 ? 1 : 0;
    }
  }
  return trace;
}

LaplaceProblem build_laplace_problem(const DomainMask& mask, const SparseSampleGrid& grid, ScalarKind kind) {
  if (grid.cols != mask.cols || grid.rows != mask.rows) {
    throw Error(ErrorCode::InvalidInput, "sample grid and mask differ in size");
  }
  LaplaceProblem p;
  p.vertex_cols = mask.vertex_cols();
  p.vertex_rows = mask.vertex_rows();
  p.cell_inside = mask.inside;
  p.kind.assign(p.vertex_cols * p.vertex_rows, VertexKind::Excluded);
  p.dirichlet.assign(p.kind.size(), 0.0);
  const auto trace = build_dirichlet_trace(grid, kind);
  for (std::size_t vj = 0; vj < p.vertex_rows; ++vj) {
    for (std::size_t vi = 0; vi < p.vertex_cols; ++vi) {
      const std::size_t v = p.index(vi, vj);
      if (const auto g = trace.at(vi, vj)) {
        p.kind[v] = VertexKind::Dirichlet;
        p.dirichlet[v] = *g;
      } else if (mask.vertex_in_domain(vi, vj)) {
        p.kind[v] = VertexKind::Unknown;
      }
    }
  }
  return p;
}

namespace {

// Edge weights to the four neighbours of every vertex: half the number of
// inside cells adjacent to the edge.
struct Stencil {
  std::size_t cols = 0;
  std::vector<std::array<double, 4>> w;  // left, right, up, down
  std::vector<double> total;
};

Stencil build_stencil(const LaplaceProblem& p) {
  const std::size_t cc = p.vertex_cols - 1;
  const std::size_t cr = p.vertex_rows - 1;
  auto cell = [&](long i, long j) -> int {
    if (i < 0 || j < 0 || i >= static_cast<long>(cc) || j >= static_cast<long>(cr)) return 0;
    return p.cell_inside[static_cast<std::size_t>(j) * cc + static_cast<std::size_t>(i)] ? 1 : 0;
  };
  Stencil s;
  s.cols = p.vertex_cols;
  s.w.assign(p.kind.size(), {0.0, 0.0, 0.0, 0.0});
  s.total.assign(p.kind.size(), 0.0);
  for (std::size_t vj = 0; vj < p.vertex_rows; ++vj) {
    for (std::size_t vi = 0; vi < p.vertex_cols; ++vi) {
      const long i = static_cast<long>(vi);
      const long j = static_cast<long>(vj);
      auto& w = s.w[p.index(vi, vj)];
      w[0] = 0.5 * (cell(i - 1, j - 1) + cell(i - 1, j));  // edge to (vi−1, vj)
      w[1] = 0.5 * (cell(i, j - 1) + cell(i, j));          // edge to (vi+1, vj)
      w[2] = 0.5 * (cell(i - 1, j - 1) + cell(i, j - 1));  // edge to (vi, vj−1)
      w[3] = 0.5 * (cell(i - 1, j) + cell(i, j));          // edge to (vi, vj+1)
      s.total[p.index(vi, vj)] = w[0] + w[1] + w[2] + w[3];
    }
  }
  return s;
}

double weighted_mean(const Stencil& s, std::span<const double> u, std::size_t v) {
  const auto& w = s.w[v];
  double acc = 0.0;
  if (w[0] > 0.0) acc += w[0] * u[v - 1];
  if (w[1] > 0.0) acc += w[1] * u[v + 1];
  if (w[2] > 0.0) acc += w[2] * u[v - s.cols];
  if (w[3] > 0.0) acc += w[3] * u[v + s.cols];
  return acc / s.total[v];
}

double residual_with(const LaplaceProblem& p, const Stencil& s, std::span<const double> u) {
  double r = 0.0;
  for (std::size_t v = 0; v < p.kind.size(); ++v) {
    if (p.kind[v] != VertexKind::Unknown || !(s.total[v] > 0.0)) continue;
    r = std::max(r, std::abs(weighted_mean(s, u, v) - u[v]));
  }
  return r;
}

}  // namespace

double laplace_residual(const LaplaceProblem& problem, std::span<const double> values) {
  return residual_with(problem, build_stencil(problem), values);
}

ScalarField solve_laplace(const LaplaceProblem& problem, const SolverOptions& options) {
  if (!(options.tol > 0.0)) throw Error(ErrorCode::InvalidInput, "solver tolerance must be positive");
  if (!(options.relaxation > 0.0 && options.relaxation < 2.0)) {
    throw Error(ErrorCode::InvalidInput, "relaxation factor must lie in (0, 2)");
  }
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  double sum = 0.0;
  std::size_t n_dirichlet = 0;
  for (std::size_t v = 0; v < problem.kind.size(); ++v) {
    if (problem.kind[v] != VertexKind::Dirichlet) continue;
    lo = std::min(lo, problem.dirichlet[v]);
    hi = std::max(hi, problem.dirichlet[v]);
    sum += problem.dirichlet[v];
    ++n_dirichlet;
  }
  if (n_dirichlet == 0) throw Error(ErrorCode::InvalidInput, "Laplace problem has no Dirichlet data");

  const Stencil stencil = build_stencil(problem);
  const double start = sum / static_cast<double>(n_dirichlet);
  std::vector<double> u(problem.kind.size(), 0.0);
  std::vector<std::size_t> unknowns;
  for (std::size_t v = 0; v < u.size(); ++v) {
    if (problem.kind[v] == VertexKind::Dirichlet) {
      u[v] = problem.dirichlet[v];
    } else if (problem.kind[v] == VertexKind::Unknown) {
      u[v] = start;
      if (stencil.total[v] > 0.0) unknowns.push_back(v);
    }
  }

  const double range = hi - lo;
  const double threshold = options.tol * (range > 0.0 ? range : std::max(std::abs(hi), 1.0));
  const double omega = options.relaxation;
  ScalarField field;
  long sweeps = 0;
  double residual = residual_with(problem, stencil, u);
  while (residual > threshold) {
    if (sweeps >= options.max_sweeps) {
      std::ostringstream msg;
      msg << "Laplace relaxation did not converge in " << sweeps << " sweeps (residual " << residual << ")";
      throw Error(ErrorCode::NonConvergence, msg.str());
    }
    double sweep_change = 0.0;
    for (const std::size_t v : unknowns) {
      const double delta = weighted_mean(stencil, u, v) - u[v];
      sweep_change = std::max(sweep_change, std::abs(delta));
      u[v] += omega * delta;
    }
    ++sweeps;
    if (sweep_change <= threshold) residual = residual_with(problem, stencil, u);
  }

  field.vertex_cols = problem.vertex_cols;
  field.vertex_rows = problem.vertex_rows;
  field.kind = problem.kind;
  field.values = std::move(u);
  for (std::size_t v = 0; v < field.values.size(); ++v) {
    if (problem.kind[v] == VertexKind::Excluded) field.values[v] = std::numeric_limits<double>::quiet_NaN();
  }
  field.residual = residual;
  field.sweeps = sweeps;
  return field;
}

ScalarField solve_laplace(const DomainMask& mask, const SparseSampleGrid& grid, ScalarKind kind,
                          const SolverOptions& options) {
  return solve_laplace(build_laplace_problem(mask, grid, kind), options);
}

VectorField recombine(const ScalarField& vx, const ScalarField& vy, const ScalarField& length, double eps) {
  if (vx.values.size() != vy.values.size() || vx.values.size() != length.values.size()) {
    throw Error(ErrorCode::InvalidInput, "recombine needs three fields on the same vertices");
  }
  VectorField out;
  out.vertex_cols = vx.vertex_cols;
  out.vertex_rows = vx.vertex_rows;
  const std::size_t n = vx.values.size();
  out.vectors.assign(n, Vec2{});
  out.speed.assign(n, 0.0);
  out.valid.assign(n, 0);
  for (std::size_t v = 0; v < n; ++v) {
    const double a = vx.values[v];
    const double b = vy.values[v];
    double len = length.values[v];
    if (std::isnan(a) || std::isnan(b) || std::isnan(len)) continue;
    out.valid[v] = 1;
    if (len < 0.0) {
      len = 0.0;
      ++out.clamped_negative;
    }
    const double m = std::hypot(a, b);
    if (!(m >= eps) || m == 0.0) continue;
    out.vectors[v] = Vec2{a, b} * (len / m);
    out.speed[v] = len;
  }
  return out;
}

ReconstructionResult reconstruct_field(std::span<const VelocitySample> samples, const DomainMask& input_mask,
                                       const SolverOptions& options) {
  ReconstructionResult result;
  result.domain = input_mask;
  DomainMask& mask = result.domain;
  if (const std::size_t dropped = mask.keep_largest_component(); dropped > 0) {
    std::ostringstream msg;
    msg << "mask has " << dropped + 1 << " components; only the largest is used";
    result.warnings.push_back(msg.str());
  }
  auto raster = rasterize_samples(samples, mask);
  result.skipped_samples = raster.skipped;
  if (raster.skipped > 0) {
    std::ostringstream msg;
    msg << raster.skipped << " sample(s) outside the domain skipped";
    result.warnings.push_back(msg.str());
  }
  if (raster.grid.square_count() == 0) throw Error(ErrorCode::InsufficientData, "no velocity samples inside the domain");
  check_boundary_clearance(raster.grid, mask);
  result.repaired_squares = repair_lipschitz(raster.grid, mask);
  result.samples = std::move(raster.grid);

  auto solve = [&](ScalarKind kind) { return solve_laplace(mask, result.samples, kind, options); };
  auto fx = std::async(std::launch::async, solve, ScalarKind::Vx);
  auto fy = std::async(std::launch::async, solve, ScalarKind::Vy);
  result.speed = solve(ScalarKind::Speed);
  result.vx = fx.get();
  result.vy = fy.get();

  double max_speed = 0.0;
  for (const auto& c : result.samples.cells) {
    if (c) max_speed = std::max(max_speed, c->value(ScalarKind::Speed));
  }
  result.field = recombine(result.vx, result.vy, result.speed, 1e-10 * max_speed);
  result.field.cell_size = mask.cell_size;
  if (result.field.clamped_negative > 0) {
    std::ostringstream msg;
    msg << result.field.clamped_negative << " negative length value(s) clamped to zero";
    result.warnings.push_back(msg.str());
  }
  return result;
}

}  // namespace cellflow
