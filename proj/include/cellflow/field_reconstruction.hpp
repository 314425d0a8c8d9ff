#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "cellflow/velocity.hpp"

namespace cellflow {

/// Pixel-cell domain. Cell (i, j) covers [i h, (i+1) h) × [j h, (j+1) h) in
/// µm, with j growing downwards like image rows.
struct DomainMask {
  std::size_t cols = 0;
  std::size_t rows = 0;
  double cell_size = 1.0;
  std::vector<std::uint8_t> inside;  // row-major, 1 = inside

  DomainMask() = default;
  DomainMask(std::size_t cols, std::size_t rows, double cell_size, bool fill = false);

  bool contains(long i, long j) const;  // inside and within bounds
  void set(std::size_t i, std::size_t j, bool value) { inside[j * cols + i] = value ? 1 : 0; }
  std::size_t inside_count() const;

  std::size_t vertex_cols() const { return cols + 1; }
  std::size_t vertex_rows() const { return rows + 1; }
  /// Vertex lies on a corner of at least one inside cell.
  bool vertex_in_domain(std::size_t vi, std::size_t vj) const;
  /// Vertex in the domain with at least one adjacent cell outside (or off-grid).
  bool vertex_on_outer_boundary(std::size_t vi, std::size_t vj) const;

  /// Keeps the largest 4-connected component of inside cells. Returns the
  /// number of components discarded.
  std::size_t keep_largest_component();
};

enum class ScalarKind : int { Vx = 0, Vy = 1, Speed = 2 };

struct DirichletSquare {
  std::array<double, 3> values{};  // vx, vy, mean speed
  std::size_t samples = 0;         // 0 for squares added by the Lipschitz repair
  double value(ScalarKind k) const { return values[static_cast<int>(k)]; }
};

/// Cells carrying Dirichlet data.
struct SparseSampleGrid {
  std::size_t cols = 0;
  std::size_t rows = 0;
  std::vector<std::optional<DirichletSquare>> cells;  // row-major

  SparseSampleGrid() = default;
  SparseSampleGrid(std::size_t cols, std::size_t rows) : cols(cols), rows(rows), cells(cols * rows) {}

  bool is_dirichlet(long i, long j) const;
  const std::optional<DirichletSquare>& at(std::size_t i, std::size_t j) const { return cells[j * cols + i]; }
  std::optional<DirichletSquare>& at(std::size_t i, std::size_t j) { return cells[j * cols + i]; }
  std::size_t square_count() const;
};

struct RasterizeResult {
  SparseSampleGrid grid;
  std::size_t skipped = 0;  // samples outside the domain
};

/// Cells are half-open (left/top edges inclusive). A cell's values are the
/// componentwise means of vx and vy and the mean of the sample speeds.
RasterizeResult rasterize_samples(std::span<const VelocitySample> samples, const DomainMask& mask);

/// Fills the two missing cells of every 2×2 block whose Dirichlet squares
/// touch only at a corner, with the mean of the diagonal pair, until no such
/// contact remains. Returns the number of squares added. Throws
/// Error(BoundaryContact) when a new square would leave the domain or touch
/// its outer boundary.
std::size_t repair_lipschitz(SparseSampleGrid& grid, const DomainMask& mask);

/// Throws Error(BoundaryContact) if any Dirichlet square shares a vertex with the outer boundary.
void check_boundary_clearance(const SparseSampleGrid& grid, const DomainMask& mask);

/// Vertex values u_{i,j} on the closed Dirichlet squares: the mean of all
/// adjacent squares. Along an edge of Γ¹, g is linear between its vertices.
struct DirichletTrace {
  std::size_t vertex_cols = 0;
  std::size_t vertex_rows = 0;
  std::vector<std::optional<double>> vertex_values;  // set on every corner of a Dirichlet square
  std::vector<std::uint8_t> on_gamma1;               // vertex lies on ∂S

  std::optional<double> at(std::size_t vi, std::size_t vj) const { return vertex_values[vj * vertex_cols + vi]; }
  bool is_gamma1(std::size_t vi, std::size_t vj) const { return on_gamma1[vj * vertex_cols + vi] != 0; }
  /// g at parameter t ∈ [0,1] along the edge from vertex a to the 4-adjacent vertex b.
  double edge_value(std::size_t ai, std::size_t aj, std::size_t bi, std::size_t bj, double t) const;
};

DirichletTrace build_dirichlet_trace(const SparseSampleGrid& grid, ScalarKind kind);

enum class VertexKind : std::uint8_t { Excluded, Unknown, Dirichlet };

/// Discrete Laplace problem on pixel vertices. Unknown vertices satisfy
/// Σ_e w_e (u_nb − u) = 0 where an edge weighs half the number of adjacent
/// inside cells; for straight boundary runs and corners this is the
/// mirrored-ghost zero-Neumann stencil, and in the interior the 5-point stencil.
struct LaplaceProblem {
  std::size_t vertex_cols = 0;
  std::size_t vertex_rows = 0;
  std::vector<std::uint8_t> cell_inside;  // (vertex_cols−1) × (vertex_rows−1)
  std::vector<VertexKind> kind;
  std::vector<double> dirichlet;  // prescribed value where kind == Dirichlet

  std::size_t index(std::size_t vi, std::size_t vj) const { return vj * vertex_cols + vi; }
};

/// Unknowns on Ω plus Γ², Dirichlet on S (Γ¹ and vertices inside S, the
/// latter only kept for output), following the model domain construction.
LaplaceProblem build_laplace_problem(const DomainMask& mask, const SparseSampleGrid& grid, ScalarKind kind);

struct SolverOptions {
  double tol = 1e-8;  // max residual relative to the Dirichlet value range
  double relaxation = 1.5;
  long max_sweeps = 1000000;
};

struct ScalarField {
  std::size_t vertex_cols = 0;
  std::size_t vertex_rows = 0;
  std::vector<double> values;  // NaN where excluded
  std::vector<VertexKind> kind;
  double residual = 0.0;
  long sweeps = 0;

  double at(std::size_t vi, std::size_t vj) const { return values[vj * vertex_cols + vi]; }
};

/// Max over unknown vertices of |weighted neighbour mean − u|.
double laplace_residual(const LaplaceProblem& problem, std::span<const double> values);

/// Over-relaxed lexicographic sweeps until the residual is below tol ×
/// (Dirichlet range). Throws Error(InvalidInput) without Dirichlet data and
/// Error(NonConvergence) at the sweep cap.
ScalarField solve_laplace(const LaplaceProblem& problem, const SolverOptions& options = {});

ScalarField solve_laplace(const DomainMask& mask, const SparseSampleGrid& grid, ScalarKind kind,
                          const SolverOptions& options = {});

struct VectorField {
  std::size_t vertex_cols = 0;
  std::size_t vertex_rows = 0;
  double cell_size = 1.0;
  std::vector<Vec2> vectors;
  std::vector<double> speed;
  std::vector<std::uint8_t> valid;
  std::size_t clamped_negative = 0;
};

/// Direction of (vx, vy) scaled by the length field; zero where |(vx, vy)| < eps.
VectorField recombine(const ScalarField& vx, const ScalarField& vy, const ScalarField& length, double eps);

struct ReconstructionResult {
  VectorField field;
  ScalarField vx;
  ScalarField vy;
  ScalarField speed;
  SparseSampleGrid samples;
  DomainMask domain;  // the mask after dropping all but the largest component
  std::size_t skipped_samples = 0;
  std::size_t repaired_squares = 0;
  std::vector<std::string> warnings;
};

/// rasterize → repair → boundary check → three Laplace solves (concurrently) → recombine.
ReconstructionResult reconstruct_field(std::span<const VelocitySample> samples, const DomainMask& mask,
                                       const SolverOptions& options = {});

}  // namespace cellflow
