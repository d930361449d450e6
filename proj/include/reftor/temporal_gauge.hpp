#pragma once

#include <cstdint>
#include <functional>
#include <utility>
#include <vector>

#include "reftor/linalg.hpp"

namespace reftor {

using PatchFunction = std::function<ComplexMatrix(double x, double y)>;

/// Connection omega = omega_0 dx + omega_y dy on the patch [-eps, eps] x [0, 1],
/// sampled on a uniform nx x ny grid (nx odd so that x = 0 is a grid column).
/// Samples are stored row by row: index iy * nx + ix.
struct GaugeField {
  double epsilon = 0.5;
  int nx = 0;
  int ny = 0;
  int rank = 1;
  std::vector<ComplexMatrix> omega0;
  std::vector<ComplexMatrix> omega_y;
  /// Optional exact omega_0, used by the ODE solver between grid points
  /// (otherwise cubic interpolation of the samples).
  PatchFunction omega0_fn;

  double x(int ix) const;
  double y(int iy) const;
  double hx() const;
  double hy() const;
  /// Column of x = 0.
  int origin() const { return (nx - 1) / 2; }
  const ComplexMatrix& w0(int ix, int iy) const { return omega0[iy * nx + ix]; }
  const ComplexMatrix& wy(int ix, int iy) const { return omega_y[iy * nx + ix]; }
  /// StructuralError unless nx odd >= 5, ny >= 5, eps > 0, sample counts and
  /// shapes match and all entries are finite.
  void validate() const;

  /// Samples the two callables; keeps fn0 as omega0_fn.
  static GaugeField sample(double epsilon, int nx, int ny, int rank, const PatchFunction& fn0,
                           const PatchFunction& fny);
};

/// gamma on the grid of a GaugeField, gamma(0, y) = I.
struct GaugeTransformation {
  double epsilon = 0.5;
  int nx = 0;
  int ny = 0;
  std::vector<ComplexMatrix> gamma;

  const ComplexMatrix& at(int ix, int iy) const { return gamma[iy * nx + ix]; }
  /// Pointwise inverse.
  GaugeTransformation inverse() const;
};

/// Smallest |det gamma| accepted by the solver.
inline constexpr double kGaugeDetFloor = 1e-12;

/// Per grid row, RK4 for d gamma / dx = -omega_0 gamma from gamma(0, y) = I out
/// to x = +-eps. `steps` is the number of RK4 steps across [0, eps], rounded
/// up to a whole number per grid cell. IntegrationError if |det gamma| drops
/// below kGaugeDetFloor or an entry stops being finite.
GaugeTransformation solve_gauge_ode(const GaugeField& w, int steps);

/// omega_gamma = gamma^{-1} omega gamma + gamma^{-1} d gamma, d gamma by
/// 4th-order finite differences (central inside, one-sided at the edges).
/// StructuralError on grid mismatch. The result carries no callable.
GaugeField gauge_transform(const GaugeField& w, const GaugeTransformation& g);

/// max over the grid of |d_x omega_y - d_y omega_0 + [omega_0, omega_y]|_F.
double curvature_residual(const GaugeField& w);

struct TemporalResidual {
  double omega0_sup = 0.0;  // max |omega_0|_F
  double dx_omega_sup = 0.0;  // max |d_x omega_y|_F
};

TemporalResidual temporal_residual(const GaugeField& w);

/// Closed path of grid points (ix, iy); consecutive points are neighbours.
using GridPath = std::vector<std::pair<int, int>>;

/// Counter-clockwise boundary of the grid rectangle [ix0, ix1] x [iy0, iy1],
/// starting and ending at (ix0, iy0).
GridPath rectangle_loop(int ix0, int iy0, int ix1, int iy1);

/// Parallel transport Y' = -omega(c') Y around the loop, Mon = E_n ... E_1.
/// Each segment uses the two-point Gauss Magnus step
/// exp(-(h/2)(w1 + w2) + (sqrt(3) h^2 / 12)[w2, w1]) with omega interpolated
/// cubically along the grid line. StructuralError for open or broken paths.
ComplexMatrix monodromy(const GaugeField& w, const GridPath& loop);

/// g(x, y) = I + sum c_{ij} x^i y^j.
struct PolynomialGauge {
  struct Term {
    int px = 0;
    int py = 0;
    ComplexMatrix c;
  };
  int rank = 1;
  std::vector<Term> terms;

  ComplexMatrix value(double x, double y) const;
  ComplexMatrix dx(double x, double y) const;
  ComplexMatrix dy(double x, double y) const;
  /// omega = g^{-1} dg sampled on the grid (flat by construction).
  GaugeField pure_gauge(double epsilon, int nx, int ny) const;
};

/// Random terms of total degree 1..degree with sum |c|_F = size; for
/// eps <= 1 and size < 1 the gauge stays invertible on the patch.
PolynomialGauge random_polynomial_gauge(std::uint64_t seed, int rank, int degree = 2, double size = 0.6);

struct GaugePipeline {
  TemporalResidual before, after;
  double curvature_before = 0.0;
  double curvature_after = 0.0;
  /// Largest distance between matched monodromy eigenvalues before/after.
  double monodromy_eigen_deviation = 0.0;
  /// Largest |Mon_after - Mon_before|_F (the loop starts on x = 0).
  double monodromy_deviation = 0.0;
};

/// solve_gauge_ode + gauge_transform, with monodromy compared on the
/// rectangle loop from (origin, 0) to (nx - 1, ny - 1).
GaugePipeline run_gauge_pipeline(const GaugeField& w, int steps);

/// Greedy nearest matching of two eigenvalue lists; largest matched distance.
double eigenvalue_distance(const ComplexMatrix& a, const ComplexMatrix& b);

}  // namespace reftor
