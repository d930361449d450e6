#include "reftor/temporal_gauge.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <string>

#include <Eigen/Eigenvalues>

#include "reftor/errors.hpp"

namespace reftor {

namespace {

bool finite(const ComplexMatrix& m) { return m.allFinite(); }

// 4th-order first derivative at index i of n samples f(0..n-1), spacing h.
template <class F>
ComplexMatrix derivative(const F& f, int i, int n, double h) {
  if (i >= 2 && i <= n - 3) return (f(i - 2) - 8.0 * f(i - 1) + 8.0 * f(i + 1) - f(i + 2)) / (12.0 * h);
  if (i == 0) return (-25.0 * f(0) + 48.0 * f(1) - 36.0 * f(2) + 16.0 * f(3) - 3.0 * f(4)) / (12.0 * h);
  if (i == 1) return (-3.0 * f(0) - 10.0 * f(1) + 18.0 * f(2) - 6.0 * f(3) + f(4)) / (12.0 * h);
  if (i == n - 2)
    return -(-3.0 * f(n - 1) - 10.0 * f(n - 2) + 18.0 * f(n - 3) - 6.0 * f(n - 4) + f(n - 5)) / (12.0 * h);
  return -(-25.0 * f(n - 1) + 48.0 * f(n - 2) - 36.0 * f(n - 3) + 16.0 * f(n - 4) - 3.0 * f(n - 5)) / (12.0 * h);
}

// Cubic Lagrange interpolation of f(0..n-1) at fractional index u.
template <class F>
ComplexMatrix interpolate(const F& f, double u, int n) {
  const int i0 = std::clamp(static_cast<int>(std::floor(u)) - 1, 0, n - 4);
  ComplexMatrix out = ComplexMatrix::Zero(f(i0).rows(), f(i0).cols());
  for (int a = 0; a < 4; ++a) {
    double l = 1.0;
    for (int b = 0; b < 4; ++b)
      if (b != a) l *= (u - (i0 + b)) / double(a - b);
    out += l * f(i0 + a);
  }
  return out;
}

ComplexMatrix inverse_of(const ComplexMatrix& m) { return m.partialPivLu().inverse(); }

}  // namespace

double GaugeField::x(int ix) const { return -epsilon + ix * hx(); }
double GaugeField::y(int iy) const { return iy * hy(); }
double GaugeField::hx() const { return 2.0 * epsilon / (nx - 1); }
double GaugeField::hy() const { return 1.0 / (ny - 1); }

void GaugeField::validate() const {
  if (!(epsilon > 0.0)) throw StructuralError("gauge field: epsilon must be positive");
  if (nx < 5 || nx % 2 == 0) throw StructuralError("gauge field: nx must be odd and >= 5");
  if (ny < 5) throw StructuralError("gauge field: ny must be >= 5");
  if (rank < 1) throw StructuralError("gauge field: rank must be >= 1");
  const size_t n = static_cast<size_t>(nx) * ny;
  if (omega0.size() != n || omega_y.size() != n)
    throw StructuralError("gauge field: expected " + std::to_string(n) + " samples per component");
  for (size_t k = 0; k < n; ++k)
    for (const ComplexMatrix* m : {&omega0[k], &omega_y[k]}) {
      if (m->rows() != rank || m->cols() != rank)
        throw StructuralError("gauge field: sample " + std::to_string(k) + " is not " + std::to_string(rank) + "x" +
                              std::to_string(rank));
      if (!finite(*m)) throw StructuralError("gauge field: sample " + std::to_string(k) + " is not finite");
    }
}

GaugeField GaugeField::sample(double epsilon, int nx, int ny, int rank, const PatchFunction& fn0,
                              const PatchFunction& fny) {
  GaugeField w;
  w.epsilon = epsilon;
  w.nx = nx;
  w.ny = ny;
  w.rank = rank;
  if (nx < 2 || ny < 2) throw StructuralError("gauge field: grid too small");
  w.omega0.reserve(nx * ny);
  w.omega_y.reserve(nx * ny);
  for (int iy = 0; iy < ny; ++iy)
    for (int ix = 0; ix < nx; ++ix) {
      w.omega0.push_back(fn0(w.x(ix), w.y(iy)));
      w.omega_y.push_back(fny(w.x(ix), w.y(iy)));
    }
  w.omega0_fn = fn0;
  w.validate();
  return w;
}

GaugeTransformation GaugeTransformation::inverse() const {
  GaugeTransformation out = *this;
  for (auto& g : out.gamma) g = inverse_of(g);
  return out;
}

GaugeTransformation solve_gauge_ode(const GaugeField& w, int steps) {
  w.validate();
  if (steps < 1) throw DomainError("solve_gauge_ode: steps must be >= 1");
  const int half = w.origin();
  const int per_cell = (steps + half - 1) / half;
  const ComplexMatrix id = ComplexMatrix::Identity(w.rank, w.rank);

  GaugeTransformation g;
  g.epsilon = w.epsilon;
  g.nx = w.nx;
  g.ny = w.ny;
  g.gamma.assign(static_cast<size_t>(w.nx) * w.ny, id);

  for (int iy = 0; iy < w.ny; ++iy) {
    const double y = w.y(iy);
    auto sample = [&](int ix) -> const ComplexMatrix& { return w.w0(ix, iy); };
    auto omega = [&](double x) -> ComplexMatrix {
      if (w.omega0_fn) return w.omega0_fn(x, y);
      return interpolate(sample, (x + w.epsilon) / w.hx(), w.nx);
    };
    for (int dir : {1, -1}) {
      ComplexMatrix gam = id;
      const double h = dir * w.hx() / per_cell;
      for (int cell = 0; cell < half; ++cell) {
        const int ix = w.origin() + dir * cell;
        double x = w.x(ix);
        for (int s = 0; s < per_cell; ++s) {
          const ComplexMatrix a0 = omega(x);
          const ComplexMatrix am = omega(x + 0.5 * h);
          const ComplexMatrix a1 = omega(x + h);
          const ComplexMatrix k1 = -a0 * gam;
          const ComplexMatrix k2 = -am * (gam + 0.5 * h * k1);
          const ComplexMatrix k3 = -am * (gam + 0.5 * h * k2);
          const ComplexMatrix k4 = -a1 * (gam + h * k3);
          gam += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
          x += h;
        }
        const Complex det = gam.determinant();
        if (!finite(gam) || !(std::abs(det) >= kGaugeDetFloor))
          throw IntegrationError("gauge ODE: gamma became singular (|det| = " + std::to_string(std::abs(det)) +
                                 ") at x = " + std::to_string(w.x(ix + dir)) + ", y = " + std::to_string(y));
        g.gamma[iy * w.nx + ix + dir] = gam;
      }
    }
  }
  return g;
}

GaugeField gauge_transform(const GaugeField& w, const GaugeTransformation& g) {
  w.validate();
  if (g.nx != w.nx || g.ny != w.ny || std::abs(g.epsilon - w.epsilon) > 1e-15 * w.epsilon ||
      g.gamma.size() != w.omega0.size())
    throw StructuralError("gauge_transform: field and transformation grids differ");
  for (const auto& m : g.gamma)
    if (m.rows() != w.rank || m.cols() != w.rank) throw StructuralError("gauge_transform: gamma has the wrong rank");

  GaugeField out = w;
  out.omega0_fn = nullptr;
  for (int iy = 0; iy < w.ny; ++iy)
    for (int ix = 0; ix < w.nx; ++ix) {
      const ComplexMatrix& gam = g.at(ix, iy);
      const ComplexMatrix inv = inverse_of(gam);
      const ComplexMatrix dx = derivative([&](int k) -> const ComplexMatrix& { return g.at(k, iy); }, ix, w.nx, w.hx());
      const ComplexMatrix dy = derivative([&](int k) -> const ComplexMatrix& { return g.at(ix, k); }, iy, w.ny, w.hy());
      out.omega0[iy * w.nx + ix] = inv * (w.w0(ix, iy) * gam + dx);
      out.omega_y[iy * w.nx + ix] = inv * (w.wy(ix, iy) * gam + dy);
    }
  return out;
}

double curvature_residual(const GaugeField& w) {
  w.validate();
  double worst = 0.0;
  for (int iy = 0; iy < w.ny; ++iy)
    for (int ix = 0; ix < w.nx; ++ix) {
      const ComplexMatrix dx_wy =
          derivative([&](int k) -> const ComplexMatrix& { return w.wy(k, iy); }, ix, w.nx, w.hx());
      const ComplexMatrix dy_w0 =
          derivative([&](int k) -> const ComplexMatrix& { return w.w0(ix, k); }, iy, w.ny, w.hy());
      const ComplexMatrix& a = w.w0(ix, iy);
      const ComplexMatrix& b = w.wy(ix, iy);
      worst = std::max(worst, (dx_wy - dy_w0 + a * b - b * a).norm());
    }
  return worst;
}

TemporalResidual temporal_residual(const GaugeField& w) {
  w.validate();
  TemporalResidual r;
  for (int iy = 0; iy < w.ny; ++iy)
    for (int ix = 0; ix < w.nx; ++ix) {
      r.omega0_sup = std::max(r.omega0_sup, w.w0(ix, iy).norm());
      const ComplexMatrix d =
          derivative([&](int k) -> const ComplexMatrix& { return w.wy(k, iy); }, ix, w.nx, w.hx());
      r.dx_omega_sup = std::max(r.dx_omega_sup, d.norm());
    }
  return r;
}

GridPath rectangle_loop(int ix0, int iy0, int ix1, int iy1) {
  if (ix1 <= ix0 || iy1 <= iy0) throw StructuralError("rectangle_loop: empty rectangle");
  GridPath p;
  for (int ix = ix0; ix < ix1; ++ix) p.emplace_back(ix, iy0);
  for (int iy = iy0; iy < iy1; ++iy) p.emplace_back(ix1, iy);
  for (int ix = ix1; ix > ix0; --ix) p.emplace_back(ix, iy1);
  for (int iy = iy1; iy > iy0; --iy) p.emplace_back(ix0, iy);
  p.emplace_back(ix0, iy0);
  return p;
}

ComplexMatrix monodromy(const GaugeField& w, const GridPath& loop) {
  w.validate();
  if (loop.size() < 2 || loop.front() != loop.back()) throw StructuralError("monodromy: path is not closed");
  for (const auto& [ix, iy] : loop)
    if (ix < 0 || ix >= w.nx || iy < 0 || iy >= w.ny) throw StructuralError("monodromy: path leaves the grid");

  const double gauss = std::sqrt(3.0) / 6.0;
  ComplexMatrix mon = ComplexMatrix::Identity(w.rank, w.rank);
  for (size_t k = 0; k + 1 < loop.size(); ++k) {
    const auto [px, py] = loop[k];
    const auto [qx, qy] = loop[k + 1];
    const int sx = qx - px;
    const int sy = qy - py;
    if (std::abs(sx) + std::abs(sy) != 1)
      throw StructuralError("monodromy: consecutive path points " + std::to_string(k) + ", " + std::to_string(k + 1) +
                            " are not grid neighbours");
    ComplexMatrix w1, w2;
    double delta = 0.0;
    if (sx != 0) {
      auto f = [&](int i) -> const ComplexMatrix& { return w.w0(i, py); };
      w1 = interpolate(f, px + sx * (0.5 - gauss), w.nx);
      w2 = interpolate(f, px + sx * (0.5 + gauss), w.nx);
      delta = sx * w.hx();
    } else {
      auto f = [&](int i) -> const ComplexMatrix& { return w.wy(px, i); };
      w1 = interpolate(f, py + sy * (0.5 - gauss), w.ny);
      w2 = interpolate(f, py + sy * (0.5 + gauss), w.ny);
      delta = sy * w.hy();
    }
    const ComplexMatrix omega =
        -0.5 * delta * (w1 + w2) + (std::sqrt(3.0) * delta * delta / 12.0) * (w2 * w1 - w1 * w2);
    mon = (expm(omega) * mon).eval();
  }
  return mon;
}

ComplexMatrix PolynomialGauge::value(double x, double y) const {
  ComplexMatrix g = ComplexMatrix::Identity(rank, rank);
  for (const auto& t : terms) g += std::pow(x, t.px) * std::pow(y, t.py) * t.c;
  return g;
}

ComplexMatrix PolynomialGauge::dx(double x, double y) const {
  ComplexMatrix g = ComplexMatrix::Zero(rank, rank);
  for (const auto& t : terms)
    if (t.px > 0) g += double(t.px) * std::pow(x, t.px - 1) * std::pow(y, t.py) * t.c;
  return g;
}

ComplexMatrix PolynomialGauge::dy(double x, double y) const {
  ComplexMatrix g = ComplexMatrix::Zero(rank, rank);
  for (const auto& t : terms)
    if (t.py > 0) g += double(t.py) * std::pow(x, t.px) * std::pow(y, t.py - 1) * t.c;
  return g;
}

GaugeField PolynomialGauge::pure_gauge(double epsilon, int nx, int ny) const {
  const PolynomialGauge g = *this;
  return GaugeField::sample(
      epsilon, nx, ny, rank, [g](double x, double y) { return ComplexMatrix(inverse_of(g.value(x, y)) * g.dx(x, y)); },
      [g](double x, double y) { return ComplexMatrix(inverse_of(g.value(x, y)) * g.dy(x, y)); });
}

PolynomialGauge random_polynomial_gauge(std::uint64_t seed, int rank, int degree, double size) {
  if (rank < 1 || degree < 1 || !(size > 0.0)) throw DomainError("random_polynomial_gauge: bad parameters");
  std::mt19937_64 gen(seed);
  std::normal_distribution<double> normal;
  PolynomialGauge g;
  g.rank = rank;
  double total = 0.0;
  for (int d = 1; d <= degree; ++d)
    for (int px = 0; px <= d; ++px) {
      ComplexMatrix c(rank, rank);
      for (Eigen::Index i = 0; i < c.size(); ++i) c(i) = Complex(normal(gen), normal(gen));
      total += c.norm();
      g.terms.push_back(PolynomialGauge::Term{px, d - px, c});
    }
  for (auto& t : g.terms) t.c *= size / total;
  return g;
}

double eigenvalue_distance(const ComplexMatrix& a, const ComplexMatrix& b) {
  if (a.rows() != b.rows()) throw StructuralError("eigenvalue_distance: size mismatch");
  const Eigen::ComplexEigenSolver<ComplexMatrix> ea(a, false);
  const Eigen::ComplexEigenSolver<ComplexMatrix> eb(b, false);
  std::vector<Complex> rest(eb.eigenvalues().data(), eb.eigenvalues().data() + eb.eigenvalues().size());
  double worst = 0.0;
  for (Eigen::Index i = 0; i < ea.eigenvalues().size(); ++i) {
    const Complex v = ea.eigenvalues()(i);
    auto best = std::min_element(rest.begin(), rest.end(),
                                 [&](Complex p, Complex q) { return std::abs(p - v) < std::abs(q - v); });
    worst = std::max(worst, std::abs(*best - v));
    rest.erase(best);
  }
  return worst;
}

GaugePipeline run_gauge_pipeline(const GaugeField& w, int steps) {
  GaugePipeline out;
  out.before = temporal_residual(w);
  out.curvature_before = curvature_residual(w);
  const GaugeTransformation g = solve_gauge_ode(w, steps);
  const GaugeField t = gauge_transform(w, g);
  out.after = temporal_residual(t);
  out.curvature_after = curvature_residual(t);
  const GridPath loop = rectangle_loop(w.origin(), 0, w.nx - 1, w.ny - 1);
  const ComplexMatrix m0 = monodromy(w, loop);
  const ComplexMatrix m1 = monodromy(t, loop);
  out.monodromy_eigen_deviation = eigenvalue_distance(m0, m1);
  out.monodromy_deviation = (m1 - m0).norm();
  return out;
}

}  // namespace reftor
