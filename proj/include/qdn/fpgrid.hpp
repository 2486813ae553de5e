#pragma once

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <cmath>
#include <map>
#include <mutex>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include "qdn/auxiliary.hpp"
#include "qdn/gibbs.hpp"
#include "qdn/potential.hpp"
#include "qdn/schedule.hpp"

// 1-D finite-volume discretization of the generator
//   L p = d/dx [ f(x) ( T p' + p W' ) ],   W = V - Gamma*Vtilde,
// on uniform cells over (-1,1). Fluxes use exponential (Chang-Cooper /
// Scharfetter-Gummel) weighting, which upwinds on W', keeps the scheme
// monotone and exactly mass conserving, and makes the discrete stationary
// vector available in closed form. f(+-1) = 0, so the boundary faces carry
// no flux.

namespace qdn {

struct Grid1D {
  int n_cells;
  double h;

  explicit Grid1D(int n) : n_cells(n), h(2.0 / n) {
    if (n < 16) throw std::invalid_argument("grid needs at least 16 cells");
  }
  double center(int i) const { return -1.0 + (i + 0.5) * h; }
  double face(int i) const { return -1.0 + i * h; }  // i = 0..n_cells
};

namespace detail {

// B(z) = z / (e^z - 1), the Bernoulli weight of exponential fitting.
inline double bernoulli_b(double z) {
  if (std::abs(z) < 1e-5) return 1.0 - 0.5 * z + z * z / 12.0;
  if (z > 0.0) {
    const double e = std::exp(-z);
    return z * e / (1.0 - e);
  }
  return z / std::expm1(z);
}

}  // namespace detail

struct GeneratorMatrix {
  Grid1D grid;
  double T = 1.0;
  double gamma = 0.0;
  double w = 1.0;
  std::string potential_id;

  // tridiagonal bands: lower[i] = L[i+1][i], upper[i] = L[i][i+1]
  Vec diag, lower, upper;
  Vec kappa;  // face Peclet numbers h*W'/T, interior faces only

  int size() const { return grid.n_cells; }

  Mat dense() const {
    const int n = size();
    Mat m = Mat::Zero(n, n);
    for (int i = 0; i < n; ++i) {
      m(i, i) = diag[i];
      if (i + 1 < n) {
        m(i, i + 1) = upper[i];
        m(i + 1, i) = lower[i];
      }
    }
    return m;
  }

  Vec apply(const Vec& p) const {
    const int n = size();
    Vec out(n);
    for (int i = 0; i < n; ++i) {
      double v = diag[i] * p[i];
      if (i > 0) v += lower[i - 1] * p[i - 1];
      if (i + 1 < n) v += upper[i] * p[i + 1];
      out[i] = v;
    }
    return out;
  }

  double inf_norm() const {
    const int n = size();
    double m = 0.0;
    for (int i = 0; i < n; ++i) {
      double r = std::abs(diag[i]);
      if (i > 0) r += std::abs(lower[i - 1]);
      if (i + 1 < n) r += std::abs(upper[i]);
      m = std::max(m, r);
    }
    return m;
  }

  // Exact discrete stationary density: zero flux on every face forces
  // pi_{i+1}/pi_i = exp(-kappa_{i+1/2}).
  Vec stationary() const {
    const int n = size();
    Vec logpi(n);
    logpi[0] = 0.0;
    for (int i = 1; i < n; ++i) logpi[i] = logpi[i - 1] - kappa[i - 1];
    const double mx = logpi.maxCoeff();
    Vec pi(n);
    double mass = 0.0;
    for (int i = 0; i < n; ++i) {
      pi[i] = std::exp(logpi[i] - mx);
      mass += pi[i] * grid.h;
    }
    pi /= mass;
    return pi;
  }
};

inline GeneratorMatrix build_generator(const Potential& p,
                                       const AuxiliarySpec& aux, double gamma,
                                       double T, const Grid1D& grid,
                                       double w = 1.0) {
  if (!(T > 0.0)) throw std::invalid_argument("generator needs T > 0");
  if (p.dim != 1)
    throw UnsupportedDimension("the generator grid is one-dimensional");
  validate_aux(aux, p);

  const int n = grid.n_cells;
  GeneratorMatrix L{grid};
  L.T = T;
  L.gamma = gamma;
  L.w = w;
  L.potential_id = p.id;
  L.diag = Vec::Zero(n);
  L.lower = Vec::Zero(n - 1);
  L.upper = Vec::Zero(n - 1);
  L.kappa = Vec::Zero(n - 1);

  Vec x(1);
  for (int i = 0; i + 1 < n; ++i) {
    const double xf = grid.face(i + 1);
    const double ff = (1.0 - xf * xf) / w;
    x[0] = xf;
    double wp = p.grad(x)[0];
    if (gamma != 0.0) wp -= gamma * eval_aux(aux, p, x).grad[0];
    if (!std::isfinite(wp))
      throw std::runtime_error("non-finite drift W' at a grid face");
    const double kap = grid.h * wp / T;
    const double scale = ff * T / (grid.h * grid.h);
    const double bplus = detail::bernoulli_b(kap);    // weight of p_i
    const double bminus = detail::bernoulli_b(-kap);  // weight of p_{i+1}
    L.kappa[i] = kap;
    L.upper[i] = scale * bminus;
    L.lower[i] = scale * bplus;
    L.diag[i] -= scale * bplus;
    L.diag[i + 1] -= scale * bminus;
  }
  return L;
}

// Spectral gap: distance from the zero eigenvalue to the rest of the
// spectrum. Dense solve; the matrix is similar to a symmetric one through
// the sqrt of its stationary vector, so the spectrum is real, which is
// asserted numerically.
inline double spectral_gap(const GeneratorMatrix& L) {
  const int n = L.size();
  if (n > 1024)
    throw std::invalid_argument("dense eigensolve limited to 1024 cells");
  Eigen::EigenSolver<Mat> solver(L.dense(), /*computeEigenvectors=*/false);
  if (solver.info() != Eigen::Success)
    throw std::runtime_error("eigensolver failed on the generator");
  const auto& ev = solver.eigenvalues();
  double rho = 0.0, max_imag = 0.0;
  for (int i = 0; i < n; ++i) {
    rho = std::max(rho, std::abs(ev[i]));
    max_imag = std::max(max_imag, std::abs(ev[i].imag()));
  }
  if (max_imag > 1e-8 * rho)
    throw std::runtime_error("generator spectrum is not numerically real");
  std::vector<double> re(static_cast<size_t>(n));
  for (int i = 0; i < n; ++i) re[static_cast<size_t>(i)] = ev[i].real();
  std::sort(re.begin(), re.end(), std::greater<double>());
  if (std::abs(re[0]) > 1e-6 * rho)
    throw std::runtime_error("generator lost its zero eigenvalue");
  return -re[1];
}

// The constant of the T- and Gamma-free Dirichlet quotient
//   c = inf_phi 2*Int f (phi')^2 dx / IntInt (phi(x)-phi(y))^2 dy dx.
// With Int phi = 0 the denominator is 4*Int phi^2 on a length-2 interval,
// so c is half the first nonzero eigenvalue of -d/dx[f d/dx], i.e. half the
// V=0 spectral gap at T=1. Cached per (cells, w).
inline double poincare_c(const Grid1D& grid, double w) {
  static std::map<std::pair<int, long long>, double> cache;
  static std::mutex mu;
  const auto key = std::make_pair(grid.n_cells,
                                  static_cast<long long>(w * 1e12));
  {
    std::lock_guard<std::mutex> lock(mu);
    auto it = cache.find(key);
    if (it != cache.end()) return it->second;
  }
  const Potential flat = make_constant(1, 0.0, "flat");
  const double c =
      0.5 * spectral_gap(build_generator(flat, AuxNone{}, 0.0, 1.0, grid, w));
  std::lock_guard<std::mutex> lock(mu);
  cache[key] = c;
  return c;
}

struct GapReport {
  double T = 0.0;
  double gamma_quantum = 0.0;
  double gap = 0.0;            // measured gamma
  double c = 0.0;              // Dirichlet constant estimate
  double m_star_value = 0.0;   // range of W
  double lower_bound = 0.0;    // c T exp(-2 M*/T)
  bool bound_pass = false;     // gap >= 0.9 * lower_bound
  double stationary_tv = 0.0;  // TV(discrete stationary, quadrature density)
  double b_value = 1.0;        // Eq-type tracking factor; 1 for frozen Gamma
};

inline std::vector<GapReport> gap_bound_sweep(const Potential& p,
                                              const AuxiliarySpec& aux,
                                              double gamma,
                                              const std::vector<double>& temps,
                                              const Grid1D& grid, double w = 1.0,
                                              int mstar_resolution = 4097) {
  const double c = poincare_c(grid, w);
  const double ms = m_star(p, aux, gamma, mstar_resolution);
  std::vector<GapReport> out;
  for (double T : temps) {
    if (!(T > 0.0)) throw std::invalid_argument("sweep temperatures must be > 0");
    GapReport r;
    r.T = T;
    r.gamma_quantum = gamma;
    r.c = c;
    r.m_star_value = ms;
    GeneratorMatrix L = build_generator(p, aux, gamma, T, grid, w);
    r.gap = spectral_gap(L);
    r.lower_bound = c * T * std::exp(-2.0 * ms / T);
    r.bound_pass = r.gap >= r.lower_bound * 0.9;
    const DensityGrid mu = density_grid({p, aux, gamma, T}, grid.n_cells);
    std::vector<double> pi_mass(static_cast<size_t>(grid.n_cells));
    const Vec pi = L.stationary();
    for (int i = 0; i < grid.n_cells; ++i)
      pi_mass[static_cast<size_t>(i)] = pi[i] * grid.h;
    r.stationary_tv = tv_distance(pi_mass, mu.masses());
    out.push_back(r);
  }
  return out;
}

// Least-squares slope of log(gap) against 1/T across a sweep.
inline double arrhenius_slope(const std::vector<GapReport>& sweep) {
  if (sweep.size() < 2)
    throw std::invalid_argument("arrhenius fit needs at least two points");
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double n = static_cast<double>(sweep.size());
  for (const auto& r : sweep) {
    const double x = 1.0 / r.T, y = std::log(r.gap);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

// ---- time evolution ---------------------------------------------------------

struct DensityPath {
  Grid1D grid;
  double T = 0.0;
  std::vector<double> times;
  std::vector<double> gammas;
  std::vector<Vec> densities;
  double max_mass_drift = 0.0;

  void to_csv(std::ostream& os) const {
    os << "t";
    for (int i = 0; i < grid.n_cells; ++i) os << ",m" << i;
    os << '\n';
    os.precision(17);
    for (size_t k = 0; k < times.size(); ++k) {
      os << times[k];
      for (int i = 0; i < grid.n_cells; ++i) os << ',' << densities[k][i];
      os << '\n';
    }
  }
};

namespace detail {

// Thomas solve of (I - dt*L) m = rhs. The matrix is strictly
// column-diagonally dominant (column sums of L vanish), so no pivoting.
inline Vec solve_backward_euler(const GeneratorMatrix& L, double dt,
                                const Vec& rhs) {
  const int n = L.size();
  Vec a(n), b(n), c(n), d = rhs;
  for (int i = 0; i < n; ++i) {
    b[i] = 1.0 - dt * L.diag[i];
    a[i] = (i > 0) ? -dt * L.lower[i - 1] : 0.0;
    c[i] = (i + 1 < n) ? -dt * L.upper[i] : 0.0;
  }
  for (int i = 1; i < n; ++i) {
    const double m = a[i] / b[i - 1];
    b[i] -= m * c[i - 1];
    d[i] -= m * d[i - 1];
  }
  Vec out(n);
  out[n - 1] = d[n - 1] / b[n - 1];
  for (int i = n - 2; i >= 0; --i) out[i] = (d[i] - c[i] * out[i + 1]) / b[i];
  return out;
}

}  // namespace detail

// Backward-Euler evolution of the cell densities under L_{Gamma(t)} at a
// constant temperature. The generator is refreshed from precomputed face
// data every step, so a moving Gamma costs O(N) per step. dt_ode <= 0 picks
// the conservative default 0.1/||L(Gamma(0))||_inf.
inline DensityPath evolve_density(const Potential& p, const AuxiliarySpec& aux,
                                  double T, const QuantumSchedule& q,
                                  const Grid1D& grid, Vec m0, double t_end,
                                  double dt_ode, double w = 1.0,
                                  int record_stride = 1) {
  if (!(T > 0.0)) throw std::invalid_argument("evolution needs T > 0");
  if (!(t_end > 0.0)) throw std::invalid_argument("t_end must be > 0");
  if (record_stride < 1) throw std::invalid_argument("record_stride >= 1");
  if (m0.size() != grid.n_cells)
    throw std::invalid_argument("initial density size mismatch");
  double mass = 0.0;
  for (int i = 0; i < grid.n_cells; ++i) {
    if (m0[i] < -1e-12)
      throw std::invalid_argument("initial density must be nonnegative");
    mass += m0[i] * grid.h;
  }
  if (std::abs(mass - 1.0) > 1e-6)
    throw std::invalid_argument("initial density must integrate to 1");
  m0 /= mass;

  // face data that does not depend on Gamma
  const int n = grid.n_cells;
  Vec f_face(n - 1), vp_face(n - 1), vtp_face(n - 1);
  Vec x(1);
  const bool has_aux = !std::holds_alternative<AuxNone>(aux);
  for (int i = 0; i + 1 < n; ++i) {
    const double xf = grid.face(i + 1);
    f_face[i] = (1.0 - xf * xf) / w;
    x[0] = xf;
    vp_face[i] = p.grad(x)[0];
    vtp_face[i] = has_aux ? eval_aux(aux, p, x).grad[0] : 0.0;
  }

  GeneratorMatrix L{grid};
  L.T = T;
  L.w = w;
  L.potential_id = p.id;
  L.diag = Vec::Zero(n);
  L.lower = Vec::Zero(n - 1);
  L.upper = Vec::Zero(n - 1);
  L.kappa = Vec::Zero(n - 1);
  auto refresh = [&](double gamma) {
    L.gamma = gamma;
    L.diag.setZero();
    for (int i = 0; i + 1 < n; ++i) {
      const double wp = vp_face[i] - gamma * vtp_face[i];
      const double kap = grid.h * wp / T;
      const double scale = f_face[i] * T / (grid.h * grid.h);
      const double bplus = detail::bernoulli_b(kap);
      const double bminus = detail::bernoulli_b(-kap);
      L.kappa[i] = kap;
      L.upper[i] = scale * bminus;
      L.lower[i] = scale * bplus;
      L.diag[i] -= scale * bplus;
      L.diag[i + 1] -= scale * bminus;
    }
  };

  if (dt_ode <= 0.0) {
    refresh(quantum_at(q, 0.0).gamma);
    dt_ode = 0.1 / L.inf_norm();
  }
  const long long steps = static_cast<long long>(std::ceil(t_end / dt_ode));

  DensityPath path{grid};
  path.T = T;
  Vec m = m0;
  path.times.push_back(0.0);
  path.gammas.push_back(quantum_at(q, 0.0).gamma);
  path.densities.push_back(m);

  for (long long k = 0; k < steps; ++k) {
    const double t_next = std::min(t_end, dt_ode * static_cast<double>(k + 1));
    const double dt = t_next - dt_ode * static_cast<double>(k);
    const double gamma = quantum_at(q, t_next).gamma;
    refresh(gamma);
    m = detail::solve_backward_euler(L, dt, m);
    double total = 0.0;
    for (int i = 0; i < n; ++i) total += m[i] * grid.h;
    path.max_mass_drift = std::max(path.max_mass_drift, std::abs(total - 1.0));
    m /= total;
    if ((k + 1) % record_stride == 0 || k + 1 == steps) {
      path.times.push_back(t_next);
      path.gammas.push_back(gamma);
      path.densities.push_back(m);
    }
  }
  return path;
}

// ---- the z_t diagnostic -----------------------------------------------------

struct ZtTrace {
  std::vector<double> times;
  std::vector<double> z;
  std::vector<double> b;                 // tracking factor, 0 where flagged
  std::vector<bool> b_denom_positive;    // false where the factor blows up
  double k_estimate = 0.0;               // max_t sqrt(z_t)
  long long underflow_cells = 0;
};

// z_t = Int m_t^2 / mu_{Gamma(t)} against the instantaneous quadrature
// density on the same cells. Cells where mu underflows are skipped and
// counted.
inline ZtTrace z_trace(const DensityPath& path, const QuantumSchedule& q,
                       const Potential& p, const AuxiliarySpec& aux,
                       double c_measured, double m_tilde,
                       int mstar_resolution = 4097) {
  ZtTrace tr;
  const double T = path.T;
  for (size_t k = 0; k < path.times.size(); ++k) {
    const double t = path.times[k];
    const GammaValue gv = quantum_at(q, t);
    const DensityGrid mu =
        density_grid({p, aux, gv.gamma, T}, path.grid.n_cells);
    const Vec& m = path.densities[k];
    double z = 0.0;
    for (int i = 0; i < path.grid.n_cells; ++i) {
      const double mui = mu.density[static_cast<size_t>(i)];
      if (mui < 1e-300) {
        ++tr.underflow_cells;
        continue;
      }
      z += m[i] * m[i] / mui * path.grid.h;
    }
    const double ms = m_star(p, aux, gv.gamma, mstar_resolution);
    const double denom = 1.0 + m_tilde / (2.0 * c_measured * T * T) *
                                   gv.dgamma * std::exp(2.0 * ms / T);
    tr.times.push_back(t);
    tr.z.push_back(z);
    tr.b_denom_positive.push_back(denom > 0.0);
    tr.b.push_back(denom > 0.0 ? 1.0 / denom : 0.0);
    tr.k_estimate = std::max(tr.k_estimate, std::sqrt(z));
  }
  return tr;
}

}  // namespace qdn
