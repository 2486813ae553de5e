#pragma once

// Test-side oracles, kept independent of the library paths they check:
// plain finite differences, grid searches, trapezoid quadrature, and a
// node-based eigen pencil for the Dirichlet constant.

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <cmath>
#include <functional>
#include <vector>

namespace oracle {

using Fn1 = std::function<double(double)>;

inline double fd_derivative(const Fn1& f, double x, double h = 1e-6) {
  return (f(x + h) - f(x - h)) / (2.0 * h);
}

inline double fd_second(const Fn1& f, double x, double h = 1e-5) {
  return (f(x + h) - 2.0 * f(x) + f(x - h)) / (h * h);
}

struct GridExtrema {
  double min_value, max_value, arg_min, arg_max;
};

inline GridExtrema grid_search(const Fn1& f, int nodes = 4097, double lo = -1.0,
                               double hi = 1.0) {
  GridExtrema g{1e300, -1e300, 0.0, 0.0};
  for (int i = 0; i < nodes; ++i) {
    const double x = lo + (hi - lo) * i / (nodes - 1);
    const double v = f(x);
    if (v < g.min_value) {
      g.min_value = v;
      g.arg_min = x;
    }
    if (v > g.max_value) {
      g.max_value = v;
      g.arg_max = x;
    }
  }
  return g;
}

// Gibbs cell masses on midpoint cells by trapezoid sub-quadrature inside
// each cell (independent of the library's midpoint rule).
inline std::vector<double> gibbs_masses_trapezoid(const Fn1& w_eff, double T,
                                                  int cells, int sub = 33) {
  std::vector<double> mass(static_cast<size_t>(cells), 0.0);
  const double h = 2.0 / cells;
  double total = 0.0;
  for (int i = 0; i < cells; ++i) {
    const double a = -1.0 + i * h;
    double s = 0.0;
    for (int k = 0; k < sub; ++k) {
      const double x = a + h * k / (sub - 1);
      const double weight = (k == 0 || k == sub - 1) ? 0.5 : 1.0;
      s += weight * std::exp(-w_eff(x) / T);
    }
    mass[static_cast<size_t>(i)] = s;
    total += s;
  }
  for (auto& m : mass) m /= total;
  return mass;
}

inline double tv(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (size_t i = 0; i < a.size(); ++i) s += std::abs(a[i] - b[i]);
  return 0.5 * s;
}

// Dirichlet constant by a node-based pencil, a different discretization from
// the library's finite-volume route: minimize 2*Int f phi'^2 over
// IntInt (phi(x)-phi(y))^2. Both functionals are shift invariant, so the
// trial space is restricted to Int phi = 0, where the denominator equals
// 4*Int phi^2 on the length-2 interval.
inline double dirichlet_c_fem(double w, int nodes = 513) {
  const int n = nodes;
  const double h = 2.0 / (n - 1);
  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(n, n);  // 2 * stiffness with f
  for (int i = 0; i + 1 < n; ++i) {
    const double xm = -1.0 + (i + 0.5) * h;
    const double f = (1.0 - xm * xm) / w;
    const double k = 2.0 * f / h;
    A(i, i) += k;
    A(i + 1, i + 1) += k;
    A(i, i + 1) -= k;
    A(i + 1, i) -= k;
  }
  Eigen::VectorXd wts = Eigen::VectorXd::Constant(n, h);  // trapezoid weights
  wts[0] = wts[n - 1] = 0.5 * h;
  Eigen::MatrixXd B = 4.0 * wts.asDiagonal();

  // deflate the constraint wts' phi = 0: columns 2..n of the Householder Q
  // of wts span exactly that subspace
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(wts);
  Eigen::MatrixXd Q = qr.householderQ();
  Eigen::MatrixXd Z = Q.rightCols(n - 1);
  Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> es(
      Z.transpose() * A * Z, Z.transpose() * B * Z);
  return es.eigenvalues()[0];
}

inline double least_squares_slope(const std::vector<double>& x,
                                  const std::vector<double>& y) {
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double n = static_cast<double>(x.size());
  for (size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
    sxx += x[i] * x[i];
    sxy += x[i] * y[i];
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

}  // namespace oracle
