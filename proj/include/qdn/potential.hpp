#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "qdn/rng.hpp"

namespace qdn {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

// Objective V on the closed cube [-1,1]^n with analytic first and second
// derivatives. third_contraction is optional: given directions (a,b) it
// returns the vector with components sum_{k,l} a_k b_l d^3V/dx_j dx_k dx_l,
// which is what the gradient of a Hessian-quadratic form needs.
struct Potential {
  int dim = 1;
  std::string id;
  std::function<double(const Vec&)> value;
  std::function<Vec(const Vec&)> grad;
  std::function<Mat(const Vec&)> hess;
  std::function<Vec(const Vec&, const Vec&, const Vec&)> third_contraction;
  std::vector<Vec> minimizers;

  bool has_third() const { return static_cast<bool>(third_contraction); }
};

struct EvalResult {
  double value;
  Vec grad;
  Mat hess;
};

struct RangeReport {
  double inf_value = 0.0;
  double sup_value = 0.0;
  double range = 0.0;  // sup - inf
  Vec arg_inf, arg_sup;
  int resolution = 0;
  bool approximate = false;
};

struct DerivativeReport {
  double max_grad_error = 0.0;
  double max_hess_error = 0.0;
  int samples = 0;
  double step = 0.0;
};

struct UnsupportedDimension : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

inline bool in_closed_cube(const Vec& x) {
  for (int i = 0; i < x.size(); ++i)
    if (!(std::abs(x[i]) <= 1.0)) return false;
  return true;
}

inline void require_in_cube(const Potential& p, const Vec& x) {
  if (x.size() != p.dim)
    throw std::domain_error("point dimension " + std::to_string(x.size()) +
                            " != potential dimension " + std::to_string(p.dim));
  if (!in_closed_cube(x))
    throw std::domain_error("point outside the closed cube [-1,1]^n");
}

inline EvalResult eval_all(const Potential& p, const Vec& x) {
  require_in_cube(p, x);
  EvalResult r{p.value(x), p.grad(x), p.hess(x)};
  if (!std::isfinite(r.value) || !r.grad.allFinite() || !r.hess.allFinite())
    throw std::runtime_error("non-finite evaluation of '" + p.id + "'");
  const double scale = 1.0 + r.hess.cwiseAbs().maxCoeff();
  if ((r.hess - r.hess.transpose()).cwiseAbs().maxCoeff() > 1e-8 * scale)
    throw std::runtime_error("asymmetric Hessian from '" + p.id + "'");
  return r;
}

namespace detail {

// Scan fn over the node grid with `resolution` points per axis, faces
// included. Exhaustive only up to n=3.
inline RangeReport range_on_grid(int dim,
                                 const std::function<double(const Vec&)>& fn,
                                 int resolution) {
  if (dim > 3)
    throw UnsupportedDimension(
        "exhaustive range scan supports n <= 3; use the sampled estimate");
  if (resolution < 3) throw std::invalid_argument("resolution must be >= 3");

  RangeReport rep;
  rep.resolution = resolution;
  rep.inf_value = std::numeric_limits<double>::infinity();
  rep.sup_value = -std::numeric_limits<double>::infinity();

  const double h = 2.0 / (resolution - 1);
  long long total = 1;
  for (int d = 0; d < dim; ++d) total *= resolution;

  Vec x(dim);
  for (long long flat = 0; flat < total; ++flat) {
    long long rem = flat;
    for (int d = 0; d < dim; ++d) {
      const int idx = static_cast<int>(rem % resolution);
      rem /= resolution;
      x[d] = (idx == resolution - 1) ? 1.0 : -1.0 + idx * h;
    }
    const double v = fn(x);
    if (!std::isfinite(v))
      throw std::runtime_error("non-finite value during range scan");
    if (v < rep.inf_value) {
      rep.inf_value = v;
      rep.arg_inf = x;
    }
    if (v > rep.sup_value) {
      rep.sup_value = v;
      rep.arg_sup = x;
    }
  }
  rep.range = rep.sup_value - rep.inf_value;
  return rep;
}

}  // namespace detail

inline RangeReport potential_range(const Potential& p, int resolution) {
  return detail::range_on_grid(p.dim, p.value, resolution);
}

// Seeded uniform sampling over the cube, for n > 3. Reported as approximate.
inline RangeReport potential_range_sampled(const Potential& p, int samples,
                                           std::uint64_t seed) {
  if (samples < 1) throw std::invalid_argument("samples must be >= 1");
  RangeReport rep;
  rep.approximate = true;
  rep.resolution = samples;
  rep.inf_value = std::numeric_limits<double>::infinity();
  rep.sup_value = -std::numeric_limits<double>::infinity();
  CounterRng rng(seed);
  Vec x(p.dim);
  std::uint64_t c = 0;
  for (int s = 0; s < samples; ++s) {
    for (int d = 0; d < p.dim; ++d) x[d] = -1.0 + 2.0 * rng.uniform(c++);
    const double v = p.value(x);
    if (!std::isfinite(v))
      throw std::runtime_error("non-finite value during sampled range scan");
    if (v < rep.inf_value) {
      rep.inf_value = v;
      rep.arg_inf = x;
    }
    if (v > rep.sup_value) {
      rep.sup_value = v;
      rep.arg_sup = x;
    }
  }
  rep.range = rep.sup_value - rep.inf_value;
  return rep;
}

// Compares the analytic gradient against central differences of V, and the
// analytic Hessian against central differences of the gradient, at seeded
// interior points. Deterministic given the seed.
inline DerivativeReport check_derivatives(const Potential& p, int samples,
                                          double h, std::uint64_t seed) {
  if (h <= 0.0) throw std::invalid_argument("step h must be positive");
  if (samples < 1) throw std::invalid_argument("samples must be >= 1");

  DerivativeReport rep;
  rep.samples = samples;
  rep.step = h;
  CounterRng rng(seed);
  Vec x(p.dim), xp, xm;
  std::uint64_t c = 0;
  for (int s = 0; s < samples; ++s) {
    // stay h inside the cube so the stencil never leaves the domain
    for (int d = 0; d < p.dim; ++d)
      x[d] = (-1.0 + h) + (2.0 - 2.0 * h) * rng.uniform(c++);
    const double v = p.value(x);
    if (!std::isfinite(v))
      throw std::runtime_error("non-evaluable sample point in '" + p.id + "'");
    const Vec g = p.grad(x);
    const Mat H = p.hess(x);
    for (int j = 0; j < p.dim; ++j) {
      xp = x;
      xm = x;
      xp[j] += h;
      xm[j] -= h;
      const double fd = (p.value(xp) - p.value(xm)) / (2.0 * h);
      rep.max_grad_error = std::max(rep.max_grad_error, std::abs(fd - g[j]));
      const Vec gd = (p.grad(xp) - p.grad(xm)) / (2.0 * h);
      rep.max_hess_error =
          std::max(rep.max_hess_error, (gd - H.col(j)).cwiseAbs().maxCoeff());
    }
  }
  return rep;
}

inline Potential make_constant(int dim, double c, std::string id = "constant") {
  Potential p;
  p.dim = dim;
  p.id = std::move(id);
  p.value = [c](const Vec&) { return c; };
  p.grad = [dim](const Vec&) { return Vec::Zero(dim).eval(); };
  p.hess = [dim](const Vec&) { return Mat::Zero(dim, dim).eval(); };
  p.third_contraction = [dim](const Vec&, const Vec&, const Vec&) {
    return Vec::Zero(dim).eval();
  };
  return p;
}

}  // namespace qdn
