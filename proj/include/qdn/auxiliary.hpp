#pragma once

#include <cmath>
#include <string>
#include <variant>

#include "qdn/catalog.hpp"
#include "qdn/potential.hpp"

// Auxiliary functions Vtilde and the effective potential W = V - Gamma*Vtilde.
// The quantum parameter Gamma scales Vtilde, which shapes the early search:
//   - homotopy: Vtilde = V - V0 with V0 unimodal, so W interpolates V0 -> V
//   - contraction: Vtilde = V, so W = (1-Gamma) V
//   - hessian quadratic: Vtilde = -eps' H eps (positive at maxima, negative
//     at minima)
//   - kinetic: Vtilde = -(eps^2 + |V'|^2) V'' in 1-D, with the natural
//     n-D form -eps' H eps - (grad V)' H (grad V)

namespace qdn {

struct AuxNone {};
struct AuxHomotopy {
  Potential v0;
};
struct AuxContraction {};
struct AuxHessianQuadratic {
  Vec eps;
};
struct AuxKinetic1D {
  double eps = 0.1;
};
struct AuxKineticND {
  Vec eps;
};

using AuxiliarySpec = std::variant<AuxNone, AuxHomotopy, AuxContraction,
                                   AuxHessianQuadratic, AuxKinetic1D,
                                   AuxKineticND>;

struct AuxEval {
  double value;
  Vec grad;
};

inline Vec default_eps(int dim) {
  return Vec::Constant(dim, 0.1 / std::sqrt(static_cast<double>(dim)));
}

inline Potential default_homotopy_base(int dim) {
  return make_quadratic_bowl(Vec::Zero(dim));
}

inline std::string aux_name(const AuxiliarySpec& aux) {
  struct Namer {
    std::string operator()(const AuxNone&) const { return "none"; }
    std::string operator()(const AuxHomotopy&) const { return "homotopy"; }
    std::string operator()(const AuxContraction&) const { return "contraction"; }
    std::string operator()(const AuxHessianQuadratic&) const {
      return "hessian_quadratic";
    }
    std::string operator()(const AuxKinetic1D&) const { return "kinetic_1d"; }
    std::string operator()(const AuxKineticND&) const { return "kinetic_nd"; }
  };
  return std::visit(Namer{}, aux);
}

namespace detail {

// Second-order gradient of a scalar field by differences, shifting the
// stencil inward where a centered one would leave the closed cube.
inline Vec fd_gradient(const std::function<double(const Vec&)>& fn,
                       const Vec& x, double h) {
  const int n = static_cast<int>(x.size());
  Vec g(n);
  Vec xa = x, xb = x;
  for (int j = 0; j < n; ++j) {
    const double xj = x[j];
    if (xj + h > 1.0) {  // backward: (3f(x) - 4f(x-h) + f(x-2h)) / 2h
      xa[j] = xj - h;
      xb[j] = xj - 2.0 * h;
      g[j] = (3.0 * fn(x) - 4.0 * fn(xa) + fn(xb)) / (2.0 * h);
    } else if (xj - h < -1.0) {
      xa[j] = xj + h;
      xb[j] = xj + 2.0 * h;
      g[j] = (-3.0 * fn(x) + 4.0 * fn(xa) - fn(xb)) / (2.0 * h);
    } else {
      xa[j] = xj + h;
      xb[j] = xj - h;
      g[j] = (fn(xa) - fn(xb)) / (2.0 * h);
    }
    xa[j] = xj;
    xb[j] = xj;
  }
  return g;
}

inline constexpr double kAuxFdStep = 1e-4;

}  // namespace detail

// Grid check used for homotopy bases: no strict interior local minimum other
// than the declared one. Supported for n <= 2; higher dimensions are trusted
// metadata.
inline bool grid_unimodal(const Potential& p, int resolution = 512) {
  if (p.dim > 2)
    throw UnsupportedDimension("grid unimodality check supports n <= 2");
  if (p.minimizers.size() != 1) return false;
  const Vec& declared = p.minimizers.front();
  const double h = 2.0 / (resolution - 1);
  auto node = [&](int i) { return -1.0 + i * h; };

  if (p.dim == 1) {
    Vec x(1);
    double prev, cur, next;
    for (int i = 1; i + 1 < resolution; ++i) {
      x[0] = node(i - 1);
      prev = p.value(x);
      x[0] = node(i);
      cur = p.value(x);
      x[0] = node(i + 1);
      next = p.value(x);
      if (cur < prev && cur < next && std::abs(node(i) - declared[0]) > 2 * h)
        return false;
    }
    return true;
  }
  // n = 2: strict minimum against the full 8-neighbourhood
  Vec x(2), y(2);
  for (int i = 1; i + 1 < resolution; ++i)
    for (int j = 1; j + 1 < resolution; ++j) {
      x[0] = node(i);
      x[1] = node(j);
      const double c = p.value(x);
      bool strict_min = true;
      for (int di = -1; di <= 1 && strict_min; ++di)
        for (int dj = -1; dj <= 1 && strict_min; ++dj) {
          if (di == 0 && dj == 0) continue;
          y[0] = node(i + di);
          y[1] = node(j + dj);
          if (p.value(y) <= c) strict_min = false;
        }
      if (strict_min && ((x - declared).cwiseAbs().maxCoeff() > 2 * h))
        return false;
    }
  return true;
}

inline void validate_aux(const AuxiliarySpec& aux, const Potential& p) {
  if (const auto* h = std::get_if<AuxHomotopy>(&aux)) {
    if (h->v0.dim != p.dim)
      throw std::invalid_argument("homotopy base dimension mismatch");
    if (h->v0.minimizers.size() != 1)
      throw std::invalid_argument(
          "homotopy base must declare exactly one minimizer");
  } else if (const auto* hq = std::get_if<AuxHessianQuadratic>(&aux)) {
    if (hq->eps.size() != p.dim)
      throw std::invalid_argument("hessian_quadratic eps dimension mismatch");
  } else if (std::holds_alternative<AuxKinetic1D>(aux)) {
    if (p.dim != 1)
      throw std::invalid_argument("kinetic_1d requires a 1-D potential");
  } else if (const auto* k = std::get_if<AuxKineticND>(&aux)) {
    if (k->eps.size() != p.dim)
      throw std::invalid_argument("kinetic_nd eps dimension mismatch");
  }
}

// Full validation including the unimodality scan of a homotopy base
// (n <= 2 only; above that the declaration is trusted). Intended for
// configuration load, not per-evaluation paths.
inline void validate_aux_deep(const AuxiliarySpec& aux, const Potential& p) {
  validate_aux(aux, p);
  if (const auto* h = std::get_if<AuxHomotopy>(&aux)) {
    if (p.dim <= 2 && !grid_unimodal(h->v0))
      throw std::invalid_argument("homotopy base fails the unimodality scan");
  }
}

inline double aux_value(const AuxiliarySpec& aux, const Potential& p,
                        const Vec& x) {
  struct Valuer {
    const Potential& p;
    const Vec& x;
    double operator()(const AuxNone&) const { return 0.0; }
    double operator()(const AuxHomotopy& a) const {
      return p.value(x) - a.v0.value(x);
    }
    double operator()(const AuxContraction&) const { return p.value(x); }
    double operator()(const AuxHessianQuadratic& a) const {
      return -a.eps.dot(p.hess(x) * a.eps);
    }
    double operator()(const AuxKinetic1D& a) const {
      const double vp = p.grad(x)[0];
      return -(a.eps * a.eps + vp * vp) * p.hess(x)(0, 0);
    }
    double operator()(const AuxKineticND& a) const {
      const Mat H = p.hess(x);
      const Vec g = p.grad(x);
      return -a.eps.dot(H * a.eps) - g.dot(H * g);
    }
  };
  return std::visit(Valuer{p, x}, aux);
}

inline AuxEval eval_aux(const AuxiliarySpec& aux, const Potential& p,
                        const Vec& x) {
  require_in_cube(p, x);
  if (std::holds_alternative<AuxKinetic1D>(aux) && p.dim != 1)
    throw std::invalid_argument("kinetic_1d requires a 1-D potential");

  AuxEval out;
  out.value = aux_value(aux, p, x);

  if (std::holds_alternative<AuxNone>(aux)) {
    out.grad = Vec::Zero(p.dim);
  } else if (const auto* h = std::get_if<AuxHomotopy>(&aux)) {
    out.grad = p.grad(x) - h->v0.grad(x);
  } else if (std::holds_alternative<AuxContraction>(aux)) {
    out.grad = p.grad(x);
  } else if (const auto* hq = std::get_if<AuxHessianQuadratic>(&aux)) {
    if (p.has_third()) {
      out.grad = -p.third_contraction(x, hq->eps, hq->eps);
    } else {
      out.grad = detail::fd_gradient(
          [&](const Vec& y) { return aux_value(aux, p, y); }, x,
          detail::kAuxFdStep);
    }
  } else {
    // kinetic variants share one gradient formula:
    //   grad = -third[eps,eps] - third[g,g] - 2 H^2 g   (eps^2 terms in 1-D)
    if (p.has_third()) {
      Vec eps;
      if (const auto* k1 = std::get_if<AuxKinetic1D>(&aux))
        eps = Vec::Constant(1, k1->eps);
      else
        eps = std::get<AuxKineticND>(aux).eps;
      const Vec g = p.grad(x);
      const Mat H = p.hess(x);
      out.grad = -p.third_contraction(x, eps, eps) -
                 p.third_contraction(x, g, g) - 2.0 * (H * (H * g));
    } else {
      out.grad = detail::fd_gradient(
          [&](const Vec& y) { return aux_value(aux, p, y); }, x,
          detail::kAuxFdStep);
    }
  }
  if (!std::isfinite(out.value) || !out.grad.allFinite())
    throw std::runtime_error("non-finite auxiliary evaluation");
  return out;
}

// Effective potential W = V - Gamma*Vtilde. With Gamma = 0 this returns the
// base potential unchanged, evaluations included.
inline Potential make_effective(const Potential& p, const AuxiliarySpec& aux,
                                double gamma) {
  if (gamma < 0.0) throw std::invalid_argument("Gamma must be >= 0");
  if (gamma == 0.0 || std::holds_alternative<AuxNone>(aux)) return p;
  validate_aux(aux, p);

  Potential w;
  w.dim = p.dim;
  w.id = p.id + " - " + std::to_string(gamma) + "*" + aux_name(aux);
  auto base = std::make_shared<Potential>(p);
  auto a = std::make_shared<AuxiliarySpec>(aux);
  w.value = [base, a, gamma](const Vec& x) {
    return base->value(x) - gamma * aux_value(*a, *base, x);
  };
  w.grad = [base, a, gamma](const Vec& x) {
    return (base->grad(x) - gamma * eval_aux(*a, *base, x).grad).eval();
  };

  if (std::holds_alternative<AuxContraction>(*a)) {
    w.hess = [base, gamma](const Vec& x) {
      return ((1.0 - gamma) * base->hess(x)).eval();
    };
    if (p.has_third()) {
      w.third_contraction = [base, gamma](const Vec& x, const Vec& u,
                                          const Vec& v) {
        return ((1.0 - gamma) * base->third_contraction(x, u, v)).eval();
      };
    }
  } else if (const auto* hm = std::get_if<AuxHomotopy>(a.get())) {
    auto v0 = std::make_shared<Potential>(hm->v0);
    w.hess = [base, v0, gamma](const Vec& x) {
      return ((1.0 - gamma) * base->hess(x) + gamma * v0->hess(x)).eval();
    };
    if (p.has_third() && v0->has_third()) {
      w.third_contraction = [base, v0, gamma](const Vec& x, const Vec& u,
                                              const Vec& v) {
        return ((1.0 - gamma) * base->third_contraction(x, u, v) +
                gamma * v0->third_contraction(x, u, v))
            .eval();
      };
    }
  } else {
    // Hessian-quadratic / kinetic: d2(Vtilde) would need fourth derivatives,
    // so difference the auxiliary gradient instead.
    w.hess = [base, a, gamma](const Vec& x) {
      const int n = base->dim;
      const double h = detail::kAuxFdStep;
      Mat ht(n, n);
      for (int j = 0; j < n; ++j) {
        Vec col = detail::fd_gradient(
            [&](const Vec& y) { return eval_aux(*a, *base, y).grad[j]; }, x, h);
        ht.row(j) = col.transpose();
      }
      Mat out = base->hess(x) - gamma * 0.5 * (ht + ht.transpose());
      return out;
    };
  }
  return w;
}

inline RangeReport aux_range(const AuxiliarySpec& aux, const Potential& p,
                             int resolution) {
  return detail::range_on_grid(
      p.dim, [&](const Vec& x) { return aux_value(aux, p, x); }, resolution);
}

}  // namespace qdn
