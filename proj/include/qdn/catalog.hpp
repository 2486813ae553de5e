#pragma once

#include <cmath>
#include <memory>
#include <nlohmann/json.hpp>
#include <numbers>
#include <string>
#include <vector>

#include "qdn/potential.hpp"

// Benchmark objectives on [-1,1]^n. All carry analytic derivatives through
// third order and, where the ground states are known in closed form, the
// list of global minimizers.

namespace qdn {

inline Potential make_double_well(double a) {
  if (!(a > 0.0 && a < 1.0))
    throw std::invalid_argument("double_well: need 0 < a < 1");
  Potential p;
  p.dim = 1;
  p.id = "double_well(a=" + std::to_string(a) + ")";
  const double a2 = a * a;
  p.value = [a2](const Vec& x) {
    const double d = x[0] * x[0] - a2;
    return d * d;
  };
  p.grad = [a2](const Vec& x) {
    Vec g(1);
    g[0] = 4.0 * x[0] * (x[0] * x[0] - a2);
    return g;
  };
  p.hess = [a2](const Vec& x) {
    Mat h(1, 1);
    h(0, 0) = 12.0 * x[0] * x[0] - 4.0 * a2;
    return h;
  };
  p.third_contraction = [](const Vec& x, const Vec& a_, const Vec& b_) {
    Vec t(1);
    t[0] = a_[0] * b_[0] * 24.0 * x[0];
    return t;
  };
  p.minimizers = {Vec::Constant(1, -a), Vec::Constant(1, a)};
  return p;
}

inline Potential make_tilted_double_well(double a, double b) {
  if (!(a > 0.0 && a < 1.0))
    throw std::invalid_argument("tilted_double_well: need 0 < a < 1");
  if (b == 0.0)
    throw std::invalid_argument("tilted_double_well: tilt b must be nonzero");
  Potential p = make_double_well(a);
  p.id = "tilted_double_well(a=" + std::to_string(a) +
         ",b=" + std::to_string(b) + ")";
  const auto base_value = p.value;
  const auto base_grad = p.grad;
  p.value = [base_value, b](const Vec& x) { return base_value(x) + b * x[0]; };
  p.grad = [base_grad, b](const Vec& x) {
    Vec g = base_grad(x);
    g[0] += b;
    return g;
  };
  // Hessian and third derivative are those of the untilted well.

  // Locate the global minimizer: Newton from each untilted well, keep the
  // lower of the critical points that survive.
  auto vprime = [a, b](double x) { return 4.0 * x * (x * x - a * a) + b; };
  auto vsecond = [a](double x) { return 12.0 * x * x - 4.0 * a * a; };
  auto vval = [a, b](double x) {
    const double d = x * x - a * a;
    return d * d + b * x;
  };
  double best_x = 0.0;
  double best_v = std::numeric_limits<double>::infinity();
  for (double x0 : {-a, a}) {
    double x = x0;
    bool ok = false;
    for (int it = 0; it < 100; ++it) {
      const double fp = vprime(x), fpp = vsecond(x);
      if (fpp <= 0.0) break;
      const double step = fp / fpp;
      x -= step;
      if (std::abs(step) < 1e-15) {
        ok = true;
        break;
      }
    }
    if (ok && std::abs(x) < 1.0 && std::abs(vprime(x)) < 1e-12 &&
        vval(x) < best_v) {
      best_v = vval(x);
      best_x = x;
    }
  }
  if (!std::isfinite(best_v))
    throw std::invalid_argument(
        "tilted_double_well: no interior minimizer for these parameters");
  p.minimizers = {Vec::Constant(1, best_x)};
  return p;
}

// amp*(1 + cos(k*pi*(x+1))): exactly k interior wells at -1 + (2m-1)/k,
// all global (V=0), with walls of height 2*amp at the cube faces.
inline Potential make_multi_well_cos(int wells, double amp) {
  if (wells < 2) throw std::invalid_argument("multi_well_cos: need wells >= 2");
  if (!(amp > 0.0)) throw std::invalid_argument("multi_well_cos: need amp > 0");
  Potential p;
  p.dim = 1;
  p.id = "multi_well_cos(wells=" + std::to_string(wells) +
         ",amp=" + std::to_string(amp) + ")";
  const double om = wells * std::numbers::pi;
  p.value = [amp, om](const Vec& x) {
    return amp * (1.0 + std::cos(om * (x[0] + 1.0)));
  };
  p.grad = [amp, om](const Vec& x) {
    Vec g(1);
    g[0] = -amp * om * std::sin(om * (x[0] + 1.0));
    return g;
  };
  p.hess = [amp, om](const Vec& x) {
    Mat h(1, 1);
    h(0, 0) = -amp * om * om * std::cos(om * (x[0] + 1.0));
    return h;
  };
  p.third_contraction = [amp, om](const Vec& x, const Vec& a_, const Vec& b_) {
    Vec t(1);
    t[0] = a_[0] * b_[0] * amp * om * om * om * std::sin(om * (x[0] + 1.0));
    return t;
  };
  for (int m = 1; m <= wells; ++m)
    p.minimizers.push_back(Vec::Constant(1, -1.0 + (2.0 * m - 1.0) / wells));
  return p;
}

inline Potential make_quadratic_bowl(const Vec& center) {
  for (int i = 0; i < center.size(); ++i)
    if (!(std::abs(center[i]) < 1.0))
      throw std::invalid_argument("quadratic_bowl: center must be interior");
  Potential p;
  p.dim = static_cast<int>(center.size());
  p.id = "quadratic_bowl(n=" + std::to_string(p.dim) + ")";
  const Vec c = center;
  p.value = [c](const Vec& x) { return (x - c).squaredNorm(); };
  p.grad = [c](const Vec& x) { return (2.0 * (x - c)).eval(); };
  const int n = p.dim;
  p.hess = [n](const Vec&) { return (2.0 * Mat::Identity(n, n)).eval(); };
  p.third_contraction = [n](const Vec&, const Vec&, const Vec&) {
    return Vec::Zero(n).eval();
  };
  p.minimizers = {c};
  return p;
}

// Sum of one-dimensional factors, one per coordinate.
inline Potential make_separable(std::vector<Potential> factors) {
  if (factors.empty())
    throw std::invalid_argument("separable_nd: need at least one factor");
  for (const auto& f : factors)
    if (f.dim != 1)
      throw std::invalid_argument("separable_nd: factors must be 1-D");
  Potential p;
  const int n = static_cast<int>(factors.size());
  p.dim = n;
  p.id = "separable_nd(n=" + std::to_string(n) + ")";

  auto fs = std::make_shared<std::vector<Potential>>(std::move(factors));
  p.value = [fs](const Vec& x) {
    double v = 0.0;
    Vec xi(1);
    for (size_t j = 0; j < fs->size(); ++j) {
      xi[0] = x[static_cast<int>(j)];
      v += (*fs)[j].value(xi);
    }
    return v;
  };
  p.grad = [fs, n](const Vec& x) {
    Vec g(n);
    Vec xi(1);
    for (int j = 0; j < n; ++j) {
      xi[0] = x[j];
      g[j] = (*fs)[static_cast<size_t>(j)].grad(xi)[0];
    }
    return g;
  };
  p.hess = [fs, n](const Vec& x) {
    Mat h = Mat::Zero(n, n);
    Vec xi(1);
    for (int j = 0; j < n; ++j) {
      xi[0] = x[j];
      h(j, j) = (*fs)[static_cast<size_t>(j)].hess(xi)(0, 0);
    }
    return h;
  };
  bool all_third = true;
  for (const auto& f : *fs) all_third = all_third && f.has_third();
  if (all_third) {
    p.third_contraction = [fs, n](const Vec& x, const Vec& a_, const Vec& b_) {
      Vec t(n);
      Vec xi(1), one = Vec::Ones(1);
      for (int j = 0; j < n; ++j) {
        xi[0] = x[j];
        t[j] = a_[j] * b_[j] *
               (*fs)[static_cast<size_t>(j)].third_contraction(xi, one, one)[0];
      }
      return t;
    };
  }
  // tensor product of factor minimizers, capped to keep the list small
  bool all_min = true;
  long long count = 1;
  for (const auto& f : *fs) {
    all_min = all_min && !f.minimizers.empty();
    count *= std::max<size_t>(f.minimizers.size(), 1);
  }
  if (all_min && count <= 64) {
    std::vector<Vec> mins(1, Vec::Zero(n));
    for (int j = 0; j < n; ++j) {
      std::vector<Vec> next;
      for (const auto& partial : mins)
        for (const auto& mj : (*fs)[static_cast<size_t>(j)].minimizers) {
          Vec m = partial;
          m[j] = mj[0];
          next.push_back(m);
        }
      mins.swap(next);
    }
    p.minimizers = std::move(mins);
  }
  return p;
}

inline Potential catalog_make(const std::string& name,
                              const nlohmann::json& params) {
  try {
    if (name == "double_well") return make_double_well(params.at("a"));
    if (name == "tilted_double_well")
      return make_tilted_double_well(params.at("a"), params.at("b"));
    if (name == "multi_well_cos")
      return make_multi_well_cos(params.at("wells"),
                                 params.value("amp", 0.25));
    if (name == "quadratic_bowl") {
      Vec c;
      if (params.contains("center") && params.at("center").is_array()) {
        const auto& arr = params.at("center");
        c.resize(static_cast<int>(arr.size()));
        for (int i = 0; i < c.size(); ++i) c[i] = arr.at(i);
      } else {
        const int dim = params.value("dim", 1);
        c = Vec::Constant(dim, params.value("center", 0.0));
      }
      return make_quadratic_bowl(c);
    }
    if (name == "separable_nd") {
      std::vector<Potential> fs;
      for (const auto& f : params.at("factors"))
        fs.push_back(catalog_make(f.at("name"), f.value("params",
                                                        nlohmann::json::object())));
      return make_separable(std::move(fs));
    }
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument("catalog '" + name +
                                "': bad parameters: " + e.what());
  }
  throw std::invalid_argument(
      "unknown catalog potential '" + name +
      "' (known: double_well, tilted_double_well, multi_well_cos, "
      "quadratic_bowl, separable_nd)");
}

}  // namespace qdn
