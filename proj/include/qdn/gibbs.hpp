#pragma once

#include <cmath>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include "qdn/auxiliary.hpp"
#include "qdn/dynamics.hpp"
#include "qdn/potential.hpp"

// Gibbs-type densities mu_Gamma ~ exp(-(V - Gamma*Vtilde)/T) by midpoint
// quadrature on tensor grids (n <= 3), plus the range statistic
// M*(Gamma) = sup W - inf W and total-variation helpers.

namespace qdn {

struct GibbsSpec {
  Potential p;
  AuxiliarySpec aux = AuxNone{};
  double gamma = 0.0;
  double T = 1.0;
};

struct DensityGrid {
  int dim = 1;
  int resolution = 0;       // cells per axis
  double h = 0.0;           // cell width, 2/resolution
  std::vector<double> density;  // cell-center values, row-major
  double z = 0.0;           // partition value
  double log_z = 0.0;

  double cell_volume() const {
    double v = 1.0;
    for (int d = 0; d < dim; ++d) v *= h;
    return v;
  }
  long long cells() const { return static_cast<long long>(density.size()); }

  Vec center(long long flat) const {
    Vec x(dim);
    long long rem = flat;
    for (int d = 0; d < dim; ++d) {
      x[d] = -1.0 + (static_cast<double>(rem % resolution) + 0.5) * h;
      rem /= resolution;
    }
    return x;
  }
  double mass(long long flat) const {
    return density[static_cast<size_t>(flat)] * cell_volume();
  }
  std::vector<double> masses() const {
    std::vector<double> m(density.size());
    const double vol = cell_volume();
    for (size_t i = 0; i < density.size(); ++i) m[i] = density[i] * vol;
    return m;
  }

  void to_csv(std::ostream& os) const {
    for (int d = 1; d <= dim; ++d) os << 'x' << d << ',';
    os << "density\n";
    os.precision(17);
    for (long long i = 0; i < cells(); ++i) {
      const Vec c = center(i);
      for (int d = 0; d < dim; ++d) os << c[d] << ',';
      os << density[static_cast<size_t>(i)] << '\n';
    }
  }
};

inline DensityGrid density_grid(const GibbsSpec& spec, int resolution) {
  if (!(spec.T > 0.0))
    throw std::invalid_argument("Gibbs density needs T > 0");
  if (spec.p.dim > 3)
    throw UnsupportedDimension("density grids support n <= 3");
  if (resolution < 2) throw std::invalid_argument("resolution must be >= 2");
  validate_aux(spec.aux, spec.p);

  DensityGrid grid;
  grid.dim = spec.p.dim;
  grid.resolution = resolution;
  grid.h = 2.0 / resolution;
  long long total = 1;
  for (int d = 0; d < grid.dim; ++d) total *= resolution;
  grid.density.resize(static_cast<size_t>(total));

  // effective potential on cell centers, min subtracted before exponentiation
  std::vector<double> w(static_cast<size_t>(total));
  double wmin = std::numeric_limits<double>::infinity();
  for (long long i = 0; i < total; ++i) {
    const Vec x = grid.center(i);
    double wi = spec.p.value(x);
    if (spec.gamma != 0.0) wi -= spec.gamma * aux_value(spec.aux, spec.p, x);
    if (!std::isfinite(wi))
      throw std::runtime_error("non-finite effective potential in quadrature");
    w[static_cast<size_t>(i)] = wi;
    wmin = std::min(wmin, wi);
  }
  const double vol = grid.cell_volume();
  double zshift = 0.0;
  for (long long i = 0; i < total; ++i) {
    const double e = std::exp(-(w[static_cast<size_t>(i)] - wmin) / spec.T);
    grid.density[static_cast<size_t>(i)] = e;
    zshift += e * vol;
  }
  grid.log_z = std::log(zshift) - wmin / spec.T;
  grid.z = std::exp(grid.log_z);
  for (auto& d : grid.density) d /= zshift;
  return grid;
}

// Range of the effective potential W = V - Gamma*Vtilde over the node grid.
inline double m_star(const Potential& p, const AuxiliarySpec& aux, double gamma,
                     int resolution) {
  if (gamma == 0.0 || std::holds_alternative<AuxNone>(aux))
    return potential_range(p, resolution).range;
  return detail::range_on_grid(
             p.dim,
             [&](const Vec& x) {
               return p.value(x) - gamma * aux_value(aux, p, x);
             },
             resolution)
      .range;
}

// Mass of the target set, evaluated at cell centers.
inline double gibbs_mass(const DensityGrid& grid, const TargetSet& target,
                         const Potential& p) {
  double mass = 0.0;
  for (long long i = 0; i < grid.cells(); ++i)
    if (target_contains(target, p, grid.center(i))) mass += grid.mass(i);
  return std::min(mass, 1.0);
}

// Half L1 distance between two probability-mass vectors on the same bins.
inline double tv_distance(const std::vector<double>& p,
                          const std::vector<double>& q) {
  if (p.size() != q.size())
    throw std::invalid_argument("tv_distance: bin count mismatch");
  double s = 0.0;
  for (size_t i = 0; i < p.size(); ++i) s += std::abs(p[i] - q[i]);
  return 0.5 * s;
}

inline double tv_distance(const Histogram& h, const DensityGrid& grid) {
  if (grid.dim != 1)
    throw std::invalid_argument("histogram comparison needs a 1-D grid");
  if (h.bins != grid.resolution)
    throw std::invalid_argument("tv_distance: bin geometry mismatch");
  return tv_distance(h.masses(), grid.masses());
}

}  // namespace qdn
