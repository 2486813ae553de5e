#include <catch2/catch_amalgamated.hpp>

#include "oracles.hpp"
#include "qdn/catalog.hpp"
#include "qdn/gibbs.hpp"

using namespace qdn;
using Catch::Approx;

TEST_CASE("constant potential gives the uniform law and the exact Z") {
  for (int n : {1, 2}) {
    const Potential c = make_constant(n, 5.0);
    const DensityGrid g = density_grid({c, AuxNone{}, 0.0, 0.5}, 32);
    const double expected_z = std::pow(2.0, n) * std::exp(-5.0 / 0.5);
    CHECK(g.z == Approx(expected_z).epsilon(1e-12));
    const double uniform = 1.0 / std::pow(2.0, n);
    for (double d : g.density) CHECK(d == Approx(uniform).epsilon(1e-12));
  }
}

TEST_CASE("density grids are normalized at any resolution") {
  const Potential dw = make_double_well(0.5);
  for (int res : {17, 64, 129, 500}) {
    const DensityGrid g = density_grid({dw, AuxContraction{}, 0.25, 0.4}, res);
    double mass = 0.0;
    for (long long i = 0; i < g.cells(); ++i) mass += g.mass(i);
    CHECK(mass == Approx(1.0).margin(1e-10));
  }
}

TEST_CASE("Gamma = 0 reduces to the plain Gibbs law") {
  const Potential dw = make_double_well(0.5);
  const DensityGrid a = density_grid({dw, AuxContraction{}, 0.0, 0.4}, 64);
  const DensityGrid b = density_grid({dw, AuxNone{}, 0.0, 0.4}, 64);
  for (size_t i = 0; i < a.density.size(); ++i)
    CHECK(a.density[i] == b.density[i]);
}

TEST_CASE("double well splits its mass evenly and evenly-symmetrically") {
  const Potential dw = make_double_well(0.5);
  const DensityGrid g = density_grid({dw, AuxNone{}, 0.0, 0.4}, 4096);
  double left = 0.0;
  for (long long i = 0; i < g.cells(); ++i)
    if (g.center(i)[0] < 0.0) left += g.mass(i);
  CHECK(left == Approx(0.5).margin(1e-6));
  const int n = g.resolution;
  for (int i = 0; i < n / 2; ++i)
    CHECK(g.density[static_cast<size_t>(i)] ==
          Approx(g.density[static_cast<size_t>(n - 1 - i)]).margin(1e-12));
}

TEST_CASE("quadrature matches an independent trapezoid oracle") {
  const Potential dw = make_double_well(0.5);
  const double T = 0.4;
  const DensityGrid g = density_grid({dw, AuxNone{}, 0.0, T}, 64);
  const auto ref = oracle::gibbs_masses_trapezoid(
      [&](double x) { return dw.value(Vec::Constant(1, x)); }, T, 64, 65);
  CHECK(oracle::tv(g.masses(), ref) < 5e-4);
}

TEST_CASE("partition value is stable under refinement") {
  const Potential dw = make_double_well(0.5);
  for (double T : {0.1, 0.4}) {
    const double z1 = density_grid({dw, AuxNone{}, 0.0, T}, 256).z;
    const double z2 = density_grid({dw, AuxNone{}, 0.0, T}, 512).z;
    CHECK(std::abs(z1 - z2) < 1e-4);
  }
}

TEST_CASE("contraction tilt fades monotonically as Gamma drops") {
  const Potential dw = make_double_well(0.5);
  const DensityGrid base = density_grid({dw, AuxNone{}, 0.0, 0.4}, 128);
  double prev_tv = 1e9;
  for (double gamma : {0.4, 0.2, 0.1, 0.05, 0.0}) {
    const DensityGrid g = density_grid({dw, AuxContraction{}, gamma, 0.4}, 128);
    const double tv = tv_distance(g.masses(), base.masses());
    CHECK(tv <= prev_tv + 1e-14);
    prev_tv = tv;
  }
  CHECK(prev_tv == Approx(0.0).margin(1e-14));
}

TEST_CASE("m_star landmarks") {
  const Potential dw = make_double_well(0.5);
  CHECK(m_star(dw, AuxNone{}, 0.0, 4097) ==
        Approx(potential_range(dw, 4097).range).margin(1e-15));
  CHECK(m_star(dw, AuxContraction{}, 0.25, 4097) ==
        Approx(0.421875).margin(1e-12));
  // frozen from the grid-search oracle on (x^2-0.25)^2 + 0.01(12x^2-1)
  const AuxiliarySpec hq = AuxHessianQuadratic{Vec::Constant(1, 0.1)};
  CHECK(m_star(dw, hq, 1.0, 4097) == Approx(0.6561).margin(1e-6));
}

TEST_CASE("set masses at the extremes and in T") {
  const Potential dw = make_double_well(0.5);
  const DensityGrid g = density_grid({dw, AuxNone{}, 0.0, 0.1}, 512);
  CHECK(gibbs_mass(g, TargetBall{Vec::Zero(1), 10.0}, dw) ==
        Approx(1.0).margin(1e-12));
  CHECK(gibbs_mass(g, TargetSuperlevel{10.0, 0.0}, dw) == 0.0);

  const TargetSet s = make_superlevel(dw, 0.05);
  const double hot =
      gibbs_mass(density_grid({dw, AuxNone{}, 0.0, 0.2}, 512), s, dw);
  const double cold = gibbs_mass(g, s, dw);
  CHECK(cold < hot);
  CHECK(cold < 0.35);
}

TEST_CASE("total variation distance properties") {
  std::vector<double> a = {0.5, 0.5, 0.0};
  std::vector<double> b = {0.0, 0.0, 1.0};
  CHECK(tv_distance(a, a) == 0.0);
  CHECK(tv_distance(a, b) == Approx(1.0));
  CHECK_THROWS_AS(tv_distance(a, std::vector<double>{1.0}),
                  std::invalid_argument);

  // uniform histogram against the uniform density
  Histogram h(32);
  for (int i = 0; i < 32; ++i)
    for (int k = 0; k < 7; ++k) h.add(-1.0 + (i + 0.5) / 16.0);
  const DensityGrid u = density_grid({make_constant(1, 0.0), AuxNone{}, 0.0, 1.0}, 32);
  CHECK(tv_distance(h, u) < 1e-12);

  Histogram wrong(16);
  CHECK_THROWS_AS(tv_distance(wrong, u), std::invalid_argument);
}

TEST_CASE("dimension and temperature guards") {
  const Potential big = make_quadratic_bowl(Vec::Zero(4));
  CHECK_THROWS_AS(density_grid({big, AuxNone{}, 0.0, 0.5}, 8),
                  UnsupportedDimension);
  const Potential dw = make_double_well(0.5);
  CHECK_THROWS_AS(density_grid({dw, AuxNone{}, 0.0, 0.0}, 8),
                  std::invalid_argument);
}
