#include <catch2/catch_amalgamated.hpp>

#include "oracles.hpp"
#include "qdn/catalog.hpp"
#include "qdn/potential.hpp"

using namespace qdn;
using Catch::Approx;

namespace {
Vec pt(double x) { return Vec::Constant(1, x); }
}  // namespace

TEST_CASE("double well evaluations at landmark points") {
  const Potential p = make_double_well(0.5);

  auto r = eval_all(p, pt(0.5));  // at a minimizer
  CHECK(r.value == Approx(0.0).margin(1e-15));
  CHECK(r.grad[0] == Approx(0.0).margin(1e-15));

  r = eval_all(p, pt(0.0));  // the hump
  CHECK(r.value == Approx(0.0625));
  CHECK(r.hess(0, 0) == Approx(-1.0));

  // gradient against the central-difference oracle
  r = eval_all(p, pt(0.8));
  const double fd = oracle::fd_derivative(
      [&](double x) { return p.value(pt(x)); }, 0.8);
  CHECK(r.grad[0] == Approx(1.248).margin(1e-9));
  CHECK(r.grad[0] == Approx(fd).margin(1e-8));
}

TEST_CASE("eval_all rejects bad points") {
  const Potential p = make_double_well(0.5);
  CHECK_THROWS_AS(eval_all(p, pt(1.5)), std::domain_error);
  CHECK_THROWS_AS(eval_all(p, Vec::Zero(2)), std::domain_error);
}

TEST_CASE("potential_range on known shapes") {
  const Potential c5 = make_constant(1, 5.0);
  CHECK(potential_range(c5, 33).range == Approx(0.0).margin(1e-15));

  const Potential dw = make_double_well(0.5);
  const auto rr = potential_range(dw, 4097);
  CHECK(rr.range == Approx(0.5625).margin(1e-12));
  CHECK(std::abs(rr.arg_sup[0]) == Approx(1.0));

  const Potential bowl = make_quadratic_bowl(Vec::Zero(2));
  CHECK(potential_range(bowl, 65).range == Approx(2.0).margin(1e-12));

  const Potential big = make_quadratic_bowl(Vec::Zero(4));
  CHECK_THROWS_AS(potential_range(big, 9), UnsupportedDimension);
  const auto sampled = potential_range_sampled(big, 20000, 1);
  CHECK(sampled.approximate);
  CHECK(sampled.range > 0.0);
  CHECK(sampled.range <= 4.0);
}

TEST_CASE("range is monotone under grid refinement") {
  for (const Potential& p :
       {make_double_well(0.5), make_multi_well_cos(3, 0.25),
        make_tilted_double_well(0.5, 0.05)}) {
    const int r1 = 129;
    const int r2 = 2 * (r1 - 1) + 1;  // contains every node of r1
    CHECK(potential_range(p, r2).range >= potential_range(p, r1).range - 1e-12);
  }
}

TEST_CASE("check_derivatives against exactly representable cases") {
  Potential lin;  // V = 3x, central differences are exact for linear V
  lin.dim = 1;
  lin.id = "linear";
  lin.value = [](const Vec& x) { return 3.0 * x[0]; };
  lin.grad = [](const Vec&) { return Vec::Constant(1, 3.0); };
  lin.hess = [](const Vec&) { return Mat::Zero(1, 1); };
  CHECK(check_derivatives(lin, 30, 1e-4, 9).max_grad_error < 1e-9);

  const Potential bowl = make_quadratic_bowl(Vec::Zero(2));
  CHECK(check_derivatives(bowl, 30, 1e-4, 9).max_hess_error < 1e-8);

  const auto rep = check_derivatives(make_double_well(0.5), 100, 1e-4, 9);
  CHECK(rep.max_grad_error < 1e-6);
}

TEST_CASE("every catalog potential passes the derivative check") {
  const std::vector<Potential> cat = {
      make_double_well(0.5), make_tilted_double_well(0.5, 0.05),
      make_multi_well_cos(3, 0.25), make_quadratic_bowl(Vec::Zero(3)),
      make_separable({make_double_well(0.5), make_multi_well_cos(3, 0.25)})};
  for (const auto& p : cat) {
    const auto rep = check_derivatives(p, 100, 1e-4, 2024);
    INFO(p.id);
    CHECK(rep.max_grad_error < 1e-5);
    CHECK(rep.max_hess_error < 1e-5);
  }
}

TEST_CASE("declared minimizers are interior critical points") {
  const std::vector<Potential> cat = {
      make_double_well(0.5), make_tilted_double_well(0.5, 0.05),
      make_multi_well_cos(3, 0.25), make_quadratic_bowl(Vec::Zero(3)),
      make_separable({make_double_well(0.5), make_multi_well_cos(3, 0.25)})};
  for (const auto& p : cat) {
    INFO(p.id);
    CHECK(!p.minimizers.empty());
    for (const auto& m : p.minimizers) {
      CHECK(m.cwiseAbs().maxCoeff() < 1.0);
      CHECK(p.grad(m).cwiseAbs().maxCoeff() <= 1e-8);
    }
  }
}

TEST_CASE("catalog parameter handling") {
  CHECK(make_double_well(0.5).minimizers.size() == 2);
  CHECK_THROWS_AS(make_double_well(1.0), std::invalid_argument);
  CHECK_THROWS_AS(catalog_make("nope", {}), std::invalid_argument);

  // tilt picks a unique global minimizer; value frozen from a Newton oracle
  const Potential tdw = make_tilted_double_well(0.5, 0.05);
  REQUIRE(tdw.minimizers.size() == 1);
  CHECK(tdw.minimizers[0][0] == Approx(-0.523340265902301).margin(1e-9));
  // grid-search oracle agrees to grid resolution
  const auto g = oracle::grid_search(
      [&](double x) { return tdw.value(pt(x)); }, 8193);
  CHECK(std::abs(g.arg_min - tdw.minimizers[0][0]) < 2.0 / 8192);

  const Potential bowl = catalog_make(
      "quadratic_bowl", nlohmann::json{{"dim", 3}, {"center", 0.0}});
  CHECK(bowl.dim == 3);
  CHECK(bowl.minimizers[0].cwiseAbs().maxCoeff() == 0.0);

  const Potential mwc = make_multi_well_cos(3, 0.25);
  REQUIRE(mwc.minimizers.size() == 3);
  for (const auto& m : mwc.minimizers) CHECK(mwc.value(m) == Approx(0.0).margin(1e-12));
}
