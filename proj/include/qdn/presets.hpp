#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "qdn/experiment.hpp"

// Canned experiment configurations. Each preset reproduces one of the
// claims the library is built around, at desk scale; `qdiff preset all`
// runs the lot.

namespace qdn {

inline std::vector<std::string> preset_names() {
  return {"stationary-check", "stationary-check-tilted", "anneal-quantum",
          "gap-sweep",        "zt-track",                "anneal-joint",
          "hopfield-descent", "aux-benchmark"};
}

inline json preset_config(const std::string& name) {
  json c;
  c["seed"] = 42;

  if (name == "stationary-check") {
    // long constant-temperature run lands on the Gibbs law
    c["experiment"] = "stationary-check";
    c["potential"] = {{"name", "double_well"}, {"params", {{"a", 0.5}}}};
    c["aux"] = {{"kind", "none"}};
    c["thermal"] = {{"kind", "constant"}, {"T", 0.4}};
    c["quantum"] = {{"kind", "zero"}};
    c["sim"] = {{"dt", 1e-3}, {"steps", 5000000}, {"burn_in", 100000},
                {"w", 1.0},   {"mode", "u_space"}};
    c["grid"] = {{"bins", 64}};
    c["tolerances"] = {{"tv_max", 0.05}};
    return c;
  }
  if (name == "stationary-check-tilted") {
    // frozen Gamma tilts the invariant law, not just the dynamics
    c["experiment"] = "stationary-check";
    c["potential"] = {{"name", "double_well"}, {"params", {{"a", 0.5}}}};
    c["aux"] = {{"kind", "contraction"}};
    c["thermal"] = {{"kind", "constant"}, {"T", 0.4}};
    c["quantum"] = {{"kind", "constant"}, {"Gamma0", 0.25}};
    c["sim"] = {{"dt", 1e-3}, {"steps", 5000000}, {"burn_in", 100000},
                {"w", 1.0},   {"mode", "u_space"}};
    c["grid"] = {{"bins", 64}};
    c["tolerances"] = {{"tv_max", 0.05}};
    return c;
  }
  if (name == "anneal-quantum") {
    // decaying Gamma at fixed T relaxes to the plain Gibbs law
    c["experiment"] = "anneal-quantum";
    c["potential"] = {{"name", "double_well"}, {"params", {{"a", 0.5}}}};
    c["aux"] = {{"kind", "contraction"}};
    c["thermal"] = {{"kind", "constant"}, {"T", 0.4}};
    c["quantum"] = {{"kind", "power"}, {"Gamma0", 0.5}, {"p", 1.0}};
    c["sim"] = {{"dt", 1e-3}, {"steps", 3000000}, {"burn_in", 300000},
                {"w", 1.0},   {"mode", "u_space"}};
    c["grid"] = {{"bins", 64}};
    c["tolerances"] = {{"tv_max", 0.05}};
    return c;
  }
  if (name == "gap-sweep") {
    c["experiment"] = "gap-sweep";
    c["potentials"] = json::array(
        {{{"name", "double_well"}, {"params", {{"a", 0.5}}}},
         {{"name", "multi_well_cos"},
          {"params", {{"wells", 3}, {"amp", 0.25}}}}});
    c["gammas"] = {0.0, 0.25};
    c["aux"] = {{"kind", "contraction"}};
    c["temps"] = {0.2, 0.3, 0.5, 1.0};
    c["grid"] = {{"cells", 400}, {"oracle_cells", 512}};
    c["w"] = 1.0;
    c["include_oracle"] = true;
    c["include_generator_checks"] = true;
    c["generator_T"] = 0.4;
    c["oracle_temps"] = {0.25, 0.5, 1.0};
    c["tolerances"] = {{"oracle_rel_err", 0.02},
                       {"stationary_tv_max", 0.01},
                       {"residual_ratio_min", 3.0}};
    return c;
  }
  if (name == "zt-track") {
    c["experiment"] = "zt-track";
    c["potential"] = {{"name", "double_well"}, {"params", {{"a", 0.5}}}};
    c["aux"] = {{"kind", "contraction"}};
    c["thermal"] = {{"kind", "constant"}, {"T", 0.4}};
    c["quantum"] = {{"kind", "power"}, {"Gamma0", 0.5}, {"p", 1.0}};
    c["grid"] = {{"cells", 400}};
    c["t_end"] = 200.0;
    c["dt_ode"] = 0.01;
    c["record_stride"] = 50;
    c["thetas"] = {0.05, 0.2};
    c["tolerances"] = {{"z_sup_max", 100.0}, {"z_final_excess", 1e-3}};
    return c;
  }
  if (name == "anneal-joint") {
    // joint log-thermal and power-quantum cooling on a tilted double well
    c["experiment"] = "anneal-joint";
    c["potential"] = {{"name", "tilted_double_well"},
                      {"params", {{"a", 0.5}, {"b", 0.05}}}};
    c["aux"] = {{"kind", "contraction"}};
    c["thermal"] = {{"kind", "log"}, {"T0", 1.2}};
    c["quantum"] = {{"kind", "power"}, {"Gamma0", 0.5}, {"p", 1.0}};
    c["sim"] = {{"dt", 1e-3}, {"steps", 2000000}, {"w", 1.0},
                {"mode", "u_space"}};
    c["ensemble"] = {{"trajectories", 200},
                     {"success_radius", 0.1},
                     {"superlevel_theta", 0.2},
                     {"eval_fractions", {0.2, 0.4, 0.6, 0.8, 1.0}}};
    c["tolerances"] = {{"success_min", 0.9}};
    return c;
  }
  if (name == "hopfield-descent") {
    // zero noise, zero Gamma: the network is a descent flow for V
    c["experiment"] = "hopfield-descent";
    c["potentials"] = json::array(
        {{{"name", "double_well"}, {"params", {{"a", 0.5}}}},
         {{"name", "tilted_double_well"}, {"params", {{"a", 0.5}, {"b", 0.05}}}},
         {{"name", "multi_well_cos"}, {"params", {{"wells", 3}, {"amp", 0.25}}}},
         {{"name", "quadratic_bowl"}, {"params", {{"dim", 2}, {"center", 0.0}}}},
         {{"name", "separable_nd"},
          {"params",
           {{"factors",
             {{{"name", "double_well"}, {"params", {{"a", 0.5}}}},
              {{"name", "multi_well_cos"},
               {"params", {{"wells", 3}, {"amp", 0.25}}}}}}}}}});
    c["sim"] = {{"dt", 1e-3}, {"steps", 100000}, {"w", 1.0}, {"mode", "u_space"}};
    c["tolerances"] = {{"terminal_grad_max", 1e-3}};
    return c;
  }
  if (name == "aux-benchmark") {
    c["experiment"] = "aux-benchmark";
    c["potentials"] = json::array(
        {{{"name", "double_well"}, {"params", {{"a", 0.5}}}},
         {{"name", "multi_well_cos"},
          {"params", {{"wells", 3}, {"amp", 0.25}}}}});
    c["resolution"] = 4097;
    c["eps"] = 0.1;
    c["gamma_contact"] = 0.5;
    c["ensemble"] = {{"potential",
                      {{"name", "tilted_double_well"},
                       {"params", {{"a", 0.5}, {"b", 0.05}}}}},
                     {"sim", {{"dt", 1e-3}, {"steps", 200000}, {"w", 1.0}}},
                     {"thermal", {{"kind", "log"}, {"T0", 1.2}}},
                     {"quantum", {{"kind", "power"}, {"Gamma0", 0.5}, {"p", 1.0}}},
                     {"trajectories", 64},
                     {"success_radius", 0.1}};
    return c;
  }
  throw std::invalid_argument("unknown preset '" + name + "'");
}

}  // namespace qdn
