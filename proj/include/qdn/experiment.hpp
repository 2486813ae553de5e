#pragma once

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <nlohmann/json.hpp>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "qdn/catalog.hpp"
#include "qdn/dynamics.hpp"
#include "qdn/fpgrid.hpp"
#include "qdn/gibbs.hpp"
#include "qdn/schedule.hpp"

// Experiment harness: a single JSON document describes one experiment; the
// runner dispatches to the library and returns named metrics, each tied to
// a tolerance from the config. Reruns with the same config and seed produce
// identical reports.

namespace qdn {

using json = nlohmann::ordered_json;

struct Metric {
  std::string name;
  double value = 0.0;
  std::string cmp;  // "<=", ">=", or "" for informational rows
  double threshold = 0.0;
  bool pass = true;

  static Metric le(std::string n, double v, double thr) {
    return {std::move(n), v, "<=", thr, v <= thr};
  }
  static Metric ge(std::string n, double v, double thr) {
    return {std::move(n), v, ">=", thr, v >= thr};
  }
  static Metric info(std::string n, double v) {
    return {std::move(n), v, "", 0.0, true};
  }
};

struct ExperimentReport {
  json config;
  std::vector<Metric> metrics;
  double wall_seconds = 0.0;
  std::vector<std::string> artifacts;

  bool all_pass() const {
    for (const auto& m : metrics)
      if (!m.cmp.empty() && !m.pass) return false;
    return true;
  }
  const Metric* find(const std::string& name) const {
    for (const auto& m : metrics)
      if (m.name == name) return &m;
    return nullptr;
  }
  // wall clock is excluded: the emitted bytes must not vary between reruns
  json to_json() const {
    json j;
    j["config"] = config;
    j["metrics"] = json::array();
    for (const auto& m : metrics) {
      json mj;
      mj["name"] = m.name;
      mj["value"] = m.value;
      if (!m.cmp.empty()) {
        mj["cmp"] = m.cmp;
        mj["threshold"] = m.threshold;
        mj["pass"] = m.pass;
      }
      j["metrics"].push_back(mj);
    }
    j["all_pass"] = all_pass();
    j["artifacts"] = artifacts;
    return j;
  }
};

// ---- config parsing ---------------------------------------------------------

namespace cfgdetail {

inline Potential parse_potential(const json& j) {
  if (!j.contains("name"))
    throw std::invalid_argument("potential.name is required");
  return catalog_make(j.at("name"),
                      j.value("params", nlohmann::json::object()));
}

inline AuxiliarySpec parse_aux(const json& j, const Potential& p) {
  const std::string kind = j.value("kind", "none");
  AuxiliarySpec aux;
  if (kind == "none") {
    aux = AuxNone{};
  } else if (kind == "contraction") {
    aux = AuxContraction{};
  } else if (kind == "homotopy") {
    Potential v0 = j.contains("v0") ? parse_potential(j.at("v0"))
                                    : default_homotopy_base(p.dim);
    aux = AuxHomotopy{std::move(v0)};
  } else if (kind == "hessian_quadratic") {
    Vec eps = default_eps(p.dim);
    if (j.contains("eps")) {
      if (j.at("eps").is_number())
        eps = Vec::Constant(p.dim, j.at("eps").get<double>());
      else {
        const auto& a = j.at("eps");
        eps.resize(static_cast<int>(a.size()));
        for (int i = 0; i < eps.size(); ++i) eps[i] = a.at(i);
      }
    }
    aux = AuxHessianQuadratic{std::move(eps)};
  } else if (kind == "kinetic_1d") {
    aux = AuxKinetic1D{j.value("eps", 0.1)};
  } else if (kind == "kinetic_nd") {
    Vec eps = default_eps(p.dim);
    if (j.contains("eps") && j.at("eps").is_number())
      eps = Vec::Constant(p.dim, j.at("eps").get<double>());
    aux = AuxKineticND{std::move(eps)};
  } else {
    throw std::invalid_argument("aux.kind '" + kind + "' unknown");
  }
  validate_aux_deep(aux, p);
  return aux;
}

inline ThermalSchedule parse_thermal(const json& j) {
  const std::string kind = j.value("kind", "constant");
  if (kind == "constant") return make_thermal_constant(j.at("T"));
  if (kind == "log") return make_thermal_log(j.at("T0"));
  throw std::invalid_argument("thermal.kind '" + kind + "' unknown");
}

inline QuantumSchedule parse_quantum(const json& j) {
  const std::string kind = j.value("kind", "zero");
  if (kind == "zero") return make_quantum_zero();
  if (kind == "constant") return make_quantum_constant(j.at("Gamma0"));
  if (kind == "power")
    return make_quantum_power(j.at("Gamma0"), j.value("p", 1.0));
  if (kind == "linear")
    return make_quantum_linear(j.at("Gamma0"), j.at("t_end"));
  throw std::invalid_argument("quantum.kind '" + kind + "' unknown");
}

inline SimConfig parse_sim(const json& j, std::uint64_t seed) {
  SimConfig cfg;
  cfg.dt = j.value("dt", 1e-3);
  cfg.steps = j.value("steps", 0LL);
  cfg.stride = j.value("stride", 1LL);
  cfg.seed = seed;
  cfg.link.w = j.value("w", 1.0);
  cfg.u_max_factor = j.value("u_max_factor", 15.0);
  const std::string mode = j.value("mode", "u_space");
  if (mode == "u_space")
    cfg.mode = Integrator::u_space;
  else if (mode == "x_space")
    cfg.mode = Integrator::x_space;
  else
    throw std::invalid_argument("sim.mode '" + mode + "' unknown");
  if (j.contains("x0")) {
    const auto& a = j.at("x0");
    Vec x0(static_cast<int>(a.size()));
    for (int i = 0; i < x0.size(); ++i) x0[i] = a.at(i);
    cfg.x0 = x0;
  }
  return cfg;
}

inline TargetSet parse_target(const json& j, const Potential& p) {
  const std::string kind = j.value("kind", "superlevel");
  if (kind == "superlevel") return make_superlevel(p, j.at("theta"));
  if (kind == "ball") {
    const auto& c = j.at("center");
    Vec center(static_cast<int>(c.size()));
    for (int i = 0; i < center.size(); ++i) center[i] = c.at(i);
    return TargetBall{center, j.at("radius")};
  }
  throw std::invalid_argument("target.kind '" + kind + "' unknown");
}

inline std::string potential_tag(const json& pj) {
  return pj.value("name", "potential");
}

struct OutputContext {
  std::optional<std::filesystem::path> dir;
  std::vector<std::string>* artifacts = nullptr;

  template <class WriteFn>
  void emit(const std::string& filename, WriteFn&& fn) const {
    if (!dir) return;
    std::filesystem::create_directories(*dir);
    const auto path = *dir / filename;
    std::ofstream os(path);
    if (!os) throw std::runtime_error("cannot write " + path.string());
    fn(os);
    artifacts->push_back(path.string());
  }
};

}  // namespace cfgdetail

// Structural validation; returns one message per offending key.
inline std::vector<std::string> validate_config(const json& cfg) {
  std::vector<std::string> problems;
  static const std::vector<std::string> kinds = {
      "stationary-check", "anneal-quantum", "anneal-joint",  "gap-sweep",
      "zt-track",         "aux-benchmark",  "hopfield-descent"};
  const std::string kind = cfg.value("experiment", "");
  if (std::find(kinds.begin(), kinds.end(), kind) == kinds.end())
    problems.push_back("experiment: unknown kind '" + kind + "'");

  auto try_parse = [&](const char* key, auto&& fn) {
    if (!cfg.contains(key)) return;
    try {
      fn(cfg.at(key));
    } catch (const std::exception& e) {
      problems.push_back(std::string(key) + ": " + e.what());
    }
  };
  std::optional<Potential> p;
  try_parse("potential", [&](const json& j) { p = cfgdetail::parse_potential(j); });
  if (p) {
    try_parse("aux", [&](const json& j) { cfgdetail::parse_aux(j, *p); });
    try_parse("target", [&](const json& j) { cfgdetail::parse_target(j, *p); });
  }
  try_parse("thermal", [&](const json& j) { cfgdetail::parse_thermal(j); });
  try_parse("quantum", [&](const json& j) { cfgdetail::parse_quantum(j); });
  try_parse("sim", [&](const json& j) {
    cfgdetail::parse_sim(j, 0).validate(p ? p->dim : 1);
  });
  if (cfg.contains("potentials")) {
    if (!cfg.at("potentials").is_array())
      problems.push_back("potentials: must be an array");
    else
      for (const auto& pj : cfg.at("potentials"))
        try {
          cfgdetail::parse_potential(pj);
        } catch (const std::exception& e) {
          problems.push_back(std::string("potentials: ") + e.what());
        }
  }
  return problems;
}

// ---- experiment bodies ------------------------------------------------------

namespace expdetail {

using cfgdetail::OutputContext;

inline void run_stationary_like(const json& cfg, ExperimentReport& rep,
                                const OutputContext& out, bool against_gamma0) {
  const Potential p = cfgdetail::parse_potential(cfg.at("potential"));
  if (p.dim != 1)
    throw std::invalid_argument("stationarity checks are one-dimensional");
  const AuxiliarySpec aux =
      cfgdetail::parse_aux(cfg.value("aux", json::object()), p);
  const ThermalSchedule th = cfgdetail::parse_thermal(cfg.at("thermal"));
  const QuantumSchedule q =
      cfgdetail::parse_quantum(cfg.value("quantum", json::object()));
  SimConfig sim = cfgdetail::parse_sim(cfg.at("sim"), cfg.value("seed", 42ULL));
  const long long burn_in = cfg.at("sim").value("burn_in", 0LL);
  const int bins = cfg.value("grid", json::object()).value("bins", 64);
  const double tv_max =
      cfg.value("tolerances", json::object()).value("tv_max", 0.05);

  const auto hists = simulate_histogram(sim, p, aux, th, q, burn_in, bins);

  // reference density: the invariant for the terminal Gamma (0 for a
  // decaying schedule) or the frozen Gamma of the run
  const double T = thermal_at(th, 0.0);
  const double gamma_ref =
      against_gamma0 ? 0.0 : quantum_at(q, 0.0).gamma;
  const DensityGrid ref = density_grid({p, aux, gamma_ref, T}, bins);
  const double tv = tv_distance(hists[0], ref);
  rep.metrics.push_back(Metric::le("tv", tv, tv_max));

  out.emit("histogram.csv", [&](std::ostream& os) {
    os << "bin_center,mass\n";
    os.precision(17);
    const auto m = hists[0].masses();
    for (int b = 0; b < bins; ++b)
      os << -1.0 + (b + 0.5) * 2.0 / bins << ',' << m[static_cast<size_t>(b)]
         << '\n';
  });
  out.emit("density.csv", [&](std::ostream& os) { ref.to_csv(os); });
}

inline void run_anneal_joint(const json& cfg, ExperimentReport& rep,
                             const OutputContext& out) {
  const Potential p = cfgdetail::parse_potential(cfg.at("potential"));
  const AuxiliarySpec aux =
      cfgdetail::parse_aux(cfg.value("aux", json::object()), p);
  const ThermalSchedule th = cfgdetail::parse_thermal(cfg.at("thermal"));
  const QuantumSchedule q = cfgdetail::parse_quantum(cfg.at("quantum"));
  SimConfig sim = cfgdetail::parse_sim(cfg.at("sim"), cfg.value("seed", 42ULL));
  const json ens = cfg.at("ensemble");
  const int n_traj = ens.value("trajectories", 200);
  const double radius = ens.value("success_radius", 0.1);
  const double success_min =
      cfg.value("tolerances", json::object()).value("success_min", 0.9);
  const double theta = ens.value("superlevel_theta", 0.2);

  if (p.minimizers.size() != 1)
    throw std::invalid_argument(
        "anneal-joint needs a potential with a unique known minimizer");

  // schedule sanity, reported not enforced
  const double M = potential_range(p, 4097).range;
  const double Mt = aux_range(aux, p, 4097).range;
  const JointReport joint =
      validate_joint(th, q, M, Mt, sim.dt * static_cast<double>(sim.steps));
  rep.metrics.push_back(
      Metric::info("joint_t0_above_2m", joint.t0_above_2m ? 1.0 : 0.0));
  rep.metrics.push_back(
      Metric::info("joint_lambda_decreasing", joint.lambda_decreasing ? 1.0 : 0.0));

  std::vector<double> eval_times;
  const double t_end = sim.dt * static_cast<double>(sim.steps);
  for (const auto& fr : ens.value("eval_fractions",
                                  std::vector<double>{0.2, 0.4, 0.6, 0.8, 1.0}))
    eval_times.push_back(fr * t_end);

  const TargetSet ground = TargetBall{p.minimizers.front(), radius};
  const TargetSet high = make_superlevel(p, theta);

  const EnsembleReport ground_rep = run_ensemble(sim, p, aux, th, q, n_traj,
                                                 ground, eval_times);
  const EnsembleReport high_rep = run_ensemble(sim, p, aux, th, q, n_traj,
                                               high, eval_times);

  const double final_fraction = ground_rep.hit_fractions.back();
  rep.metrics.push_back(Metric::ge("ground_fraction", final_fraction,
                                   success_min));
  // nonincreasing across the last three checkpoints
  const auto& hf = high_rep.hit_fractions;
  const size_t ne = hf.size();
  bool nonincreasing = true;
  if (ne >= 3)
    nonincreasing = hf[ne - 2] <= hf[ne - 3] + 1e-12 &&
                    hf[ne - 1] <= hf[ne - 2] + 1e-12;
  rep.metrics.push_back(
      Metric::ge("superlevel_hits_nonincreasing", nonincreasing ? 1.0 : 0.0, 0.5));
  rep.metrics.push_back(Metric::info("failures",
                                     static_cast<double>(ground_rep.failures)));

  out.emit("ensemble.json", [&](std::ostream& os) {
    json j;
    j["ground"] = ground_rep.to_json();
    j["superlevel"] = high_rep.to_json();
    os << j.dump(2) << '\n';
  });
}

inline void run_gap_sweep(const json& cfg, ExperimentReport& rep,
                          const OutputContext& out) {
  const json grid_cfg = cfg.value("grid", json::object());
  const int cells = grid_cfg.value("cells", 400);
  const double w = cfg.value("w", 1.0);
  const Grid1D grid(cells);
  const json tol = cfg.value("tolerances", json::object());

  std::ostringstream csv;
  csv.precision(17);
  csv << "potential,gamma,T,gap,bound,c,m_star,stationary_tv,pass\n";

  for (const auto& pj : cfg.at("potentials")) {
    const Potential p = cfgdetail::parse_potential(pj);
    const std::string tag = cfgdetail::potential_tag(pj);
    for (const auto& gj : cfg.at("gammas")) {
      const double gamma = gj.get<double>();
      const AuxiliarySpec aux =
          gamma == 0.0
              ? AuxiliarySpec{AuxNone{}}
              : cfgdetail::parse_aux(
                    cfg.value("aux", json{{"kind", "contraction"}}), p);
      const std::vector<double> temps =
          cfg.value("temps", std::vector<double>{0.2, 0.3, 0.5, 1.0});
      const auto sweep = gap_bound_sweep(p, aux, gamma, temps, grid, w);
      bool all_bound = true;
      for (const auto& r : sweep) {
        all_bound = all_bound && r.bound_pass;
        csv << tag << ',' << gamma << ',' << r.T << ',' << r.gap << ','
            << r.lower_bound << ',' << r.c << ',' << r.m_star_value << ','
            << r.stationary_tv << ',' << (r.bound_pass ? 1 : 0) << '\n';
      }
      std::ostringstream suffix;
      suffix << tag << "_gamma" << gamma;
      rep.metrics.push_back(Metric::ge("lemma2_bound_" + suffix.str(),
                                       all_bound ? 1.0 : 0.0, 0.5));
      const double slope = arrhenius_slope(sweep);
      rep.metrics.push_back(
          Metric::ge("arrhenius_slope_" + suffix.str(), slope,
                     -2.0 * sweep.front().m_star_value * 1.1));
    }
  }

  if (cfg.value("include_oracle", true)) {
    // flat objective: gap = 2T/w and c = 1/w, from the Legendre spectrum
    const int oracle_cells = grid_cfg.value("oracle_cells", 512);
    const Grid1D og(oracle_cells);
    const Potential flat = make_constant(1, 0.0, "flat");
    const double rel = tol.value("oracle_rel_err", 0.02);
    for (double T : cfg.value("oracle_temps",
                              std::vector<double>{0.25, 0.5, 1.0})) {
      const double gap =
          spectral_gap(build_generator(flat, AuxNone{}, 0.0, T, og, w));
      std::ostringstream name;
      name << "oracle_gap_rel_err_T" << T;
      rep.metrics.push_back(
          Metric::le(name.str(), std::abs(gap - 2.0 * T / w) / (2.0 * T / w),
                     rel));
    }
    const double c = poincare_c(og, w);
    rep.metrics.push_back(
        Metric::le("oracle_c_rel_err", std::abs(c - 1.0 / w) / (1.0 / w), rel));
  }

  if (cfg.value("include_generator_checks", true)) {
    const double T = cfg.value("generator_T", 0.4);
    const Potential dw = make_double_well(0.5);
    for (double gamma : {0.0, 0.25}) {
      const AuxiliarySpec aux =
          gamma == 0.0 ? AuxiliarySpec{AuxNone{}} : AuxiliarySpec{AuxContraction{}};
      const GeneratorMatrix L = build_generator(dw, aux, gamma, T, grid, w);
      const DensityGrid mu = density_grid({dw, aux, gamma, T}, cells);
      std::vector<double> pi_mass(static_cast<size_t>(cells));
      const Vec pi = L.stationary();
      for (int i = 0; i < cells; ++i)
        pi_mass[static_cast<size_t>(i)] = pi[i] * grid.h;
      std::ostringstream name;
      name << "stationary_tv_gamma" << gamma;
      rep.metrics.push_back(Metric::le(name.str(),
                                       tv_distance(pi_mass, mu.masses()),
                                       tol.value("stationary_tv_max", 0.01)));

      // residual of the sampled quadrature density must drop >= 3x per halving
      auto residual = [&](int n_cells) {
        const Grid1D g2(n_cells);
        const GeneratorMatrix L2 = build_generator(dw, aux, gamma, T, g2, w);
        const DensityGrid mu2 = density_grid({dw, aux, gamma, T}, n_cells);
        Vec v(n_cells);
        for (int i = 0; i < n_cells; ++i)
          v[i] = mu2.density[static_cast<size_t>(i)];
        return L2.apply(v).cwiseAbs().maxCoeff();
      };
      const double r1 = residual(cells), r2 = residual(2 * cells);
      std::ostringstream rname;
      rname << "residual_ratio_gamma" << gamma;
      rep.metrics.push_back(Metric::ge(rname.str(), r1 / r2,
                                       tol.value("residual_ratio_min", 3.0)));
    }
  }

  out.emit("gap_sweep.csv", [&](std::ostream& os) { os << csv.str(); });
}

inline void run_zt_track(const json& cfg, ExperimentReport& rep,
                         const OutputContext& out) {
  const Potential p = cfgdetail::parse_potential(cfg.at("potential"));
  const AuxiliarySpec aux =
      cfgdetail::parse_aux(cfg.value("aux", json{{"kind", "contraction"}}), p);
  const double T = cfg.at("thermal").at("T");
  const QuantumSchedule q = cfgdetail::parse_quantum(cfg.at("quantum"));
  const json grid_cfg = cfg.value("grid", json::object());
  const Grid1D grid(grid_cfg.value("cells", 400));
  const double w = cfg.value("w", 1.0);
  const double t_end = cfg.value("t_end", 200.0);
  const double dt_ode = cfg.value("dt_ode", 0.01);
  const int record_stride = cfg.value("record_stride", 50);
  const json tol = cfg.value("tolerances", json::object());

  const GeneratorMatrix L0 =
      build_generator(p, aux, quantum_at(q, 0.0).gamma, T, grid, w);
  const DensityPath path = evolve_density(p, aux, T, q, grid, L0.stationary(),
                                          t_end, dt_ode, w, record_stride);
  const double c = poincare_c(grid, w);
  const double m_tilde = aux_range(aux, p, 4097).range;
  const ZtTrace tr = z_trace(path, q, p, aux, c, m_tilde);

  double z_min = std::numeric_limits<double>::infinity(), z_max = 0.0;
  for (double z : tr.z) {
    z_min = std::min(z_min, z);
    z_max = std::max(z_max, z);
  }
  rep.metrics.push_back(Metric::ge("z_min", z_min, 1.0 - 1e-8));
  rep.metrics.push_back(
      Metric::le("z_sup", z_max, tol.value("z_sup_max", 100.0)));
  rep.metrics.push_back(Metric::le("z_final", tr.z.back(),
                                   1.0 + tol.value("z_final_excess", 1e-3)));
  rep.metrics.push_back(Metric::le("mass_drift", path.max_mass_drift, 1e-10));
  rep.metrics.push_back(Metric::info("k_estimate", tr.k_estimate));

  // set-mass bound along the run: mass_t(S) <= max_{s<=t} sqrt(z_s)
  //                                           * sqrt(mu_{Gamma(t)}(S)) + 1e-8
  for (const auto& th_j : cfg.value("thetas", std::vector<double>{0.05, 0.2})) {
    const double theta = th_j;
    const TargetSet S = make_superlevel(p, theta);
    double margin_min = std::numeric_limits<double>::infinity();
    double running_k = 0.0;
    for (size_t k = 0; k < path.times.size(); ++k) {
      running_k = std::max(running_k, std::sqrt(tr.z[k]));
      const DensityGrid mu =
          density_grid({p, aux, path.gammas[k], T}, grid.n_cells);
      double mass_m = 0.0;
      for (int i = 0; i < grid.n_cells; ++i)
        if (target_contains(S, p, mu.center(i)))
          mass_m += path.densities[k][i] * grid.h;
      const double bound =
          running_k * std::sqrt(gibbs_mass(mu, S, p)) + 1e-8;
      margin_min = std::min(margin_min, bound - mass_m);
    }
    std::ostringstream name;
    name << "corollary_margin_theta" << theta;
    rep.metrics.push_back(Metric::ge(name.str(), margin_min, 0.0));
  }

  out.emit("zt_trace.csv", [&](std::ostream& os) {
    os << "t,z,b,b_denom_positive\n";
    os.precision(17);
    for (size_t k = 0; k < tr.times.size(); ++k)
      os << tr.times[k] << ',' << tr.z[k] << ',' << tr.b[k] << ','
         << (tr.b_denom_positive[k] ? 1 : 0) << '\n';
  });
  out.emit("density_path.csv", [&](std::ostream& os) { path.to_csv(os); });
}

inline void run_hopfield_descent(const json& cfg, ExperimentReport& rep,
                                 const OutputContext& out) {
  const json sim_cfg = cfg.at("sim");
  const json tol = cfg.value("tolerances", json::object());
  const double grad_max = tol.value("terminal_grad_max", 1e-3);

  for (const auto& pj : cfg.at("potentials")) {
    const Potential p = cfgdetail::parse_potential(pj);
    const std::string tag = cfgdetail::potential_tag(pj);
    SimConfig sim = cfgdetail::parse_sim(sim_cfg, cfg.value("seed", 42ULL));
    const ThermalSchedule zero_t = ThermalConstant{0.0};
    const QuantumSchedule zero_q = make_quantum_zero();

    double max_ascent = -std::numeric_limits<double>::infinity();
    double lip_hess = 0.0, lip_vel = 0.0;
    double prev_v = 0.0;
    Vec last_x;
    simulate_visit(sim, p, AuxNone{}, zero_t, zero_q,
                   [&](const NetworkState& st, long long s, double) {
                     const double v = p.value(st.x);
                     const Vec g = p.grad(st.x);
                     const Mat H = p.hess(st.x);
                     double fg2 = 0.0;
                     for (int k = 0; k < p.dim; ++k) {
                       const double fg = sim.link.f(st.x[k]) * g[k];
                       fg2 += fg * fg;
                     }
                     lip_vel = std::max(lip_vel, fg2);
                     lip_hess = std::max(
                         lip_hess, H.cwiseAbs().rowwise().sum().maxCoeff());
                     if (s > 0) max_ascent = std::max(max_ascent, v - prev_v);
                     prev_v = v;
                     last_x = st.x;
                   });
    const double slack = 10.0 * sim.dt * sim.dt * lip_hess * lip_vel;
    rep.metrics.push_back(
        Metric::le("ascent_minus_slack_" + tag, max_ascent - slack, 0.0));
    rep.metrics.push_back(Metric::le(
        "terminal_grad_" + tag, p.grad(last_x).cwiseAbs().maxCoeff(), grad_max));
  }
  (void)out;
}

inline void run_aux_benchmark(const json& cfg, ExperimentReport& rep,
                              const OutputContext& out) {
  const int resolution = cfg.value("resolution", 4097);
  const double eps = cfg.value("eps", 0.1);
  const double gamma_contact = cfg.value("gamma_contact", 0.5);

  long long sign_violations = 0;
  long long contact_violations = 0;
  long long extrema_checked = 0;
  long long inflections_checked = 0;

  for (const auto& pj : cfg.at("potentials")) {
    const Potential p = cfgdetail::parse_potential(pj);
    if (p.dim != 1)
      throw std::invalid_argument("auxiliary tests are one-dimensional");
    const AuxiliarySpec hq = AuxHessianQuadratic{Vec::Constant(1, eps)};
    const AuxiliarySpec kin = AuxKinetic1D{eps};
    const double h = 2.0 / (resolution - 1);
    Vec x(1), xl(1), xr(1);

    // interior strict extrema of V: the quadratic auxiliary must be
    // positive at maxima, negative at minima
    for (int i = 1; i + 1 < resolution; ++i) {
      x[0] = -1.0 + i * h;
      xl[0] = x[0] - h;
      xr[0] = x[0] + h;
      const double v = p.value(x), vl = p.value(xl), vr = p.value(xr);
      const bool is_max = v > vl && v > vr;
      const bool is_min = v < vl && v < vr;
      if (!is_max && !is_min) continue;
      ++extrema_checked;
      const double vt = aux_value(hq, p, x);
      if ((is_max && !(vt > 0.0)) || (is_min && !(vt < 0.0))) ++sign_violations;
    }

    // contact points of the kinetic auxiliary: wherever V'' vanishes the
    // effective potential must coincide with V
    auto vsec = [&](double xx) {
      Vec xv(1);
      xv[0] = xx;
      return p.hess(xv)(0, 0);
    };
    auto check_contact = [&](double xx) {
      Vec xv(1);
      xv[0] = xx;
      if (std::abs(vsec(xx)) > 1e-10) return;
      ++inflections_checked;
      const double vp = p.grad(xv)[0];
      const double wv = p.value(xv) - gamma_contact * aux_value(kin, p, xv);
      const double allowance =
          gamma_contact * 1e-10 * (eps * eps + vp * vp);
      if (std::abs(wv - p.value(xv)) > allowance) ++contact_violations;
    };
    for (int i = 0; i < resolution; ++i) check_contact(-1.0 + i * h);
    // refine the sign changes of V'' to hit the contacts exactly
    for (int i = 0; i + 1 < resolution; ++i) {
      double a = -1.0 + i * h, b = a + h;
      double fa = vsec(a), fb = vsec(b);
      if (fa == 0.0 || fa * fb > 0.0) continue;
      for (int it = 0; it < 80; ++it) {
        const double m = 0.5 * (a + b), fm = vsec(m);
        if (fa * fm <= 0.0) {
          b = m;
          fb = fm;
        } else {
          a = m;
          fa = fm;
        }
      }
      check_contact(0.5 * (a + b));
    }
  }
  rep.metrics.push_back(
      Metric::le("eq9_sign_violations", static_cast<double>(sign_violations), 0.0));
  rep.metrics.push_back(Metric::le("eq10_contact_violations",
                                   static_cast<double>(contact_violations), 0.0));
  rep.metrics.push_back(
      Metric::ge("extrema_checked", static_cast<double>(extrema_checked), 1.0));
  rep.metrics.push_back(Metric::ge("contact_points_checked",
                                   static_cast<double>(inflections_checked), 1.0));

  // success-fraction table across auxiliaries, informational
  if (cfg.contains("ensemble")) {
    const json ens = cfg.at("ensemble");
    const Potential p = cfgdetail::parse_potential(ens.at("potential"));
    SimConfig sim =
        cfgdetail::parse_sim(ens.at("sim"), cfg.value("seed", 42ULL));
    const ThermalSchedule th = cfgdetail::parse_thermal(ens.at("thermal"));
    const QuantumSchedule q = cfgdetail::parse_quantum(ens.at("quantum"));
    const int n_traj = ens.value("trajectories", 64);
    const double radius = ens.value("success_radius", 0.1);
    const TargetSet ground = TargetBall{p.minimizers.front(), radius};
    const double t_end = sim.dt * static_cast<double>(sim.steps);

    std::ostringstream csv;
    csv << "aux,success_fraction,mean_final_V\n";
    for (const std::string kind :
         {"none", "homotopy", "contraction", "hessian_quadratic", "kinetic_1d"}) {
      const AuxiliarySpec aux = cfgdetail::parse_aux(json{{"kind", kind}}, p);
      const EnsembleReport r =
          run_ensemble(sim, p, aux, th, q, n_traj, ground, {t_end});
      rep.metrics.push_back(
          Metric::info("success_" + kind, r.hit_fractions.back()));
      csv << kind << ',' << r.hit_fractions.back() << ',' << r.mean_v.back()
          << '\n';
    }
    out.emit("aux_benchmark.csv",
             [&](std::ostream& os) { os << csv.str(); });
  }
}

}  // namespace expdetail

inline ExperimentReport run_experiment(const json& cfg) {
  const auto problems = validate_config(cfg);
  if (!problems.empty()) {
    std::string msg = "invalid config:";
    for (const auto& p : problems) msg += "\n  - " + p;
    throw std::invalid_argument(msg);
  }
  ExperimentReport rep;
  rep.config = cfg;
  cfgdetail::OutputContext out;
  if (cfg.contains("out") && cfg.at("out").is_string())
    out.dir = std::filesystem::path(cfg.at("out").get<std::string>());
  out.artifacts = &rep.artifacts;

  const auto start = std::chrono::steady_clock::now();
  const std::string kind = cfg.at("experiment");
  try {
    if (kind == "stationary-check")
      expdetail::run_stationary_like(cfg, rep, out, false);
    else if (kind == "anneal-quantum")
      expdetail::run_stationary_like(cfg, rep, out, true);
    else if (kind == "anneal-joint")
      expdetail::run_anneal_joint(cfg, rep, out);
    else if (kind == "gap-sweep")
      expdetail::run_gap_sweep(cfg, rep, out);
    else if (kind == "zt-track")
      expdetail::run_zt_track(cfg, rep, out);
    else if (kind == "hopfield-descent")
      expdetail::run_hopfield_descent(cfg, rep, out);
    else if (kind == "aux-benchmark")
      expdetail::run_aux_benchmark(cfg, rep, out);
    else
      throw std::invalid_argument("unknown experiment kind '" + kind + "'");
  } catch (const std::invalid_argument&) {
    throw;
  } catch (const std::exception& e) {
    throw std::runtime_error("experiment '" + kind + "' failed: " + e.what());
  }
  rep.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
          .count();
  return rep;
}

inline std::vector<std::string> emit_report(const ExperimentReport& rep,
                                            const std::string& format,
                                            const std::filesystem::path& dir,
                                            const std::string& stem) {
  std::filesystem::create_directories(dir);
  std::vector<std::string> written;
  if (format == "json") {
    const auto path = dir / (stem + ".json");
    std::ofstream os(path);
    if (!os) throw std::runtime_error("cannot write " + path.string());
    os << rep.to_json().dump(2) << '\n';
    written.push_back(path.string());
  } else if (format == "csv-summary") {
    const auto path = dir / (stem + ".csv");
    std::ofstream os(path);
    if (!os) throw std::runtime_error("cannot write " + path.string());
    os.precision(17);
    os << "metric,value,cmp,threshold,pass\n";
    for (const auto& m : rep.metrics) {
      os << m.name << ',' << m.value << ',' << m.cmp << ',';
      if (m.cmp.empty())
        os << ',';
      else
        os << m.threshold << ',' << (m.pass ? 1 : 0);
      os << '\n';
    }
    written.push_back(path.string());
  } else {
    throw std::invalid_argument("unknown report format '" + format + "'");
  }
  return written;
}

}  // namespace qdn
