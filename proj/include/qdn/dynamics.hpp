#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <future>
#include <nlohmann/json.hpp>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <thread>
#include <variant>
#include <vector>

#include "qdn/auxiliary.hpp"
#include "qdn/potential.hpp"
#include "qdn/rng.hpp"
#include "qdn/schedule.hpp"

namespace qdn {

// g maps the unbounded internal state to (-1,1); f is the slope of g
// expressed in x, f(y) = g'(g^{-1}(y)) = (1-y^2)/w.
struct LinkFunctions {
  double w = 1.0;

  double g(double u) const { return std::tanh(u / w); }
  double g_inv(double x) const {
    if (!(std::abs(x) < 1.0))
      throw std::domain_error("g_inv needs |x| < 1");
    return w * std::atanh(x);
  }
  double f(double x) const { return (1.0 - x * x) / w; }
  double f_prime(double x) const { return -2.0 * x / w; }
};

struct LinkTriple {
  double u, x, f;
};

inline LinkTriple link_from_u(const LinkFunctions& lf, double u) {
  const double x = lf.g(u);
  return {u, x, lf.f(x)};
}
inline LinkTriple link_from_x(const LinkFunctions& lf, double x) {
  return {lf.g_inv(x), x, lf.f(x)};
}

struct NetworkState {
  double t = 0.0;
  Vec u, x;
};

enum class Integrator { u_space, x_space };

struct SimConfig {
  double dt = 1e-3;
  long long steps = 0;
  long long stride = 1;
  std::uint64_t seed = 0;
  std::optional<Vec> x0;  // default: uniform on (-0.5,0.5)^n from the stream
  Integrator mode = Integrator::u_space;
  LinkFunctions link;
  double u_max_factor = 15.0;  // clamp |u| <= u_max_factor * w

  double u_max() const { return u_max_factor * link.w; }
  void validate(int dim) const {
    if (!(dt > 0.0)) throw std::invalid_argument("dt must be > 0");
    if (steps < 0) throw std::invalid_argument("steps must be >= 0");
    if (stride < 1) throw std::invalid_argument("stride must be >= 1");
    if (x0) {
      if (x0->size() != dim)
        throw std::invalid_argument("initial state dimension mismatch");
      for (int k = 0; k < dim; ++k)
        if (!(std::abs((*x0)[k]) < 1.0))
          throw std::invalid_argument("initial x must be strictly interior");
    }
  }
};

struct Trajectory {
  std::vector<double> times;
  std::vector<Vec> xs;
  std::vector<double> v_values;  // V(x)
  std::vector<double> w_values;  // V(x) - Gamma(t)*Vtilde(x)

  size_t size() const { return times.size(); }

  void to_csv(std::ostream& os) const {
    const int n = xs.empty() ? 0 : static_cast<int>(xs.front().size());
    os << "t";
    for (int k = 1; k <= n; ++k) os << ",x" << k;
    os << ",V,W\n";
    os.precision(17);
    for (size_t i = 0; i < times.size(); ++i) {
      os << times[i];
      for (int k = 0; k < n; ++k) os << ',' << xs[i][k];
      os << ',' << v_values[i] << ',' << w_values[i] << '\n';
    }
  }
};

struct StepError : std::runtime_error {
  StepError(const std::string& what, NetworkState s, long long step_index)
      : std::runtime_error(what), state(std::move(s)), step(step_index) {}
  NetworkState state;
  long long step;
};

struct SimulationAbort : std::runtime_error {
  SimulationAbort(const std::string& what, Trajectory partial_traj,
                  long long step_index)
      : std::runtime_error(what),
        partial(std::move(partial_traj)),
        step(step_index) {}
  Trajectory partial;
  long long step;
};

// Drift of the internal state: -grad of the effective potential
// W = V - Gamma*Vtilde, taken with respect to x.
inline Vec drift(const Vec& x, const Potential& p, const AuxiliarySpec& aux,
                 double gamma) {
  if (gamma == 0.0 || std::holds_alternative<AuxNone>(aux))
    return (-p.grad(x)).eval();
  if (std::holds_alternative<AuxContraction>(aux))
    return (-(1.0 - gamma) * p.grad(x)).eval();
  if (const auto* h = std::get_if<AuxHomotopy>(&aux))
    return (-(1.0 - gamma) * p.grad(x) - gamma * h->v0.grad(x)).eval();
  return (-(p.grad(x) - gamma * eval_aux(aux, p, x).grad)).eval();
}

// Componentwise noise amplitudes sigma_k = sqrt(2T / f(x_k)).
inline Vec diffusion_coeffs(const Vec& x, double T, const LinkFunctions& lf) {
  if (T < 0.0) throw std::invalid_argument("temperature must be >= 0");
  const int n = static_cast<int>(x.size());
  Vec sigma = Vec::Zero(n);
  if (T == 0.0) return sigma;
  for (int k = 0; k < n; ++k) {
    if (!(std::abs(x[k]) < 1.0))
      throw std::domain_error("diffusion needs strictly interior x");
    sigma[k] = std::sqrt(2.0 * T / lf.f(x[k]));
  }
  return sigma;
}

namespace detail {

inline double reflect_into(double x, double bound) {
  for (int it = 0; it < 16 && std::abs(x) > bound; ++it) {
    if (x > bound) x = 2.0 * bound - x;
    if (x < -bound) x = -2.0 * bound - x;
  }
  return std::clamp(x, -bound, bound);
}

inline constexpr double kXBound = 1.0 - 1e-9;

}  // namespace detail

// One Euler-Maruyama step. Noise is drawn from the counter stream at
// (step_index, component), so a step is a pure function of the seed and its
// index.
inline NetworkState em_step(const NetworkState& state, double dt, double T,
                            double gamma, const Potential& p,
                            const AuxiliarySpec& aux, const SimConfig& cfg,
                            const CounterRng& rng, long long step_index) {
  const int n = p.dim;
  const double sqdt = std::sqrt(dt);
  const std::uint64_t base =
      static_cast<std::uint64_t>(n) * (static_cast<std::uint64_t>(step_index) + 1);
  NetworkState next;
  next.t = state.t + dt;
  next.u.resize(n);
  next.x.resize(n);

  const Vec b = drift(state.x, p, aux, gamma);

  if (cfg.mode == Integrator::u_space) {
    const double umax = cfg.u_max();
    for (int k = 0; k < n; ++k) {
      double du = b[k] * dt;
      if (T > 0.0) {
        const double sigma = std::sqrt(2.0 * T / cfg.link.f(state.x[k]));
        du += sigma * sqdt * rng.normal(base + k);
      }
      const double u = std::clamp(state.u[k] + du, -umax, umax);
      next.u[k] = u;
      next.x[k] = cfg.link.g(u);
    }
  } else {
    for (int k = 0; k < n; ++k) {
      const double fx = cfg.link.f(state.x[k]);
      double dx = (fx * b[k] + T * cfg.link.f_prime(state.x[k])) * dt;
      if (T > 0.0)
        dx += std::sqrt(2.0 * T * fx) * sqdt * rng.normal(base + k);
      const double x = detail::reflect_into(state.x[k] + dx, detail::kXBound);
      next.x[k] = x;
      next.u[k] = cfg.link.g_inv(x);
    }
  }
  if (!next.u.allFinite() || !next.x.allFinite())
    throw StepError("non-finite proposal in em_step", state, step_index);
  return next;
}

namespace detail {

inline NetworkState initial_state(const SimConfig& cfg, int dim,
                                  const CounterRng& rng) {
  NetworkState st;
  st.t = 0.0;
  st.x.resize(dim);
  st.u.resize(dim);
  if (cfg.x0) {
    st.x = *cfg.x0;
  } else {
    for (int k = 0; k < dim; ++k)
      st.x[k] = -0.5 + rng.uniform(static_cast<std::uint64_t>(k));
  }
  for (int k = 0; k < dim; ++k) st.u[k] = cfg.link.g_inv(st.x[k]);
  return st;
}

}  // namespace detail

// Core loop; the visitor sees every state, including the initial one, as
// visitor(state, step_index, gamma_at_state_time).
template <class Visitor>
void simulate_visit(const SimConfig& cfg, const Potential& p,
                    const AuxiliarySpec& aux, const ThermalSchedule& th,
                    const QuantumSchedule& q, Visitor&& visit) {
  cfg.validate(p.dim);
  validate_aux(aux, p);
  const CounterRng rng(cfg.seed);
  NetworkState st = detail::initial_state(cfg, p.dim, rng);
  visit(st, 0LL, quantum_at(q, 0.0).gamma);
  for (long long s = 0; s < cfg.steps; ++s) {
    const double T = thermal_at(th, st.t);
    const double gamma = quantum_at(q, st.t).gamma;
    st = em_step(st, cfg.dt, T, gamma, p, aux, cfg, rng, s);
    st.t = cfg.dt * static_cast<double>(s + 1);  // avoid accumulation drift
    visit(st, s + 1, quantum_at(q, st.t).gamma);
  }
}

inline Trajectory simulate(const SimConfig& cfg, const Potential& p,
                           const AuxiliarySpec& aux, const ThermalSchedule& th,
                           const QuantumSchedule& q) {
  Trajectory traj;
  auto record = [&](const NetworkState& st, long long s, double gamma) {
    if (s % cfg.stride != 0 && s != cfg.steps) return;
    traj.times.push_back(st.t);
    traj.xs.push_back(st.x);
    const double v = p.value(st.x);
    const double vt = (gamma == 0.0) ? 0.0 : aux_value(aux, p, st.x);
    traj.v_values.push_back(v);
    traj.w_values.push_back(v - gamma * vt);
  };
  try {
    simulate_visit(cfg, p, aux, th, q, record);
  } catch (const StepError& e) {
    throw SimulationAbort(std::string("simulation aborted: ") + e.what(),
                          std::move(traj), e.step);
  }
  return traj;
}

// ---- target sets ----------------------------------------------------------

struct TargetSuperlevel {
  double theta;
  double inf_v;  // resolved inf of V
};
struct TargetBall {
  Vec center;
  double radius;
};
struct TargetUnion {
  std::vector<TargetBall> balls;
};
using TargetSet = std::variant<TargetSuperlevel, TargetBall, TargetUnion>;

inline bool target_contains(const TargetSet& s, const Potential& p,
                            const Vec& x) {
  if (const auto* lvl = std::get_if<TargetSuperlevel>(&s))
    return p.value(x) >= lvl->theta + lvl->inf_v;
  if (const auto* ball = std::get_if<TargetBall>(&s))
    return (x - ball->center).norm() <= ball->radius;
  for (const auto& b : std::get<TargetUnion>(s).balls)
    if ((x - b.center).norm() <= b.radius) return true;
  return false;
}

// Superlevel set {V >= theta + inf V}; inf from the declared minimizers when
// available, else a grid scan.
inline TargetSet make_superlevel(const Potential& p, double theta,
                                 int resolution = 4097) {
  if (!(theta > 0.0)) throw std::invalid_argument("superlevel: theta > 0");
  double inf_v;
  if (!p.minimizers.empty()) {
    inf_v = std::numeric_limits<double>::infinity();
    for (const auto& m : p.minimizers) inf_v = std::min(inf_v, p.value(m));
  } else if (p.dim <= 3) {
    inf_v = potential_range(p, resolution).inf_value;
  } else {
    inf_v = potential_range_sampled(p, 200000, 12345).inf_value;
  }
  return TargetSuperlevel{theta, inf_v};
}

// ---- histograms and ensembles ----------------------------------------------

struct Histogram {
  int bins = 64;
  std::vector<double> counts;
  long long total = 0;

  explicit Histogram(int n_bins = 64) : bins(n_bins), counts(n_bins, 0.0) {}

  void add(double x) {
    // domain is (-1,1)
    int b = static_cast<int>((x + 1.0) * 0.5 * bins);
    b = std::clamp(b, 0, bins - 1);
    counts[static_cast<size_t>(b)] += 1.0;
    ++total;
  }
  std::vector<double> masses() const {
    std::vector<double> m(counts.size(), 0.0);
    if (total == 0) return m;
    for (size_t i = 0; i < counts.size(); ++i)
      m[i] = counts[i] / static_cast<double>(total);
    return m;
  }
  void merge(const Histogram& other) {
    for (size_t i = 0; i < counts.size(); ++i) counts[i] += other.counts[i];
    total += other.total;
  }
};

// Long-run occupation histogram per axis, accumulated online. States with
// step < burn_in_steps are skipped.
inline std::vector<Histogram> simulate_histogram(
    const SimConfig& cfg, const Potential& p, const AuxiliarySpec& aux,
    const ThermalSchedule& th, const QuantumSchedule& q,
    long long burn_in_steps, int bins = 64) {
  std::vector<Histogram> hists(static_cast<size_t>(p.dim), Histogram(bins));
  simulate_visit(cfg, p, aux, th, q,
                 [&](const NetworkState& st, long long s, double) {
                   if (s < burn_in_steps) return;
                   for (int k = 0; k < p.dim; ++k)
                     hists[static_cast<size_t>(k)].add(st.x[k]);
                 });
  return hists;
}

struct EnsembleReport {
  std::vector<double> eval_times;
  std::vector<double> hit_fractions;
  std::vector<double> mean_v;
  std::vector<double> min_v;
  std::vector<Histogram> final_histograms;  // per axis, over final states
  long long failures = 0;
  int trajectories = 0;
  std::uint64_t seed = 0;
  nlohmann::ordered_json config_echo;

  nlohmann::ordered_json to_json() const {
    nlohmann::ordered_json j;
    j["times"] = eval_times;
    j["hit_fractions"] = hit_fractions;
    j["meanV"] = mean_v;
    j["minV"] = min_v;
    j["failures"] = failures;
    j["trajectories"] = trajectories;
    j["config"] = config_echo;
    j["seed"] = seed;
    nlohmann::ordered_json hj = nlohmann::ordered_json::array();
    for (const auto& h : final_histograms) {
      nlohmann::ordered_json hh;
      hh["bins"] = h.bins;
      hh["masses"] = h.masses();
      hj.push_back(hh);
    }
    j["final_histogram"] = hj;
    return j;
  }
};

namespace detail {

struct TrajectoryStats {
  bool failed = false;
  std::vector<Vec> eval_x;     // per eval time
  std::vector<double> eval_v;  // per eval time
  Vec final_x;
};

}  // namespace detail

// Independent trajectories with per-trajectory streams split from the master
// seed; results are merged in trajectory order, so the report does not
// depend on the thread count.
inline EnsembleReport run_ensemble(const SimConfig& cfg, const Potential& p,
                                   const AuxiliarySpec& aux,
                                   const ThermalSchedule& th,
                                   const QuantumSchedule& q, int n_traj,
                                   const TargetSet& target,
                                   const std::vector<double>& eval_times,
                                   int hist_bins = 64, int threads = 0) {
  if (n_traj < 1) throw std::invalid_argument("need at least one trajectory");
  cfg.validate(p.dim);

  // snap eval times to the recording grid
  std::vector<long long> eval_steps;
  for (double t : eval_times) {
    long long s = std::llround(t / cfg.dt);
    s = std::clamp<long long>(s, 0, cfg.steps);
    s = (s / cfg.stride) * cfg.stride;
    eval_steps.push_back(s);
  }

  auto run_one = [&](int i) {
    detail::TrajectoryStats st;
    st.eval_x.resize(eval_steps.size());
    st.eval_v.resize(eval_steps.size(), 0.0);
    SimConfig c = cfg;
    c.seed = CounterRng::substream(cfg.seed, static_cast<std::uint64_t>(i)).key();
    try {
      simulate_visit(c, p, aux, th, q,
                     [&](const NetworkState& s2, long long step, double) {
                       for (size_t e = 0; e < eval_steps.size(); ++e)
                         if (step == eval_steps[e]) {
                           st.eval_x[e] = s2.x;
                           st.eval_v[e] = p.value(s2.x);
                         }
                       if (step == cfg.steps) st.final_x = s2.x;
                     });
    } catch (const StepError&) {
      st.failed = true;
    } catch (const SimulationAbort&) {
      st.failed = true;
    }
    return st;
  };

  int hw = threads > 0 ? threads
                       : static_cast<int>(std::thread::hardware_concurrency());
  if (hw < 1) hw = 1;
  hw = std::min(hw, n_traj);

  std::vector<detail::TrajectoryStats> stats(static_cast<size_t>(n_traj));
  std::vector<std::future<void>> workers;
  std::atomic<int> next{0};
  for (int w = 0; w < hw; ++w)
    workers.push_back(std::async(std::launch::async, [&]() {
      for (int i = next.fetch_add(1); i < n_traj; i = next.fetch_add(1))
        stats[static_cast<size_t>(i)] = run_one(i);
    }));
  for (auto& f : workers) f.get();

  EnsembleReport rep;
  rep.seed = cfg.seed;
  rep.trajectories = n_traj;
  for (size_t e = 0; e < eval_steps.size(); ++e)
    rep.eval_times.push_back(cfg.dt * static_cast<double>(eval_steps[e]));
  rep.hit_fractions.assign(eval_steps.size(), 0.0);
  rep.mean_v.assign(eval_steps.size(), 0.0);
  rep.min_v.assign(eval_steps.size(),
                   std::numeric_limits<double>::infinity());
  rep.final_histograms.assign(static_cast<size_t>(p.dim), Histogram(hist_bins));

  long long ok = 0;
  for (const auto& st : stats) {
    if (st.failed) {
      ++rep.failures;
      continue;
    }
    ++ok;
    for (size_t e = 0; e < eval_steps.size(); ++e) {
      if (target_contains(target, p, st.eval_x[e])) rep.hit_fractions[e] += 1.0;
      rep.mean_v[e] += st.eval_v[e];
      rep.min_v[e] = std::min(rep.min_v[e], st.eval_v[e]);
    }
    for (int k = 0; k < p.dim; ++k)
      rep.final_histograms[static_cast<size_t>(k)].add(st.final_x[k]);
  }
  if (ok > 0)
    for (size_t e = 0; e < eval_steps.size(); ++e) {
      rep.hit_fractions[e] /= static_cast<double>(ok);
      rep.mean_v[e] /= static_cast<double>(ok);
    }
  return rep;
}

}  // namespace qdn
