#pragma once

#include <cmath>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

namespace qdn {

// Thermal process T(t): constant, or the logarithmic cooling
// T(t) = T0 / log2(2 + t).
struct ThermalConstant {
  double T;
};
struct ThermalLogarithmic {
  double T0;
};
using ThermalSchedule = std::variant<ThermalConstant, ThermalLogarithmic>;

inline ThermalSchedule make_thermal_constant(double T) {
  if (!(T > 0.0)) throw std::invalid_argument("thermal constant: need T > 0");
  return ThermalConstant{T};
}
inline ThermalSchedule make_thermal_log(double T0) {
  if (!(T0 > 0.0)) throw std::invalid_argument("thermal log: need T0 > 0");
  return ThermalLogarithmic{T0};
}

inline double thermal_at(const ThermalSchedule& s, double t) {
  if (const auto* c = std::get_if<ThermalConstant>(&s)) return c->T;
  const auto& l = std::get<ThermalLogarithmic>(s);
  return l.T0 / std::log2(2.0 + t);
}

// Quantum process Gamma(t), nonincreasing, with one-sided derivatives at the
// linear schedule's kink.
struct QuantumZero {};
struct QuantumConstant {
  double gamma0;
};
struct QuantumPowerDecay {
  double gamma0;
  double p;
};
struct QuantumLinearToZero {
  double gamma0;
  double t_end;
};
using QuantumSchedule = std::variant<QuantumZero, QuantumConstant,
                                     QuantumPowerDecay, QuantumLinearToZero>;

struct GammaValue {
  double gamma;
  double dgamma;
};

inline QuantumSchedule make_quantum_zero() { return QuantumZero{}; }
inline QuantumSchedule make_quantum_constant(double g0) {
  if (g0 < 0.0) throw std::invalid_argument("quantum constant: need Gamma0 >= 0");
  return QuantumConstant{g0};
}
inline QuantumSchedule make_quantum_power(double g0, double p) {
  if (g0 < 0.0 || !(p > 0.0))
    throw std::invalid_argument("quantum power decay: need Gamma0 >= 0, p > 0");
  return QuantumPowerDecay{g0, p};
}
inline QuantumSchedule make_quantum_linear(double g0, double t_end) {
  if (g0 < 0.0 || !(t_end > 0.0))
    throw std::invalid_argument("quantum linear: need Gamma0 >= 0, t_end > 0");
  return QuantumLinearToZero{g0, t_end};
}

inline GammaValue quantum_at(const QuantumSchedule& s, double t) {
  struct Eval {
    double t;
    GammaValue operator()(const QuantumZero&) const { return {0.0, 0.0}; }
    GammaValue operator()(const QuantumConstant& c) const {
      return {c.gamma0, 0.0};
    }
    GammaValue operator()(const QuantumPowerDecay& d) const {
      if (d.p == 1.0) {
        const double inv = 1.0 / (1.0 + t);
        return {d.gamma0 * inv, -d.gamma0 * inv * inv};
      }
      const double base = std::pow(1.0 + t, -d.p);
      return {d.gamma0 * base, -d.p * d.gamma0 * base / (1.0 + t)};
    }
    GammaValue operator()(const QuantumLinearToZero& l) const {
      if (t > l.t_end) return {0.0, 0.0};
      // left derivative at the kink
      return {l.gamma0 * (1.0 - t / l.t_end), -l.gamma0 / l.t_end};
    }
  };
  return std::visit(Eval{t}, s);
}

// Diagnostics for running a (T, Gamma) pair together. Violations are
// reported as warnings; nothing here stops a simulation.
struct JointReport {
  double M = 0.0;
  double M_tilde = 0.0;
  bool t0_above_2m = false;
  // against the upper estimate sup_t M*(Gamma(t)) <= M + Gamma(0)*Mtilde
  bool t0_above_2m_star_bound = false;
  double lambda_max = 0.0;
  bool lambda_decreasing = true;
  std::vector<double> probe_times;
  std::vector<double> lambda_values;  // Lambda(t) = Gamma(t)/T(t)
  std::vector<double> d_values;       // D(t) = 1/T(t)
  std::vector<std::string> warnings;
};

inline JointReport validate_joint(const ThermalSchedule& th,
                                  const QuantumSchedule& q, double M,
                                  double M_tilde, double horizon) {
  if (!(horizon > 0.0)) throw std::invalid_argument("horizon must be > 0");
  JointReport rep;
  rep.M = M;
  rep.M_tilde = M_tilde;

  const double t0_temp = thermal_at(th, 0.0);
  const double gamma0 = quantum_at(q, 0.0).gamma;
  rep.t0_above_2m = t0_temp > 2.0 * M;
  rep.t0_above_2m_star_bound = t0_temp > 2.0 * (M + gamma0 * M_tilde);
  if (!rep.t0_above_2m)
    rep.warnings.push_back("T(0) <= 2M: logarithmic cooling guarantee void");

  const int probes = 64;
  for (int i = 0; i <= probes; ++i) {
    // quadratic spacing: denser where the schedules move fastest
    const double s = static_cast<double>(i) / probes;
    const double t = horizon * s * s;
    const double T = thermal_at(th, t);
    const double lam = quantum_at(q, t).gamma / T;
    rep.probe_times.push_back(t);
    rep.lambda_values.push_back(lam);
    rep.d_values.push_back(1.0 / T);
    rep.lambda_max = std::max(rep.lambda_max, lam);
  }
  for (size_t i = 1; i < rep.lambda_values.size(); ++i)
    if (rep.lambda_values[i] > rep.lambda_values[i - 1] + 1e-12)
      rep.lambda_decreasing = false;
  if (!rep.lambda_decreasing)
    rep.warnings.push_back(
        "Lambda(t) = Gamma/T is not decreasing over the probe horizon");
  return rep;
}

}  // namespace qdn
