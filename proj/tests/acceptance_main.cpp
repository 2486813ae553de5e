// Acceptance suite: runs every desk-scale claim the library is built
// around and prints one pass/fail line per criterion. Exit code is the
// number of failed criteria.

#include <cstdio>
#include <string>
#include <vector>

#include "qdn/experiment.hpp"
#include "qdn/presets.hpp"

namespace {

int failures = 0;

void line(int criterion, bool pass, const std::string& what,
          const std::string& detail) {
  std::printf("[%s] criterion %2d: %s  (%s)\n", pass ? "PASS" : "FAIL",
              criterion, what.c_str(), detail.c_str());
  std::fflush(stdout);
  if (!pass) ++failures;
}

bool metric_ok(const qdn::ExperimentReport& rep, const std::string& name) {
  const qdn::Metric* m = rep.find(name);
  return m != nullptr && m->pass;
}

std::string metric_str(const qdn::ExperimentReport& rep,
                       const std::string& name) {
  const qdn::Metric* m = rep.find(name);
  if (!m) return name + "=missing";
  char buf[128];
  std::snprintf(buf, sizeof(buf), "%s=%.6g", name.c_str(), m->value);
  return buf;
}

}  // namespace

int main() {
  using qdn::json;

  // 1. stationarity of the constant-temperature law
  {
    const auto rep = qdn::run_experiment(qdn::preset_config("stationary-check"));
    const bool on_time = rep.wall_seconds <= 180.0;
    line(1, metric_ok(rep, "tv") && on_time,
         "stationary law matches quadrature Gibbs (TV <= 0.05, <= 3 min)",
         metric_str(rep, "tv") + ", wall=" + std::to_string(rep.wall_seconds) +
             "s");
  }

  // 2. tilted invariant under a frozen Gamma
  {
    const auto rep =
        qdn::run_experiment(qdn::preset_config("stationary-check-tilted"));
    line(2, metric_ok(rep, "tv"),
         "frozen-Gamma law matches the tilted density (TV <= 0.05)",
         metric_str(rep, "tv"));
  }

  // 3-5 come from one sweep run
  {
    const auto rep = qdn::run_experiment(qdn::preset_config("gap-sweep"));

    const bool c3 = metric_ok(rep, "stationary_tv_gamma0") &&
                    metric_ok(rep, "stationary_tv_gamma0.25") &&
                    metric_ok(rep, "residual_ratio_gamma0") &&
                    metric_ok(rep, "residual_ratio_gamma0.25");
    line(3, c3,
         "discrete generator: stationary TV <= 0.01, residual ratio >= 3",
         metric_str(rep, "stationary_tv_gamma0") + ", " +
             metric_str(rep, "residual_ratio_gamma0"));

    const bool c4 = metric_ok(rep, "oracle_gap_rel_err_T0.25") &&
                    metric_ok(rep, "oracle_gap_rel_err_T0.5") &&
                    metric_ok(rep, "oracle_gap_rel_err_T1") &&
                    metric_ok(rep, "oracle_c_rel_err");
    line(4, c4,
         "flat-landscape oracles: gap within 2% of 2T/w, c within 2% of 1/w",
         metric_str(rep, "oracle_gap_rel_err_T0.5") + ", " +
             metric_str(rep, "oracle_c_rel_err"));

    bool c5 = true;
    std::string detail;
    for (const auto& m : rep.metrics) {
      if (m.name.rfind("lemma2_bound_", 0) == 0 ||
          m.name.rfind("arrhenius_slope_", 0) == 0) {
        c5 = c5 && m.pass;
        if (!m.pass) detail += m.name + " ";
      }
    }
    if (detail.empty()) detail = "all sweep points above the bound";
    line(5, c5, "spectral gap >= 0.9 * cT exp(-2M*/T), Arrhenius slope ok",
         detail);
  }

  // 6-7: density evolution tracking a decaying Gamma
  {
    const auto rep = qdn::run_experiment(qdn::preset_config("zt-track"));
    const bool on_time = rep.wall_seconds <= 120.0;
    const bool c6 = metric_ok(rep, "z_min") && metric_ok(rep, "z_sup") &&
                    metric_ok(rep, "z_final") && on_time;
    line(6, c6,
         "z_t >= 1-1e-8 throughout, bounded, and <= 1+1e-3 at t=200 (<= 2 min)",
         metric_str(rep, "z_min") + ", " + metric_str(rep, "z_final") +
             ", wall=" + std::to_string(rep.wall_seconds) + "s");

    const bool c7 = metric_ok(rep, "corollary_margin_theta0.05") &&
                    metric_ok(rep, "corollary_margin_theta0.2");
    line(7, c7,
         "set mass of m_t bounded by max sqrt(z) * sqrt(mu(S)) + 1e-8",
         metric_str(rep, "corollary_margin_theta0.05") + ", " +
             metric_str(rep, "corollary_margin_theta0.2"));
  }

  // 8. joint annealing drives the ensemble to the unique ground state
  {
    const auto rep = qdn::run_experiment(qdn::preset_config("anneal-joint"));
    const bool on_time = rep.wall_seconds <= 600.0;
    const bool c8 = metric_ok(rep, "ground_fraction") &&
                    metric_ok(rep, "superlevel_hits_nonincreasing") && on_time;
    line(8, c8,
         "joint annealing: >= 90% of runs end within 0.1 of the ground state",
         metric_str(rep, "ground_fraction") + ", " +
             metric_str(rep, "superlevel_hits_nonincreasing") +
             ", wall=" + std::to_string(rep.wall_seconds) + "s");
  }

  // 9. zero-noise runs are descent flows that park at critical points
  {
    const auto rep = qdn::run_experiment(qdn::preset_config("hopfield-descent"));
    bool c9 = true;
    std::string detail;
    for (const auto& m : rep.metrics) {
      if (m.cmp.empty()) continue;
      c9 = c9 && m.pass;
      if (!m.pass) detail += m.name + " ";
    }
    if (detail.empty()) detail = "all catalog potentials descend and park";
    line(9, c9, "Hopfield descent: V nonincreasing, terminal grad <= 1e-3",
         detail);
  }

  // 10. auxiliary sign and contact structure
  {
    const auto rep = qdn::run_experiment(qdn::preset_config("aux-benchmark"));
    const bool c10 = metric_ok(rep, "eq9_sign_violations") &&
                     metric_ok(rep, "eq10_contact_violations");
    line(10, c10,
         "quadratic auxiliary signs at extrema, kinetic contact at V''=0",
         metric_str(rep, "eq9_sign_violations") + ", " +
             metric_str(rep, "eq10_contact_violations"));
  }

  std::printf("%d criteria failed\n", failures);
  return failures;
}
