#include <catch2/catch_amalgamated.hpp>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "qdn/experiment.hpp"
#include "qdn/presets.hpp"

using namespace qdn;
using Catch::Approx;

namespace {

std::string slurp(const std::filesystem::path& p) {
  std::ifstream is(p, std::ios::binary);
  std::ostringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("configs round-trip through serialization") {
  for (const auto& name : preset_names()) {
    const json cfg = preset_config(name);
    const json back = json::parse(cfg.dump());
    CHECK(back == cfg);
  }
}

TEST_CASE("validation lists every offending key") {
  json cfg;
  cfg["experiment"] = "does-not-exist";
  cfg["potential"] = {{"name", "also-wrong"}};
  cfg["thermal"] = {{"kind", "exponential"}};
  const auto problems = validate_config(cfg);
  REQUIRE(problems.size() >= 3);
  bool saw_exp = false, saw_pot = false, saw_th = false;
  for (const auto& p : problems) {
    saw_exp = saw_exp || p.find("experiment") != std::string::npos;
    saw_pot = saw_pot || p.find("potential") != std::string::npos;
    saw_th = saw_th || p.find("thermal") != std::string::npos;
  }
  CHECK(saw_exp);
  CHECK(saw_pot);
  CHECK(saw_th);

  CHECK_THROWS_AS(run_experiment(cfg), std::invalid_argument);
}

TEST_CASE("preset catalog") {
  CHECK(preset_names().size() == 8);
  for (const auto& n : preset_names())
    CHECK(validate_config(preset_config(n)).empty());
  CHECK_THROWS_AS(preset_config("bogus"), std::invalid_argument);
}

TEST_CASE("hopfield descent preset passes at reduced scale") {
  json cfg = preset_config("hopfield-descent");
  cfg["sim"]["steps"] = 30000;
  const auto rep = run_experiment(cfg);
  for (const auto& m : rep.metrics) INFO(m.name << " = " << m.value);
  CHECK(rep.all_pass());
}

TEST_CASE("aux benchmark sign and contact tests pass") {
  json cfg = preset_config("aux-benchmark");
  cfg.erase("ensemble");  // keep the unit suite quick
  const auto rep = run_experiment(cfg);
  REQUIRE(rep.find("eq9_sign_violations") != nullptr);
  CHECK(rep.find("eq9_sign_violations")->value == 0.0);
  CHECK(rep.find("eq10_contact_violations")->value == 0.0);
  CHECK(rep.find("extrema_checked")->value >= 4.0);
  CHECK(rep.find("contact_points_checked")->value >= 2.0);
  CHECK(rep.all_pass());
}

TEST_CASE("small gap sweep run end to end") {
  json cfg = preset_config("gap-sweep");
  cfg["potentials"] = json::array(
      {{{"name", "double_well"}, {"params", {{"a", 0.5}}}}});
  cfg["gammas"] = {0.0};
  cfg["temps"] = {0.5, 1.0};
  cfg["grid"] = {{"cells", 128}, {"oracle_cells", 128}};
  cfg["include_generator_checks"] = false;
  const auto rep = run_experiment(cfg);
  for (const auto& m : rep.metrics) INFO(m.name << " = " << m.value);
  CHECK(rep.all_pass());
}

TEST_CASE("small zt-track run end to end") {
  json cfg = preset_config("zt-track");
  cfg["grid"] = {{"cells", 100}};
  cfg["t_end"] = 30.0;
  cfg["dt_ode"] = 0.02;
  cfg["record_stride"] = 50;
  cfg["tolerances"]["z_final_excess"] = 0.01;  // short horizon, looser tail
  const auto rep = run_experiment(cfg);
  for (const auto& m : rep.metrics) INFO(m.name << " = " << m.value);
  CHECK(rep.all_pass());
}

TEST_CASE("emitted reports are byte-identical across reruns") {
  json cfg = preset_config("aux-benchmark");
  cfg.erase("ensemble");
  const auto dir =
      std::filesystem::temp_directory_path() / "qdn_report_determinism";
  std::filesystem::remove_all(dir);

  const auto r1 = run_experiment(cfg);
  const auto r2 = run_experiment(cfg);
  emit_report(r1, "json", dir / "a", "rep");
  emit_report(r2, "json", dir / "b", "rep");
  emit_report(r1, "csv-summary", dir / "a", "rep");
  emit_report(r2, "csv-summary", dir / "b", "rep");
  CHECK(slurp(dir / "a" / "rep.json") == slurp(dir / "b" / "rep.json"));
  CHECK(slurp(dir / "a" / "rep.csv") == slurp(dir / "b" / "rep.csv"));
  CHECK_FALSE(slurp(dir / "a" / "rep.json").empty());
}

TEST_CASE("stationary experiment writes its artifacts") {
  json cfg;
  cfg["experiment"] = "stationary-check";
  cfg["seed"] = 7;
  cfg["potential"] = {{"name", "double_well"}, {"params", {{"a", 0.5}}}};
  cfg["aux"] = {{"kind", "none"}};
  cfg["thermal"] = {{"kind", "constant"}, {"T", 0.4}};
  cfg["quantum"] = {{"kind", "zero"}};
  cfg["sim"] = {{"dt", 1e-3}, {"steps", 60000}, {"burn_in", 10000}};
  cfg["grid"] = {{"bins", 32}};
  cfg["tolerances"] = {{"tv_max", 0.5}};  // smoke scale
  const auto dir = std::filesystem::temp_directory_path() / "qdn_artifacts";
  std::filesystem::remove_all(dir);
  cfg["out"] = dir.string();
  const auto rep = run_experiment(cfg);
  CHECK(rep.all_pass());
  REQUIRE(rep.artifacts.size() == 2);
  CHECK(std::filesystem::exists(dir / "histogram.csv"));
  CHECK(std::filesystem::exists(dir / "density.csv"));
}

TEST_CASE("metric serialization keeps a stable field order") {
  ExperimentReport rep;
  rep.config = json{{"experiment", "demo"}};
  rep.metrics.push_back(Metric::le("alpha", 1.0, 2.0));
  rep.metrics.push_back(Metric::info("beta", 3.0));
  const json j = rep.to_json();
  CHECK(j["metrics"][0]["name"] == "alpha");
  CHECK(j["metrics"][0]["pass"] == true);
  CHECK_FALSE(j["metrics"][1].contains("threshold"));
  CHECK(j["all_pass"] == true);
}
