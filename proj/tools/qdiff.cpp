// qdiff: run quantum diffusion network experiments from JSON configs.

#include <CLI11.hpp>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "qdn/experiment.hpp"
#include "qdn/presets.hpp"

namespace {

qdn::json load_config(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("cannot open config " + path);
  qdn::json cfg;
  is >> cfg;
  return cfg;
}

// "a.b.c=value" with the value parsed as JSON when possible
void apply_override(qdn::json& cfg, const std::string& kv) {
  const auto eq = kv.find('=');
  if (eq == std::string::npos)
    throw std::runtime_error("override must look like key.path=value: " + kv);
  const std::string path = kv.substr(0, eq);
  const std::string raw = kv.substr(eq + 1);
  qdn::json value;
  try {
    value = qdn::json::parse(raw);
  } catch (...) {
    value = raw;  // plain string
  }
  qdn::json* node = &cfg;
  size_t start = 0;
  while (true) {
    const auto dot = path.find('.', start);
    const std::string key = path.substr(start, dot - start);
    if (key.empty()) throw std::runtime_error("bad override path: " + path);
    if (dot == std::string::npos) {
      (*node)[key] = value;
      break;
    }
    node = &(*node)[key];
    start = dot + 1;
  }
}

int finish(const qdn::ExperimentReport& rep, const std::string& out_dir,
           const std::string& stem) {
  for (const auto& f : qdn::emit_report(rep, "json", out_dir, stem))
    std::cout << "wrote " << f << '\n';
  for (const auto& f : qdn::emit_report(rep, "csv-summary", out_dir, stem))
    std::cout << "wrote " << f << '\n';
  for (const auto& a : rep.artifacts) std::cout << "wrote " << a << '\n';
  for (const auto& m : rep.metrics) {
    std::cout << "  " << m.name << " = " << m.value;
    if (!m.cmp.empty())
      std::cout << "  (" << m.cmp << ' ' << m.threshold << ") "
                << (m.pass ? "pass" : "FAIL");
    std::cout << '\n';
  }
  std::cout << (rep.all_pass() ? "PASS" : "FAIL") << "  ("
            << rep.wall_seconds << " s)\n";
  return rep.all_pass() ? 0 : 1;
}

std::string default_out_dir(const std::string& flag_value) {
  if (!flag_value.empty()) return flag_value;
  if (const char* env = std::getenv("QDIFF_OUT")) return env;
  return "out";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"quantum diffusion network lab"};
  app.require_subcommand(1);

  std::string config_path, preset_name, out_dir;
  std::uint64_t seed = 0;
  bool seed_set = false;
  std::vector<std::string> overrides;

  auto* run = app.add_subcommand("run", "run an experiment from a config file");
  run->add_option("config", config_path, "JSON config")->required();
  run->add_option("--set", overrides,
                  "override a config key by dotted path, e.g. sim.dt=1e-3");
  run->add_option("--out", out_dir, "output directory");
  run->add_option("--seed", seed, "master seed")->each([&](const std::string&) {
    seed_set = true;
  });

  auto* pre = app.add_subcommand("preset", "run a named preset (or 'all')");
  pre->add_option("name", preset_name, "preset name")->required();
  pre->add_option("--seed", seed, "master seed")->each([&](const std::string&) {
    seed_set = true;
  });
  pre->add_option("--out", out_dir, "output directory");

  auto* lst = app.add_subcommand("list-presets", "list preset names");

  auto* val = app.add_subcommand("validate", "validate a config file");
  val->add_option("config", config_path, "JSON config")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (lst->parsed()) {
      for (const auto& n : qdn::preset_names()) std::cout << n << '\n';
      return 0;
    }
    if (val->parsed()) {
      const auto problems = qdn::validate_config(load_config(config_path));
      if (problems.empty()) {
        std::cout << "config ok\n";
        return 0;
      }
      for (const auto& p : problems) std::cerr << "error: " << p << '\n';
      return 1;
    }
    if (run->parsed()) {
      qdn::json cfg = load_config(config_path);
      for (const auto& kv : overrides) apply_override(cfg, kv);
      if (seed_set) cfg["seed"] = seed;
      const std::string dir = default_out_dir(out_dir);
      cfg["out"] = dir;
      return finish(qdn::run_experiment(cfg),
                    dir, cfg.value("experiment", "experiment"));
    }
    // preset
    std::vector<std::string> names;
    if (preset_name == "all")
      names = qdn::preset_names();
    else
      names.push_back(preset_name);
    int rc = 0;
    for (const auto& n : names) {
      std::cout << "== preset " << n << " ==\n";
      qdn::json cfg = qdn::preset_config(n);
      if (seed_set) cfg["seed"] = seed;
      const std::string dir = default_out_dir(out_dir) + "/" + n;
      cfg["out"] = dir;
      rc |= finish(qdn::run_experiment(cfg), dir, n);
    }
    return rc;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
}
