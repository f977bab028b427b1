#include <chrono>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "banditstream/config.hpp"
#include "banditstream/environments.hpp"
#include "banditstream/harness.hpp"
#include "banditstream/presets.hpp"
#include "banditstream/version.hpp"

namespace bs = banditstream;
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct CommonOpts {
  std::string config_path;
  std::string preset;
  std::vector<std::string> sets;
  std::string out = "results";
  int jobs = 1;
  bool dump_truth = false;
};

void add_common(CLI::App* cmd, CommonOpts& opts, bool io_opts = true) {
  cmd->add_option("--config", opts.config_path, "experiment config (.toml or .json)");
  cmd->add_option("--preset", opts.preset, "bundled preset name");
  cmd->add_option("--set", opts.sets, "override KEY=VALUE (repeatable)");
  if (io_opts) {
    cmd->add_option("--out", opts.out, "output directory");
    cmd->add_option("--jobs", opts.jobs, "parallel runs")->check(CLI::PositiveNumber);
    cmd->add_flag("--dump-truth", opts.dump_truth,
                  "include realized ground truth in the manifest");
  }
}

json load_config(const CommonOpts& opts) {
  json cfg;
  if (!opts.preset.empty()) {
    cfg = bs::parse_toml(bs::preset_toml(opts.preset));
  } else if (!opts.config_path.empty()) {
    cfg = bs::load_config_file(opts.config_path);
  } else {
    throw bs::ConfigError("one of --config or --preset is required");
  }
  for (const auto& kv : opts.sets) {
    const size_t eq = kv.find('=');
    if (eq == std::string::npos)
      throw bs::ConfigError("--set expects KEY=VALUE, got `" + kv + "`");
    bs::apply_override(cfg, kv.substr(0, eq), kv.substr(eq + 1));
  }
  return cfg;
}

std::vector<bs::CellResult> run_cells(const bs::ExperimentSpec& spec, int jobs) {
  std::vector<bs::CellResult> cells;
  for (const auto& pol : spec.policies) {
    const auto t0 = std::chrono::steady_clock::now();
    auto make_env = [&]() { return bs::make_environment(spec.env, spec.obs); };
    auto make_policy = [&](bs::Environment* env) {
      return bs::make_policy(pol, env, spec);
    };
    bs::CellResult cell;
    cell.policy = bs::policy_label(pol);
    cell.env = spec.env["kind"].get<std::string>();
    cell.runs =
        bs::run_many(make_policy, make_env, spec.T, spec.k, spec.runs, spec.seed, jobs);
    cell.agg = bs::aggregate(cell.runs);
    cell.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    cells.push_back(std::move(cell));
  }
  return cells;
}

json cell_manifest(const std::vector<bs::CellResult>& cells) {
  json arr = json::array();
  for (const auto& c : cells) {
    arr.push_back({{"policy", c.policy},
                   {"env", c.env},
                   {"runs", c.agg.runs},
                   {"final_reward_mean", c.agg.final_reward.mean},
                   {"final_regret_mean", c.agg.final_regret.mean},
                   {"wall_seconds", c.wall_seconds}});
  }
  return arr;
}

void write_outputs(const fs::path& dir, const bs::ExperimentSpec& spec,
                   const std::vector<bs::CellResult>& cells, bool dump_truth) {
  fs::create_directories(dir);
  bs::write_results_csv((dir / "results.csv").string(), cells, spec.emit_every);
  bs::write_final_csv((dir / "final.csv").string(), cells);
  auto env = bs::make_environment(spec.env, spec.obs);
  env->reset(bs::Rng(bs::Rng::mix(spec.seed, 0)).child(0));
  json manifest = {{"version", bs::kVersion},
                   {"base_seed", spec.seed},
                   {"config", spec.raw},
                   {"environment", env->manifest(dump_truth)},
                   {"cells", cell_manifest(cells)}};
  bs::write_manifest((dir / "manifest.json").string(), manifest);
}

int cmd_run(const CommonOpts& opts, bool compare_mode) {
  const json cfg = load_config(opts);
  const bs::ExperimentSpec spec = bs::parse_experiment(cfg);
  if (compare_mode && spec.policies.size() < 2)
    throw bs::ConfigError("compare needs at least two [[policy]] entries");
  const auto cells = run_cells(spec, opts.jobs);
  write_outputs(opts.out, spec, cells, opts.dump_truth);
  std::printf("%-28s %-20s %6s %16s %16s\n", "policy", "env", "runs", "final_reward",
              "final_regret");
  for (const auto& c : cells)
    std::printf("%-28s %-20s %6d %16.4f %16.4f\n", c.policy.c_str(), c.env.c_str(),
                c.agg.runs, c.agg.final_reward.mean, c.agg.final_regret.mean);
  std::printf("wrote %s\n", (fs::path(opts.out) / "results.csv").c_str());
  return 0;
}

int cmd_sweep(const CommonOpts& opts) {
  const json cfg = load_config(opts);
  bs::validate_config(cfg);
  const auto grid = bs::expand_sweep(cfg);
  for (const auto& [label, cell_cfg] : grid) {
    const bs::ExperimentSpec spec = bs::parse_experiment(cell_cfg);
    const auto cells = run_cells(spec, opts.jobs);
    const fs::path dir =
        label.empty() ? fs::path(opts.out) : fs::path(opts.out) / label;
    write_outputs(dir, spec, cells, opts.dump_truth);
    std::printf("cell %-28s done (%zu policies)\n", label.empty() ? "-" : label.c_str(),
                cells.size());
  }
  return 0;
}

int cmd_validate(const CommonOpts& opts) {
  const json cfg = load_config(opts);
  bs::validate_config(cfg);
  std::printf("OK\n");
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"banditstream - bandit policies and simulation harness"};
  app.require_subcommand(1);
  app.set_version_flag("--version", bs::kVersion);

  CommonOpts run_opts, sweep_opts, compare_opts, validate_opts;
  CLI::App* run = app.add_subcommand("run", "run every (policy x env) cell of a config");
  add_common(run, run_opts);
  CLI::App* sweep = app.add_subcommand("sweep", "run the Cartesian sweep grid of a config");
  add_common(sweep, sweep_opts);
  CLI::App* compare =
      app.add_subcommand("compare", "run >= 2 policies with common random numbers");
  add_common(compare, compare_opts);
  CLI::App* validate = app.add_subcommand("validate", "check a config and exit");
  add_common(validate, validate_opts, false);

  CLI::App* presets = app.add_subcommand("presets", "list or show bundled presets");
  std::string show_name;
  CLI::App* presets_list = presets->add_subcommand("list", "list preset names");
  CLI::App* presets_show = presets->add_subcommand("show", "print a preset config");
  presets_show->add_option("name", show_name, "preset name")->required();
  presets->require_subcommand(1);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    if (run->parsed()) return cmd_run(run_opts, false);
    if (compare->parsed()) return cmd_run(compare_opts, true);
    if (sweep->parsed()) return cmd_sweep(sweep_opts);
    if (validate->parsed()) return cmd_validate(validate_opts);
    if (presets->parsed()) {
      if (presets_list->parsed()) {
        for (const auto& name : bs::preset_names()) std::printf("%s\n", name.c_str());
        return 0;
      }
      if (presets_show->parsed()) {
        std::printf("%s", bs::preset_toml(show_name).c_str());
        return 0;
      }
    }
  } catch (const bs::ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 3;
  }
  return 0;
}
