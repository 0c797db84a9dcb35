#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "gouda/config.hpp"
#include "gouda/error.hpp"
#include "gouda/runner.hpp"

namespace {

struct CommonArgs {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::string out;
};

void add_common(CLI::App* cmd, CommonArgs& args) {
  cmd->add_option("--config", args.config, "INI configuration file (defaults when omitted)");
  cmd->add_option("--seed", args.seed, "overrides the configured seed");
  cmd->add_option("--out", args.out, "output directory (overrides out_dir)");
}

gouda::RunConfig resolve(const CommonArgs& args) {
  gouda::RunConfig cfg = args.config.empty() ? gouda::RunConfig{} : gouda::load_config(args.config);
  if (args.seed) gouda::cli::override_seed(cfg, *args.seed);
  if (!args.out.empty()) cfg.out_dir = args.out;
  cfg.validate();
  return cfg;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"gouda: view-aware unsupervised gait adaptation on synthetic embeddings"};
  app.require_subcommand(1);

  CommonArgs synth_args, adapt_args, eval_args, analyze_args, check_args;
  std::string adapt_data, eval_data, eval_adapter, analyze_data, analyze_triplets, analyze_adapter;
  std::size_t instances = 100;
  bool inject_fault = false;

  auto* synth = app.add_subcommand("synth", "generate a synthetic target-domain dataset");
  add_common(synth, synth_args);

  auto* adapt = app.add_subcommand("adapt", "train an adapter on a dataset");
  add_common(adapt, adapt_args);
  adapt->add_option("--data", adapt_data, "dataset directory (defaults to the output directory)");

  auto* eval = app.add_subcommand("eval", "cross-view Rank-1 and neighbourhood statistics");
  add_common(eval, eval_args);
  eval->add_option("--data", eval_data, "dataset directory (defaults to the output directory)");
  eval->add_option("--adapter", eval_adapter, "adapter.csv; raw embeddings when omitted");

  auto* analyze = app.add_subcommand("analyze", "triplet correctness and view confusion");
  add_common(analyze, analyze_args);
  analyze->add_option("--data", analyze_data, "dataset directory (defaults to the output directory)");
  analyze->add_option("--triplets", analyze_triplets, "triplets.csv (defaults to <out>/triplets.csv)");
  analyze->add_option("--adapter", analyze_adapter, "adapter.csv for the adapted neighbourhood");

  auto* check = app.add_subcommand("oracle-check", "compare mining and gradients against brute-force oracles");
  add_common(check, check_args);
  check->add_option("--instances", instances, "random mining instances");
  check->add_flag("--inject-fault", inject_fault, "corrupt one oracle result (self-test)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  auto pick = [](const std::string& given, const std::string& fallback) { return given.empty() ? fallback : given; };
  auto maybe = [](const std::string& s) { return s.empty() ? std::nullopt : std::optional<std::filesystem::path>(s); };

  try {
    if (*synth) {
      const auto cfg = resolve(synth_args);
      gouda::cli::cmd_synth(cfg, cfg.out_dir);
    } else if (*adapt) {
      const auto cfg = resolve(adapt_args);
      gouda::cli::cmd_adapt(cfg, pick(adapt_data, cfg.out_dir), cfg.out_dir);
    } else if (*eval) {
      const auto cfg = resolve(eval_args);
      gouda::cli::cmd_eval(cfg, pick(eval_data, cfg.out_dir), maybe(eval_adapter), cfg.out_dir);
    } else if (*analyze) {
      const auto cfg = resolve(analyze_args);
      const std::filesystem::path triplets =
          analyze_triplets.empty() ? std::filesystem::path(cfg.out_dir) / gouda::cli::kTripletsFile
                                   : std::filesystem::path(analyze_triplets);
      gouda::cli::cmd_analyze(cfg, pick(analyze_data, cfg.out_dir), triplets, maybe(analyze_adapter), cfg.out_dir);
    } else if (*check) {
      const auto cfg = resolve(check_args);
      return gouda::cli::cmd_oracle_check(cfg, instances, inject_fault, std::cout);
    }
  } catch (const gouda::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
