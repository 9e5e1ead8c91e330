// Command-line front door. Builds a configuration from an optional file
// plus --set overrides, then drives the library through its C interface.
#include <cstdio>
#include <memory>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "seq2attn/seq2attn.h"

namespace {

struct ConfigDeleter {
  void operator()(s2a_config* cfg) const { s2a_config_free(cfg); }
};
using ConfigPtr = std::unique_ptr<s2a_config, ConfigDeleter>;

// Exit code = the status code (0 ok, 1 config, 2 runtime).
int fail(s2a_status status) {
  std::fprintf(stderr, "error: %s\n", s2a_last_error());
  return static_cast<int>(status);
}

// File first, then --set overrides in order.
int build_config(const std::string& config_path,
                 const std::vector<std::string>& overrides, ConfigPtr& out) {
  s2a_config* cfg = nullptr;
  const s2a_status status = config_path.empty()
                                ? s2a_config_create(&cfg)
                                : s2a_config_load(config_path.c_str(), &cfg);
  if (status != S2A_OK) return fail(status);
  out.reset(cfg);
  for (const std::string& assignment : overrides) {
    if (const s2a_status bad = s2a_config_set(cfg, assignment.c_str())) {
      return fail(bad);
    }
  }
  if (const s2a_status bad = s2a_config_validate(cfg)) return fail(bad);
  return 0;
}

int report_run_dir(s2a_status status, const char* run_dir) {
  if (status != S2A_OK) return fail(status);
  std::printf("%s\n", run_dir);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"seq2attn lab: compositional seq2seq experiments"};
  app.require_subcommand(1);

  std::string config_path;
  std::vector<std::string> overrides;
  // The common options hang off every subcommand so they can be given in
  // either position: `s2a -s k=v train` or `s2a train -s k=v`.
  const auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("-c,--config", config_path,
                    "key = value configuration file")
        ->check(CLI::ExistingFile);
    cmd->add_option("-s,--set", overrides,
                    "override one key, as key=value (repeatable)");
    return cmd;
  };
  add_common(&app);

  auto* generate = add_common(app.add_subcommand(
      "generate", "write the configured task's dataset files"));
  auto* train = add_common(
      app.add_subcommand("train", "train one model into a run directory"));
  auto* eval = add_common(
      app.add_subcommand("eval", "score a checkpoint on a dataset"));
  std::string checkpoint_path, dataset_path;
  bool dump_attention = false;
  eval->add_option("checkpoint", checkpoint_path, "checkpoint file")
      ->required();
  eval->add_option("dataset", dataset_path, "TSV dataset")->required();
  eval->add_flag("--dump-attention", dump_attention,
                 "write per-example attention trace CSV/PGM files");
  auto* ablate = add_common(app.add_subcommand(
      "ablate", "train all 16 attention-mechanism variants"));
  auto* grid = add_common(
      app.add_subcommand("grid", "hyperparameter grid search (long-running)"));
  auto* overgen = add_common(app.add_subcommand(
      "overgen", "exception-learning run with overgeneralization monitoring"));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;  // usage problems share the config exit code
  }

  ConfigPtr cfg;
  if (const int bad = build_config(config_path, overrides, cfg)) return bad;

  char run_dir[4096] = {0};
  if (generate->parsed()) {
    if (const s2a_status bad = s2a_generate(cfg.get())) return fail(bad);
    std::printf("datasets written\n");
    return 0;
  }
  if (train->parsed()) {
    return report_run_dir(s2a_train(cfg.get(), run_dir, sizeof(run_dir)),
                          run_dir);
  }
  if (eval->parsed()) {
    double accuracy = 0.0, loss = 0.0;
    const s2a_status status =
        s2a_eval(cfg.get(), checkpoint_path.c_str(), dataset_path.c_str(),
                 dump_attention ? 1 : 0, &accuracy, &loss);
    if (status != S2A_OK) return fail(status);
    std::printf("sequence_accuracy %.6f\nloss %.6f\n", accuracy, loss);
    return 0;
  }
  if (ablate->parsed()) {
    return report_run_dir(s2a_ablate(cfg.get(), run_dir, sizeof(run_dir)),
                          run_dir);
  }
  if (grid->parsed()) {
    return report_run_dir(s2a_grid(cfg.get(), run_dir, sizeof(run_dir)),
                          run_dir);
  }
  return report_run_dir(s2a_overgen(cfg.get(), run_dir, sizeof(run_dir)),
                        run_dir);
}
