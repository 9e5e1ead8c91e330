#pragma once

#include <string>
#include <vector>

#include "s2a/config.hpp"
#include "s2a/harness.hpp"

// File-level orchestration: dataset generation to TSV, loading by naming
// convention, and the top-level run commands that create self-describing
// run directories. This is the layer the C API exposes.
namespace s2a::runner {

// Directory resolution. Relative paths hang off the workspace root, which
// is $S2A_WORKSPACE when set and the current directory otherwise. Empty
// data_dir/out_dir default to <workspace>/data and <workspace>/runs.
std::string workspace_root();
std::string resolve_data_dir(const RunConfig& cfg);
std::string resolve_out_dir(const RunConfig& cfg);

// File-name stem for a task/condition/mode triple, e.g. "lookup",
// "lookup_overgen", "scan_exp2_fillers1", "scan_exp3_32_overgen".
std::string dataset_prefix(const RunConfig& cfg);

// Writes the configured task's splits as <prefix>_<split>.tsv plus a
// <prefix>_manifest.tsv recording the seed and per-file example counts.
// Returns the written file names (manifest last).
std::vector<std::string> generate(const RunConfig& cfg);

// Loads what `generate` wrote for this configuration and assembles vocabs,
// splits and (in overgen mode) the exception monitor set.
harness::Datasets load_datasets(const RunConfig& cfg);

struct RunArtifacts {
  std::string run_dir;
  std::vector<harness::MetricsRow> metrics;
  std::vector<harness::OvergenRecord> overgen;
};

// Trains per the config and fills <out_dir>/<run_id>/ with the config
// snapshot, dataset fingerprints, metrics.csv, overgen.csv (overgen mode),
// and the selected checkpoint.
RunArtifacts run_train(const RunConfig& cfg);

struct EvalArtifacts {
  double sequence_accuracy = 0.0;
  double loss = 0.0;
  std::vector<std::string> trace_files;
};

// Scores a saved checkpoint on a TSV dataset; with dump_attention, writes
// per-example trace CSV + PGM pairs into <out_dir>/<run_id>_eval/.
EvalArtifacts run_eval(const RunConfig& cfg, const std::string& checkpoint,
                       const std::string& dataset, bool dump_attention);

// 16-combination ablation on the configured task; writes ablation.csv.
RunArtifacts run_ablate(const RunConfig& cfg);

// Grid search over the config's grid_* ranges; writes grid.csv (ranked).
RunArtifacts run_grid(const RunConfig& cfg);

// Exception-learning run: forces overgen mode and writes overgen.csv.
RunArtifacts run_overgen(const RunConfig& cfg);

}  // namespace s2a::runner
