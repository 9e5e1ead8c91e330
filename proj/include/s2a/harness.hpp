#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "s2a/config.hpp"
#include "s2a/dataset.hpp"
#include "s2a/model.hpp"
#include "s2a/vocab.hpp"

// Training loop, evaluation, sweeps and overgeneralization monitoring.
// Everything here is deterministic given the spec's seed: reruns produce
// byte-identical metrics, and sweep results do not depend on scheduling.
namespace s2a::harness {

enum class CheckpointPolicy { BestVal, Final };

struct TrainSpec {
  ModelConfig model;
  std::string run_id;
  std::uint64_t seed = 1;
  std::size_t epochs = 50;
  std::size_t batch_size = 1;
  std::size_t eval_every = 1;   // evaluate splits every this many epochs
  double lr = 1e-3;
  double subsample = 1.0;       // seeded fraction of train actually used
  bool self_feed = false;
  CheckpointPolicy policy = CheckpointPolicy::BestVal;
  bool overgen = false;         // monitor the exception set each eval

  void validate() const;        // epochs >= 1, batch_size >= 1, model dims
};

// An input whose trained target may have been adapted away from the rule.
// For clean members of a monitored set, adapted == original.
struct ExceptionExample {
  std::vector<std::string> input;
  std::vector<std::string> original;
  std::vector<std::string> adapted;
};

// Everything a training run reads. `eval_splits` are scored per eval
// interval; `validation` additionally drives best-checkpoint selection.
struct Datasets {
  Vocab input_vocab;
  Vocab output_vocab;
  Dataset train;
  Dataset validation;  // may be empty (then BestVal is unavailable)
  std::vector<std::pair<std::string, Dataset>> eval_splits;
  std::vector<ExceptionExample> exceptions;  // overgen monitor set

  // Longest target (tokens, excluding <eos>) across every split.
  std::size_t longest_target() const;
};

struct MetricsRow {
  std::size_t epoch = 0;
  std::string split;
  double sequence_accuracy = 0.0;  // in [0, 1]
  double loss = 0.0;               // mean per-example summed token NLL
};

struct OvergenRecord {
  std::size_t epoch = 0;
  std::size_t n_original = 0;
  std::size_t n_adapted = 0;
  std::size_t n_other = 0;
  // n_original / (n_original + n_adapted); absent when that sum is 0.
  std::optional<double> normalized_original;
  // Fraction of the whole monitor set whose output matches the original
  // (rule-derived) target.
  double raw_original_accuracy = 0.0;
};

struct AttentionTrace {
  std::size_t example_id = 0;
  std::vector<std::string> input_tokens;
  std::vector<std::string> output_tokens;  // incl. <eos>
  std::vector<std::vector<double>> weights;  // [steps][input positions]
};

// Fraction of exact sequence matches (token ids through <eos>).
double sequence_accuracy(const std::vector<std::vector<std::size_t>>& preds,
                         const std::vector<std::vector<std::size_t>>& targets);

struct EvalResult {
  double sequence_accuracy = 0.0;
  double loss = 0.0;  // teacher-forced, mean per example
  std::vector<AttentionTrace> traces;  // filled when collect_traces
};

// Inference-mode scoring: free-running decode for accuracy and traces,
// teacher-forced pass for the loss. Never mutates the model.
EvalResult evaluate(const Model& model, const Dataset& data,
                    const Vocab& input_vocab, const Vocab& output_vocab,
                    bool collect_traces = false);

// Free-decodes every monitored input and classifies it against the
// original target first, then the adapted one.
OvergenRecord monitor_overgeneralization(
    const Model& model, const std::vector<ExceptionExample>& exceptions,
    const Vocab& input_vocab, const Vocab& output_vocab);

struct TrainResult {
  std::unique_ptr<Model> model;  // per spec.policy: best-validation or final
  std::size_t selected_epoch = 0;
  std::vector<MetricsRow> metrics;
  std::vector<OvergenRecord> overgen;
};

TrainResult train(const TrainSpec& spec, const Datasets& data);

// Builds a TrainSpec from a merged run configuration plus the data it will
// see (vocab sizes, auto batch size and decode length, auto policy).
TrainSpec spec_from_config(const RunConfig& cfg, const Datasets& data,
                           const std::string& task);

// --- sweeps ---------------------------------------------------------------

struct GridPoint {
  CellType cell = CellType::GRU;
  std::size_t embedding_dim = 0;
  std::size_t hidden_dim = 0;
  double dropout = 0.0;
};

struct GridResult {
  GridPoint point;
  double validation_accuracy = 0.0;
  double validation_loss = 0.0;
  std::size_t parameter_count = 0;
};

// One seeded run per grid point; results ranked by validation accuracy,
// ties by fewer parameters, then by lower validation loss.
std::vector<GridResult> grid_search(const TrainSpec& base,
                                    const Datasets& data,
                                    const std::vector<CellType>& cells,
                                    const std::vector<std::size_t>& emb_dims,
                                    const std::vector<std::size_t>& hid_dims,
                                    const std::vector<double>& dropouts,
                                    std::size_t threads = 0);

struct AblationCell {
  double mean = 0.0;
  double stdev = 0.0;
};

struct AblationRow {
  std::string flags;  // "" for the baseline, "GEFT" for the full model
  // One accuracy summary per eval split, in Datasets::eval_splits order.
  std::vector<AblationCell> cells;
};

// All 16 flag combinations x n_seeds, rows ordered by flag count then code.
std::vector<AblationRow> ablation_sweep(const TrainSpec& base,
                                        const Datasets& data,
                                        std::size_t n_seeds,
                                        std::size_t threads = 0);

// --- artifact writers -------------------------------------------------------

void write_metrics_csv(const std::string& path, const std::string& run_id,
                       const std::vector<MetricsRow>& rows);
void write_overgen_csv(const std::string& path, const std::string& run_id,
                       const std::vector<OvergenRecord>& rows);
// Header row: "output" then the input tokens; one row per decoder step,
// prefixed by the emitted token.
void write_trace_csv(const std::string& path, const AttentionTrace& trace);
// Plain (P2) PGM, one pixel per weight, white = weight 1.
void write_trace_pgm(const std::string& path, const AttentionTrace& trace);
void write_grid_csv(const std::string& path,
                    const std::vector<GridResult>& results);
void write_ablation_csv(const std::string& path,
                        const std::vector<AblationRow>& rows,
                        const std::vector<std::string>& split_names);

}  // namespace s2a::harness
