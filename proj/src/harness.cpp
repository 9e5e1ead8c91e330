#include "s2a/harness.hpp"

#include <algorithm>
#include <atomic>
#include <bit>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <mutex>
#include <thread>

#include "s2a/adam.hpp"

namespace s2a::harness {

namespace {

// RNG stream tags within a training run.
constexpr std::uint64_t kInitStream = 1;
constexpr std::uint64_t kShuffleStream = 2;
constexpr std::uint64_t kNoiseStream = 3;
constexpr std::uint64_t kSubsampleStream = 4;

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.9g", v);
  return buf;
}

std::vector<std::size_t> target_ids(const Example& ex, const Vocab& out_vocab) {
  std::vector<std::size_t> ids = out_vocab.encode(ex.target);
  ids.push_back(Vocab::kEosId);
  return ids;
}

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write '" + path + "'");
  return out;
}

}  // namespace

void TrainSpec::validate() const {
  if (epochs < 1) throw ConfigError("epochs must be >= 1");
  if (batch_size < 1) throw ConfigError("batch_size must be >= 1");
  if (eval_every < 1) throw ConfigError("eval_every must be >= 1");
  if (lr <= 0) throw ConfigError("lr must be > 0");
  if (subsample <= 0 || subsample > 1) {
    throw ConfigError("subsample must be in (0, 1]");
  }
  model.validate();
}

std::size_t Datasets::longest_target() const {
  std::size_t longest = 0;
  const auto scan_set = [&](const Dataset& d) {
    for (const Example& ex : d) longest = std::max(longest, ex.target.size());
  };
  scan_set(train);
  scan_set(validation);
  for (const auto& [name, d] : eval_splits) scan_set(d);
  return longest;
}

double sequence_accuracy(const std::vector<std::vector<std::size_t>>& preds,
                         const std::vector<std::vector<std::size_t>>& targets) {
  if (preds.size() != targets.size()) {
    throw Error("sequence_accuracy: " + std::to_string(preds.size()) +
                " predictions vs " + std::to_string(targets.size()) +
                " targets");
  }
  if (preds.empty()) return 0.0;
  std::size_t hits = 0;
  for (std::size_t i = 0; i < preds.size(); ++i) {
    if (preds[i] == targets[i]) ++hits;
  }
  return static_cast<double>(hits) / static_cast<double>(preds.size());
}

EvalResult evaluate(const Model& model, const Dataset& data,
                    const Vocab& input_vocab, const Vocab& output_vocab,
                    bool collect_traces) {
  EvalResult result;
  if (data.empty()) return result;
  ForwardOptions opts;  // inference: no dropout, argmax attention
  Rng scratch(0);       // never consumed in inference mode
  std::size_t hits = 0;
  double loss_sum = 0.0;
  for (std::size_t i = 0; i < data.size(); ++i) {
    const Example& ex = data[i];
    const std::vector<std::size_t> input = input_vocab.encode(ex.input);
    const std::vector<std::size_t> target = target_ids(ex, output_vocab);

    const ForwardResult free_run = model.forward(input, nullptr, opts, scratch);
    if (free_run.output_tokens == target) ++hits;

    const ForwardResult forced = model.forward(input, &target, opts, scratch);
    loss_sum += forced.loss.item();

    if (collect_traces) {
      AttentionTrace trace;
      trace.example_id = i;
      trace.input_tokens = ex.input;
      trace.output_tokens = output_vocab.decode(free_run.output_tokens);
      trace.weights = free_run.attention;
      result.traces.push_back(std::move(trace));
    }
  }
  result.sequence_accuracy =
      static_cast<double>(hits) / static_cast<double>(data.size());
  result.loss = loss_sum / static_cast<double>(data.size());
  return result;
}

OvergenRecord monitor_overgeneralization(
    const Model& model, const std::vector<ExceptionExample>& exceptions,
    const Vocab& input_vocab, const Vocab& output_vocab) {
  if (exceptions.empty()) {
    throw Error("overgeneralization monitor needs a nonempty exception set");
  }
  OvergenRecord rec;
  ForwardOptions opts;
  Rng scratch(0);
  for (const ExceptionExample& ex : exceptions) {
    const std::vector<std::size_t> input = input_vocab.encode(ex.input);
    std::vector<std::size_t> original = output_vocab.encode(ex.original);
    original.push_back(Vocab::kEosId);
    std::vector<std::size_t> adapted = output_vocab.encode(ex.adapted);
    adapted.push_back(Vocab::kEosId);

    const ForwardResult run = model.forward(input, nullptr, opts, scratch);
    if (run.output_tokens == original) {
      ++rec.n_original;
    } else if (run.output_tokens == adapted) {
      ++rec.n_adapted;
    } else {
      ++rec.n_other;
    }
  }
  const std::size_t matched = rec.n_original + rec.n_adapted;
  if (matched > 0) {
    rec.normalized_original =
        static_cast<double>(rec.n_original) / static_cast<double>(matched);
  }
  rec.raw_original_accuracy = static_cast<double>(rec.n_original) /
                              static_cast<double>(exceptions.size());
  return rec;
}

TrainResult train(const TrainSpec& spec, const Datasets& data) {
  spec.validate();
  if (data.train.empty()) throw ConfigError("training set is empty");
  if (spec.policy == CheckpointPolicy::BestVal && data.validation.empty()) {
    throw ConfigError(
        "best-validation checkpointing needs a validation split");
  }

  const Rng root(spec.seed);
  Rng init_rng = root.fork(kInitStream);
  Rng shuffle_rng = root.fork(kShuffleStream);
  Rng noise_rng = root.fork(kNoiseStream);

  TrainResult result;
  result.model = std::make_unique<Model>(spec.model, init_rng);
  Model& model = *result.model;
  Adam opt(model.params().tensors(), spec.lr);

  // The training subset is fixed once; epochs reshuffle within it.
  std::vector<std::size_t> subset(data.train.size());
  for (std::size_t i = 0; i < subset.size(); ++i) subset[i] = i;
  if (spec.subsample < 1.0) {
    Rng sub_rng = root.fork(kSubsampleStream);
    sub_rng.shuffle(subset);
    const auto keep = std::max<std::size_t>(
        1, static_cast<std::size_t>(spec.subsample *
                                    static_cast<double>(subset.size())));
    subset.resize(keep);
    std::sort(subset.begin(), subset.end());
  }

  // Pre-encoded training pairs.
  std::vector<std::vector<std::size_t>> inputs(subset.size());
  std::vector<std::vector<std::size_t>> targets(subset.size());
  for (std::size_t i = 0; i < subset.size(); ++i) {
    inputs[i] = data.input_vocab.encode(data.train[subset[i]].input);
    targets[i] = target_ids(data.train[subset[i]], data.output_vocab);
  }

  ForwardOptions train_opts;
  train_opts.training = true;
  train_opts.self_feed = spec.self_feed;

  std::vector<std::vector<double>> grad_acc;  // one slot per parameter
  const auto& params = opt.params();
  grad_acc.resize(params.size());

  std::vector<std::vector<double>> best_params;
  double best_accuracy = -1.0;
  double best_loss = 0.0;
  std::size_t best_epoch = 0;

  std::vector<std::size_t> order(subset.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;

  for (std::size_t epoch = 1; epoch <= spec.epochs; ++epoch) {
    shuffle_rng.shuffle(order);
    for (std::size_t start = 0; start < order.size();
         start += spec.batch_size) {
      const std::size_t n =
          std::min(spec.batch_size, order.size() - start);
      for (auto& acc : grad_acc) acc.clear();

      for (std::size_t k = 0; k < n; ++k) {
        const std::size_t idx = order[start + k];
        const ForwardResult run =
            model.forward(inputs[idx], &targets[idx], train_opts, noise_rng);
        backward(run.loss);
        for (std::size_t p = 0; p < params.size(); ++p) {
          const auto& g = params[p].grad();
          if (g.empty()) continue;
          auto& acc = grad_acc[p];
          if (acc.empty()) acc.assign(g.size(), 0.0);
          for (std::size_t j = 0; j < g.size(); ++j) acc[j] += g[j];
        }
        opt.zero_grad();
      }

      // Batch gradient = mean of the per-example gradients.
      const double scale = 1.0 / static_cast<double>(n);
      for (std::size_t p = 0; p < params.size(); ++p) {
        if (grad_acc[p].empty()) continue;
        Tensor param = params[p];  // shared handle
        param.grad() = grad_acc[p];
        for (double& v : param.grad()) v *= scale;
      }
      opt.step();
      opt.zero_grad();
    }

    const bool eval_now = epoch % spec.eval_every == 0 || epoch == spec.epochs;
    if (!eval_now) continue;

    if (!data.validation.empty()) {
      const EvalResult val = evaluate(model, data.validation,
                                      data.input_vocab, data.output_vocab);
      result.metrics.push_back(
          {epoch, "validation", val.sequence_accuracy, val.loss});
      // Prefer higher validation accuracy; break ties toward lower loss so
      // the selected checkpoint keeps tracking improvement once accuracy
      // saturates.
      if (val.sequence_accuracy > best_accuracy ||
          (val.sequence_accuracy == best_accuracy && val.loss < best_loss)) {
        best_accuracy = val.sequence_accuracy;
        best_loss = val.loss;
        best_epoch = epoch;
        best_params.clear();
        for (const auto& [name, t] : model.params().entries()) {
          best_params.push_back(t.value());
        }
      }
    }
    for (const auto& [name, split] : data.eval_splits) {
      const EvalResult ev =
          evaluate(model, split, data.input_vocab, data.output_vocab);
      result.metrics.push_back({epoch, name, ev.sequence_accuracy, ev.loss});
    }
    if (spec.overgen && !data.exceptions.empty()) {
      OvergenRecord rec = monitor_overgeneralization(
          model, data.exceptions, data.input_vocab, data.output_vocab);
      rec.epoch = epoch;
      result.overgen.push_back(rec);
    }
  }

  if (spec.policy == CheckpointPolicy::BestVal) {
    const auto& entries = model.params().entries();
    for (std::size_t p = 0; p < entries.size(); ++p) {
      Tensor param = entries[p].second;  // shared handle
      param.value() = best_params[p];
    }
    result.selected_epoch = best_epoch;
  } else {
    result.selected_epoch = spec.epochs;
  }
  return result;
}

TrainSpec spec_from_config(const RunConfig& cfg, const Datasets& data,
                           const std::string& task) {
  cfg.validate();
  TrainSpec spec;
  spec.model.cell_kind = cell_type_from_string(cfg.get("cell"));
  spec.model.embedding_dim = cfg.get_uint("embedding_dim");
  spec.model.hidden_dim = cfg.get_uint("hidden_dim");
  spec.model.num_layers = cfg.get_uint("num_layers");
  spec.model.dropout_rate = cfg.get_double("dropout");
  spec.model.input_vocab_size = data.input_vocab.size();
  spec.model.output_vocab_size = data.output_vocab.size();
  spec.model.temperature = cfg.get_double("temperature");
  spec.model.flags = AblationFlags::from_code(cfg.get("flags"));
  const std::size_t decode_len = cfg.get_uint("max_decode_len");
  spec.model.max_decode_len =
      decode_len > 0 ? decode_len : data.longest_target() + 2;

  spec.run_id = cfg.run_id();
  spec.seed = cfg.get_uint("seed");
  spec.epochs = cfg.get_uint("epochs");
  const std::size_t batch = cfg.get_uint("batch_size");
  spec.batch_size = batch > 0 ? batch : (task == "lookup" ? 1 : 32);
  spec.eval_every = cfg.get_uint("eval_every");
  spec.lr = cfg.get_double("lr");
  spec.subsample = cfg.get_double("subsample");
  spec.self_feed = cfg.get_bool("self_feed");
  spec.overgen = cfg.get("mode") == "overgen";

  const std::string& policy = cfg.get("checkpoint_policy");
  if (policy == "best_val") {
    spec.policy = CheckpointPolicy::BestVal;
  } else if (policy == "final") {
    spec.policy = CheckpointPolicy::Final;
  } else {  // auto: validation-selected where a validation split exists
    spec.policy = (task == "lookup" && !data.validation.empty())
                      ? CheckpointPolicy::BestVal
                      : CheckpointPolicy::Final;
  }
  return spec;
}

// --- sweeps -----------------------------------------------------------------

namespace {

std::size_t resolve_threads(std::size_t threads, std::size_t jobs) {
  if (threads == 0) {
    threads = std::max(1u, std::thread::hardware_concurrency());
  }
  return std::min(threads, std::max<std::size_t>(1, jobs));
}

// Runs `fn(i)` for i in [0, jobs) across workers; any exception is rethrown
// on the caller's thread after all workers join.
template <typename Fn>
void parallel_for(std::size_t jobs, std::size_t threads, Fn&& fn) {
  threads = resolve_threads(threads, jobs);
  if (threads <= 1) {
    for (std::size_t i = 0; i < jobs; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::atomic<bool> failed{false};
  std::exception_ptr error;
  std::mutex error_mu;
  std::vector<std::thread> pool;
  for (std::size_t t = 0; t < threads; ++t) {
    pool.emplace_back([&] {
      while (!failed.load()) {
        const std::size_t i = next.fetch_add(1);
        if (i >= jobs) return;
        try {
          fn(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(error_mu);
          if (!error) error = std::current_exception();
          failed.store(true);
        }
      }
    });
  }
  for (auto& th : pool) th.join();
  if (error) std::rethrow_exception(error);
}

double eval_split_accuracy(const Model& model, const Dataset& split,
                           const Datasets& data) {
  return evaluate(model, split, data.input_vocab, data.output_vocab)
      .sequence_accuracy;
}

}  // namespace

std::vector<GridResult> grid_search(const TrainSpec& base,
                                    const Datasets& data,
                                    const std::vector<CellType>& cells,
                                    const std::vector<std::size_t>& emb_dims,
                                    const std::vector<std::size_t>& hid_dims,
                                    const std::vector<double>& dropouts,
                                    std::size_t threads) {
  if (cells.empty() || emb_dims.empty() || hid_dims.empty() ||
      dropouts.empty()) {
    throw ConfigError("grid search ranges must all be nonempty");
  }
  if (data.validation.empty()) {
    throw ConfigError("grid search needs a validation split");
  }
  std::vector<GridPoint> points;
  for (const CellType cell : cells) {
    for (const std::size_t emb : emb_dims) {
      for (const std::size_t hid : hid_dims) {
        for (const double drop : dropouts) {
          points.push_back({cell, emb, hid, drop});
        }
      }
    }
  }

  std::vector<GridResult> results(points.size());
  parallel_for(points.size(), threads, [&](std::size_t i) {
    TrainSpec spec = base;
    spec.model.cell_kind = points[i].cell;
    spec.model.embedding_dim = points[i].embedding_dim;
    spec.model.hidden_dim = points[i].hidden_dim;
    spec.model.dropout_rate = points[i].dropout;
    const TrainResult run = train(spec, data);
    const EvalResult val = evaluate(*run.model, data.validation,
                                    data.input_vocab, data.output_vocab);
    results[i] = {points[i], val.sequence_accuracy, val.loss,
                  run.model->params().total_elements()};
  });

  std::stable_sort(results.begin(), results.end(),
                   [](const GridResult& a, const GridResult& b) {
                     if (a.validation_accuracy != b.validation_accuracy) {
                       return a.validation_accuracy > b.validation_accuracy;
                     }
                     if (a.parameter_count != b.parameter_count) {
                       return a.parameter_count < b.parameter_count;
                     }
                     return a.validation_loss < b.validation_loss;
                   });
  return results;
}

std::vector<AblationRow> ablation_sweep(const TrainSpec& base,
                                        const Datasets& data,
                                        std::size_t n_seeds,
                                        std::size_t threads) {
  if (n_seeds < 1) throw ConfigError("ablation sweep needs n_seeds >= 1");

  // All 16 combinations, baseline first, grouped by how many flags are on.
  std::vector<unsigned> masks(16);
  for (unsigned m = 0; m < 16; ++m) masks[m] = m;
  std::stable_sort(masks.begin(), masks.end(), [](unsigned a, unsigned b) {
    return std::popcount(a) != std::popcount(b) ? std::popcount(a) <
                                                      std::popcount(b)
                                                : a < b;
  });
  const auto mask_flags = [](unsigned m) {
    AblationFlags f;
    f.gumbel = m & 1;
    f.embeddings_as_values = m & 2;
    f.full_focus = m & 4;
    f.transcoder = m & 8;
    return f;
  };

  const std::size_t jobs = masks.size() * n_seeds;
  // accuracies[combo][split][seed]
  std::vector<std::vector<std::vector<double>>> acc(
      masks.size(), std::vector<std::vector<double>>(
                        data.eval_splits.size(), std::vector<double>(n_seeds)));
  parallel_for(jobs, threads, [&](std::size_t job) {
    const std::size_t combo = job / n_seeds;
    const std::size_t seed_idx = job % n_seeds;
    TrainSpec spec = base;
    spec.model.flags = mask_flags(masks[combo]);
    spec.seed = base.seed + seed_idx;
    const TrainResult run = train(spec, data);
    for (std::size_t s = 0; s < data.eval_splits.size(); ++s) {
      acc[combo][s][seed_idx] =
          eval_split_accuracy(*run.model, data.eval_splits[s].second, data);
    }
  });

  std::vector<AblationRow> rows;
  for (std::size_t combo = 0; combo < masks.size(); ++combo) {
    AblationRow row;
    row.flags = mask_flags(masks[combo]).code();
    for (std::size_t s = 0; s < data.eval_splits.size(); ++s) {
      const auto& xs = acc[combo][s];
      double mean = 0.0;
      for (const double x : xs) mean += x;
      mean /= static_cast<double>(xs.size());
      double var = 0.0;
      for (const double x : xs) var += (x - mean) * (x - mean);
      var /= static_cast<double>(xs.size());
      row.cells.push_back({mean, std::sqrt(var)});
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

// --- artifact writers ---------------------------------------------------------

void write_metrics_csv(const std::string& path, const std::string& run_id,
                       const std::vector<MetricsRow>& rows) {
  std::ofstream out = open_out(path);
  out << "run_id,epoch,split,sequence_accuracy,loss\n";
  for (const MetricsRow& r : rows) {
    out << run_id << ',' << r.epoch << ',' << r.split << ','
        << fmt(r.sequence_accuracy) << ',' << fmt(r.loss) << '\n';
  }
}

void write_overgen_csv(const std::string& path, const std::string& run_id,
                       const std::vector<OvergenRecord>& rows) {
  std::ofstream out = open_out(path);
  out << "run_id,epoch,n_original,n_adapted,n_other,normalized_original,"
         "raw_original_accuracy\n";
  for (const OvergenRecord& r : rows) {
    out << run_id << ',' << r.epoch << ',' << r.n_original << ','
        << r.n_adapted << ',' << r.n_other << ',';
    if (r.normalized_original) out << fmt(*r.normalized_original);
    out << ',' << fmt(r.raw_original_accuracy) << '\n';
  }
}

void write_trace_csv(const std::string& path, const AttentionTrace& trace) {
  std::ofstream out = open_out(path);
  out << "output";
  for (const std::string& tok : trace.input_tokens) out << ',' << tok;
  out << '\n';
  for (std::size_t t = 0; t < trace.weights.size(); ++t) {
    out << trace.output_tokens.at(t);
    for (const double w : trace.weights[t]) out << ',' << fmt(w);
    out << '\n';
  }
}

void write_trace_pgm(const std::string& path, const AttentionTrace& trace) {
  std::ofstream out = open_out(path);
  const std::size_t rows = trace.weights.size();
  const std::size_t cols = rows == 0 ? 0 : trace.weights[0].size();
  out << "P2\n" << cols << ' ' << rows << "\n255\n";
  for (const auto& row : trace.weights) {
    for (std::size_t j = 0; j < row.size(); ++j) {
      const double clamped = std::clamp(row[j], 0.0, 1.0);
      out << (j ? " " : "") << std::lround(clamped * 255.0);
    }
    out << '\n';
  }
}

void write_grid_csv(const std::string& path,
                    const std::vector<GridResult>& results) {
  std::ofstream out = open_out(path);
  out << "rank,cell,embedding_dim,hidden_dim,dropout,validation_accuracy,"
         "validation_loss,parameter_count\n";
  for (std::size_t i = 0; i < results.size(); ++i) {
    const GridResult& r = results[i];
    out << i + 1 << ',' << to_string(r.point.cell) << ','
        << r.point.embedding_dim << ',' << r.point.hidden_dim << ','
        << fmt(r.point.dropout) << ',' << fmt(r.validation_accuracy) << ','
        << fmt(r.validation_loss) << ',' << r.parameter_count << '\n';
  }
}

void write_ablation_csv(const std::string& path,
                        const std::vector<AblationRow>& rows,
                        const std::vector<std::string>& split_names) {
  std::ofstream out = open_out(path);
  out << "flags";
  for (const std::string& name : split_names) {
    out << ',' << name << "_mean," << name << "_stdev";
  }
  out << '\n';
  for (const AblationRow& row : rows) {
    out << (row.flags.empty() ? "baseline" : row.flags);
    for (const AblationCell& cell : row.cells) {
      out << ',' << fmt(cell.mean) << ',' << fmt(cell.stdev);
    }
    out << '\n';
  }
}

}  // namespace s2a::harness
