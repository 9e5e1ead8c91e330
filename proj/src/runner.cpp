#include "s2a/runner.hpp"

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>

#include "s2a/checkpoint.hpp"
#include "s2a/lookup.hpp"
#include "s2a/scan.hpp"

namespace s2a::runner {

namespace fs = std::filesystem;

namespace {

std::string resolve_dir(const RunConfig& cfg, const std::string& key,
                        const std::string& fallback) {
  std::string dir = cfg.get(key);
  if (dir.empty()) dir = fallback;
  fs::path p(dir);
  if (p.is_relative()) p = fs::path(workspace_root()) / p;
  return p.lexically_normal().string();
}

// FNV-1a over the file's bytes, as a reproducibility fingerprint.
std::string file_fingerprint(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path + "' for fingerprinting");
  std::uint64_t h = 0xcbf29ce484222325ULL;
  char c;
  while (in.get(c)) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx",
                static_cast<unsigned long long>(h));
  return buf;
}

struct SplitFile {
  std::string name;  // split name within the run ("train", "test", ...)
  Dataset data;
};

// The full set of files one `generate` invocation produces (manifest aside).
struct GeneratedSets {
  std::vector<SplitFile> files;
  const Dataset* find(const std::string& name) const {
    for (const SplitFile& f : files) {
      if (f.name == name) return &f.data;
    }
    return nullptr;
  }
};

// Exceptions are stored as pairs of rows per input: the rule-derived target
// tagged "original", then the trained target tagged "adapted".
Dataset exceptions_to_rows(const std::vector<harness::ExceptionExample>& exs) {
  Dataset rows;
  for (const auto& ex : exs) {
    rows.push_back({ex.input, ex.original, "original"});
    rows.push_back({ex.input, ex.adapted, "adapted"});
  }
  return rows;
}

std::vector<harness::ExceptionExample> exceptions_from_rows(
    const Dataset& rows) {
  if (rows.size() % 2 != 0) {
    throw IoError("exception manifest must hold original/adapted row pairs");
  }
  std::vector<harness::ExceptionExample> out;
  for (std::size_t i = 0; i < rows.size(); i += 2) {
    const Example& orig = rows[i];
    const Example& adap = rows[i + 1];
    if (orig.tag != "original" || adap.tag != "adapted" ||
        orig.input != adap.input) {
      throw IoError("exception manifest rows " + std::to_string(i) + "/" +
                    std::to_string(i + 1) + " are not an original/adapted "
                    "pair for one input");
    }
    out.push_back({orig.input, orig.target, adap.target});
  }
  return out;
}

GeneratedSets build_lookup(const RunConfig& cfg) {
  const std::uint64_t seed = cfg.get_uint("seed");
  const bool overgen = cfg.get("mode") == "overgen";
  const auto tables = lookup::generate_tables(seed);
  lookup::Splits splits = lookup::make_splits(tables, seed, overgen);

  GeneratedSets out;
  Dataset train = std::move(splits.train);
  if (overgen) {
    lookup::OvergenSpec spec = lookup::inject_exceptions(train, tables, seed);
    train = std::move(spec.train);
    std::vector<harness::ExceptionExample> exceptions;
    for (std::size_t i = 0; i < spec.originals.size(); ++i) {
      exceptions.push_back({spec.originals[i].input, spec.originals[i].target,
                            spec.adapted[i].target});
    }
    out.files.push_back({"exceptions", exceptions_to_rows(exceptions)});
  }
  out.files.push_back({"train", train});
  out.files.push_back({"validation", lookup::pick_validation(train, seed)});
  out.files.push_back({"heldout_inputs", std::move(splits.heldout_inputs)});
  out.files.push_back(
      {"heldout_compositions", std::move(splits.heldout_compositions)});
  out.files.push_back({"heldout_tables", std::move(splits.heldout_tables)});
  return out;
}

GeneratedSets build_scan(const RunConfig& cfg) {
  const std::string& cond_key = cfg.get("condition");
  scan::Condition cond;
  if (cond_key.rfind("fillers", 0) == 0) {
    cond = scan::build_experiment2(cond_key[7] - '0');
  } else {  // k<N>, validated by RunConfig
    cond = scan::build_experiment3(std::stoi(cond_key.substr(1)),
                                   cfg.get_uint("seed"));
  }
  GeneratedSets out;
  if (cfg.get("mode") == "overgen") {
    scan::inject_exception(cond);
    const scan::ScanException ex = scan::exception_example();
    out.files.push_back(
        {"exceptions", exceptions_to_rows({{ex.original.input,
                                            ex.original.target,
                                            ex.adapted.target}})});
  }
  out.files.push_back({"train", std::move(cond.train)});
  out.files.push_back({"test", std::move(cond.test)});
  return out;
}

GeneratedSets build_sets(const RunConfig& cfg) {
  cfg.validate();
  return cfg.get("task") == "lookup" ? build_lookup(cfg) : build_scan(cfg);
}

std::string split_path(const std::string& data_dir, const std::string& prefix,
                       const std::string& split) {
  return (fs::path(data_dir) / (prefix + "_" + split + ".tsv")).string();
}

Dataset read_split(const RunConfig& cfg, const std::string& split) {
  const std::string path =
      split_path(resolve_data_dir(cfg), dataset_prefix(cfg), split);
  if (!fs::exists(path)) {
    throw IoError("dataset file '" + path + "' not found; run `generate` "
                  "first or point data_dir at it");
  }
  return read_tsv(path);
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write '" + path + "'");
  out << text;
}

std::string make_run_dir(const RunConfig& cfg) {
  const fs::path dir = fs::path(resolve_out_dir(cfg)) / cfg.run_id();
  fs::create_directories(dir);
  return dir.string();
}

// Config snapshot plus dataset fingerprints: everything needed to re-run.
void write_run_provenance(const RunConfig& cfg, const std::string& run_dir,
                          const std::vector<std::string>& dataset_files) {
  write_text((fs::path(run_dir) / "config.txt").string(), cfg.snapshot());
  std::string lines;
  for (const std::string& file : dataset_files) {
    lines += fs::path(file).filename().string() + "\t" +
             file_fingerprint(file) + "\n";
  }
  write_text((fs::path(run_dir) / "sources.tsv").string(), lines);
}

std::vector<std::string> dataset_file_list(const RunConfig& cfg) {
  const std::string data_dir = resolve_data_dir(cfg);
  const std::string prefix = dataset_prefix(cfg);
  std::vector<std::string> names;
  if (cfg.get("task") == "lookup") {
    names = {"train", "validation", "heldout_inputs", "heldout_compositions",
             "heldout_tables"};
  } else {
    names = {"train", "test"};
  }
  if (cfg.get("mode") == "overgen") names.push_back("exceptions");
  std::vector<std::string> out;
  for (const std::string& n : names) out.push_back(split_path(data_dir, prefix, n));
  return out;
}

}  // namespace

std::string workspace_root() {
  const char* env = std::getenv("S2A_WORKSPACE");
  return env && *env ? env : ".";
}

std::string resolve_data_dir(const RunConfig& cfg) {
  return resolve_dir(cfg, "data_dir", "data");
}

std::string resolve_out_dir(const RunConfig& cfg) {
  return resolve_dir(cfg, "out_dir", "runs");
}

std::string dataset_prefix(const RunConfig& cfg) {
  std::string prefix = cfg.get("task");
  if (prefix == "scan") {
    const std::string& cond = cfg.get("condition");
    prefix += cond.rfind("fillers", 0) == 0 ? "_exp2_" + cond
                                            : "_exp3_" + cond.substr(1);
  }
  if (cfg.get("mode") == "overgen") prefix += "_overgen";
  return prefix;
}

std::vector<std::string> generate(const RunConfig& cfg) {
  const GeneratedSets sets = build_sets(cfg);
  const std::string data_dir = resolve_data_dir(cfg);
  fs::create_directories(data_dir);
  const std::string prefix = dataset_prefix(cfg);

  std::vector<std::string> written;
  std::string manifest = "seed\t" + cfg.get("seed") + "\n";
  for (const SplitFile& f : sets.files) {
    const std::string path = split_path(data_dir, prefix, f.name);
    write_tsv(path, f.data);
    written.push_back(path);
    manifest += f.name + "\t" + std::to_string(f.data.size()) + "\n";
  }
  const std::string manifest_path =
      split_path(data_dir, prefix, "manifest");
  write_text(manifest_path, manifest);
  written.push_back(manifest_path);
  return written;
}

harness::Datasets load_datasets(const RunConfig& cfg) {
  cfg.validate();
  harness::Datasets data;
  data.train = read_split(cfg, "train");
  std::vector<const Dataset*> vocab_sets{&data.train};

  if (cfg.get("task") == "lookup") {
    data.validation = read_split(cfg, "validation");
    for (const char* name :
         {"heldout_inputs", "heldout_compositions", "heldout_tables"}) {
      data.eval_splits.emplace_back(name, read_split(cfg, name));
    }
  } else {
    data.eval_splits.emplace_back("test", read_split(cfg, "test"));
  }
  for (const auto& [name, split] : data.eval_splits) {
    vocab_sets.push_back(&split);
  }
  if (cfg.get("mode") == "overgen") {
    data.exceptions = exceptions_from_rows(read_split(cfg, "exceptions"));
  }
  data.input_vocab = build_input_vocab(vocab_sets);
  data.output_vocab = build_output_vocab(vocab_sets);
  return data;
}

RunArtifacts run_train(const RunConfig& cfg) {
  const harness::Datasets data = load_datasets(cfg);
  const harness::TrainSpec spec =
      harness::spec_from_config(cfg, data, cfg.get("task"));

  RunArtifacts out;
  out.run_dir = make_run_dir(cfg);
  write_run_provenance(cfg, out.run_dir, dataset_file_list(cfg));

  harness::TrainResult result = harness::train(spec, data);
  out.metrics = std::move(result.metrics);
  out.overgen = std::move(result.overgen);

  harness::write_metrics_csv((fs::path(out.run_dir) / "metrics.csv").string(),
                             spec.run_id, out.metrics);
  if (spec.overgen) {
    harness::write_overgen_csv(
        (fs::path(out.run_dir) / "overgen.csv").string(), spec.run_id,
        out.overgen);
  }
  save_checkpoint((fs::path(out.run_dir) / "checkpoint.bin").string(),
                  *result.model, data.input_vocab, data.output_vocab);
  return out;
}

EvalArtifacts run_eval(const RunConfig& cfg, const std::string& checkpoint,
                       const std::string& dataset, bool dump_attention) {
  LoadedCheckpoint loaded = load_checkpoint(checkpoint);
  const Dataset data = read_tsv(dataset);
  const harness::EvalResult result =
      harness::evaluate(*loaded.model, data, loaded.input_vocab,
                        loaded.output_vocab, dump_attention);

  EvalArtifacts out;
  out.sequence_accuracy = result.sequence_accuracy;
  out.loss = result.loss;
  if (dump_attention) {
    const fs::path dir =
        fs::path(resolve_out_dir(cfg)) / (cfg.run_id() + "_eval");
    fs::create_directories(dir);
    for (const harness::AttentionTrace& trace : result.traces) {
      const std::string stem =
          (dir / ("trace_" + std::to_string(trace.example_id))).string();
      harness::write_trace_csv(stem + ".csv", trace);
      harness::write_trace_pgm(stem + ".pgm", trace);
      out.trace_files.push_back(stem + ".csv");
    }
  }
  return out;
}

RunArtifacts run_ablate(const RunConfig& cfg) {
  const harness::Datasets data = load_datasets(cfg);
  const harness::TrainSpec base =
      harness::spec_from_config(cfg, data, cfg.get("task"));

  RunArtifacts out;
  out.run_dir = make_run_dir(cfg);
  write_run_provenance(cfg, out.run_dir, dataset_file_list(cfg));

  const auto rows = harness::ablation_sweep(base, data, cfg.get_uint("n_seeds"),
                                            cfg.get_uint("threads"));
  std::vector<std::string> split_names;
  for (const auto& [name, split] : data.eval_splits) split_names.push_back(name);
  harness::write_ablation_csv((fs::path(out.run_dir) / "ablation.csv").string(),
                              rows, split_names);
  return out;
}

RunArtifacts run_grid(const RunConfig& cfg) {
  const harness::Datasets data = load_datasets(cfg);
  const harness::TrainSpec base =
      harness::spec_from_config(cfg, data, cfg.get("task"));

  std::vector<CellType> cells;
  for (const std::string& c : parse_csv_list(cfg.get("grid_cells"))) {
    cells.push_back(cell_type_from_string(c));
  }
  std::vector<std::size_t> dims;
  for (const std::string& d : parse_csv_list(cfg.get("grid_dims"))) {
    dims.push_back(std::stoul(d));
  }
  std::vector<double> dropouts;
  for (const std::string& d : parse_csv_list(cfg.get("grid_dropouts"))) {
    dropouts.push_back(std::stod(d));
  }

  RunArtifacts out;
  out.run_dir = make_run_dir(cfg);
  write_run_provenance(cfg, out.run_dir, dataset_file_list(cfg));

  const auto results = harness::grid_search(base, data, cells, dims, dims,
                                            dropouts, cfg.get_uint("threads"));
  harness::write_grid_csv((fs::path(out.run_dir) / "grid.csv").string(),
                          results);
  return out;
}

RunArtifacts run_overgen(const RunConfig& cfg) {
  RunConfig overgen_cfg = cfg;
  overgen_cfg.set("mode", "overgen");
  return run_train(overgen_cfg);
}

}  // namespace s2a::runner
