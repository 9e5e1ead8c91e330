#include "s2a/config.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include "s2a/layers.hpp"
#include "s2a/model.hpp"

namespace s2a {

namespace {

struct SchemaEntry {
  const char* key;
  const char* default_value;
};

// Order here is the snapshot order.
const SchemaEntry kSchema[] = {
    {"task", "lookup"},          // lookup | scan
    {"mode", "standard"},        // standard | overgen
    {"condition", "fillers1"},   // scan: fillers0..3 | k<N>
    {"data_dir", ""},            // where generated datasets live
    {"out_dir", ""},             // run directory root
    {"run_id", ""},              // defaults to a derived deterministic id
    {"seed", "1"},
    {"epochs", "50"},
    {"batch_size", "0"},         // 0 = task default (lookup 1, scan 32)
    {"lr", "0.001"},
    {"cell", "gru"},
    {"embedding_dim", "256"},
    {"hidden_dim", "256"},
    {"num_layers", "1"},
    {"dropout", "0.5"},
    {"flags", "GEFT"},
    {"temperature", "1.0"},
    {"max_decode_len", "0"},     // 0 = longest target in the data + 2
    {"subsample", "1.0"},        // training-set fraction, seeded
    {"eval_every", "1"},
    {"self_feed", "false"},
    {"checkpoint_policy", "auto"},  // auto | best_val | final
    {"n_seeds", "3"},               // sweep runs per grid/ablation point
    {"threads", "0"},               // sweep workers, 0 = hardware default
    {"grid_cells", "gru,lstm"},
    {"grid_dims", "32,64,128,256,512,1024"},
    {"grid_dropouts", "0,0.2,0.5"},
};

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

}  // namespace

RunConfig::RunConfig() {
  for (const SchemaEntry& e : kSchema) {
    entries_.push_back({e.key, e.default_value});
  }
}

RunConfig::Entry* RunConfig::find(const std::string& key) {
  for (Entry& e : entries_) {
    if (e.key == key) return &e;
  }
  return nullptr;
}

const RunConfig::Entry* RunConfig::find(const std::string& key) const {
  for (const Entry& e : entries_) {
    if (e.key == key) return &e;
  }
  return nullptr;
}

RunConfig RunConfig::from_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config file '" + path + "'");
  RunConfig cfg;
  std::set<std::string> seen;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string stripped = trim(line);
    if (stripped.empty() || stripped[0] == '#') continue;
    const auto eq = stripped.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("config line " + std::to_string(lineno) + " in '" +
                        path + "' is not key = value: '" + stripped + "'");
    }
    const std::string key = trim(stripped.substr(0, eq));
    const std::string value = trim(stripped.substr(eq + 1));
    if (!seen.insert(key).second) {
      throw ConfigError("duplicate key '" + key + "' at line " +
                        std::to_string(lineno) + " in '" + path + "'");
    }
    cfg.set(key, value);
  }
  return cfg;
}

void RunConfig::apply_override(const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos) {
    throw ConfigError("override '" + assignment + "' is not key=value");
  }
  set(trim(assignment.substr(0, eq)), trim(assignment.substr(eq + 1)));
}

void RunConfig::set(const std::string& key, const std::string& value) {
  Entry* e = find(key);
  if (!e) throw ConfigError("unknown config key '" + key + "'");
  e->value = value;
}

const std::string& RunConfig::get(const std::string& key) const {
  const Entry* e = find(key);
  if (!e) throw ConfigError("unknown config key '" + key + "'");
  return e->value;
}

std::int64_t RunConfig::get_int(const std::string& key) const {
  const std::string& v = get(key);
  try {
    std::size_t pos = 0;
    const std::int64_t out = std::stoll(v, &pos);
    if (pos != v.size()) throw std::invalid_argument(v);
    return out;
  } catch (const std::exception&) {
    throw ConfigError("key '" + key + "': '" + v + "' is not an integer");
  }
}

std::uint64_t RunConfig::get_uint(const std::string& key) const {
  const std::int64_t v = get_int(key);
  if (v < 0) {
    throw ConfigError("key '" + key + "' must be non-negative, got " +
                      std::to_string(v));
  }
  return static_cast<std::uint64_t>(v);
}

double RunConfig::get_double(const std::string& key) const {
  const std::string& v = get(key);
  try {
    std::size_t pos = 0;
    const double out = std::stod(v, &pos);
    if (pos != v.size()) throw std::invalid_argument(v);
    return out;
  } catch (const std::exception&) {
    throw ConfigError("key '" + key + "': '" + v + "' is not a number");
  }
}

bool RunConfig::get_bool(const std::string& key) const {
  const std::string& v = get(key);
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  throw ConfigError("key '" + key + "': '" + v + "' is not a boolean");
}

void RunConfig::validate() const {
  const std::string& task = get("task");
  if (task != "lookup" && task != "scan") {
    throw ConfigError("key 'task': '" + task + "' (expected lookup or scan)");
  }
  const std::string& mode = get("mode");
  if (mode != "standard" && mode != "overgen") {
    throw ConfigError("key 'mode': '" + mode +
                      "' (expected standard or overgen)");
  }
  const std::string& cond = get("condition");
  if (task == "scan") {
    const bool fillers = cond.size() == 8 && cond.rfind("fillers", 0) == 0 &&
                         cond[7] >= '0' && cond[7] <= '3';
    bool exp3 = cond.size() > 1 && cond[0] == 'k';
    if (exp3) {
      for (std::size_t i = 1; i < cond.size(); ++i) {
        if (!isdigit(static_cast<unsigned char>(cond[i]))) exp3 = false;
      }
    }
    if (!fillers && !exp3) {
      throw ConfigError("key 'condition': '" + cond +
                        "' (expected fillers0..fillers3 or k<N>)");
    }
  }
  if (get_int("epochs") < 1) throw ConfigError("key 'epochs' must be >= 1");
  if (get_int("batch_size") < 0) {
    throw ConfigError("key 'batch_size' must be >= 0");
  }
  if (get_double("lr") <= 0) throw ConfigError("key 'lr' must be > 0");
  cell_type_from_string(get("cell"));
  if (get_int("embedding_dim") < 1 || get_int("hidden_dim") < 1 ||
      get_int("num_layers") < 1) {
    throw ConfigError("model dims must be >= 1");
  }
  const double dropout = get_double("dropout");
  if (dropout < 0.0 || dropout >= 1.0) {
    throw ConfigError("key 'dropout' must be in [0, 1)");
  }
  AblationFlags::from_code(get("flags"));
  if (get_double("temperature") <= 0) {
    throw ConfigError("key 'temperature' must be > 0");
  }
  const double subsample = get_double("subsample");
  if (subsample <= 0.0 || subsample > 1.0) {
    throw ConfigError("key 'subsample' must be in (0, 1]");
  }
  if (get_int("eval_every") < 1) {
    throw ConfigError("key 'eval_every' must be >= 1");
  }
  get_bool("self_feed");
  const std::string& policy = get("checkpoint_policy");
  if (policy != "auto" && policy != "best_val" && policy != "final") {
    throw ConfigError("key 'checkpoint_policy': '" + policy +
                      "' (expected auto, best_val or final)");
  }
  if (get_int("n_seeds") < 1) throw ConfigError("key 'n_seeds' must be >= 1");
  if (get_int("threads") < 0) throw ConfigError("key 'threads' must be >= 0");
  for (const char* key : {"grid_cells", "grid_dims", "grid_dropouts"}) {
    if (parse_csv_list(get(key)).empty()) {
      throw ConfigError(std::string("key '") + key + "' must be nonempty");
    }
  }
  for (const std::string& c : parse_csv_list(get("grid_cells"))) {
    cell_type_from_string(c);
  }
}

std::vector<std::string> parse_csv_list(const std::string& text) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream in(text);
  while (std::getline(in, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

std::string RunConfig::snapshot() const {
  std::ostringstream os;
  for (const Entry& e : entries_) {
    os << e.key << " = " << e.value << "\n";
  }
  return os.str();
}

std::string RunConfig::run_id() const {
  const std::string& explicit_id = get("run_id");
  if (!explicit_id.empty()) return explicit_id;
  std::string id = get("task");
  if (get("task") == "scan") id += "_" + get("condition");
  if (get("mode") != "standard") id += "_" + get("mode");
  const std::string& flags = get("flags");
  id += "_" + (flags.empty() ? std::string("base") : flags);
  id += "_s" + get("seed");
  return id;
}

}  // namespace s2a
