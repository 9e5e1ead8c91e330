#include "s2a/lookup.hpp"

#include <algorithm>

#include "s2a/rng.hpp"

namespace s2a::lookup {

std::string bitstring(std::size_t i) {
  if (i >= kNumInputs) {
    throw ConfigError("bitstring index " + std::to_string(i) +
                      " out of range");
  }
  std::string s(3, '0');
  for (int b = 0; b < 3; ++b) {
    if (i & (1u << (2 - b))) s[b] = '1';
  }
  return s;
}

std::size_t bit_index(const std::string& s) {
  if (s.size() != 3 || s.find_first_not_of("01") != std::string::npos) {
    throw ConfigError("'" + s + "' is not a 3-bit string");
  }
  std::size_t i = 0;
  for (char c : s) i = i * 2 + (c - '0');
  return i;
}

std::vector<LookupTable> generate_tables(std::uint64_t seed) {
  Rng rng = Rng(seed).fork(/*tables stream*/ 1);
  std::vector<LookupTable> tables;
  for (std::size_t t = 0; t < kNumTables; ++t) {
    LookupTable table;
    table.name = "t" + std::to_string(t + 1);
    std::vector<std::size_t> perm(kNumInputs);
    for (std::size_t i = 0; i < kNumInputs; ++i) perm[i] = i;
    rng.shuffle(perm);
    std::copy(perm.begin(), perm.end(), table.map.begin());
    tables.push_back(std::move(table));
  }
  return tables;
}

Example make_example(const std::vector<LookupTable>& tables,
                     std::size_t input_idx,
                     const std::vector<std::size_t>& table_idxs) {
  Example ex;
  ex.input.push_back(bitstring(input_idx));
  ex.target.push_back(bitstring(input_idx));
  std::size_t current = input_idx;
  for (std::size_t ti : table_idxs) {
    const LookupTable& table = tables.at(ti);
    ex.input.push_back(table.name);
    current = table.map[current];
    ex.target.push_back(bitstring(current));
  }
  return ex;
}

namespace {

// Ordered pairs (i, j) over the first `n` tables, i-major.
std::vector<std::pair<std::size_t, std::size_t>> all_pairs(std::size_t n) {
  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) pairs.emplace_back(i, j);
  }
  return pairs;
}

}  // namespace

Splits make_splits(const std::vector<LookupTable>& tables, std::uint64_t seed,
                   bool overgen_mode) {
  Rng root(seed);
  Splits out;

  // All binary compositions touching t7 or t8 are held out with all inputs.
  for (auto [i, j] : all_pairs(kNumTables)) {
    if (i < kNumLowTables && j < kNumLowTables) continue;
    for (std::size_t x = 0; x < kNumInputs; ++x) {
      out.heldout_tables.push_back(make_example(tables, x, {i, j}));
    }
  }

  // 8 seeded held-out compositions among the 36 over t1..t6. The exception
  // composition (t1, t2) must stay trainable in overgeneralization mode.
  std::vector<std::pair<std::size_t, std::size_t>> low = all_pairs(kNumLowTables);
  if (overgen_mode) {
    std::erase(low, std::make_pair(std::size_t{0}, std::size_t{1}));
  }
  Rng comp_rng = root.fork(2);
  comp_rng.shuffle(low);
  std::vector<std::pair<std::size_t, std::size_t>> heldout_comps(
      low.begin(), low.begin() + 8);
  std::vector<std::pair<std::size_t, std::size_t>> train_comps;
  for (auto p : all_pairs(kNumLowTables)) {
    if (std::find(heldout_comps.begin(), heldout_comps.end(), p) ==
        heldout_comps.end()) {
      train_comps.push_back(p);
    }
  }
  for (auto [i, j] : heldout_comps) {
    for (std::size_t x = 0; x < kNumInputs; ++x) {
      out.heldout_compositions.push_back(make_example(tables, x, {i, j}));
    }
  }

  // 2 seeded inputs removed independently from each training composition.
  Rng input_rng = root.fork(3);
  for (auto [i, j] : train_comps) {
    std::vector<std::size_t> inputs(kNumInputs);
    for (std::size_t x = 0; x < kNumInputs; ++x) inputs[x] = x;
    const bool exempt = overgen_mode && i == 0 && j == 1;
    if (!exempt) {
      Rng pick = input_rng.fork(i * kNumTables + j);
      pick.shuffle(inputs);
      out.heldout_inputs.push_back(make_example(tables, inputs[0], {i, j}));
      out.heldout_inputs.push_back(make_example(tables, inputs[1], {i, j}));
      inputs.erase(inputs.begin(), inputs.begin() + 2);
      std::sort(inputs.begin(), inputs.end());
    }
    for (std::size_t x : inputs) {
      out.train.push_back(make_example(tables, x, {i, j}));
    }
  }

  // All 64 unary examples train.
  for (std::size_t t = 0; t < kNumTables; ++t) {
    for (std::size_t x = 0; x < kNumInputs; ++x) {
      out.train.push_back(make_example(tables, x, {t}));
    }
  }
  return out;
}

OvergenSpec inject_exceptions(const Dataset& train,
                              const std::vector<LookupTable>& tables,
                              std::uint64_t seed) {
  OvergenSpec spec;
  spec.train = train;

  // Locate the 8 "t1 t2" examples.
  std::vector<std::size_t> member_pos;
  for (std::size_t k = 0; k < train.size(); ++k) {
    const Example& ex = train[k];
    if (ex.input.size() == 3 && ex.input[1] == "t1" && ex.input[2] == "t2") {
      member_pos.push_back(k);
    }
  }
  if (member_pos.size() != kNumInputs) {
    throw ConfigError("exception injection needs all 8 't1 t2' examples in "
                      "train (found " + std::to_string(member_pos.size()) +
                      "); generate splits in overgeneralization mode");
  }

  Rng rng = Rng(seed).fork(4);
  std::vector<std::size_t> order(kNumInputs);
  for (std::size_t i = 0; i < kNumInputs; ++i) order[i] = i;
  rng.shuffle(order);
  std::vector<bool> adapt(kNumInputs, false);
  for (int k = 0; k < 3; ++k) adapt[order[k]] = true;

  for (std::size_t pos : member_pos) {
    Example& ex = spec.train[pos];
    const std::size_t input_idx = bit_index(ex.input[0]);
    Example original = ex;
    original.tag = "original";
    Example adapted = ex;
    adapted.tag = "adapted";
    if (adapt[input_idx]) {
      const std::size_t orig_out = bit_index(ex.target[2]);
      // Uniform over the 7 other bitstrings, no rejection loop.
      std::size_t draw = rng.uniform_int(kNumInputs - 1);
      if (draw >= orig_out) ++draw;
      adapted.target[2] = bitstring(draw);
      ex.target = adapted.target;
    }
    spec.originals.push_back(std::move(original));
    spec.adapted.push_back(std::move(adapted));
  }
  return spec;
}

Dataset pick_validation(const Dataset& train, std::uint64_t seed) {
  std::vector<std::size_t> binary_pos;
  for (std::size_t k = 0; k < train.size(); ++k) {
    if (train[k].input.size() == 3) binary_pos.push_back(k);
  }
  Rng rng = Rng(seed).fork(5);
  rng.shuffle(binary_pos);
  const std::size_t count = std::max<std::size_t>(1, binary_pos.size() / 10);
  Dataset val;
  for (std::size_t k = 0; k < count; ++k) val.push_back(train[binary_pos[k]]);
  return val;
}

}  // namespace s2a::lookup
