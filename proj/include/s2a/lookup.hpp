#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "s2a/dataset.hpp"

// Lookup-table composition task: eight random bijections t1..t8 over the
// eight 3-bit strings, composed pairwise. Targets spell out the input and
// every intermediate result, e.g. "001 t1 t2" -> "001 010 111".
namespace s2a::lookup {

inline constexpr std::size_t kNumInputs = 8;   // 3-bit strings
inline constexpr std::size_t kNumTables = 8;   // t1..t8
inline constexpr std::size_t kNumLowTables = 6;  // t1..t6 stay in train comps

// A bijective mapping over the 8 bitstrings, as a permutation of indices.
struct LookupTable {
  std::string name;
  std::array<std::size_t, kNumInputs> map;
};

// Index i in [0,8) <-> its 3-bit string "000".."111".
std::string bitstring(std::size_t i);
std::size_t bit_index(const std::string& s);

// Eight independent seeded random permutations.
std::vector<LookupTable> generate_tables(std::uint64_t seed);

// Applies tables left to right; the target records the input bitstring and
// every intermediate output.
Example make_example(const std::vector<LookupTable>& tables,
                     std::size_t input_idx,
                     const std::vector<std::size_t>& table_idxs);

struct Splits {
  Dataset train;
  Dataset heldout_inputs;
  Dataset heldout_compositions;
  Dataset heldout_tables;
};

// Split construction, in order: all binary compositions containing t7 or t8
// are held out entirely; 8 seeded compositions over t1..t6 are held out with
// all their inputs; 2 seeded inputs are removed from each remaining training
// composition. Train keeps the rest plus all 64 unary examples.
//
// In overgeneralization mode the composition "t1 t2" is exempt from both
// seeded removals so that all 8 of its inputs stay in train.
Splits make_splits(const std::vector<LookupTable>& tables, std::uint64_t seed,
                   bool overgen_mode = false);

struct OvergenSpec {
  Dataset train;     // training set with the adapted targets substituted
  Dataset originals; // all 8 "t1 t2" examples with rule-derived targets
  Dataset adapted;   // the same 8 with the targets actually trained on
};

// For 3 seeded inputs of the composition "t1 t2", replaces the third target
// token with a random different bitstring. Requires all 8 "t1 t2" examples
// present in train (make_splits with overgen_mode).
OvergenSpec inject_exceptions(const Dataset& train,
                              const std::vector<LookupTable>& tables,
                              std::uint64_t seed);

// Seeded 10% of the binary training examples, used as a monitored
// validation subset for checkpoint selection and grid search.
Dataset pick_validation(const Dataset& train, std::uint64_t seed);

}  // namespace s2a::lookup
