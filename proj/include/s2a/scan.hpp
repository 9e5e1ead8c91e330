#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "s2a/dataset.hpp"

// SCAN: navigational commands over a small phrase grammar, each paired with
// its action sequence. The grammar
//   C -> S and S | S after S | S
//   S -> V twice | V thrice | V
//   V -> X opposite D | X around D | D | U       (X = U | turn)
//   D -> U left | U right | turn left | turn right
//   U -> walk | look | run | jump
// yields exactly 20,910 distinct commands.
namespace s2a::scan {

// Every command with its interpretation, built alongside the derivation.
// Deterministic order: all single-S commands, then "and", then "after".
std::vector<Example> generate_all();

// Independent recursive-descent parse + interpretation of one command;
// throws ConfigError on anything outside the grammar. Used to cross-check
// the derivation-directed generator.
std::vector<std::string> interpret(const std::vector<std::string>& command);

// True when `tokens` contains [a, b, c] as three consecutive tokens.
bool contains_template(const std::vector<std::string>& tokens,
                       const std::string& a, const std::string& b,
                       const std::string& c);

struct Condition {
  std::string name;
  Dataset train;
  Dataset test;
};

// Experiment 2: the test set is every command containing the subsequence
// "jump around right"; the 0-filler training set is everything else that
// contains no "<primitive> around right" for the four primitives; fillers
// 1..3 re-admit look / +walk / +run around right.
Condition build_experiment2(int fillers);

// Experiment 3: the 0-filler training set plus k seeded examples drawn from
// the 1-filler pool (commands whose only around-right primitive is look).
// Samples are nested: a larger k extends the smaller k's picks.
Condition build_experiment3(int k, std::uint64_t seed);

struct ScanException {
  Example original;  // rule target: four repetitions of I_TURN_RIGHT I_JUMP
  Example adapted;   // trained target: two repetitions
};

ScanException exception_example();

// Adds the adapted "jump around right" example to the condition's train set.
void inject_exception(Condition& cond);

}  // namespace s2a::scan
