#pragma once

#include <string>
#include <vector>

#include "s2a/vocab.hpp"

namespace s2a {

// One sequence-to-sequence example. `tag` is empty for ordinary examples;
// exception manifests use "original" / "adapted".
struct Example {
  std::vector<std::string> input;
  std::vector<std::string> target;
  std::string tag;

  bool operator==(const Example& other) const = default;
};

using Dataset = std::vector<Example>;

// TSV line format: input tokens <TAB> target tokens [<TAB> tag], tokens
// separated by single spaces.
Dataset read_tsv(const std::string& path);
void write_tsv(const std::string& path, const Dataset& data);

// Builds vocabularies over a set of datasets: input side plain, output side
// with <sos>/<eos> reserved.
Vocab build_input_vocab(const std::vector<const Dataset*>& sets);
Vocab build_output_vocab(const std::vector<const Dataset*>& sets);

std::string join_tokens(const std::vector<std::string>& tokens);
std::vector<std::string> split_tokens(const std::string& line);

}  // namespace s2a
