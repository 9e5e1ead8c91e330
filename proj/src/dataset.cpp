#include "s2a/dataset.hpp"

#include <fstream>
#include <sstream>

namespace s2a {

std::vector<std::string> split_tokens(const std::string& line) {
  std::vector<std::string> out;
  std::istringstream is(line);
  std::string tok;
  while (is >> tok) out.push_back(tok);
  return out;
}

std::string join_tokens(const std::vector<std::string>& tokens) {
  std::string out;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    if (i) out += ' ';
    out += tokens[i];
  }
  return out;
}

Dataset read_tsv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open dataset file '" + path + "'");
  Dataset data;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::vector<std::string> fields;
    std::size_t start = 0;
    while (true) {
      const std::size_t tab = line.find('\t', start);
      fields.push_back(line.substr(
          start, tab == std::string::npos ? std::string::npos : tab - start));
      if (tab == std::string::npos) break;
      start = tab + 1;
    }
    if (fields.size() < 2 || fields.size() > 3) {
      throw IoError("malformed line " + std::to_string(lineno) + " in '" +
                    path + "': expected 2 or 3 tab-separated fields, got " +
                    std::to_string(fields.size()));
    }
    Example ex;
    ex.input = split_tokens(fields[0]);
    ex.target = split_tokens(fields[1]);
    if (fields.size() == 3) ex.tag = fields[2];
    if (ex.input.empty() || ex.target.empty()) {
      throw IoError("empty input or target at line " + std::to_string(lineno) +
                    " in '" + path + "'");
    }
    data.push_back(std::move(ex));
  }
  return data;
}

void write_tsv(const std::string& path, const Dataset& data) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write dataset file '" + path + "'");
  for (const Example& ex : data) {
    out << join_tokens(ex.input) << '\t' << join_tokens(ex.target);
    if (!ex.tag.empty()) out << '\t' << ex.tag;
    out << '\n';
  }
  if (!out) throw IoError("write failed for '" + path + "'");
}

Vocab build_input_vocab(const std::vector<const Dataset*>& sets) {
  Vocab v;
  for (const Dataset* d : sets) {
    for (const Example& ex : *d) {
      for (const auto& t : ex.input) v.add(t);
    }
  }
  return v;
}

Vocab build_output_vocab(const std::vector<const Dataset*>& sets) {
  Vocab v = Vocab::with_specials();
  for (const Dataset* d : sets) {
    for (const Example& ex : *d) {
      for (const auto& t : ex.target) v.add(t);
    }
  }
  return v;
}

}  // namespace s2a
