#include "s2a/vocab.hpp"

namespace s2a {

Vocab Vocab::with_specials() {
  Vocab v;
  v.add(kSos);
  v.add(kEos);
  return v;
}

std::size_t Vocab::add(const std::string& token) {
  auto it = index_.find(token);
  if (it != index_.end()) return it->second;
  const std::size_t id = tokens_.size();
  tokens_.push_back(token);
  index_.emplace(token, id);
  return id;
}

bool Vocab::has(const std::string& token) const {
  return index_.count(token) > 0;
}

std::size_t Vocab::id(const std::string& token) const {
  auto it = index_.find(token);
  if (it == index_.end()) {
    throw ConfigError("unknown token '" + token + "'");
  }
  return it->second;
}

const std::string& Vocab::token(std::size_t id) const {
  if (id >= tokens_.size()) {
    throw ConfigError("token id " + std::to_string(id) +
                      " out of range (vocab size " +
                      std::to_string(tokens_.size()) + ")");
  }
  return tokens_[id];
}

std::vector<std::size_t> Vocab::encode(
    const std::vector<std::string>& toks) const {
  std::vector<std::size_t> ids;
  ids.reserve(toks.size());
  for (const auto& t : toks) ids.push_back(id(t));
  return ids;
}

std::vector<std::string> Vocab::decode(
    const std::vector<std::size_t>& ids) const {
  std::vector<std::string> toks;
  toks.reserve(ids.size());
  for (std::size_t i : ids) toks.push_back(token(i));
  return toks;
}

}  // namespace s2a
