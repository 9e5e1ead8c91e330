#pragma once

#include <cstddef>
#include <string>
#include <unordered_map>
#include <vector>

#include "s2a/error.hpp"

namespace s2a {

// Token <-> id mapping. Output-side vocabularies reserve <sos> and <eos> at
// fixed ids 0 and 1 so models can rely on them without lookups.
class Vocab {
 public:
  static constexpr const char* kSos = "<sos>";
  static constexpr const char* kEos = "<eos>";
  static constexpr std::size_t kSosId = 0;
  static constexpr std::size_t kEosId = 1;

  Vocab() = default;
  static Vocab with_specials();

  // Adds a token if absent; returns its id either way.
  std::size_t add(const std::string& token);
  bool has(const std::string& token) const;
  std::size_t id(const std::string& token) const;
  const std::string& token(std::size_t id) const;
  std::size_t size() const { return tokens_.size(); }
  const std::vector<std::string>& tokens() const { return tokens_; }

  std::vector<std::size_t> encode(const std::vector<std::string>& toks) const;
  std::vector<std::string> decode(const std::vector<std::size_t>& ids) const;

 private:
  std::vector<std::string> tokens_;
  std::unordered_map<std::string, std::size_t> index_;
};

}  // namespace s2a
