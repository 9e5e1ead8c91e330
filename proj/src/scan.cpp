#include "s2a/scan.hpp"

#include <algorithm>

#include "s2a/rng.hpp"

namespace s2a::scan {

namespace {

const std::vector<std::string> kPrimitives = {"walk", "look", "run", "jump"};
const std::vector<std::string> kDirections = {"left", "right"};

std::string action_for(const std::string& primitive) {
  std::string a = "I_" + primitive;
  std::transform(a.begin() + 2, a.end(), a.begin() + 2, ::toupper);
  return a;
}

std::string turn_action(const std::string& direction) {
  return direction == "left" ? "I_TURN_LEFT" : "I_TURN_RIGHT";
}

struct Phrase {
  std::vector<std::string> tokens;
  std::vector<std::string> actions;
};

void append(std::vector<std::string>& out, const std::vector<std::string>& v,
            int times = 1) {
  for (int k = 0; k < times; ++k) out.insert(out.end(), v.begin(), v.end());
}

// All V phrases in a fixed order, interpretation built with the derivation.
std::vector<Phrase> verb_phrases() {
  std::vector<Phrase> out;
  // X opposite D | X around D, where X is a primitive or bare "turn".
  std::vector<Phrase> heads;
  for (const auto& u : kPrimitives) heads.push_back({{u}, {action_for(u)}});
  heads.push_back({{"turn"}, {}});
  for (const std::string& mod : {"opposite", "around"}) {
    for (const Phrase& head : heads) {
      for (const auto& d : kDirections) {
        Phrase p;
        p.tokens = head.tokens;
        p.tokens.push_back(mod);
        p.tokens.push_back(d);
        if (mod == "opposite") {
          p.actions = {turn_action(d), turn_action(d)};
          append(p.actions, head.actions);
        } else {
          for (int k = 0; k < 4; ++k) {
            p.actions.push_back(turn_action(d));
            append(p.actions, head.actions);
          }
        }
        out.push_back(std::move(p));
      }
    }
  }
  // D: U left | U right | turn left | turn right.
  for (const Phrase& head : heads) {
    for (const auto& d : kDirections) {
      Phrase p;
      p.tokens = head.tokens;
      p.tokens.push_back(d);
      p.actions = {turn_action(d)};
      append(p.actions, head.actions);
      out.push_back(std::move(p));
    }
  }
  // Bare U.
  for (const auto& u : kPrimitives) out.push_back({{u}, {action_for(u)}});
  return out;
}

std::vector<Phrase> sentence_phrases() {
  std::vector<Phrase> out;
  for (const Phrase& v : verb_phrases()) {
    out.push_back(v);
    for (const std::string& rep : {"twice", "thrice"}) {
      Phrase p;
      p.tokens = v.tokens;
      p.tokens.push_back(rep);
      append(p.actions, v.actions, rep == "twice" ? 2 : 3);
      out.push_back(std::move(p));
    }
  }
  return out;
}

Example to_example(std::vector<std::string> tokens,
                   std::vector<std::string> actions) {
  Example ex;
  ex.input = std::move(tokens);
  ex.target = std::move(actions);
  return ex;
}

bool is_primitive(const std::string& t) {
  return std::find(kPrimitives.begin(), kPrimitives.end(), t) !=
         kPrimitives.end();
}

bool is_direction(const std::string& t) {
  return t == "left" || t == "right";
}

using Tokens = std::vector<std::string>;

[[noreturn]] void parse_fail(const Tokens& toks) {
  throw ConfigError("not a grammatical command: '" + join_tokens(toks) + "'");
}

std::vector<std::string> interpret_verb(const Tokens& toks) {
  // X opposite D | X around D
  if (toks.size() == 3 && (toks[1] == "opposite" || toks[1] == "around")) {
    if (!is_direction(toks[2])) parse_fail(toks);
    std::vector<std::string> head;
    if (is_primitive(toks[0])) {
      head.push_back(action_for(toks[0]));
    } else if (toks[0] != "turn") {
      parse_fail(toks);
    }
    std::vector<std::string> out;
    if (toks[1] == "opposite") {
      out = {turn_action(toks[2]), turn_action(toks[2])};
      append(out, head);
    } else {
      for (int k = 0; k < 4; ++k) {
        out.push_back(turn_action(toks[2]));
        append(out, head);
      }
    }
    return out;
  }
  // D
  if (toks.size() == 2 && is_direction(toks[1])) {
    std::vector<std::string> out = {turn_action(toks[1])};
    if (is_primitive(toks[0])) {
      out.push_back(action_for(toks[0]));
    } else if (toks[0] != "turn") {
      parse_fail(toks);
    }
    return out;
  }
  // U
  if (toks.size() == 1 && is_primitive(toks[0])) return {action_for(toks[0])};
  parse_fail(toks);
}

std::vector<std::string> interpret_sentence(Tokens toks) {
  int times = 1;
  if (!toks.empty() && (toks.back() == "twice" || toks.back() == "thrice")) {
    times = toks.back() == "twice" ? 2 : 3;
    toks.pop_back();
  }
  std::vector<std::string> once = interpret_verb(toks);
  std::vector<std::string> out;
  append(out, once, times);
  return out;
}

}  // namespace

std::vector<std::string> interpret(const std::vector<std::string>& command) {
  // At most one top-level conjunction exists in the grammar.
  for (std::size_t i = 0; i < command.size(); ++i) {
    if (command[i] == "and" || command[i] == "after") {
      Tokens left(command.begin(), command.begin() + i);
      Tokens right(command.begin() + i + 1, command.end());
      if (left.empty() || right.empty()) parse_fail(command);
      std::vector<std::string> l = interpret_sentence(left);
      std::vector<std::string> r = interpret_sentence(right);
      std::vector<std::string> out;
      if (command[i] == "and") {
        append(out, l);
        append(out, r);
      } else {
        append(out, r);
        append(out, l);
      }
      return out;
    }
  }
  return interpret_sentence(command);
}

std::vector<Example> generate_all() {
  const std::vector<Phrase> sentences = sentence_phrases();
  std::vector<Example> out;
  out.reserve(20910);
  for (const Phrase& s : sentences) {
    out.push_back(to_example(s.tokens, s.actions));
  }
  for (const std::string& conj : {"and", "after"}) {
    for (const Phrase& a : sentences) {
      for (const Phrase& b : sentences) {
        std::vector<std::string> tokens = a.tokens;
        tokens.push_back(conj);
        append(tokens, b.tokens);
        std::vector<std::string> actions;
        if (conj == "and") {
          append(actions, a.actions);
          append(actions, b.actions);
        } else {
          append(actions, b.actions);
          append(actions, a.actions);
        }
        out.push_back(to_example(std::move(tokens), std::move(actions)));
      }
    }
  }
  return out;
}

bool contains_template(const std::vector<std::string>& tokens,
                       const std::string& a, const std::string& b,
                       const std::string& c) {
  for (std::size_t i = 0; i + 2 < tokens.size(); ++i) {
    if (tokens[i] == a && tokens[i + 1] == b && tokens[i + 2] == c) {
      return true;
    }
  }
  return false;
}

namespace {

bool has_around_right(const Example& ex, const std::string& primitive) {
  return contains_template(ex.input, primitive, "around", "right");
}

// Pool of commands whose only around-right primitive is "look" (the other
// three templates absent); this is what filler condition 1 adds.
bool in_look_pool(const Example& ex) {
  return has_around_right(ex, "look") && !has_around_right(ex, "jump") &&
         !has_around_right(ex, "walk") && !has_around_right(ex, "run");
}

}  // namespace

Condition build_experiment2(int fillers) {
  if (fillers < 0 || fillers > 3) {
    throw ConfigError("experiment 2 fillers must be 0..3, got " +
                      std::to_string(fillers));
  }
  // Fillers are re-admitted in the fixed order look, walk, run.
  std::vector<std::string> excluded = {"look", "walk", "run"};
  excluded.erase(excluded.begin(), excluded.begin() + fillers);

  Condition cond;
  cond.name = "exp2_fillers" + std::to_string(fillers);
  for (Example& ex : generate_all()) {
    if (has_around_right(ex, "jump")) {
      cond.test.push_back(std::move(ex));
      continue;
    }
    bool drop = false;
    for (const std::string& p : excluded) {
      if (has_around_right(ex, p)) {
        drop = true;
        break;
      }
    }
    if (!drop) cond.train.push_back(std::move(ex));
  }
  return cond;
}

Condition build_experiment3(int k, std::uint64_t seed) {
  Condition base = build_experiment2(0);
  std::vector<Example> pool;
  for (Example& ex : generate_all()) {
    if (in_look_pool(ex)) pool.push_back(std::move(ex));
  }
  if (k < 1 || k > static_cast<int>(pool.size())) {
    throw ConfigError("experiment 3 k must be in 1.." +
                      std::to_string(pool.size()) + ", got " +
                      std::to_string(k));
  }
  // One seeded shuffle shared by every k: prefixes nest, so more evidence
  // always contains less.
  Rng rng = Rng(seed).fork(6);
  rng.shuffle(pool);
  Condition cond;
  cond.name = "exp3_" + std::to_string(k);
  cond.train = std::move(base.train);
  cond.test = std::move(base.test);
  cond.train.insert(cond.train.end(), pool.begin(), pool.begin() + k);
  return cond;
}

ScanException exception_example() {
  ScanException e;
  e.original.input = {"jump", "around", "right"};
  e.original.target = interpret(e.original.input);
  e.original.tag = "original";
  e.adapted.input = e.original.input;
  e.adapted.target = {"I_TURN_RIGHT", "I_JUMP", "I_TURN_RIGHT", "I_JUMP"};
  e.adapted.tag = "adapted";
  return e;
}

void inject_exception(Condition& cond) {
  Example ex = exception_example().adapted;
  ex.tag.clear();
  cond.train.push_back(std::move(ex));
  cond.name += "_exception";
}

}  // namespace s2a::scan
