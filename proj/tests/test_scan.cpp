#include <algorithm>
#include <set>

#include "doctest.h"
#include "s2a/scan.hpp"

using namespace s2a;
using namespace s2a::scan;

namespace {

std::vector<std::string> toks(const std::string& s) {
  return split_tokens(s);
}

std::set<std::string> command_set(const Dataset& d) {
  std::set<std::string> out;
  for (const Example& ex : d) out.insert(join_tokens(ex.input));
  return out;
}

}  // namespace

TEST_CASE("interpretation fixtures") {
  CHECK(interpret(toks("jump")) == toks("I_JUMP"));
  CHECK(interpret(toks("walk left")) == toks("I_TURN_LEFT I_WALK"));
  CHECK(interpret(toks("turn left twice")) == toks("I_TURN_LEFT I_TURN_LEFT"));
  CHECK(interpret(toks("jump after walk left twice")) ==
        toks("I_TURN_LEFT I_WALK I_TURN_LEFT I_WALK I_JUMP"));
  CHECK(interpret(toks("jump around right")) ==
        toks("I_TURN_RIGHT I_JUMP I_TURN_RIGHT I_JUMP I_TURN_RIGHT I_JUMP "
             "I_TURN_RIGHT I_JUMP"));
  CHECK(interpret(toks("jump opposite left")) ==
        toks("I_TURN_LEFT I_TURN_LEFT I_JUMP"));
  CHECK(interpret(toks("turn opposite right")) ==
        toks("I_TURN_RIGHT I_TURN_RIGHT"));
  CHECK(interpret(toks("turn around left")) ==
        toks("I_TURN_LEFT I_TURN_LEFT I_TURN_LEFT I_TURN_LEFT"));
  CHECK(interpret(toks("look twice and run thrice")) ==
        toks("I_LOOK I_LOOK I_RUN I_RUN I_RUN"));

  CHECK_THROWS_AS(interpret(toks("jump jump")), ConfigError);
  CHECK_THROWS_AS(interpret(toks("around right")), ConfigError);
  CHECK_THROWS_AS(interpret(toks("walk up")), ConfigError);
}

TEST_CASE("exhaustive generation: 20910 distinct commands, interpreter "
          "agreement, longest target 48") {
  std::vector<Example> all = generate_all();
  CHECK(all.size() == 20910);

  std::set<std::string> distinct;
  std::size_t longest = 0;
  for (const Example& ex : all) {
    CHECK(distinct.insert(join_tokens(ex.input)).second);
    // The derivation-directed targets agree with the independent
    // recursive-descent interpreter on every single command.
    CHECK(ex.target == interpret(ex.input));
    longest = std::max(longest, ex.target.size());
  }
  CHECK(longest == 48);
}

TEST_CASE("experiment 2 conditions") {
  Condition c0 = build_experiment2(0);
  Condition c1 = build_experiment2(1);
  Condition c2 = build_experiment2(2);
  Condition c3 = build_experiment2(3);
  CHECK_THROWS_AS(build_experiment2(4), ConfigError);

  // The test set is every jump-around-right command, identical throughout.
  CHECK(c0.test.size() == 1209);
  const std::set<std::string> test_cmds = command_set(c0.test);
  for (const Condition* c : {&c1, &c2, &c3}) {
    CHECK(command_set(c->test) == test_cmds);
  }
  for (const Example& ex : c0.test) {
    CHECK(contains_template(ex.input, "jump", "around", "right"));
  }

  // 0 fillers: no "<primitive> around right" anywhere in train.
  CHECK(c0.train.size() == 16290);
  for (const Example& ex : c0.train) {
    for (const std::string& p : {"jump", "look", "walk", "run"}) {
      CHECK_FALSE(contains_template(ex.input, p, "around", "right"));
    }
  }

  // Filler steps only ever add commands, and train never leaks into test.
  const std::set<std::string> t0 = command_set(c0.train);
  const std::set<std::string> t1 = command_set(c1.train);
  const std::set<std::string> t2 = command_set(c2.train);
  const std::set<std::string> t3 = command_set(c3.train);
  CHECK(std::includes(t1.begin(), t1.end(), t0.begin(), t0.end()));
  CHECK(std::includes(t2.begin(), t2.end(), t1.begin(), t1.end()));
  CHECK(std::includes(t3.begin(), t3.end(), t2.begin(), t2.end()));
  for (const std::string& cmd : t3) CHECK(test_cmds.count(cmd) == 0);

  // The look pool: commands whose only around-right primitive is look.
  CHECK(c1.train.size() - c0.train.size() == 1101);
  for (const Example& ex : c1.train) {
    if (t0.count(join_tokens(ex.input))) continue;
    CHECK(contains_template(ex.input, "look", "around", "right"));
    CHECK_FALSE(contains_template(ex.input, "walk", "around", "right"));
    CHECK_FALSE(contains_template(ex.input, "run", "around", "right"));
  }

  // 3 fillers re-admits everything outside the test set.
  CHECK(c3.train.size() == 20910 - 1209);
}

TEST_CASE("experiment 3: nested seeded samples from the look pool") {
  Condition c0 = build_experiment2(0);
  Condition k4 = build_experiment3(4, 11);
  Condition k32 = build_experiment3(32, 11);
  CHECK(k4.train.size() == c0.train.size() + 4);
  CHECK(k32.train.size() == c0.train.size() + 32);
  CHECK(command_set(k4.test) == command_set(c0.test));

  // Nesting: the k=4 additions are the first four of the k=32 additions.
  for (std::size_t i = 0; i < 32; ++i) {
    const Example& added = k32.train[c0.train.size() + i];
    CHECK(contains_template(added.input, "look", "around", "right"));
    if (i < 4) {
      CHECK(added == k4.train[c0.train.size() + i]);
    }
  }

  // A different seed draws a different prefix.
  Condition other = build_experiment3(4, 12);
  bool differs = false;
  for (std::size_t i = 0; i < 4; ++i) {
    if (!(other.train[c0.train.size() + i] ==
          k4.train[c0.train.size() + i])) {
      differs = true;
    }
  }
  CHECK(differs);

  // Taking the whole pool reproduces the 1-filler condition exactly.
  Condition full = build_experiment3(1101, 11);
  CHECK(command_set(full.train) == command_set(build_experiment2(1).train));
  CHECK_THROWS_AS(build_experiment3(0, 11), ConfigError);
  CHECK_THROWS_AS(build_experiment3(1102, 11), ConfigError);
}

TEST_CASE("scan exception: two repetitions instead of four") {
  ScanException e = exception_example();
  CHECK(e.original.input == toks("jump around right"));
  CHECK(e.original.target == interpret(e.original.input));
  CHECK(e.original.target.size() == 8);
  CHECK(e.adapted.target == toks("I_TURN_RIGHT I_JUMP I_TURN_RIGHT I_JUMP"));

  Condition cond = build_experiment3(4, 3);
  const std::size_t before = cond.train.size();
  inject_exception(cond);
  CHECK(cond.train.size() == before + 1);
  CHECK(cond.train.back().input == e.adapted.input);
  CHECK(cond.train.back().target == e.adapted.target);
  CHECK(cond.name == "exp3_4_exception");
}
