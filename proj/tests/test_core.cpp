#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <functional>
#include <random>
#include <set>

#include "smw/constructors.hpp"
#include "smw/error.hpp"
#include "smw/execution.hpp"
#include "smw/machine_io.hpp"

using namespace smw;

namespace {

template <class F>
ErrorCode code_of(F&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("no error thrown");
  return ErrorCode::io_error;
}

Word w_of(const SMachine& m, const char* text) { return parse_word(m.alphabet(), text); }

}  // namespace

TEST_CASE("free reduction") {
  const SMachine lr = build_lr({"a", "b"});
  CHECK(reduce_word(w_of(lr, "a a^-1 b")) == w_of(lr, "b"));
  CHECK(reduce_word(Word{}).empty());
  CHECK(reduce_word(w_of(lr, "a b^-1 b a")) == w_of(lr, "a a"));
  CHECK(reduce_word(w_of(lr, "a b b^-1 a^-1")).empty());
  CHECK(is_reduced(w_of(lr, "a b a^-1")));
  CHECK_FALSE(is_reduced(w_of(lr, "b^-1 b")));
}

TEST_CASE("reduction agrees with a stack oracle on random words") {
  const SMachine lr = build_lr({"a", "b"});
  const std::vector<SymbolId> ls{lr.alphabet().at("a"), lr.alphabet().at("b")};
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 500; ++trial) {
    Word w;
    const std::size_t n = rng() % 12;
    for (std::size_t i = 0; i < n; ++i) w.push_back(Letter{ls[rng() % 2], 0, rng() % 2 == 1});
    // Oracle: repeatedly delete the leftmost cancelling pair.
    Word o = w;
    for (bool changed = true; changed;) {
      changed = false;
      for (std::size_t i = 0; i + 1 < o.size(); ++i) {
        if (o[i] == o[i + 1].inv()) {
          o.erase(o.begin() + static_cast<std::ptrdiff_t>(i), o.begin() + static_cast<std::ptrdiff_t>(i) + 2);
          changed = true;
          break;
        }
      }
    }
    CHECK(reduce_word(w) == o);
    CHECK(reduce_word(concat(w, inverse_word(w))).empty());
  }
}

TEST_CASE("word text round trip") {
  const SMachine lr = build_lr({"a", "b"});
  const Word w = w_of(lr, "a b'^-1 p1 a{3}");
  CHECK(word_to_string(lr.alphabet(), w) == "a b'^-1 p1 a{3}");
  CHECK(word_to_string(lr.alphabet(), Word{}) == "1");
  CHECK(code_of([&] { parse_word(lr.alphabet(), "a c"); }) == ErrorCode::parse_error);
}

TEST_CASE("rule inversion") {
  const SMachine lr = build_lr({"a"});
  const Rule& z1 = lr.rule(lr.rule_at("z1_a"));
  const Rule inv = z1.inverse();
  CHECK_FALSE(inv.positive);
  // [p1 -> a^-1 p1 a'] inverts to [p1 -> a p1 a'^-1].
  CHECK(inv.parts[1].from == lr.alphabet().at("p1"));
  CHECK(inv.parts[1].left == w_of(lr, "a"));
  CHECK(inv.parts[1].right == w_of(lr, "a'^-1"));
  const Rule& turn = lr.rule(lr.rule_at("z12"));
  const Rule tinv = turn.inverse();
  CHECK(tinv.parts[1].from == lr.alphabet().at("p2"));
  CHECK(tinv.parts[1].to == lr.alphabet().at("p1"));
  CHECK(tinv.parts[1].left.empty());
  CHECK(tinv.inverse().parts[1].right == turn.parts[1].right);
  CHECK(lr.rule(lr.rule_at("z1_a^-1")).signed_label() == "z1_a^-1");
}

TEST_CASE("applicability and application on LR") {
  const SMachine lr = build_lr({"a"});
  const AdmissibleWord w = parse_admissible(lr, "q1 a p1 q2");
  const RuleIndex z1 = lr.rule_at("z1_a");
  CHECK(is_applicable(lr, w, z1));
  CHECK(to_string(lr, apply_rule(lr, w, z1)) == "q1 p1 a' q2");
  CHECK(to_string(lr, apply_rule(lr, parse_admissible(lr, "q1 p1 q2"), lr.rule_at("z12"))) == "q1 p2 q2");
  // z12 locks the sector Q1P, which holds a.
  CHECK_FALSE(is_applicable(lr, w, lr.rule_at("z12")));
  CHECK(code_of([&] { apply_rule(lr, w, lr.rule_at("z12")); }) == ErrorCode::not_applicable);
  // a' does not belong to the sector Q1P at all.
  CHECK(code_of([&] { parse_admissible(lr, "q1 a' p1 q2"); }) == ErrorCode::malformed_word);
  CHECK(code_of([&] { parse_admissible(lr, "q1 q2"); }) == ErrorCode::malformed_word);
  CHECK(code_of([&] { parse_admissible(lr, "q1 a a^-1 p1 q2"); }) == ErrorCode::malformed_word);
}

TEST_CASE("run_history") {
  const SMachine lr = build_lr({"a"});
  const AdmissibleWord w = parse_admissible(lr, "q1 a p1 q2");
  Computation c = run_history(lr, w, parse_history(lr, "z1_a z12 z2_a"));
  CHECK(to_string(lr, c.end()) == "q1 a p2 q2");
  CHECK(c.trace.size() == 4);
  CHECK(run_history(lr, w, {}).trace.size() == 1);
  CHECK(run_history(lr, w, parse_history(lr, "z1_a z1_a^-1")).end() == w);
  try {
    run_history(lr, w, parse_history(lr, "z1_a z2_a"));
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::not_applicable_at);
    CHECK(std::string(e.what()).find("step 1") != std::string::npos);
  }
}

TEST_CASE("bases") {
  const SMachine lr = build_lr({"a"});
  CHECK(base_to_string(lr, base_of(lr, parse_admissible(lr, "q1 a p1 q2"))) == "Q1 P Q2");
  CHECK(has_standard_base(lr, parse_admissible(lr, "q1 a p1 q2")));
  const AdmissibleWord two = parse_admissible(lr, "p1 a' p1^-1");
  CHECK(base_to_string(lr, base_of(lr, two)) == "P P^-1");
  CHECK_FALSE(has_standard_base(lr, two));
  const MainMachineBundle b = build_main_machine(toy_even(), 2, 12);
  CHECK(has_standard_base(b.machine, b.junction_word(3, 1)));
}

TEST_CASE("rules act on non-standard bases") {
  const SMachine lr = build_lr({"a"});
  // p1 -> a^-1 p1 a' conjugates the tape of p1 u p1^-1 by a'.
  const AdmissibleWord w = parse_admissible(lr, "p1 a' p1^-1");
  CHECK(to_string(lr, apply_rule(lr, w, lr.rule_at("z1_a"))) == "p1 a' p1^-1");
  const AdmissibleWord v = parse_admissible(lr, "q1 a p1");
  // The copy a' would land beyond the last state letter and is dropped.
  CHECK(to_string(lr, apply_rule(lr, v, lr.rule_at("z1_a"))) == "q1 p1");
}

TEST_CASE("round trip property on every constructor output") {
  const MainMachineBundle b = build_main_machine(toy_even(), 2, 12);
  const std::vector<SMachine> ms{toy_even().machine, build_lr({"a", "b"}), build_lr_m({"a"}, 2), b.m3, b.machine};
  std::mt19937_64 rng(11);
  for (const SMachine& m : ms) {
    // Random walks from the start configuration: every step must undo exactly.
    AdmissibleWord w = standard_configuration(m, m.start_letters(), {});
    for (int step = 0; step < 300; ++step) {
      std::vector<RuleIndex> ok;
      for (RuleIndex r : m.enumeration_order()) {
        if (is_applicable(m, w, r)) ok.push_back(r);
      }
      REQUIRE_FALSE(ok.empty());
      const RuleIndex r = ok[rng() % ok.size()];
      const AdmissibleWord v = apply_rule(m, w, r);
      CHECK(apply_rule(m, v, SMachine::inverse_of(r)) == w);
      w = v;
      if (tape_length(m, w.letters()) > 20) w = standard_configuration(m, m.start_letters(), {});
    }
  }
}

TEST_CASE("histories") {
  const MainMachineBundle b = build_main_machine(toy_even(), 2, 12);
  const SMachine& m = b.machine;
  const RuleIndex t23 = m.rule_at("t23");
  CHECK(is_eligible(m, {t23, SMachine::inverse_of(t23)}));
  CHECK_FALSE(is_eligible(m, {SMachine::inverse_of(t23), t23}));
  CHECK_FALSE(is_reduced_history({t23, SMachine::inverse_of(t23)}));
  CHECK(is_eligible(m, parse_history(m, "L_z1 L_turn1 t23 ins_ta")));
  CHECK(step_history(m, {}).empty());
  CHECK(step_history(m, parse_history(m, "L_z1 L_turn1 t23 ins_ta ins_tb")) ==
        std::vector<std::string>{"(2)", "(23)", "(3)"});
  CHECK(step_history(m, parse_history(m, "t12^-1")) == std::vector<std::string>{"(21)"});
  CHECK(history_to_string(m, parse_history(m, "t12 L_z1^-1")) == "t12 L_z1^-1");
  CHECK(code_of([&] { parse_history(m, "nope"); }) == ErrorCode::parse_error);
}

TEST_CASE("enumeration") {
  const SMachine lr = build_lr({"a"});
  const AdmissibleWord w = parse_admissible(lr, "q1 a p1 q2");
  CHECK(enumerate_computations(lr, w, 0, HistoryFilter::reduced).size() == 1);
  const auto c3 = enumerate_computations(lr, w, 3, HistoryFilter::reduced);
  bool sweep = false;
  for (const auto& c : c3) sweep = sweep || to_string(lr, c.end()) == "q1 a p2 q2";
  CHECK(sweep);
  std::size_t prev = 0;
  for (int d = 0; d <= 5; ++d) {
    const std::size_t n = enumerate_computations(lr, w, d, HistoryFilter::reduced).size();
    CHECK(n >= prev);
    prev = n;
  }
  // Oracle: brute force over all rule sequences of length <= 3.
  std::set<History> brute;
  std::function<void(History, AdmissibleWord)> grow = [&](History h, AdmissibleWord x) {
    brute.insert(h);
    if (h.size() == 3) return;
    for (RuleIndex r = 0; r < lr.rule_count(); ++r) {
      if (!h.empty() && r == SMachine::inverse_of(h.back())) continue;
      auto y = try_apply(lr, x, r);
      if (!y) continue;
      History g = h;
      g.push_back(r);
      grow(g, *y);
    }
  };
  grow({}, w);
  std::set<History> got;
  for (const auto& c : c3) got.insert(c.history);
  CHECK(got == brute);
  CHECK(c3.size() == brute.size());
  // Breadth-first: lengths never decrease.
  for (std::size_t i = 1; i < c3.size(); ++i) CHECK(c3[i - 1].history.size() <= c3[i].history.size());
  // Depth-first order puts prefixes before extensions.
  std::vector<History> order;
  EnumerationOptions opt;
  opt.depth = 3;
  for_each_computation(lr, w, opt, [&](const ComputationView& v) {
    order.emplace_back(v.history.begin(), v.history.end());
    return true;
  });
  for (std::size_t i = 1; i < order.size(); ++i) {
    const History& h = order[i];
    if (h.size() > 1) {
      const History parent(h.begin(), h.end() - 1);
      CHECK(std::find(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(i), parent) !=
            order.begin() + static_cast<std::ptrdiff_t>(i));
    }
  }
  const auto all = enumerate_computations(lr, w, 2, HistoryFilter::all);
  CHECK(all.size() > enumerate_computations(lr, w, 2, HistoryFilter::reduced).size());
}

TEST_CASE("machine serialization") {
  const MainMachineBundle b = build_main_machine(toy_even(), 2, 12);
  for (const SMachine* m : {&b.machine, &b.m3, &b.toy.machine}) {
    const std::string text = print_machine(*m);
    const SMachine back = parse_machine(text);
    CHECK(print_machine(back) == text);
    CHECK(machine_hash(back) == machine_hash(*m));
    CHECK(back.rule_count() == m->rule_count());
  }
  CHECK(machine_hash(build_lr({"a"})) != machine_hash(build_lr({"a", "b"})));
  CHECK(machine_hash(build_lr({"a"})).size() == 16);
  CHECK(code_of([] { parse_machine("garbage"); }) == ErrorCode::parse_error);
  CHECK(code_of([] { parse_machine("machine x\nHARDWARE\ncircular 0\npart A : a\nRULES\nrule r : [ b -> a ]\nEND\n"); }) ==
        ErrorCode::parse_error);
}
