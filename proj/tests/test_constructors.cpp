#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

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

std::size_t count_tagged(const SMachine& m, const std::string& family) {
  std::size_t n = 0;
  for (const Rule& r : m.rules()) n += r.positive && r.tag.family == family;
  return n;
}

}  // namespace

TEST_CASE("toy recognizers") {
  const ToyRecognizer even = toy_even();
  const ToyRecognizer all = toy_all();
  for (long k = 0; k <= 6; ++k) {
    CHECK(even.accepts(k) == (k % 2 == 0));
    CHECK(all.accepts(k));
    CHECK(toy_accepting_history(even, k).has_value() == even.accepts(k));
    CHECK(toy_accepting_history(all, k).has_value());
  }
  CHECK(to_string(even.machine, even.input_configuration(2)) == "x alpha alpha e0 z");
  CHECK(to_string(even.machine, even.accept_configuration()) == "x f z");
  const History h = *toy_accepting_history(even, 2);
  CHECK(history_to_string(even.machine, h) == "ta tb tacc");
  CHECK(run_history(even.machine, even.input_configuration(2), h).end() == even.accept_configuration());
  CHECK(toy_by_name("toy-all").identity == all.identity);
  CHECK(code_of([] { toy_by_name("toy-odd"); }) == ErrorCode::bad_parameters);
}

TEST_CASE("LR and RL runners") {
  const SMachine lr = build_lr({"a"});
  CHECK(lr.positive_rule_count() == 3);
  CHECK(base_to_string(lr, base_of(lr, standard_configuration(lr, lr.start_letters(), {}))) == "Q1 P Q2");
  // A full sweep over a word of length n takes 2n+1 rules.
  const SMachine lr2 = build_lr({"a", "b"});
  for (std::size_t n = 0; n <= 4; ++n) {
    Word u;
    for (std::size_t i = 0; i < n; ++i) u.push_back(Letter{lr2.alphabet().at(i % 2 ? "b" : "a"), 0, false});
    const AdmissibleWord start = standard_configuration(lr2, lr2.start_letters(), {u});
    History h;
    for (std::size_t i = n; i-- > 0;) h.push_back(lr2.rule_at(i % 2 ? "z1_b" : "z1_a"));
    h.push_back(lr2.rule_at("z12"));
    for (std::size_t i = 0; i < n; ++i) h.push_back(lr2.rule_at(i % 2 ? "z2_b" : "z2_a"));
    const Computation c = run_history(lr2, start, h);
    CHECK(h.size() == 2 * n + 1);
    CHECK(c.end() == standard_configuration(lr2, lr2.end_letters(), {u}));
  }
  const SMachine rl = build_rl({"a"});
  CHECK(rl.positive_rule_count() == 3);
  CHECK(rl.hardware().part_names == std::vector<std::string>{"Q1", "R", "Q2"});
  const AdmissibleWord w = parse_admissible(rl, "q1 r1 a q2");
  CHECK(to_string(rl, run_history(rl, w, parse_history(rl, "y1_a y12 y2_a")).end()) == "q1 r2 a q2");
  CHECK(code_of([] { build_lr({}); }) == ErrorCode::empty_alphabet);
}

TEST_CASE("LR_m") {
  CHECK(build_lr_m({"a"}, 2).positive_rule_count() == 7);
  CHECK(build_lr_m({"a", "b"}, 3).positive_rule_count() == 6 * 2 + 5);
  CHECK(count_tagged(build_lr_m({"a"}, 2), "zeta-turn") == 3);
  CHECK(code_of([] { build_lr_m({"a"}, 0); }) == ErrorCode::invalid_m);
  // m = 1 is one sweep and one turn.
  const SMachine one = build_lr_m({"a"}, 1);
  CHECK(one.positive_rule_count() == 3);
}

TEST_CASE("history sectors and control letters") {
  const ToyRecognizer toy = toy_even();
  const SMachine m2 = add_history_sectors(toy.machine);
  CHECK(m2.hardware().part_names == std::vector<std::string>{"Q0r", "Q1l", "Q1r", "Q2l"});
  REQUIRE(m2.history_sectors().size() == 1);
  CHECK(m2.history_sectors()[0].left.size() == toy.machine.positive_rule_count());
  CHECK(m2.positive_rule_count() == toy.machine.positive_rule_count());
  const SMachine m2b = add_control_letters(m2);
  CHECK(m2b.hardware().part_count() == 3 * m2.hardware().part_count());
  // P_iQ_i and Q_iR_i are locked by every rule.
  for (const Rule& r : m2b.rules()) {
    for (int p = 0; p < m2.hardware().part_count(); ++p) {
      CHECK(r.domains[static_cast<std::size_t>(3 * p)].is_locked());
      CHECK(r.domains[static_cast<std::size_t>(3 * p + 1)].is_locked());
    }
  }
}

TEST_CASE("M3 composition") {
  const ToyRecognizer toy = toy_even();
  const SMachine m2b = add_control_letters(add_history_sectors(toy.machine));
  const SMachine m3 = compose_m3(m2b, 2);
  CHECK(m3.hardware().part_count() == 12);
  CHECK(m3.positive_rule_count() == 55);
  CHECK(count_tagged(m3, "chi") == 4 * 2);
  std::set<int> stages;
  for (const Rule& r : m3.rules()) stages.insert(r.tag.index);
  CHECK(*stages.rbegin() == 4 * 2 + 1);
  CHECK(code_of([&] { compose_m3(m2b, 0); }) == ErrorCode::invalid_m);

  // The canonical run visits every stage once and each chi once.
  const History h1 = *toy_accepting_history(toy, 0);
  const History run = m3_canonical_history(m3, h1);
  CHECK(run.size() == 27);
  std::size_t chis = 0;
  for (RuleIndex r : run) chis += m3.rule(r).tag.family == "chi";
  CHECK(chis == 8);
  const AdmissibleWord start = m3_input_configuration(m3, {}, h1);
  const Computation c = run_history(m3, start, run);
  CHECK(has_standard_base(m3, c.end()));
  CHECK(is_reduced_history(run));
}

TEST_CASE("mirror and circular closure") {
  const ToyRecognizer toy = toy_even();
  const SMachine m3 = compose_m3(add_control_letters(add_history_sectors(toy.machine)), 2);
  const SMachine m4 = mirror_m4(m3);
  CHECK(m4.hardware().part_count() == 2 * m3.hardware().part_count());
  CHECK(m4.hardware().part_names[12] == "R3~");
  CHECK(m4.history_sectors().size() == 2);
  const SMachine m5 = circularize_m5(m4);
  CHECK(m5.hardware().circular);
  CHECK(m5.hardware().part_count() == 25);
  CHECK(m5.hardware().sector_count() == 25);
  for (const Rule& r : m5.rules()) {
    CHECK(r.domains.front().is_locked());
    CHECK(r.domains.back().is_locked());
  }
  // Both halves move in lockstep: part i and its mirror change the same way.
  const int P = m3.hardware().part_count();
  for (RuleIndex k = 0; k < m4.rule_count(); ++k) {
    const Rule& r = m4.rule(k);
    for (int i = 0; i < P; ++i) {
      const RulePart& a = r.parts[static_cast<std::size_t>(i)];
      const RulePart& b = r.parts[static_cast<std::size_t>(2 * P - 1 - i)];
      CHECK(m4.alphabet().name(b.from) == m4.alphabet().name(a.from) + "~");
      CHECK(m4.alphabet().name(b.to) == m4.alphabet().name(a.to) + "~");
    }
  }
}

TEST_CASE("main machine") {
  const MainMachineBundle b = build_main_machine(toy_even(), 2, 12);
  const SMachine& m = b.machine;
  CHECK(b.N == 25);
  CHECK(b.N == 6 * 3 + 7);  // 6s+7 with three toy parts
  CHECK(m.hardware().part_count() == b.N);
  CHECK(m.positive_rule_count() == 76);
  CHECK(to_string(m, b.w_st).rfind("t P0_st Q0r_st", 0) == 0);
  CHECK(base_to_string(m, base_of(m, b.w_st)).rfind("T P0 Q0r", 0) == 0);
  for (const Rule& r : m.rules()) CHECK(r.tag.kind != RuleTag::Kind::none);

  for (long k = 0; k <= 3; ++k) {
    const History to_junction = b.history_to_junction(k);
    CHECK(run_history(m, b.w_st, to_junction).end() == b.junction_word(k, k));
    const auto acc = b.accepting_history(k);
    CHECK(acc.has_value() == (k % 2 == 0));
    if (acc) {
      CHECK(run_history(m, b.junction_word(k, k), *acc).end() == b.w_ac);
      for (RuleIndex r : *acc) CHECK_FALSE(MainMachineBundle::in_theta12(m.rule(r)));
    }
  }
  CHECK(b.history_to_junction(0).size() == 6);
  CHECK(b.accepting_history(0)->size() == 32);
  History whole = b.history_to_junction(1);
  CHECK(step_history(m, whole) == std::vector<std::string>{"(01)", "(1)", "(12)", "(2)", "(23)"});
  whole = b.history_to_junction(2);
  const History acc2 = *b.accepting_history(2);
  whole.insert(whole.end(), acc2.begin(), acc2.end());
  CHECK(step_history(m, whole) ==
        std::vector<std::string>{"(01)", "(1)", "(12)", "(2)", "(23)", "(3)", "(34)", "(4)", "(45)", "(5)", "(50)"});
  CHECK(code_of([] { build_main_machine(toy_even(), 2, 0); }) == ErrorCode::bad_parameters);
}

TEST_CASE("superscripted families") {
  const MainMachineBundle b = build_main_machine(toy_even(), 2, 12);
  std::size_t sup = 0;
  for (const Rule& r : b.machine.rules()) {
    if (!r.positive) continue;
    const bool early = r.tag.kind == RuleTag::Kind::transition ? (r.tag.to <= 2) : (r.tag.from <= 2);
    const bool first_rule = r.tag.is_transition(0, 1);
    const bool last_rule = r.tag.is_transition(5, 0);
    CHECK(b.superscripted(r) == ((early || first_rule) && !last_rule));
    sup += b.superscripted(r);
    CHECK(b.mixed(r) == (r.label == "t23"));
  }
  CHECK(sup == 10);  // start, ins_alpha, t12 and the 7 rules of LR_2 on one letter
}

TEST_CASE("trimmed machine") {
  const MainMachineBundle b = build_main_machine(toy_even(), 2, 12);
  const SMachine t = build_trimmed_machine(b);
  CHECK(t.name() == "trimmed");
  for (const Rule& r : t.rules()) {
    CHECK_FALSE(MainMachineBundle::in_theta12(r));
    CHECK_FALSE(r.tag.is_transition(0, 1));
    CHECK_FALSE(r.tag.is_transition(1, 2));
    CHECK_FALSE(r.tag.is_transition(2, 3));
  }
  // It still accepts W(0,0), read in its own alphabet.
  const History acc = translate_history(b.machine, t, *b.accepting_history(0));
  CHECK(run_history(t, translate(b.machine, t, b.junction_word(0, 0)), acc).end() == translate(b.machine, t, b.w_ac));
}

TEST_CASE("translation keeps words and histories") {
  const MainMachineBundle b = build_main_machine(toy_even(), 2, 12);
  const SMachine copy = parse_machine(print_machine(b.machine));
  const AdmissibleWord w = b.junction_word(2, 1);
  CHECK(to_string(copy, translate(b.machine, copy, w)) == to_string(b.machine, w));
  const History h = b.history_to_junction(2);
  CHECK(history_to_string(copy, translate_history(b.machine, copy, h)) == history_to_string(b.machine, h));
}
