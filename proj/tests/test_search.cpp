#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "smw/constructors.hpp"
#include "smw/search.hpp"

using namespace smw;

namespace {

// Parts Q {q0 q1 q2} and E {e}, one sector over {c}; the only rule moves q0 to q1.
// Nothing touches the tape, so every component is finite.
SMachine switch_machine() {
  MachineBuilder mb("switch");
  const int q = mb.add_part("Q");
  const int e = mb.add_part("E");
  const SymbolId q0 = mb.state(q, "q0");
  const SymbolId q1 = mb.state(q, "q1");
  mb.state(q, "q2");
  const SymbolId ee = mb.state(e, "e");
  mb.finish_parts();
  mb.tape(0, "c");
  mb.add_rule(mb.draft("r", {q0, ee}, {q1, ee}));
  return mb.build({q0, ee}, {q1, ee}, 0);
}

}  // namespace

TEST_CASE("definite verdicts") {
  const SMachine lr = build_lr({"a", "b"});
  const AdmissibleWord src = parse_admissible(lr, "q1 a b p1 q2");
  const AdmissibleWord dst = parse_admissible(lr, "q1 a b p2 q2");
  const SearchResult yes = bidirectional_search(lr, src, {dst}, SearchOptions{});
  CHECK(yes.verdict == Verdict::yes);
  REQUIRE(yes.witness.has_value());
  CHECK(yes.witness->size() == 5);
  CHECK(run_history(lr, src, *yes.witness).end() == dst);
  CHECK(*yes.target == dst);
  CHECK_FALSE(yes.budget_exhausted);

  const SearchResult same = bidirectional_search(lr, src, {src}, SearchOptions{});
  CHECK(same.verdict == Verdict::yes);
  CHECK(same.witness->empty());

  const SMachine sw = switch_machine();
  const AdmissibleWord from = parse_admissible(sw, "q0 c c e");
  const SearchResult no = bidirectional_search(sw, from, {parse_admissible(sw, "q2 c c e")}, SearchOptions{});
  CHECK(no.verdict == Verdict::no);
  CHECK_FALSE(no.witness.has_value());
  CHECK(no.states <= 4);
  CHECK(bidirectional_search(sw, from, {parse_admissible(sw, "q1 c c e")}, SearchOptions{}).verdict == Verdict::yes);
  // The tape word is an invariant here.
  CHECK(bidirectional_search(sw, from, {parse_admissible(sw, "q1 c e")}, SearchOptions{}).verdict == Verdict::no);
}

TEST_CASE("caps turn a miss into unknown") {
  // The toy's component of alpha e0 is infinite: tb^-1 keeps adding alpha.
  const ToyRecognizer toy = toy_even();
  const AdmissibleWord src = toy.input_configuration(1);
  SearchOptions capped;
  capped.max_tape = 6;
  const SearchResult r = bidirectional_search(toy.machine, src, {toy.accept_configuration()}, capped);
  CHECK(r.verdict == Verdict::unknown);
  CHECK(r.tape_capped);
  SearchOptions small;
  small.max_states = 50;
  const SearchResult s = bidirectional_search(toy.machine, src, {toy.accept_configuration()}, small);
  CHECK(s.verdict == Verdict::unknown);
  CHECK(s.budget_exhausted);

  const SearchResult ok = bidirectional_search(toy.machine, toy.input_configuration(4), {toy.accept_configuration()}, capped);
  CHECK(ok.verdict == Verdict::yes);
  CHECK(run_history(toy.machine, toy.input_configuration(4), *ok.witness).end() == toy.accept_configuration());
}

TEST_CASE("rule filters") {
  const SMachine sw = switch_machine();
  SearchOptions none;
  none.allow = [](const Rule& r) { return r.label != "r"; };
  const SearchResult r = bidirectional_search(sw, parse_admissible(sw, "q0 e"), {parse_admissible(sw, "q1 e")}, none);
  CHECK(r.verdict == Verdict::no);
  CHECK(to_string(Verdict::unknown) == "unknown");
}

TEST_CASE("main machine: W(0,0) reaches W_ac without the first two sets") {
  const MainMachineBundle b = build_main_machine(toy_even(), 2, 12);
  SearchOptions opt;
  opt.max_tape = 4;
  opt.allow = [](const Rule& r) { return !MainMachineBundle::in_theta12(r); };
  const SearchResult r = bidirectional_search(b.machine, b.junction_word(0, 0), {b.w_ac}, opt);
  REQUIRE(r.verdict == Verdict::yes);
  CHECK(run_history(b.machine, b.junction_word(0, 0), *r.witness).end() == b.w_ac);
  CHECK(r.witness->size() == 32);
}
