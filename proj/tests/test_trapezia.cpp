#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>
#include <fstream>
#include <sstream>

#include "smw/error.hpp"
#include "smw/trapezia.hpp"

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

const MainMachineBundle& bundle() {
  static const MainMachineBundle b = build_main_machine(toy_even(), 2, 12);
  return b;
}

const Presentation& group_G() {
  static const Presentation g = compile_group_G(bundle());
  return g;
}

Word power(const Word& w, int n) {
  Word out;
  for (int i = 0; i < n; ++i) out.insert(out.end(), w.begin(), w.end());
  return out;
}

// Compares with tests/golden/<name>; SMW_UPDATE_GOLDEN=1 rewrites the file instead.
void check_golden(const std::string& name, const std::string& actual) {
  const std::string path = std::string(SMW_GOLDEN_DIR) + "/" + name;
  if (std::getenv("SMW_UPDATE_GOLDEN")) {
    std::ofstream(path) << actual;
    return;
  }
  std::ifstream in(path);
  REQUIRE_MESSAGE(in.good(), "missing golden file " << path);
  std::ostringstream expected;
  expected << in.rdbuf();
  CHECK(expected.str() == actual);
}

}  // namespace

TEST_CASE("lifting words") {
  const MainMachineBundle& b = bundle();
  const SMachine& m = b.machine;
  const Word w = b.w_st.letters();
  // W^L lifted from 1 is W^(1) W^(2) ... W^(L): the superscript steps up at each t.
  Word expected;
  for (int i = 1; i <= b.L; ++i) {
    const Word wi = with_superscript(w, i);
    expected.insert(expected.end(), wi.begin(), wi.end());
  }
  const PermissibleWord lifted = lift_word(m, power(w, b.L), 1, b.L);
  CHECK(lifted.letters == expected);
  CHECK(erase_superscripts(lifted.letters) == power(w, b.L));
  CHECK(is_permissible(m, lifted.letters, b.L));
  // Wrapping modulo L.
  const PermissibleWord wrap = lift_word(m, power(w, 2), b.L, b.L);
  CHECK(wrap.letters.front().superscript == b.L);
  CHECK(wrap.letters[w.size()].superscript == 1);
  CHECK(lift_word(m, w, 0, b.L).letters == w);
  CHECK(is_permissible(m, w, b.L));
  Word broken = lifted.letters;
  broken[3].superscript = 7;
  CHECK_FALSE(is_permissible(m, broken, b.L));
}

TEST_CASE("permissible words for single rules") {
  const MainMachineBundle& b = bundle();
  const SMachine& m = b.machine;
  const RuleIndex start = m.rule_at("start");
  const PermissibleWord v = make_permissible(b, b.w_st, start, 4);
  CHECK(v.letters.front().superscript == 4);
  CHECK(erase_superscripts(v.letters) == b.w_st.letters());
  CHECK(code_of([&] { make_permissible(b, b.w_st, start, std::nullopt); }) == ErrorCode::superscript_required);
  const AdmissibleWord w00 = b.junction_word(0, 0);
  const RuleIndex t34 = m.rule_at("t34");
  const AdmissibleWord before = run_history(m, w00, parse_history(m, "ins_tacc")).end();
  CHECK(make_permissible(b, before, t34, std::nullopt).letters == before.letters());
  CHECK(code_of([&] { make_permissible(b, before, t34, 2); }) == ErrorCode::superscript_forbidden);
  // θ(23) itself takes the superscripted side.
  const AdmissibleWord pre = run_history(m, b.w_st, parse_history(m, "start t12 L_turn1 L_turn2 L_turn3")).end();
  CHECK(make_permissible(b, pre, m.rule_at("t23"), 1).letters.front().superscript == 1);
}

TEST_CASE("trapezium of the path to the junction") {
  const MainMachineBundle& b = bundle();
  const Presentation& g = group_G();
  const Computation c = run_history(b.machine, b.w_st, b.history_to_junction(0));
  const Trapezium t = computation_to_trapezium(b, g, c, 3);
  CHECK(t.height() == c.history.size());
  CHECK(t.history == c.history);
  const TrapeziumCheck ok = check_trapezium(b, g, t, c);
  CHECK_MESSAGE(ok.ok, ok.failure);
  // Each band of a standard-base word has one (θ,q)-cell per part.
  std::size_t area = 0;
  for (const ThetaBand& band : t.bands) {
    std::size_t q_cells = 0;
    for (const Cell& cell : band.cells) {
      q_cells += cell.kind == RelatorKind::theta_q;
      CHECK(g.has_relator(cell.boundary()));
    }
    CHECK(q_cells == static_cast<std::size_t>(b.N));
    area += band.cells.size();
  }
  CHECK(trapezium_area(t) == area);
  CHECK(area == 150);
  check_golden("junction_k0.txt", dump_trapezium(b, g, t));
}

TEST_CASE("trapezium of an accepting computation") {
  const MainMachineBundle& b = bundle();
  const Presentation& g = group_G();
  const Computation c = run_history(b.machine, b.junction_word(0, 0), *b.accepting_history(0));
  const Trapezium t = computation_to_trapezium(b, g, c, std::nullopt);
  CHECK(t.height() == 32);
  const TrapeziumCheck ok = check_trapezium(b, g, t, c);
  CHECK_MESSAGE(ok.ok, ok.failure);
  for (const ThetaBand& band : t.bands) {
    for (const Cell& cell : band.cells) CHECK(cell.left.superscript == 0);
  }
  check_golden("accept_k0.txt", dump_trapezium(b, g, t));
}

TEST_CASE("θ(23) followed by its inverse") {
  const MainMachineBundle& b = bundle();
  const Presentation& g = group_G();
  History h = b.history_to_junction(1);
  const RuleIndex t23 = b.machine.rule_at("t23");
  h.push_back(SMachine::inverse_of(t23));
  const Computation c = run_history(b.machine, b.w_st, h);
  CHECK(c.end() == c.trace[c.trace.size() - 3]);
  const Trapezium t = computation_to_trapezium(b, g, c, 2);
  const TrapeziumCheck ok = check_trapezium(b, g, t, c);
  CHECK_MESSAGE(ok.ok, ok.failure);
}

TEST_CASE("trapezium errors") {
  const MainMachineBundle& b = bundle();
  const Presentation& g = group_G();
  const Computation empty = run_history(b.machine, b.w_st, {});
  CHECK(code_of([&] { computation_to_trapezium(b, g, empty, 1); }) == ErrorCode::empty_history);
  const History back = parse_history(b.machine, "start start^-1");
  const Computation c = run_history(b.machine, b.w_st, back);
  CHECK(code_of([&] { computation_to_trapezium(b, g, c, 1); }) == ErrorCode::ineligible_history);
  // A tampered trapezium is rejected.
  const Computation good = run_history(b.machine, b.w_st, b.history_to_junction(0));
  Trapezium t = computation_to_trapezium(b, g, good, 1);
  t.bands[1].cells[0].right = t.bands[1].cells[0].right.inv();
  CHECK_FALSE(check_trapezium(b, g, t, good).ok);
}

TEST_CASE("disk words") {
  const MainMachineBundle& b = bundle();
  const Presentation& g = group_G();
  SearchOptions opt;
  opt.max_states = 20000;
  opt.max_tape = 4;

  const Word w00 = b.junction_word(0, 0).letters();
  const DiskVerdict yes = is_disk_word(b, PermissibleWord{power(w00, b.L)}, opt);
  CHECK(yes.verdict == Verdict::yes);
  REQUIRE(yes.root.has_value());
  CHECK(*yes.root == b.junction_word(0, 0));
  REQUIRE(yes.witness.has_value());
  const std::size_t cells = disk_diagram_cells(b, g, *yes.root, *yes.witness);
  const Trapezium t = computation_to_trapezium(b, g, *yes.witness, 1);
  CHECK(cells == 1 + static_cast<std::size_t>(b.L) * trapezium_area(t));
  CHECK(cells >= static_cast<std::size_t>(b.N * b.L) * yes.witness->history.size());

  // Superscripted lifts are disk words too.
  const DiskVerdict lifted = is_disk_word(b, lift_word(b.machine, power(w00, b.L), 1, b.L), opt);
  CHECK(lifted.verdict == Verdict::yes);

  // Not an L-th power.
  Word mixed = power(w00, b.L - 1);
  const Word w22 = b.junction_word(2, 2).letters();
  mixed.insert(mixed.end(), w22.begin(), w22.end());
  CHECK(is_disk_word(b, PermissibleWord{mixed}, opt).verdict == Verdict::no);
  CHECK(is_disk_word(b, PermissibleWord{power(w00, b.L - 1)}, opt).verdict == Verdict::no);

  // The accept configuration is the hub alone.
  const DiskVerdict ac = is_disk_word(b, PermissibleWord{power(b.w_ac.letters(), b.L)}, opt);
  CHECK(ac.verdict == Verdict::yes);
  CHECK(disk_diagram_cells(b, g, b.w_ac, run_history(b.machine, b.w_ac, {})) == 1);

  // A computation that misses both ends is no witness.
  const Computation stray = run_history(b.machine, b.junction_word(1, 1), parse_history(b.machine, "ins_ta"));
  CHECK(code_of([&] { disk_diagram_cells(b, g, b.junction_word(1, 1), stray); }) == ErrorCode::witness_invalid);
}
