#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <random>

#include "smw/error.hpp"
#include "smw/harness.hpp"

using namespace smw;

namespace {

// Tries every split H1 | middle | H3 and every period of the middle block.
std::size_t cost_oracle(const History& h) {
  const std::size_t n = h.size();
  std::size_t best = 2 * n;
  for (std::size_t a = 0; a <= n; ++a) {
    for (std::size_t b = a + 1; b <= n; ++b) {
      const std::size_t len = b - a;
      for (std::size_t p = 1; p <= len; ++p) {
        if (len % p) continue;
        bool periodic = true;
        for (std::size_t i = a + p; i < b && periodic; ++i) periodic = h[i] == h[i - p];
        if (periodic) best = std::min(best, 2 * a + 3 * p + 2 * (n - b));
      }
    }
  }
  return best;
}

const HarnessContext& context() {
  static const HarnessContext ctx{HarnessConfig{}};
  return ctx;
}

}  // namespace

TEST_CASE("factorization cost") {
  CHECK(factorization_cost({}) == 0);
  CHECK(factorization_cost({4}) == 2);
  // k = 0: nothing periodic, cost 2||H||.
  CHECK(factorization_cost({1, 2, 3}) == 6);
  // (1 2)^3 costs 3·2 instead of 2·6.
  CHECK(factorization_cost({1, 2, 1, 2, 1, 2}) == 6);
  CHECK(factorization_cost({7, 1, 1, 1, 1, 9}) == 2 + 3 + 2);

  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 2000; ++trial) {
    History h(rng() % 10);
    for (RuleIndex& r : h) r = static_cast<RuleIndex>(rng() % 3);
    CHECK(factorization_cost(h) == cost_oracle(h));
  }
}

TEST_CASE("LR bound") {
  const SMachine lr = build_lr({"a"});
  // Full sweep over one letter: t = 3 against 4 + 4 - 2.
  const AdmissibleWord w0 = parse_admissible(lr, "q1 a p1 q2");
  const Computation c = run_history(lr, w0, parse_history(lr, "z1_a z12 z2_a"));
  CHECK(c.history.size() == 3);
  CHECK(w0.size() + c.end().size() - 2 == 6);

  const Report r0 = check_lr_bound(0);
  CHECK(r0.at("status") == "pass");
  CHECK(r0.at("violations") == 0);
  CHECK(r0.at("min_slack") == 3);  // the lone turn: 1 <= 3 + 3 - 2
  const Report r2 = check_lr_bound(2);
  CHECK(r2.at("status") == "pass");
  CHECK(r2.at("computations").get<std::size_t>() > r0.at("computations").get<std::size_t>());
}

TEST_CASE("two-letter-base bound on LR") {
  const SMachine lr = build_lr({"a", "b"});
  std::vector<AdmissibleWord> starts = two_letter_words(lr, 0, 1, false);
  CHECK_FALSE(starts.empty());
  for (const AdmissibleWord& w : starts) CHECK(base_of(lr, w).size() == 2);
  const Report r = check_wi_bound(lr, starts, 5, "LR");
  CHECK(r.at("status") == "pass");
  CHECK(r.at("violations") == 0);
  // Depth 0 leaves only empty computations, which hold trivially and are not counted.
  const Report d0 = check_wi_bound(lr, starts, 0, "LR");
  CHECK(d0.at("computations") == 0);
  CHECK(d0.at("status") == "pass");
}

TEST_CASE("chi occurrences") {
  const MainMachineBundle& b = context().bundle;
  const AdmissibleWord start = m3_input_configuration(b.m3, {}, *toy_accepting_history(b.toy, 0));
  const Report vacuous = check_chi_occurrences(b.m3, {start}, 0, 2);
  CHECK(vacuous.at("status") == "pass");
  CHECK(vacuous.at("max_occurrences") == 0);
  // Four rules reach chi1 along the canonical run.
  const Report one = check_chi_occurrences(b.m3, {start}, 4, 2);
  CHECK(one.at("status") == "pass");
  CHECK(one.at("max_occurrences") == 1);
}

TEST_CASE("no return") {
  const MainMachineBundle& b = context().bundle;
  const Report r = check_norep(b, 0, 1);
  CHECK(r.at("status") == "pass");
  CHECK(r.at("computations").get<std::size_t>() >= 2);
  // Single-step audit: no rule fixes W(0,0).
  for (RuleIndex k = 0; k < b.machine.rule_count(); ++k) {
    if (MainMachineBundle::in_theta12(b.machine.rule(k))) continue;
    const auto next = try_apply(b.machine, b.junction_word(0, 0), k);
    if (next) CHECK_FALSE(*next == b.junction_word(0, 0));
  }
}

TEST_CASE("periodic distinctness") {
  const SMachine lr = build_lr({"a", "b"});
  const std::vector<AdmissibleWord> starts = standard_words(lr, 2);
  const Report one = check_periodic_distinctness(lr, parse_history(lr, "z1_a"), starts, 5);
  CHECK(one.at("status") == "pass");
  // z1_a z1_a^-1 always returns to its start, so every run is cut.
  const Report back = check_periodic_distinctness(lr, parse_history(lr, "z1_a z1_a^-1"), starts, 5);
  CHECK(back.at("status") == "pass");
  CHECK(back.at("hypothesis_cut").get<std::size_t>() > 0);
}

TEST_CASE("presentation audit and trapezia") {
  const HarnessContext& ctx = context();
  const Report audit = presentation_audit(ctx.group, ctx.bundle);
  CHECK(audit.at("status") == "pass");
  CHECK(audit.at("mu_failures") == 0);
  CHECK(audit.at("hub_length") == ctx.group.L() * ctx.group.N());
  CHECK(audit.at("trimmed_superscripted_generators") == 0);
  const Report t = check_trapezium_correspondence(ctx.bundle, ctx.group, 20);
  CHECK(t.at("status") == "pass");
  CHECK(t.at("passed") == 20);
}

TEST_CASE("round trip suite") {
  const Report r = check_roundtrip({build_lr({"a"}), toy_all().machine}, 50, 9);
  CHECK(r.at("status") == "pass");
  CHECK(r.at("machines").size() == 2);
  CHECK(r.at("machines")[0].at("words") == 50);
  CHECK(check_roundtrip({build_lr({"a"})}, 50, 9).dump() == check_roundtrip({build_lr({"a"})}, 50, 9).dump());
}

TEST_CASE("config and runners") {
  HarnessConfig cfg;
  cfg.lr_max_tape = 2;
  cfg.seed = 77;
  cfg.tape_caps = {4, 8};
  const HarnessConfig back = HarnessConfig::from_json(cfg.to_json());
  CHECK(back.to_json().dump() == cfg.to_json().dump());
  CHECK(suite_names().size() == 10);

  const HarnessContext& ctx = context();
  CHECK_THROWS_AS(run_suite("nope", ctx), Error);
  const Report a = run_suites({"roundtrip", "chi"}, ctx);
  CHECK(report_passed(a));
  CHECK(a.at("suites")[0].at("suite") == "roundtrip");
  CHECK(a.at("suites")[1].at("suite") == "chi");
  HarnessConfig two = ctx.config;
  two.jobs = 2;
  HarnessContext ctx2(two);
  const Report b = run_suites({"roundtrip", "chi"}, ctx2);
  CHECK(a.at("suites").dump() == b.at("suites").dump());
  const std::string text = render_report(a);
  CHECK(text.find("PASS roundtrip") != std::string::npos);
  CHECK(text.find("all suites passed") != std::string::npos);
}

TEST_CASE("language experiment rows") {
  const MainMachineBundle& b = context().bundle;
  LanguageOptions opt;
  opt.tape_caps = {4};
  opt.max_states = 20000;
  const Report r = accepted_language_experiment(b, 0, 1, opt);
  CHECK(r.at("status") == "pass");
  REQUIRE(r.at("rows").size() == 2);
  CHECK(r.at("rows")[0].at("verdict") == "yes");
  CHECK(r.at("rows")[0].at("witness").at("replayed") == true);
  CHECK(r.at("rows")[1].at("verdict") != "yes");
}
