// Runs every acceptance criterion against the default harness configuration
// and prints one PASS/FAIL line per criterion. Exit status is nonzero if any fails.
#include <chrono>
#include <cstdio>
#include <functional>
#include <map>
#include <string>

#include "smw/harness.hpp"

using namespace smw;

namespace {

struct Outcome {
  bool ok = false;
  std::string detail;
};

struct Timed {
  Report report;
  double seconds = 0;
};

std::string secs(double s) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.1fs", s);
  return buf;
}

bool all_parts_pass(const Report& r) {
  if (!r.contains("parts")) return r.at("status") == "pass";
  for (const auto& p : r.at("parts")) {
    if (p.at("status") != "pass") return false;
  }
  return r.at("status") == "pass";
}

Outcome roundtrip(const Timed& t, const HarnessContext& ctx) {
  const Report& r = t.report;
  const std::size_t machines = shipped_machines(ctx.bundle).size();
  bool words = r.at("machines").size() == machines;
  for (const auto& m : r.at("machines")) words = words && m.at("words").get<std::size_t>() >= 1000;
  const bool ok = r.at("status") == "pass" && words && t.seconds < 60;
  return {ok, std::to_string(machines) + " machines x " + std::to_string(ctx.config.roundtrip_words) +
                  " words, violations=" + r.at("violations").dump() + ", " + secs(t.seconds)};
}

Outcome lr_bound(const Timed& t) {
  const Report& r = t.report;
  const bool ok = r.at("status") == "pass" && r.at("max_tape") == 4 && r.at("violations") == 0 && t.seconds < 300;
  return {ok, "tape<=" + r.at("max_tape").dump() + ", computations=" + r.at("computations").dump() +
                  ", min_slack=" + r.at("min_slack").dump() + ", " + secs(t.seconds)};
}

Outcome wi_bound(const Timed& t) {
  const Report& r = t.report;
  bool ok = all_parts_pass(r) && r.at("parts").size() == 2 && t.seconds < 600;
  std::string detail;
  for (const auto& p : r.at("parts")) {
    ok = ok && p.at("depth") == 8 && p.at("violations") == 0;
    detail += p.at("machine").get<std::string>() + ": " + p.at("computations").dump() + " computations; ";
  }
  return {ok, detail + secs(t.seconds)};
}

Outcome chi(const Timed& t) {
  const Report& r = t.report;
  const bool ok = r.at("status") == "pass" && r.at("max_occurrences").get<int>() <= 1 &&
                  r.at("with_two_transitions").get<std::size_t>() > 0;
  return {ok, "depth " + r.at("depth").dump() + ", " + r.at("with_two_transitions").dump() +
                  " computations cross two transitions, max occurrences " + r.at("max_occurrences").dump()};
}

Outcome language(const Timed& t, const HarnessContext& ctx) {
  const Report& r = t.report;
  bool ok = r.at("status") == "pass" && r.at("disagreements") == 0 && t.seconds < 900;
  std::string detail;
  std::size_t definite = 0;
  for (const auto& row : r.at("rows")) {
    const std::string v = row.at("verdict");
    const bool accepts = ctx.bundle.toy.accepts(row.at("k").get<long>());
    if (v == "yes") {
      ok = ok && accepts && row.at("witness").at("replayed") == true;
      ++definite;
    } else if (v == "no") {
      ok = ok && !accepts;
      ++definite;
    } else {
      ok = ok && (row.at("budget_exhausted") == true || row.at("tape_capped") == true);
    }
    detail += "k=" + row.at("k").dump() + ":" + v + " ";
  }
  ok = ok && definite > 0;
  return {ok, detail + secs(t.seconds)};
}

Outcome norep(const Timed& t) {
  const Report& r = t.report;
  bool ok = all_parts_pass(r);
  std::map<long, bool> seen;
  for (const auto& p : r.at("parts")) {
    seen[p.at("k").get<long>()] = p.at("depth") == 8 && p.at("violations") == 0;
  }
  ok = ok && seen.count(0) && seen.at(0) && seen.count(2) && seen.at(2);
  return {ok, "W(0,0) and W(2,2) to depth 8, violations=0"};
}

Outcome presentation(const Timed& t, const HarnessContext& ctx) {
  const Report& r = t.report;
  const bool ok = r.at("status") == "pass" && r.at("mu_failures") == 0 && r.at("nu_failures") == 0 &&
                  r.at("superscript_failures") == 0 && r.at("hub_failures") == 0 &&
                  r.at("hub_length") == ctx.config.L * ctx.bundle.N;
  return {ok, r.at("relators").dump() + " relators, (θ,t) checked " + r.at("theta_t_checked").dump() +
                  ", hub length " + r.at("hub_length").dump()};
}

Outcome trapezia(const Timed& t) {
  const Report& r = t.report;
  const bool ok = r.at("status") == "pass" && r.at("computations") == 200 && r.at("passed") == 200;
  return {ok, r.at("passed").dump() + "/" + r.at("computations").dump() + " trapezia, " + r.at("cells").dump() +
                  " cells"};
}

Outcome disk(const Timed& t, const HarnessContext& ctx) {
  const Report& r = t.report;
  bool ok = r.at("status") == "pass";
  std::string detail;
  std::size_t rows = 0;
  for (const auto& row : r.at("rows")) {
    if (!row.contains("cells")) {
      ok = false;
      continue;
    }
    const std::size_t d = row.at("witness_length");
    const std::size_t bound = static_cast<std::size_t>(ctx.bundle.N) * static_cast<std::size_t>(ctx.config.L) * d;
    const std::size_t cells = row.at("cells");
    ok = ok && row.at("lower_bound") == bound && cells >= bound;
    detail += "k=" + row.at("k").dump() + ": " + std::to_string(cells) + ">=" + std::to_string(bound) + " ";
    ++rows;
  }
  std::size_t accepted = 0;
  for (long k = ctx.config.k_min; k <= ctx.config.k_max; ++k) accepted += ctx.bundle.toy.accepts(k);
  ok = ok && rows == accepted;
  return {ok, detail};
}

}  // namespace

int main() {
  const HarnessConfig cfg;
  const HarnessContext ctx(cfg);

  // First pass: one suite at a time, timed.
  std::map<std::string, Timed> runs;
  Report suites = Report::array();
  bool all = true;
  for (const std::string& name : suite_names()) {
    const auto t0 = std::chrono::steady_clock::now();
    Timed t;
    t.report = run_suite(name, ctx);
    t.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    all = all && t.report.at("status") == "pass";
    suites.push_back(t.report);
    runs[name] = std::move(t);
  }
  const Report first{{"config", ctx.config.to_json()}, {"suites", suites}, {"status", all ? "pass" : "fail"}};

  // Second pass: the whole suite through the runner, from a fresh context.
  const HarnessContext again(cfg);
  const Report second = run_suites(suite_names(), again);
  const std::string a = first.dump();
  const std::string b = second.dump();
  const Outcome determinism{a == b, std::to_string(a.size()) + " bytes, " + (a == b ? "identical" : "different")};

  const std::pair<const char*, Outcome> results[] = {
      {"rule-application round trip", roundtrip(runs.at("roundtrip"), ctx)},
      {"LR bound", lr_bound(runs.at("lr-bound"))},
      {"two-letter-base bound", wi_bound(runs.at("wi-bound"))},
      {"chi occurrences", chi(runs.at("chi"))},
      {"accepted-language agreement", language(runs.at("language"), ctx)},
      {"no return", norep(runs.at("norep"))},
      {"presentation audits", presentation(runs.at("presentation"), ctx)},
      {"trapezium correspondence", trapezia(runs.at("trapezia"))},
      {"disk-diagram cell count", disk(runs.at("disk"), ctx)},
      {"determinism", determinism},
  };
  int failed = 0;
  int i = 0;
  for (const auto& [name, o] : results) {
    std::printf("[%s] criterion %d %s: %s\n", o.ok ? "PASS" : "FAIL", ++i, name, o.detail.c_str());
    failed += !o.ok;
  }
  std::fflush(stdout);
  return failed ? 1 : 0;
}
