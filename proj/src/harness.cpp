#include "smw/harness.hpp"

#include <algorithm>
#include <atomic>
#include <functional>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <thread>
#include <unordered_set>

#include "smw/error.hpp"
#include "smw/trapezia.hpp"

namespace smw {

namespace {

constexpr std::size_t kKeptViolations = 10;

// Counts every violation, keeps the first few as replayable reproductions.
struct Violations {
  std::size_t count = 0;
  Report list = Report::array();

  void add(const SMachine& m, const AdmissibleWord& start, const History& h, const std::string& check,
           const std::string& detail) {
    ++count;
    if (list.size() >= kKeptViolations) return;
    list.push_back(Report{{"check", check},
                          {"machine", m.name()},
                          {"start", to_string(m, start)},
                          {"history", history_to_string(m, h)},
                          {"detail", detail}});
  }
  void finish(Report& r) const {
    r["violations"] = count;
    r["reproductions"] = list;
    r["status"] = count == 0 ? "pass" : "fail";
  }
};

Report suite_header(const std::string& name) { return Report{{"suite", name}}; }

std::size_t pick(std::mt19937_64& rng, std::size_t n) { return static_cast<std::size_t>(rng() % n); }

const std::vector<SymbolId>& domain_letters(const SMachine& m, const Rule& r, int s) {
  const SectorDomain& d = r.domains[static_cast<std::size_t>(s)];
  static const std::vector<SymbolId> none;
  if (d.is_locked()) return none;
  return d.mode == SectorDomain::Mode::subset ? d.letters : m.hardware().sector_letters[static_cast<std::size_t>(s)];
}

Word random_reduced(std::mt19937_64& rng, const std::vector<SymbolId>& letters, std::size_t length) {
  Word w;
  if (letters.empty()) return w;
  while (w.size() < length) {
    Letter x{letters[pick(rng, letters.size())], 0, rng() % 2 == 1};
    if (!w.empty() && w.back() == x.inv()) continue;
    w.push_back(x);
  }
  return w;
}

std::vector<long> accepted_ks(const MainMachineBundle& b, long k_min, long k_max) {
  std::vector<long> ks;
  for (long k = k_min; k <= k_max; ++k) {
    if (b.toy.accepts(k)) ks.push_back(k);
  }
  return ks;
}

}  // namespace

Report HarnessConfig::to_json() const {
  Report caps = Report::array();
  for (std::size_t c : tape_caps) caps.push_back(c);
  return Report{{"toy", toy},
                {"m", m},
                {"L", L},
                {"seed", seed},
                {"roundtrip_words", roundtrip_words},
                {"lr_max_tape", lr_max_tape},
                {"wi_depth", wi_depth},
                {"wi_max_tape", wi_max_tape},
                {"wi_fragment_max_tape", wi_fragment_max_tape},
                {"chi_depth", chi_depth},
                {"chi_tape_slack", chi_tape_slack},
                {"norep_depth", norep_depth},
                {"periodic_periods", periodic_periods},
                {"periodic_max_tape", periodic_max_tape},
                {"k_min", k_min},
                {"k_max", k_max},
                {"tape_caps", caps},
                {"max_states", max_states},
                {"trapezia", trapezia}};
}

HarnessConfig HarnessConfig::from_json(const Report& j) {
  HarnessConfig c;
  auto get = [&j](const char* key, auto& field) {
    if (j.contains(key)) field = j.at(key).get<std::decay_t<decltype(field)>>();
  };
  get("toy", c.toy);
  get("m", c.m);
  get("L", c.L);
  get("seed", c.seed);
  get("roundtrip_words", c.roundtrip_words);
  get("lr_max_tape", c.lr_max_tape);
  get("wi_depth", c.wi_depth);
  get("wi_max_tape", c.wi_max_tape);
  get("wi_fragment_max_tape", c.wi_fragment_max_tape);
  get("chi_depth", c.chi_depth);
  get("chi_tape_slack", c.chi_tape_slack);
  get("norep_depth", c.norep_depth);
  get("periodic_periods", c.periodic_periods);
  get("periodic_max_tape", c.periodic_max_tape);
  get("k_min", c.k_min);
  get("k_max", c.k_max);
  get("tape_caps", c.tape_caps);
  get("max_states", c.max_states);
  get("trapezia", c.trapezia);
  return c;
}

HarnessContext::HarnessContext(const HarnessConfig& cfg)
    : config(cfg), bundle(build_main_machine(toy_by_name(cfg.toy), cfg.m, cfg.L)), group(compile_group_G(bundle)) {}

std::vector<SMachine> shipped_machines(const MainMachineBundle& b) {
  const std::vector<std::string> ab{"a", "b"};
  std::vector<SMachine> out;
  out.push_back(toy_even().machine);
  out.push_back(toy_all().machine);
  out.push_back(build_lr(ab));
  out.push_back(build_rl(ab));
  out.push_back(build_lr_m(ab, b.m));
  SMachine m2 = add_history_sectors(b.toy.machine);
  SMachine m2bar = add_control_letters(m2);
  out.push_back(m2);
  out.push_back(m2bar);
  out.push_back(b.m3);
  SMachine m4 = mirror_m4(b.m3);
  out.push_back(circularize_m5(m4));
  out.push_back(std::move(m4));
  out.push_back(b.machine);
  out.push_back(build_trimmed_machine(b));
  return out;
}

std::vector<Word> reduced_words(const std::vector<SymbolId>& letters, std::size_t max_length) {
  std::vector<Word> out{Word{}};
  std::size_t layer = 0;
  for (std::size_t len = 1; len <= max_length; ++len) {
    const std::size_t end = out.size();
    for (std::size_t i = layer; i < end; ++i) {
      for (SymbolId s : letters) {
        for (bool inv : {false, true}) {
          Letter x{s, 0, inv};
          if (!out[i].empty() && out[i].back() == x.inv()) continue;
          Word w = out[i];
          w.push_back(x);
          out.push_back(std::move(w));
        }
      }
    }
    layer = end;
  }
  return out;
}

std::vector<AdmissibleWord> standard_words(const SMachine& m, std::size_t max_tape) {
  const Hardware& hw = m.hardware();
  const int P = hw.part_count();
  const int sectors = P - 1;  // the wrap sector of a circular machine stays empty
  std::vector<std::vector<Word>> tapes;
  for (int s = 0; s < sectors; ++s) tapes.push_back(reduced_words(hw.sector_letters[static_cast<std::size_t>(s)], max_tape));

  std::vector<std::vector<Word>> fillings;
  std::vector<Word> cur;
  std::function<void(int, std::size_t)> fill = [&](int s, std::size_t left) {
    if (s == sectors) {
      fillings.push_back(cur);
      return;
    }
    for (const Word& u : tapes[static_cast<std::size_t>(s)]) {
      if (u.size() > left) break;
      cur.push_back(u);
      fill(s + 1, left - u.size());
      cur.pop_back();
    }
  };
  fill(0, max_tape);

  std::vector<AdmissibleWord> out;
  std::vector<SymbolId> letters(static_cast<std::size_t>(P));
  std::function<void(int)> choose = [&](int p) {
    if (p == P) {
      for (const auto& f : fillings) out.push_back(standard_configuration(m, letters, f));
      return;
    }
    for (SymbolId q : hw.part_letters[static_cast<std::size_t>(p)]) {
      letters[static_cast<std::size_t>(p)] = q;
      choose(p + 1);
    }
  };
  choose(0);
  return out;
}

std::vector<AdmissibleWord> two_letter_words(const SMachine& m, int sector, std::size_t max_tape, bool from_rules,
                                             const std::function<bool(const Rule&)>& allow) {
  const Hardware& hw = m.hardware();
  const int p = sector;
  const int p1 = (sector + 1) % hw.part_count();
  const auto& left_letters = hw.part_letters[static_cast<std::size_t>(p)];
  const auto& right_letters = hw.part_letters[static_cast<std::size_t>(p1)];
  std::set<std::pair<SymbolId, SymbolId>> pairs;
  std::set<SymbolId> lefts, rights;
  if (from_rules) {
    for (const Rule& r : m.rules()) {
      if (allow && !allow(r)) continue;
      SymbolId a = r.parts[static_cast<std::size_t>(p)].from;
      SymbolId c = r.parts[static_cast<std::size_t>(p1)].from;
      pairs.emplace(a, c);
      lefts.insert(a);
      rights.insert(c);
    }
  } else {
    for (SymbolId a : left_letters) {
      lefts.insert(a);
      for (SymbolId c : right_letters) pairs.emplace(a, c);
    }
    rights.insert(right_letters.begin(), right_letters.end());
  }
  const std::vector<Word> tapes = reduced_words(hw.sector_letters[static_cast<std::size_t>(sector)], max_tape);
  std::vector<AdmissibleWord> out;
  auto emit = [&](Letter a, Letter c) {
    for (const Word& u : tapes) {
      if (u.empty() && a == c.inv()) continue;  // q q^-1 is not reduced
      Word w{a};
      w.insert(w.end(), u.begin(), u.end());
      w.push_back(c);
      out.emplace_back(m, std::move(w));
    }
  };
  for (auto [a, c] : pairs) emit(Letter{a, 0, false}, Letter{c, 0, false});
  for (SymbolId a : lefts) emit(Letter{a, 0, false}, Letter{a, 0, true});
  for (SymbolId c : rights) emit(Letter{c, 0, true}, Letter{c, 0, false});
  return out;
}

Report check_roundtrip(const std::vector<SMachine>& machines, std::size_t words_per_machine, std::uint64_t seed) {
  Report r = suite_header("roundtrip");
  Violations v;
  Report rows = Report::array();
  for (std::size_t mi = 0; mi < machines.size(); ++mi) {
    const SMachine& m = machines[mi];
    std::mt19937_64 rng(seed + mi);
    const int P = m.hardware().part_count();
    std::size_t distinct = 0;
    std::unordered_set<AdmissibleWord, AdmissibleWordHash> seen;
    for (std::size_t i = 0; i < words_per_machine; ++i) {
      const RuleIndex k = static_cast<RuleIndex>(pick(rng, m.rule_count()));
      const Rule& rule = m.rule(k);
      std::vector<SymbolId> letters;
      for (int p = 0; p < P; ++p) letters.push_back(rule.parts[static_cast<std::size_t>(p)].from);
      std::vector<Word> tapes;
      for (int s = 0; s + 1 < P; ++s) tapes.push_back(random_reduced(rng, domain_letters(m, rule, s), pick(rng, 7)));
      const AdmissibleWord w = standard_configuration(m, letters, tapes);
      if (seen.insert(w).second) ++distinct;
      auto there = try_apply(m, w, k);
      if (!there) {
        v.add(m, w, {k}, "applicable", "rule does not apply to a word built for it");
        continue;
      }
      auto back = try_apply(m, *there, SMachine::inverse_of(k));
      if (!back || !(*back == w)) v.add(m, w, {k, SMachine::inverse_of(k)}, "roundtrip", "inverse does not restore the word");
    }
    rows.push_back(Report{{"machine", m.name()}, {"rules", m.rule_count()}, {"words", words_per_machine}, {"distinct", distinct}});
  }
  r["machines"] = rows;
  v.finish(r);
  return r;
}

Report check_lr_bound(int max_tape) {
  Report r = suite_header("lr-bound");
  const SMachine lr = build_lr({"a", "b"});
  const std::size_t T = static_cast<std::size_t>(max_tape);
  const int depth = 2 * max_tape + 5;  // one past the largest bound a confined word allows
  Violations v;
  std::size_t starts = 0, computations = 0, longest = 0;
  long min_slack = -1, max_slack = -1;
  for (const AdmissibleWord& w0 : standard_words(lr, T)) {
    ++starts;
    EnumerationOptions opt;
    opt.depth = depth;
    opt.max_tape = T;
    for_each_computation(lr, w0, opt, [&](const ComputationView& c) {
      if (c.history.empty()) return true;
      ++computations;
      const long t = static_cast<long>(c.history.size());
      const long bound = static_cast<long>(c.start().size() + c.end().size()) - 2;
      longest = std::max(longest, c.history.size());
      const long slack = bound - t;
      if (min_slack < 0 || slack < min_slack) min_slack = slack;
      max_slack = std::max(max_slack, slack);
      if (t > bound) {
        v.add(lr, c.start(), History(c.history.begin(), c.history.end()), "t <= |W0|+|Wt|-2",
              "t=" + std::to_string(t) + " bound=" + std::to_string(bound));
      }
      return true;
    });
  }
  r["machine"] = lr.name();
  r["max_tape"] = max_tape;
  r["depth"] = depth;
  r["starts"] = starts;
  r["computations"] = computations;
  r["longest"] = longest;
  r["min_slack"] = min_slack;
  r["max_slack"] = max_slack;
  v.finish(r);
  return r;
}

std::size_t factorization_cost(const History& h) {
  const std::size_t t = h.size();
  std::size_t best = 2 * t;  // k = 0
  for (std::size_t a = 0; a < t; ++a) {
    for (std::size_t p = 1; a + p <= t; ++p) {
      std::size_t len = p;
      while (a + len < t && h[a + len] == h[a + len - p]) ++len;
      const std::size_t k = len / p;
      best = std::min(best, 2 * a + 3 * p + 2 * (t - a - k * p));
    }
  }
  return best;
}

namespace {

// Rules grouped by their action on the letters of a fixed base.
struct RuleClasses {
  std::vector<RuleIndex> reps;      // in enumeration order
  std::map<RuleIndex, std::size_t> size;
  std::map<RuleIndex, RuleIndex> rep_of;
};

RuleClasses classes_on_base(const SMachine& m, const AdmissibleWord& w,
                            const std::function<bool(const Rule&)>& allow) {
  const Hardware& hw = m.hardware();
  std::vector<int> parts, sectors;
  const Word& x = w.letters();
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!m.alphabet().is_state(x[i].symbol)) continue;
    const int part = m.alphabet().info(x[i].symbol).part;
    parts.push_back(part);
    auto s = x[i].inverse ? hw.sector_left_of(part) : hw.sector_right_of(part);
    if (s && i + 1 < x.size()) sectors.push_back(*s);
  }
  std::map<std::vector<std::uint64_t>, RuleIndex> by_key;
  RuleClasses c;
  for (RuleIndex k : m.enumeration_order()) {
    const Rule& r = m.rule(k);
    if (allow && !allow(r)) continue;
    std::vector<std::uint64_t> key;
    auto put_word = [&key](const Word& u) {
      key.push_back(u.size());
      for (const Letter& l : u) key.push_back((std::uint64_t{l.symbol} << 1) | (l.inverse ? 1u : 0u));
    };
    for (int p : parts) {
      const RulePart& rp = r.parts[static_cast<std::size_t>(p)];
      key.push_back(rp.from);
      key.push_back(rp.to);
      put_word(rp.left);
      put_word(rp.right);
    }
    for (int s : sectors) {
      const SectorDomain& d = r.domains[static_cast<std::size_t>(s)];
      key.push_back(static_cast<std::uint64_t>(d.mode));
      for (SymbolId y : d.letters) key.push_back(y);
      key.push_back(~std::uint64_t{0});
    }
    auto [it, fresh] = by_key.emplace(std::move(key), k);
    if (fresh) c.reps.push_back(k);
    c.rep_of[k] = it->second;
    ++c.size[it->second];
  }
  return c;
}

}  // namespace

Report check_wi_bound(const SMachine& m, const std::vector<AdmissibleWord>& starts, int depth,
                      const std::string& label, const std::function<bool(const Rule&)>& allow) {
  Report r = suite_header("wi-bound");
  Violations v;
  std::size_t computations = 0, periodic = 0;
  long min_slack = -1;
  for (const AdmissibleWord& w0 : starts) {
    const RuleClasses cls = classes_on_base(m, w0, allow);
    std::vector<AdmissibleWord> trace{w0};
    History h;
    std::vector<std::size_t> lengths{w0.size()};
    std::function<void(int)> walk = [&](int left) {
      if (!h.empty()) {
        ++computations;
        const std::size_t cost = factorization_cost(h);
        if (cost < 2 * h.size()) ++periodic;
        const std::size_t peak = *std::max_element(lengths.begin(), lengths.end());
        const long bound = static_cast<long>(w0.size() + trace.back().size() + cost);
        const long slack = bound - static_cast<long>(peak);
        if (min_slack < 0 || slack < min_slack) min_slack = slack;
        if (slack < 0) v.add(m, w0, h, "||Wi|| <= bound", "peak=" + std::to_string(peak) + " bound=" + std::to_string(bound));
      }
      if (left == 0) return;
      const AdmissibleWord w = trace.back();
      for (RuleIndex k : cls.reps) {
        if (!h.empty()) {
          const RuleIndex back = cls.rep_of.at(SMachine::inverse_of(h.back()));
          if (k == back && cls.size.at(k) < 2) continue;
        }
        auto next = try_apply(m, w, k);
        if (!next) continue;
        lengths.push_back(next->size());
        trace.push_back(std::move(*next));
        h.push_back(k);
        walk(left - 1);
        h.pop_back();
        trace.pop_back();
        lengths.pop_back();
      }
    };
    walk(depth);
  }
  r["machine"] = label;
  r["depth"] = depth;
  r["starts"] = starts.size();
  r["computations"] = computations;
  r["periodic_histories"] = periodic;
  r["min_slack"] = min_slack;
  v.finish(r);
  return r;
}

Report check_chi_occurrences(const SMachine& m3, const std::vector<AdmissibleWord>& starts, int depth,
                             int tape_slack) {
  Report r = suite_header("chi");
  Violations v;
  std::size_t computations = 0, two_transitions = 0, max_occurrences = 0;
  for (const AdmissibleWord& w0 : starts) {
    EnumerationOptions opt;
    opt.depth = depth;
    opt.max_tape = tape_length(m3, w0.letters()) + static_cast<std::size_t>(tape_slack);
    for_each_computation(m3, w0, opt, [&](const ComputationView& c) {
      if (c.history.empty()) return true;
      ++computations;
      std::map<int, std::size_t> count;
      for (RuleIndex k : c.history) {
        const RuleTag& t = m3.rule(k).tag;
        if (t.family == "chi") ++count[t.index];
      }
      if (count.size() >= 2) ++two_transitions;
      for (auto [index, n] : count) {
        max_occurrences = std::max(max_occurrences, n);
        if (n > 1) {
          v.add(m3, c.start(), History(c.history.begin(), c.history.end()), "chi at most once",
                "chi" + std::to_string(index) + " occurs " + std::to_string(n) + " times");
          return false;
        }
      }
      return true;
    });
  }
  r["machine"] = m3.name();
  r["depth"] = depth;
  r["tape_slack"] = tape_slack;
  r["starts"] = starts.size();
  r["computations"] = computations;
  r["with_two_transitions"] = two_transitions;
  r["max_occurrences"] = max_occurrences;
  v.finish(r);
  return r;
}

Report check_norep(const MainMachineBundle& b, long k, int depth) {
  Report r = suite_header("norep");
  Violations v;
  const AdmissibleWord w = b.junction_word(k, k);
  EnumerationOptions opt;
  opt.depth = depth;
  opt.allow = [](const Rule& rule) { return !MainMachineBundle::in_theta12(rule); };
  std::size_t computations = 0;
  for_each_computation(b.machine, w, opt, [&](const ComputationView& c) {
    if (c.history.empty()) return true;
    ++computations;
    if (c.end() == w) v.add(b.machine, w, History(c.history.begin(), c.history.end()), "no return", "returns to W(k,k)");
    return true;
  });
  r["k"] = k;
  r["depth"] = depth;
  r["computations"] = computations;
  v.finish(r);
  return r;
}

Report check_periodic_distinctness(const SMachine& m, const History& h, const std::vector<AdmissibleWord>& starts,
                                   int periods) {
  Report r = suite_header("periodic");
  Violations v;
  const std::size_t p = h.size();
  std::size_t computations = 0, cut = 0, boundaries = 0;
  if (p == 0) throw Error(ErrorCode::empty_history, "a period must be nonempty");
  for (const AdmissibleWord& w0 : starts) {
    for (std::size_t o = 0; o < p; ++o) {
      std::vector<AdmissibleWord> trace{w0};
      History hist;
      for (std::size_t i = 0; i < static_cast<std::size_t>(periods) * p; ++i) {
        const RuleIndex k = h[(o + i) % p];
        auto next = try_apply(m, trace.back(), k);
        if (!next) break;
        trace.push_back(std::move(*next));
        hist.push_back(k);
        // A full period returning to its own start breaks the hypothesis: stop before it.
        const std::size_t j = trace.size() - 1;
        if (j >= p && (o + j) % p == 0 && trace[j] == trace[j - p]) {
          ++cut;
          trace.pop_back();
          hist.pop_back();
          break;
        }
      }
      if (hist.empty()) continue;
      ++computations;
      std::unordered_set<AdmissibleWord, AdmissibleWordHash> seen;
      for (std::size_t j = 0; j < trace.size(); ++j) {
        if ((o + j) % p != 0) continue;
        ++boundaries;
        if (!seen.insert(trace[j]).second) {
          v.add(m, w0, hist, "distinct boundary words", "boundary word at " + std::to_string(j) + " repeats");
          break;
        }
      }
    }
  }
  r["machine"] = m.name();
  r["period"] = history_to_string(m, h);
  r["periods"] = periods;
  r["starts"] = starts.size();
  r["computations"] = computations;
  r["boundary_words"] = boundaries;
  r["hypothesis_cut"] = cut;
  v.finish(r);
  return r;
}

Report accepted_language_experiment(const MainMachineBundle& b, long k_min, long k_max, const LanguageOptions& opt) {
  Report r = suite_header("language");
  Report rows = Report::array();
  std::size_t disagreements = 0;
  const SMachine& m = b.machine;
  for (long k = k_min; k <= k_max; ++k) {
    const bool reference = b.toy.accepts(k);
    const AdmissibleWord w = b.junction_word(k, k);
    SearchResult res;
    std::size_t cap = 0;
    for (std::size_t c : opt.tape_caps) {
      SearchOptions so;
      so.max_states = opt.max_states;
      so.max_tape = c;
      so.allow = [](const Rule& rule) { return !MainMachineBundle::in_theta12(rule); };
      res = bidirectional_search(m, w, {b.w_ac}, so);
      cap = c;
      if (res.verdict != Verdict::unknown) break;
    }
    Report row{{"k", k}, {"reference", reference ? "accept" : "reject"}, {"verdict", std::string(to_string(res.verdict))},
               {"tape_cap", cap}, {"states", res.states}, {"budget_exhausted", res.budget_exhausted},
               {"tape_capped", res.tape_capped}};
    std::string agreement = "agree";
    if (res.verdict == Verdict::yes) {
      bool replayed = false;
      bool clean = true;
      try {
        Computation c = run_history(m, w, *res.witness);
        replayed = c.end() == b.w_ac;
      } catch (const Error&) {
        replayed = false;
      }
      for (RuleIndex k2 : *res.witness) clean = clean && !MainMachineBundle::in_theta12(m.rule(k2));
      row["witness"] = Report{{"length", res.witness->size()},
                              {"history", history_to_string(m, *res.witness)},
                              {"replayed", replayed && clean}};
      if (!reference || !replayed || !clean) agreement = "disagree";
    } else if (res.verdict == Verdict::no) {
      if (reference) agreement = "disagree";
    } else {
      agreement = res.budget_exhausted || res.tape_capped ? "unknown" : "disagree";
    }
    row["agreement"] = agreement;
    if (agreement == "disagree") ++disagreements;
    rows.push_back(std::move(row));
  }
  r["rows"] = rows;
  r["disagreements"] = disagreements;
  r["status"] = disagreements == 0 ? "pass" : "fail";
  return r;
}

Report presentation_audit(const Presentation& g, const MainMachineBundle& b) {
  Report r = suite_header("presentation");
  const int L = g.L();
  std::size_t mu_bad = 0, nu_checked = 0, nu_bad = 0, tt_checked = 0, disc_bad = 0, hub_bad = 0;
  std::size_t theta_q = 0, theta_a = 0, hubs = 0;
  Report failures = Report::array();
  auto note = [&failures](const std::string& what, const std::string& word) {
    if (failures.size() < kKeptViolations) failures.push_back(Report{{"check", what}, {"relator", word}});
  };
  auto theta_sups = [&g](const Word& w) {
    std::vector<int> s;
    for (const Letter& x : w) {
      if (g.symbol(x.symbol).kind == GeneratorKind::theta) s.push_back(x.superscript);
    }
    return s;
  };
  for (const Relator& rel : g.relators()) {
    if (mu(g, rel.word) != 0) {
      ++mu_bad;
      note("mu", g.word_text(rel.word));
    }
    const bool q_free = std::none_of(rel.word.begin(), rel.word.end(),
                                     [&g](const Letter& x) { return g.symbol(x.symbol).kind == GeneratorKind::q; });
    if (q_free) {
      ++nu_checked;
      if (!nu(g, rel.word).empty()) {
        ++nu_bad;
        note("nu", g.word_text(rel.word));
      }
    }
    switch (rel.kind) {
      case RelatorKind::theta_q: {
        ++theta_q;
        const std::vector<int> s = theta_sups(rel.word);
        const Rule& rule = b.machine.rule(b.machine.rule_at(rel.rule));
        const bool lifted = b.superscripted(rule) || b.mixed(rule);
        bool ok = s.size() == 2;
        if (ok && rel.index == 0) {
          ++tt_checked;
          const int d = ((s[0] - s[1]) % L + L) % L;
          ok = lifted ? (d == 1 || d == L - 1) && s[0] != 0 && s[1] != 0 : s[0] == 0 && s[1] == 0;
        } else if (ok) {
          ok = s[0] == s[1];
        }
        if (!ok) {
          ++disc_bad;
          note("superscripts", g.word_text(rel.word));
        }
        break;
      }
      case RelatorKind::theta_a:
        ++theta_a;
        break;
      case RelatorKind::hub:
        ++hubs;
        if (rel.word.size() != static_cast<std::size_t>(L) * static_cast<std::size_t>(g.N())) {
          ++hub_bad;
          note("hub length", g.word_text(rel.word));
        }
        break;
      case RelatorKind::hnn:
        break;
    }
  }
  // Relator counts recomputed from the machine.
  std::size_t want_q = 0, want_a = 0;
  const SMachine& m = b.machine;
  for (std::size_t k = 0; k < m.rule_count(); k += 2) {
    const Rule& rule = m.rule(static_cast<RuleIndex>(k));
    const std::size_t copies = b.superscripted(rule) || b.mixed(rule) ? static_cast<std::size_t>(L) : 1;
    want_q += copies * static_cast<std::size_t>(m.hardware().part_count());
    for (int s = 0; s < m.hardware().sector_count(); ++s) want_a += copies * domain_letters(m, rule, s).size();
  }
  const bool counts_ok = want_q == theta_q && want_a == theta_a && hubs == 2;
  const auto trimmed = compile_trimmed(b);
  std::size_t trimmed_sup = 0;
  for (const Presentation* p : {&trimmed.first, &trimmed.second}) {
    for (const Letter& x : p->generators()) trimmed_sup += x.superscript != 0 ? 1 : 0;
  }
  r["presentation"] = g.name();
  r["generators"] = g.generators().size();
  r["relators"] = g.relators().size();
  r["mu_failures"] = mu_bad;
  r["nu_checked"] = nu_checked;
  r["nu_failures"] = nu_bad;
  r["theta_t_checked"] = tt_checked;
  r["superscript_failures"] = disc_bad;
  r["hub_length"] = static_cast<std::size_t>(L) * static_cast<std::size_t>(g.N());
  r["hub_failures"] = hub_bad;
  r["counts"] = Report{{"theta_q", theta_q}, {"theta_q_expected", want_q}, {"theta_a", theta_a},
                       {"theta_a_expected", want_a}, {"hubs", hubs}};
  r["trimmed_superscripted_generators"] = trimmed_sup;
  r["failures"] = failures;
  const bool ok = mu_bad == 0 && nu_bad == 0 && disc_bad == 0 && hub_bad == 0 && counts_ok && trimmed_sup == 0 &&
                  nu_checked == theta_a && tt_checked > 0;
  r["status"] = ok ? "pass" : "fail";
  return r;
}

namespace {

// Eligible computations from a handful of landmark words, round robin, DFS order.
std::vector<Computation> eligible_sample(const MainMachineBundle& b, std::size_t count) {
  const SMachine& m = b.machine;
  std::vector<AdmissibleWord> starts{b.w_st, b.junction_word(0, 0), b.junction_word(2, 2), b.w_ac};
  // The word before θ(23), so that θ(23)θ(23)^-1 subwords show up.
  const History to_junction = b.history_to_junction(1);
  starts.push_back(run_history(m, b.w_st, History(to_junction.begin(), to_junction.end() - 1)).end());
  std::vector<std::vector<Computation>> per(starts.size());
  const std::size_t quota = count;
  for (std::size_t i = 0; i < starts.size(); ++i) {
    EnumerationOptions opt;
    opt.depth = 4;
    opt.filter = HistoryFilter::eligible;
    for_each_computation(m, starts[i], opt, [&](const ComputationView& c) {
      if (per[i].size() >= quota) return false;
      if (!c.history.empty()) per[i].push_back(c.materialize());
      return true;
    });
  }
  std::vector<Computation> out;
  // θ(23)θ(23)^-1 is the one cancellation an eligible history may contain.
  const RuleIndex t23 = m.rule_at("t23");
  for (long k = 0; k < 4 && out.size() < count; ++k) {
    History h = b.history_to_junction(k);
    h.push_back(SMachine::inverse_of(t23));
    out.push_back(run_history(m, b.w_st, h));
  }
  for (std::size_t round = 0; out.size() < count; ++round) {
    bool any = false;
    for (auto& list : per) {
      if (round < list.size() && out.size() < count) {
        out.push_back(list[round]);
        any = true;
      }
    }
    if (!any) break;
  }
  return out;
}

}  // namespace

Report check_trapezium_correspondence(const MainMachineBundle& b, const Presentation& g, std::size_t count) {
  Report r = suite_header("trapezia");
  Violations v;
  const std::vector<Computation> sample = eligible_sample(b, count);
  std::size_t passed = 0, cells = 0, cancellations = 0;
  for (std::size_t i = 0; i < sample.size(); ++i) {
    const Computation& c = sample[i];
    const int first = static_cast<int>(i % static_cast<std::size_t>(b.L)) + 1;
    for (std::size_t j = 1; j < c.history.size(); ++j) {
      if (c.history[j] == SMachine::inverse_of(c.history[j - 1])) ++cancellations;
    }
    try {
      const Trapezium t = computation_to_trapezium(b, g, c, first);
      const TrapeziumCheck chk = check_trapezium(b, g, t, c);
      if (!chk.ok) {
        v.add(b.machine, c.start, c.history, "trapezium", chk.failure);
      } else if (t.height() != c.history.size()) {
        v.add(b.machine, c.start, c.history, "height", "height differs from the history length");
      } else {
        ++passed;
        cells += trapezium_area(t);
      }
    } catch (const Error& e) {
      v.add(b.machine, c.start, c.history, "trapezium", e.what());
    }
  }
  r["requested"] = count;
  r["computations"] = sample.size();
  r["passed"] = passed;
  r["cells"] = cells;
  r["theta23_cancellations"] = cancellations;
  v.finish(r);
  if (sample.size() < count) r["status"] = "fail";
  return r;
}

Report check_disk_cells(const MainMachineBundle& b, const Presentation& g, long k_min, long k_max,
                        const LanguageOptions& opt) {
  Report r = suite_header("disk");
  Violations v;
  Report rows = Report::array();
  const auto L = static_cast<std::size_t>(b.L), N = static_cast<std::size_t>(b.N);
  for (long k : accepted_ks(b, k_min, k_max)) {
    const AdmissibleWord w = b.junction_word(k, k);
    Word power;
    for (int i = 0; i < b.L; ++i) power.insert(power.end(), w.letters().begin(), w.letters().end());
    DiskVerdict dv;
    std::size_t cap = 0;
    for (std::size_t c : opt.tape_caps) {
      SearchOptions so;
      so.max_states = opt.max_states;
      so.max_tape = c;
      dv = is_disk_word(b, PermissibleWord{power}, so);
      cap = c;
      if (dv.verdict != Verdict::unknown) break;
    }
    Report row{{"k", k}, {"verdict", std::string(to_string(dv.verdict))}, {"tape_cap", cap}};
    if (dv.verdict != Verdict::yes || !dv.witness) {
      v.add(b.machine, w, {}, "disk word", "no witness: " + dv.reason);
      rows.push_back(std::move(row));
      continue;
    }
    const Computation& c = *dv.witness;
    const std::size_t d = c.history.size();
    const std::size_t cells = disk_diagram_cells(b, g, w, c);
    const Trapezium t = computation_to_trapezium(b, g, c, 1);
    const std::size_t area = trapezium_area(t);
    row["witness_length"] = d;
    row["witness"] = history_to_string(b.machine, c.history);
    row["trapezium_area"] = area;
    row["cells"] = cells;
    row["lower_bound"] = N * L * d;
    if (cells != 1 + L * area) v.add(b.machine, c.start, c.history, "cells = 1 + L*area", std::to_string(cells));
    if (cells < N * L * d) v.add(b.machine, c.start, c.history, "cells >= N*L*d", std::to_string(cells));
    rows.push_back(std::move(row));
  }
  r["rows"] = rows;
  v.finish(r);
  if (rows.empty()) r["status"] = "fail";
  return r;
}

const std::vector<std::string>& suite_names() {
  static const std::vector<std::string> names{"roundtrip", "lr-bound", "wi-bound", "chi", "norep",
                                              "periodic", "language", "presentation", "trapezia", "disk"};
  return names;
}

namespace {

LanguageOptions language_options(const HarnessConfig& c) { return LanguageOptions{c.tape_caps, c.max_states}; }

// Combines sub-reports of one suite.
Report combine(const std::string& name, Report parts) {
  bool ok = true;
  for (const auto& p : parts) ok = ok && p.at("status") == "pass";
  return Report{{"suite", name}, {"status", ok ? "pass" : "fail"}, {"parts", std::move(parts)}};
}

std::vector<AdmissibleWord> canonical_m3_words(const MainMachineBundle& b, const HarnessConfig& c) {
  std::vector<AdmissibleWord> out;
  const SymbolId alpha = b.m3.alphabet().at(b.toy.machine.alphabet().name(b.toy.machine.hardware().sector_letters[0][0]));
  for (long k : accepted_ks(b, c.k_min, c.k_max)) {
    const History h = *toy_accepting_history(b.toy, k);
    const Word input(static_cast<std::size_t>(k), Letter{alpha, 0, false});
    const Computation run = run_history(b.m3, m3_input_configuration(b.m3, input, h), m3_canonical_history(b.m3, h));
    out.insert(out.end(), run.trace.begin(), run.trace.end());
  }
  return out;
}

}  // namespace

Report run_suite(const std::string& name, const HarnessContext& ctx) {
  const HarnessConfig& c = ctx.config;
  const MainMachineBundle& b = ctx.bundle;
  if (name == "roundtrip") return check_roundtrip(shipped_machines(b), c.roundtrip_words, c.seed);
  if (name == "lr-bound") return check_lr_bound(c.lr_max_tape);
  if (name == "wi-bound") {
    Report parts = Report::array();
    const SMachine lr = build_lr({"a", "b"});
    std::vector<AdmissibleWord> starts;
    for (int s = 0; s < lr.hardware().sector_count(); ++s) {
      auto w = two_letter_words(lr, s, static_cast<std::size_t>(c.wi_max_tape), false);
      starts.insert(starts.end(), w.begin(), w.end());
    }
    parts.push_back(check_wi_bound(lr, starts, c.wi_depth, lr.name()));
    // The fragment: stages 1-3 and the transitions between them, on the history sector.
    const int hs = b.m3.history_sectors().front().sector;
    const auto fragment = [](const Rule& rule) { return rule.tag.index >= 1 && rule.tag.index <= 3; };
    parts.push_back(check_wi_bound(b.m3,
                                   two_letter_words(b.m3, hs, static_cast<std::size_t>(c.wi_fragment_max_tape), true, fragment),
                                   c.wi_depth, b.m3.name() + " stages 1-3", fragment));
    return combine(name, std::move(parts));
  }
  if (name == "chi") return check_chi_occurrences(b.m3, canonical_m3_words(b, c), c.chi_depth, c.chi_tape_slack);
  if (name == "norep") {
    Report parts = Report::array();
    for (long k : accepted_ks(b, c.k_min, c.k_max)) parts.push_back(check_norep(b, k, c.norep_depth));
    return combine(name, std::move(parts));
  }
  if (name == "periodic") {
    Report parts = Report::array();
    const SMachine lr = build_lr({"a", "b"});
    const std::vector<AdmissibleWord> starts = standard_words(lr, static_cast<std::size_t>(c.periodic_max_tape));
    for (const char* h : {"z1_a", "z2_b^-1", "z1_a z1_b", "z1_a z1_a^-1", "z1_b^-1 z12 z2_a"}) {
      parts.push_back(check_periodic_distinctness(lr, parse_history(lr, h), starts, c.periodic_periods));
    }
    return combine(name, std::move(parts));
  }
  if (name == "language") return accepted_language_experiment(b, c.k_min, c.k_max, language_options(c));
  if (name == "presentation") return presentation_audit(ctx.group, b);
  if (name == "trapezia") return check_trapezium_correspondence(b, ctx.group, c.trapezia);
  if (name == "disk") return check_disk_cells(b, ctx.group, c.k_min, c.k_max, language_options(c));
  throw Error(ErrorCode::bad_parameters, "unknown suite '" + name + "'");
}

Report run_suites(const std::vector<std::string>& names, const HarnessContext& ctx) {
  std::vector<Report> out(names.size());
  std::vector<std::string> errors(names.size());
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t i = next++; i < names.size(); i = next++) {
      try {
        out[i] = run_suite(names[i], ctx);
      } catch (const Error& e) {
        errors[i] = e.what();
      }
    }
  };
  const std::size_t jobs = std::clamp<std::size_t>(static_cast<std::size_t>(std::max(ctx.config.jobs, 1)), 1, names.size() ? names.size() : 1);
  std::vector<std::thread> pool;
  for (std::size_t j = 1; j < jobs; ++j) pool.emplace_back(work);
  work();
  for (auto& t : pool) t.join();
  for (std::size_t i = 0; i < names.size(); ++i) {
    if (!errors[i].empty()) throw Error(ErrorCode::bad_parameters, names[i] + ": " + errors[i]);
  }
  Report suites = Report::array();
  bool ok = true;
  for (Report& r : out) {
    ok = ok && r.at("status") == "pass";
    suites.push_back(std::move(r));
  }
  return Report{{"config", ctx.config.to_json()}, {"suites", std::move(suites)}, {"status", ok ? "pass" : "fail"}};
}

bool report_passed(const Report& r) { return r.contains("status") && r.at("status") == "pass"; }

namespace {

void render_one(std::ostringstream& os, const Report& s, const std::string& indent) {
  os << indent << (s.at("status") == "pass" ? "PASS " : "FAIL ") << s.at("suite").get<std::string>();
  for (const char* key : {"machine", "k", "period", "computations", "violations", "min_slack", "disagreements"}) {
    if (s.contains(key)) os << "  " << key << "=" << s.at(key).dump();
  }
  os << "\n";
  if (s.contains("parts")) {
    for (const auto& p : s.at("parts")) render_one(os, p, indent + "  ");
  }
  if (s.contains("rows")) {
    for (const auto& row : s.at("rows")) os << indent << "  " << row.dump() << "\n";
  }
  if (s.contains("reproductions")) {
    for (const auto& v : s.at("reproductions")) {
      os << indent << "  repro " << v.at("check").get<std::string>() << ": start=\"" << v.at("start").get<std::string>()
         << "\" history=\"" << v.at("history").get<std::string>() << "\" (" << v.at("detail").get<std::string>() << ")\n";
    }
  }
}

}  // namespace

std::string render_report(const Report& r) {
  std::ostringstream os;
  if (r.contains("suites")) {
    for (const auto& s : r.at("suites")) render_one(os, s, "");
    os << (report_passed(r) ? "all suites passed\n" : "some suites failed\n");
  } else {
    render_one(os, r, "");
  }
  return os.str();
}

}  // namespace smw
