#include "smw/constructors.hpp"

#include <algorithm>
#include <deque>
#include <map>
#include <set>
#include <unordered_map>

#include "smw/error.hpp"

namespace smw {

namespace {

Letter pos(SymbolId s) { return Letter{s, 0, false}; }
Letter neg(SymbolId s) { return Letter{s, 0, true}; }

Word power(SymbolId s, long k) {
  Word w(static_cast<std::size_t>(k < 0 ? -k : k), Letter{s, 0, k < 0});
  return w;
}

void lock_all_except(Rule& r, const std::set<int>& open) {
  for (int s = 0; s < static_cast<int>(r.domains.size()); ++s) {
    if (!open.count(s)) r.domains[s] = SectorDomain::locked();
  }
}

// Copies a rule of `src` into a builder whose alphabet uses the names given by
// `rename`, moving sector s to sector_map[s].
Rule copy_rule(const Rule& r, const SMachine& src, const MachineBuilder& dst,
               const std::function<std::string(const std::string&)>& rename,
               const std::vector<int>& part_map, const std::vector<int>& sector_map) {
  const Alphabet& a = src.alphabet();
  auto sym = [&](SymbolId s) { return dst.symbol(rename(a.name(s))); };
  auto word = [&](const Word& w) {
    Word out;
    for (const Letter& x : w) out.push_back(Letter{sym(x.symbol), 0, x.inverse});
    return out;
  };
  Rule out;
  out.label = r.label;
  out.positive = true;
  out.tag = r.tag;
  out.parts.resize(static_cast<std::size_t>(dst.part_count()));
  out.domains.assign(static_cast<std::size_t>(dst.sector_count()), SectorDomain::full());
  for (std::size_t p = 0; p < r.parts.size(); ++p) {
    RulePart& rp = out.parts[static_cast<std::size_t>(part_map[p])];
    rp.from = sym(r.parts[p].from);
    rp.to = sym(r.parts[p].to);
    rp.left = word(r.parts[p].left);
    rp.right = word(r.parts[p].right);
  }
  for (std::size_t s = 0; s < r.domains.size(); ++s) {
    const SectorDomain& d = r.domains[s];
    SectorDomain nd = d;
    if (d.mode == SectorDomain::Mode::subset) {
      std::vector<SymbolId> ls;
      for (SymbolId y : d.letters) ls.push_back(sym(y));
      nd = SectorDomain::subset(ls);
    }
    out.domains[static_cast<std::size_t>(sector_map[s])] = nd;
  }
  return out;
}

std::vector<int> identity_map(int n) {
  std::vector<int> v(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) v[static_cast<std::size_t>(i)] = i;
  return v;
}

std::string same(const std::string& s) { return s; }

std::vector<SymbolId> by_names(const SMachine& src, const std::vector<SymbolId>& ls, const MachineBuilder& dst,
                               const std::function<std::string(const std::string&)>& rename = same) {
  std::vector<SymbolId> out;
  for (SymbolId s : ls) out.push_back(dst.symbol(rename(src.alphabet().name(s))));
  return out;
}

ToyRecognizer make_toy(bool even) {
  MachineBuilder b(even ? "toy-even" : "toy-all");
  int q0 = b.add_part("Q0");
  int q1 = b.add_part("Q1");
  int q2 = b.add_part("Q2");
  SymbolId x = b.state(q0, "x");
  SymbolId e0 = b.state(q1, "e0");
  SymbolId e1 = even ? b.state(q1, "e1") : e0;
  SymbolId f = b.state(q1, "f");
  SymbolId z = b.state(q2, "z");
  b.finish_parts();
  SymbolId alpha = b.tape(0, "alpha");

  Rule ta = b.draft("ta", {x, e0, z}, {x, e1, z});
  ta.parts[1].left = {neg(alpha)};
  b.add_rule(ta);
  if (even) {
    Rule tb = b.draft("tb", {x, e1, z}, {x, e0, z});
    tb.parts[1].left = {neg(alpha)};
    b.add_rule(tb);
  }
  Rule acc = b.draft("tacc", {x, e0, z}, {x, f, z});
  lock_all_except(acc, {});
  b.add_rule(acc);

  ToyRecognizer t{b.build({x, e0, z}, {x, f, z}, 0), even ? "toy-even" : "toy-all", nullptr};
  if (even) {
    t.accepts = [](long k) { return k % 2 == 0; };
  } else {
    t.accepts = [](long) { return true; };
  }
  return t;
}

}  // namespace

AdmissibleWord ToyRecognizer::input_configuration(long k) const {
  std::vector<Word> sectors(static_cast<std::size_t>(machine.hardware().sector_count()));
  sectors[static_cast<std::size_t>(*machine.input_sector())] = power(machine.alphabet().at("alpha"), k);
  return standard_configuration(machine, machine.start_letters(), sectors);
}

AdmissibleWord ToyRecognizer::accept_configuration() const {
  return standard_configuration(machine, machine.end_letters(), {});
}

ToyRecognizer toy_even() { return make_toy(true); }
ToyRecognizer toy_all() { return make_toy(false); }

ToyRecognizer toy_by_name(const std::string& name) {
  if (name == "toy-even") return toy_even();
  if (name == "toy-all") return toy_all();
  throw Error(ErrorCode::bad_parameters, "unknown toy recognizer '" + name + "'");
}

std::optional<History> toy_accepting_history(const ToyRecognizer& toy, long k) {
  const SMachine& m = toy.machine;
  const AdmissibleWord start = toy.input_configuration(k);
  const AdmissibleWord goal = toy.accept_configuration();
  const std::size_t cap = static_cast<std::size_t>(k < 0 ? -k : k) + 2;
  std::unordered_map<AdmissibleWord, std::pair<AdmissibleWord, RuleIndex>, AdmissibleWordHash> parent;
  std::deque<AdmissibleWord> queue{start};
  parent.emplace(start, std::make_pair(start, RuleIndex(-1)));
  while (!queue.empty()) {
    AdmissibleWord w = queue.front();
    queue.pop_front();
    if (w == goal) {
      History h;
      while (!(w == start)) {
        auto& [prev, rule] = parent.at(w);
        h.push_back(rule);
        w = prev;
      }
      std::reverse(h.begin(), h.end());
      return h;
    }
    for (RuleIndex r : m.enumeration_order()) {
      auto next = try_apply(m, w, r);
      if (!next || tape_length(m, next->letters()) > cap || parent.count(*next)) continue;
      parent.emplace(*next, std::make_pair(w, r));
      queue.push_back(std::move(*next));
    }
  }
  return std::nullopt;
}

AdmissibleWord standard_configuration(const SMachine& m, const std::vector<SymbolId>& letters,
                                      const std::vector<Word>& sector_words) {
  const int P = m.hardware().part_count();
  if (static_cast<int>(letters.size()) != P)
    throw Error(ErrorCode::malformed_word, "configuration needs one letter per part");
  Word w;
  for (int p = 0; p < P; ++p) {
    w.push_back(pos(letters[static_cast<std::size_t>(p)]));
    if (p + 1 < P && static_cast<std::size_t>(p) < sector_words.size()) {
      const Word& u = sector_words[static_cast<std::size_t>(p)];
      w.insert(w.end(), u.begin(), u.end());
    }
  }
  return AdmissibleWord(m, std::move(w));
}

AdmissibleWord translate(const SMachine& from, const SMachine& to, const AdmissibleWord& w) {
  Word out;
  for (const Letter& x : w.letters()) out.push_back(Letter{to.alphabet().at(from.alphabet().name(x.symbol)), x.superscript, x.inverse});
  return AdmissibleWord(to, std::move(out));
}

History translate_history(const SMachine& from, const SMachine& to, const History& h) {
  History out;
  for (RuleIndex r : h) out.push_back(to.rule_at(from.rule(r).signed_label()));
  return out;
}

namespace {

void check_alphabet(const std::vector<std::string>& letters) {
  if (letters.empty()) throw Error(ErrorCode::empty_alphabet, "runner machines need a nonempty tape alphabet");
  for (const auto& a : letters) {
    if (!is_valid_name(a)) throw Error(ErrorCode::bad_parameters, "invalid tape letter name '" + a + "'");
  }
}

}  // namespace

SMachine build_lr(const std::vector<std::string>& letters) {
  check_alphabet(letters);
  MachineBuilder b("LR");
  int q1 = b.add_part("Q1");
  int pp = b.add_part("P");
  int q2 = b.add_part("Q2");
  SymbolId Q1 = b.state(q1, "q1");
  SymbolId p1 = b.state(pp, "p1");
  SymbolId p2 = b.state(pp, "p2");
  SymbolId Q2 = b.state(q2, "q2");
  b.finish_parts();
  std::vector<std::pair<SymbolId, SymbolId>> ys;
  for (const auto& a : letters) ys.emplace_back(b.tape(0, a), 0);
  for (std::size_t i = 0; i < letters.size(); ++i) ys[i].second = b.tape(1, letters[i] + "'");

  for (std::size_t i = 0; i < letters.size(); ++i) {
    Rule r = b.draft("z1_" + letters[i], {Q1, p1, Q2}, {Q1, p1, Q2}, RuleTag{}.with_family("zeta", 1));
    r.parts[1].left = {neg(ys[i].first)};
    r.parts[1].right = {pos(ys[i].second)};
    b.add_rule(r);
  }
  Rule turn = b.draft("z12", {Q1, p1, Q2}, {Q1, p2, Q2}, RuleTag{}.with_family("zeta", 12));
  turn.domains[0] = SectorDomain::locked();
  b.add_rule(turn);
  for (std::size_t i = 0; i < letters.size(); ++i) {
    Rule r = b.draft("z2_" + letters[i], {Q1, p2, Q2}, {Q1, p2, Q2}, RuleTag{}.with_family("zeta", 2));
    r.parts[1].left = {pos(ys[i].first)};
    r.parts[1].right = {neg(ys[i].second)};
    b.add_rule(r);
  }
  return b.build({Q1, p1, Q2}, {Q1, p2, Q2}, std::nullopt);
}

SMachine build_rl(const std::vector<std::string>& letters) {
  check_alphabet(letters);
  MachineBuilder b("RL");
  int q1 = b.add_part("Q1");
  int rr = b.add_part("R");
  int q2 = b.add_part("Q2");
  SymbolId Q1 = b.state(q1, "q1");
  SymbolId r1 = b.state(rr, "r1");
  SymbolId r2 = b.state(rr, "r2");
  SymbolId Q2 = b.state(q2, "q2");
  b.finish_parts();
  std::vector<std::pair<SymbolId, SymbolId>> ys(letters.size());
  for (std::size_t i = 0; i < letters.size(); ++i) ys[i].second = b.tape(0, letters[i] + "'");
  for (std::size_t i = 0; i < letters.size(); ++i) ys[i].first = b.tape(1, letters[i]);

  for (std::size_t i = 0; i < letters.size(); ++i) {
    Rule r = b.draft("y1_" + letters[i], {Q1, r1, Q2}, {Q1, r1, Q2}, RuleTag{}.with_family("rho", 1));
    r.parts[1].left = {pos(ys[i].second)};
    r.parts[1].right = {neg(ys[i].first)};
    b.add_rule(r);
  }
  Rule turn = b.draft("y12", {Q1, r1, Q2}, {Q1, r2, Q2}, RuleTag{}.with_family("rho", 12));
  turn.domains[1] = SectorDomain::locked();
  b.add_rule(turn);
  for (std::size_t i = 0; i < letters.size(); ++i) {
    Rule r = b.draft("y2_" + letters[i], {Q1, r2, Q2}, {Q1, r2, Q2}, RuleTag{}.with_family("rho", 2));
    r.parts[1].left = {neg(ys[i].second)};
    r.parts[1].right = {pos(ys[i].first)};
    b.add_rule(r);
  }
  return b.build({Q1, r1, Q2}, {Q1, r2, Q2}, std::nullopt);
}

SMachine build_lr_m(const std::vector<std::string>& letters, int m) {
  if (m < 1) throw Error(ErrorCode::invalid_m, "m must be at least 1, got " + std::to_string(m));
  check_alphabet(letters);
  MachineBuilder b("LR" + std::to_string(m));
  int q1 = b.add_part("Q1");
  int pp = b.add_part("P");
  int q2 = b.add_part("Q2");
  SymbolId Q1 = b.state(q1, "q1");
  std::vector<SymbolId> p;
  for (int i = 1; i <= 2 * m; ++i) p.push_back(b.state(pp, "p" + std::to_string(i)));
  SymbolId Q2 = b.state(q2, "q2");
  b.finish_parts();
  std::vector<std::pair<SymbolId, SymbolId>> ys;
  for (const auto& a : letters) ys.emplace_back(b.tape(0, a), 0);
  for (std::size_t i = 0; i < letters.size(); ++i) ys[i].second = b.tape(1, letters[i] + "'");

  for (int i = 1; i <= 2 * m; ++i) {
    SymbolId pi = p[static_cast<std::size_t>(i - 1)];
    const bool leftward = i % 2 == 1;
    for (std::size_t k = 0; k < letters.size(); ++k) {
      Rule r = b.draft("z" + std::to_string(i) + "_" + letters[k], {Q1, pi, Q2}, {Q1, pi, Q2},
                       RuleTag{}.with_family("zeta", i));
      r.parts[1].left = {Letter{ys[k].first, 0, leftward}};
      r.parts[1].right = {Letter{ys[k].second, 0, !leftward}};
      b.add_rule(r);
    }
    if (i < 2 * m) {
      Rule turn = b.draft("turn" + std::to_string(i) + "_" + std::to_string(i + 1), {Q1, pi, Q2},
                          {Q1, p[static_cast<std::size_t>(i)], Q2}, RuleTag{}.with_family("zeta-turn", i));
      turn.domains[leftward ? 0 : 1] = SectorDomain::locked();
      b.add_rule(turn);
    }
  }
  return b.build({Q1, p.front(), Q2}, {Q1, p.back(), Q2}, std::nullopt);
}

SMachine add_history_sectors(const SMachine& m1) {
  if (!m1.input_sector()) throw Error(ErrorCode::no_input_sector, m1.name() + " has no input sector");
  const Hardware& hw = m1.hardware();
  if (hw.circular) throw Error(ErrorCode::stage_mismatch, "history sectors need a non-circular machine");
  const int P = hw.part_count();
  const int n = P - 1;
  if (n < 1) throw Error(ErrorCode::stage_mismatch, "history sectors need at least two parts");
  const Alphabet& a = m1.alphabet();

  MachineBuilder b("m2_" + m1.name());
  std::vector<int> lpart(static_cast<std::size_t>(P), -1), rpart(static_cast<std::size_t>(P), -1);
  for (int i = 0; i <= n; ++i) {
    if (i > 0) lpart[static_cast<std::size_t>(i)] = b.add_part(hw.part_names[static_cast<std::size_t>(i)] + "l");
    if (i < n) rpart[static_cast<std::size_t>(i)] = b.add_part(hw.part_names[static_cast<std::size_t>(i)] + "r");
  }
  std::unordered_map<SymbolId, SymbolId> lmap, rmap, tmap;
  for (int i = 0; i <= n; ++i) {
    for (SymbolId q : hw.part_letters[static_cast<std::size_t>(i)]) {
      if (lpart[static_cast<std::size_t>(i)] >= 0) lmap[q] = b.state(lpart[static_cast<std::size_t>(i)], a.name(q) + "_l");
      if (rpart[static_cast<std::size_t>(i)] >= 0) rmap[q] = b.state(rpart[static_cast<std::size_t>(i)], a.name(q) + "_r");
    }
  }
  b.finish_parts();
  for (int s = 0; s < n; ++s) {
    for (SymbolId y : hw.sector_letters[static_cast<std::size_t>(s)]) tmap[y] = b.tape(rpart[static_cast<std::size_t>(s)], a.name(y));
  }
  const std::size_t T = m1.positive_rule_count();
  std::vector<SMachine::HistorySector> history;
  for (int i = 1; i < n; ++i) {
    SMachine::HistorySector h;
    h.sector = lpart[static_cast<std::size_t>(i)];
    for (std::size_t t = 0; t < T; ++t) {
      h.left.push_back(b.tape(h.sector, "h" + std::to_string(i) + "_" + m1.rule(static_cast<RuleIndex>(2 * t)).label + "_l"));
    }
    for (std::size_t t = 0; t < T; ++t) {
      h.right.push_back(b.tape(h.sector, "h" + std::to_string(i) + "_" + m1.rule(static_cast<RuleIndex>(2 * t)).label + "_r"));
    }
    history.push_back(std::move(h));
  }

  auto map_word = [&](const Word& w) {
    Word out;
    for (const Letter& x : w) out.push_back(Letter{tmap.at(x.symbol), 0, x.inverse});
    return out;
  };
  for (std::size_t t = 0; t < T; ++t) {
    const Rule& r = m1.rule(static_cast<RuleIndex>(2 * t));
    std::vector<SymbolId> from(static_cast<std::size_t>(b.part_count())), to(from.size());
    for (int i = 0; i <= n; ++i) {
      const RulePart& rp = r.parts[static_cast<std::size_t>(i)];
      if (lpart[static_cast<std::size_t>(i)] >= 0) {
        from[static_cast<std::size_t>(lpart[static_cast<std::size_t>(i)])] = lmap.at(rp.from);
        to[static_cast<std::size_t>(lpart[static_cast<std::size_t>(i)])] = lmap.at(rp.to);
      }
      if (rpart[static_cast<std::size_t>(i)] >= 0) {
        from[static_cast<std::size_t>(rpart[static_cast<std::size_t>(i)])] = rmap.at(rp.from);
        to[static_cast<std::size_t>(rpart[static_cast<std::size_t>(i)])] = rmap.at(rp.to);
      }
    }
    Rule out = b.draft(r.label, from, to, r.tag);
    for (int i = 0; i <= n; ++i) {
      const RulePart& rp = r.parts[static_cast<std::size_t>(i)];
      int lp = lpart[static_cast<std::size_t>(i)];
      int rp_idx = rpart[static_cast<std::size_t>(i)];
      if (lp >= 0) {
        out.parts[static_cast<std::size_t>(lp)].left = map_word(rp.left);
        if (i < n) out.parts[static_cast<std::size_t>(lp)].right = {neg(history[static_cast<std::size_t>(i - 1)].left[t])};
      }
      if (rp_idx >= 0) {
        out.parts[static_cast<std::size_t>(rp_idx)].right = map_word(rp.right);
        if (i > 0) out.parts[static_cast<std::size_t>(rp_idx)].left = {pos(history[static_cast<std::size_t>(i - 1)].right[t])};
      }
    }
    for (int s = 0; s < n; ++s) {
      const SectorDomain& d = r.domains[static_cast<std::size_t>(s)];
      SectorDomain nd = d;
      if (d.mode == SectorDomain::Mode::subset) {
        std::vector<SymbolId> ls;
        for (SymbolId y : d.letters) ls.push_back(tmap.at(y));
        nd = SectorDomain::subset(ls);
      }
      out.domains[static_cast<std::size_t>(rpart[static_cast<std::size_t>(s)])] = nd;
    }
    b.add_rule(out);
  }
  auto split_letters = [&](const std::vector<SymbolId>& ls) {
    std::vector<SymbolId> out(static_cast<std::size_t>(b.part_count()));
    for (int i = 0; i <= n; ++i) {
      if (lpart[static_cast<std::size_t>(i)] >= 0) out[static_cast<std::size_t>(lpart[static_cast<std::size_t>(i)])] = lmap.at(ls[static_cast<std::size_t>(i)]);
      if (rpart[static_cast<std::size_t>(i)] >= 0) out[static_cast<std::size_t>(rpart[static_cast<std::size_t>(i)])] = rmap.at(ls[static_cast<std::size_t>(i)]);
    }
    return out;
  };
  return b.build(split_letters(m1.start_letters()), split_letters(m1.end_letters()),
                 rpart[static_cast<std::size_t>(*m1.input_sector())], std::move(history));
}

namespace {

Word history_word(const std::vector<SymbolId>& alphabet, const History& h) {
  Word w;
  for (RuleIndex r : h) w.push_back(Letter{alphabet.at(r / 2), 0, (r & 1u) != 0});
  return w;
}

std::vector<Word> sectors_with(const SMachine& m, const Word& input, const History& h, bool right_alphabet) {
  std::vector<Word> sectors(static_cast<std::size_t>(m.hardware().sector_count()));
  sectors.at(static_cast<std::size_t>(*m.input_sector())) = input;
  for (const auto& hs : m.history_sectors()) {
    sectors.at(static_cast<std::size_t>(hs.sector)) = history_word(right_alphabet ? hs.right : hs.left, h);
  }
  return sectors;
}

}  // namespace

AdmissibleWord m2_input_configuration(const SMachine& m2, const Word& input, const History& h) {
  return standard_configuration(m2, m2.start_letters(), sectors_with(m2, input, h, false));
}

SMachine add_control_letters(const SMachine& m2) {
  const Hardware& hw = m2.hardware();
  if (hw.circular) throw Error(ErrorCode::stage_mismatch, "control letters need a non-circular machine");
  const int K = hw.part_count();
  const Alphabet& a = m2.alphabet();
  MachineBuilder b("m2bar_" + m2.name());
  std::vector<SymbolId> pl, rl;
  std::vector<int> qpart;
  for (int i = 0; i < K; ++i) {
    int p = b.add_part("P" + std::to_string(i));
    int q = b.add_part(hw.part_names[static_cast<std::size_t>(i)]);
    int r = b.add_part("R" + std::to_string(i));
    pl.push_back(b.state(p, "p" + std::to_string(i)));
    for (SymbolId x : hw.part_letters[static_cast<std::size_t>(i)]) b.state(q, a.name(x));
    rl.push_back(b.state(r, "r" + std::to_string(i)));
    qpart.push_back(q);
  }
  b.finish_parts();
  std::vector<int> sector_map;
  for (int s = 0; s < hw.sector_count(); ++s) {
    sector_map.push_back(3 * s + 2);
    for (SymbolId y : hw.sector_letters[static_cast<std::size_t>(s)]) b.tape(3 * s + 2, a.name(y));
  }
  for (std::size_t k = 0; k < m2.rule_count(); k += 2) {
    const Rule& r = m2.rule(static_cast<RuleIndex>(k));
    Rule out = copy_rule(r, m2, b, same, qpart, sector_map);
    for (int i = 0; i < K; ++i) {
      RulePart& q = out.parts[static_cast<std::size_t>(qpart[static_cast<std::size_t>(i)])];
      RulePart& p = out.parts[static_cast<std::size_t>(qpart[static_cast<std::size_t>(i)] - 1)];
      RulePart& rr = out.parts[static_cast<std::size_t>(qpart[static_cast<std::size_t>(i)] + 1)];
      p.from = p.to = pl[static_cast<std::size_t>(i)];
      rr.from = rr.to = rl[static_cast<std::size_t>(i)];
      p.left = std::move(q.left);
      rr.right = std::move(q.right);
      q.left.clear();
      q.right.clear();
      out.domains[static_cast<std::size_t>(3 * i)] = SectorDomain::locked();
      out.domains[static_cast<std::size_t>(3 * i + 1)] = SectorDomain::locked();
    }
    b.add_rule(out);
  }
  auto triple = [&](const std::vector<SymbolId>& ls) {
    std::vector<SymbolId> out;
    for (int i = 0; i < K; ++i) {
      out.push_back(pl[static_cast<std::size_t>(i)]);
      out.push_back(b.symbol(a.name(ls[static_cast<std::size_t>(i)])));
      out.push_back(rl[static_cast<std::size_t>(i)]);
    }
    return out;
  };
  std::vector<SMachine::HistorySector> history;
  for (const auto& h : m2.history_sectors()) {
    history.push_back({3 * h.sector + 2, by_names(m2, h.left, b), by_names(m2, h.right, b)});
  }
  std::optional<int> input;
  if (m2.input_sector()) input = 3 * *m2.input_sector() + 2;
  return b.build(triple(m2.start_letters()), triple(m2.end_letters()), input, std::move(history));
}

namespace {

enum class StageKind { rl, forward, lr, backward };

StageKind stage_kind(int k) {
  switch (k % 4) {
    case 1: return StageKind::rl;
    case 2: return StageKind::forward;
    case 3: return StageKind::lr;
    default: return StageKind::backward;
  }
}

std::string at_stage(const std::string& name, int k) { return name + "@" + std::to_string(k); }

std::string m1_label(const SMachine& m, std::size_t t) { return m.rule(static_cast<RuleIndex>(2 * t)).label; }

}  // namespace

SMachine compose_m3(const SMachine& m2bar, int m) {
  if (m < 1) throw Error(ErrorCode::invalid_m, "m must be at least 1, got " + std::to_string(m));
  const Hardware& hw = m2bar.hardware();
  if (!m2bar.input_sector() || m2bar.history_sectors().empty() || hw.part_count() % 3 != 0 || hw.circular)
    throw Error(ErrorCode::stage_mismatch, m2bar.name() + " is not a machine with control letters and history sectors");
  const Alphabet& a = m2bar.alphabet();
  const int P = hw.part_count();
  const int stages = 4 * m + 1;
  const auto& hist = m2bar.history_sectors();
  const std::size_t T = hist.front().left.size();
  for (const auto& h : hist) {
    const bool shape_ok = h.sector % 3 == 2 && h.left.size() == T && h.right.size() == T;
    if (!shape_ok) throw Error(ErrorCode::stage_mismatch, "history sector not between R_i and P_(i+1)");
  }

  MachineBuilder b("m3_" + m2bar.name());
  for (int p = 0; p < P; ++p) b.add_part(hw.part_names[static_cast<std::size_t>(p)]);
  b.finish_parts();
  std::set<int> rl_runner, lr_runner;
  for (const auto& h : hist) {
    rl_runner.insert(h.sector);
    lr_runner.insert(h.sector + 1);
  }
  // Stage letters: start[k][p], end[k][p], plus runner phase letters.
  std::vector<std::vector<SymbolId>> start(static_cast<std::size_t>(stages + 1)), end(start.size());
  for (int k = 1; k <= stages; ++k) {
    StageKind kind = stage_kind(k);
    auto& st = start[static_cast<std::size_t>(k)];
    auto& en = end[static_cast<std::size_t>(k)];
    for (int p = 0; p < P; ++p) {
      const auto& letters = hw.part_letters[static_cast<std::size_t>(p)];
      if (kind == StageKind::forward || kind == StageKind::backward) {
        for (SymbolId q : letters) b.state(p, at_stage(a.name(q), k));
        SymbolId s0 = b.symbol(at_stage(a.name(m2bar.start_letters()[static_cast<std::size_t>(p)]), k));
        SymbolId e0 = b.symbol(at_stage(a.name(m2bar.end_letters()[static_cast<std::size_t>(p)]), k));
        st.push_back(kind == StageKind::forward ? s0 : e0);
        en.push_back(kind == StageKind::forward ? e0 : s0);
        continue;
      }
      const bool runner = (kind == StageKind::rl ? rl_runner : lr_runner).count(p) > 0;
      // Idle letters copy the M2bar configuration the stage sits on: the start
      // configuration around RL stages, the accept configuration around LR stages.
      SymbolId base = (kind == StageKind::rl ? m2bar.start_letters() : m2bar.end_letters())[static_cast<std::size_t>(p)];
      if (runner) {
        st.push_back(b.state(p, at_stage(a.name(base) + "_1", k)));
        en.push_back(b.state(p, at_stage(a.name(base) + "_2", k)));
      } else {
        SymbolId idle = b.state(p, at_stage(a.name(base), k));
        st.push_back(idle);
        en.push_back(idle);
      }
    }
  }
  for (int s = 0; s < hw.sector_count(); ++s) {
    for (SymbolId y : hw.sector_letters[static_cast<std::size_t>(s)]) b.tape(s, a.name(y));
  }
  // Deposit sectors next to each history sector hold fresh copies, keeping
  // sector alphabets disjoint.
  std::vector<std::vector<SymbolId>> rl_dep, lr_dep, left, right;
  for (const auto& h : hist) {
    std::vector<SymbolId> rd, ld, l, r;
    for (SymbolId y : h.left) rd.push_back(b.tape(h.sector - 1, a.name(y) + "_d"));
    for (SymbolId y : h.right) ld.push_back(b.tape(h.sector + 1, a.name(y) + "_d"));
    rl_dep.push_back(rd);
    lr_dep.push_back(ld);
    left.push_back(by_names(m2bar, h.left, b));
    right.push_back(by_names(m2bar, h.right, b));
  }
  const int input = *m2bar.input_sector();
  const std::vector<int> ident_parts = identity_map(P);
  const std::vector<int> ident_sectors = identity_map(hw.sector_count());

  for (int k = 1; k <= stages; ++k) {
    const StageKind kind = stage_kind(k);
    const auto& st = start[static_cast<std::size_t>(k)];
    const auto& en = end[static_cast<std::size_t>(k)];
    const std::string prefix = "s" + std::to_string(k) + "_";
    if (kind == StageKind::forward || kind == StageKind::backward) {
      for (std::size_t r = 0; r < m2bar.rule_count(); r += 2) {
        Rule src = m2bar.rule(static_cast<RuleIndex>(r));
        if (kind == StageKind::backward) src = src.inverse();
        auto staged = [&a, k](const std::string& n) { return a.is_state(a.at(n)) ? at_stage(n, k) : n; };
        Rule out = copy_rule(src, m2bar, b, staged, ident_parts, ident_sectors);
        out.label = prefix + src.label;
        out.positive = true;
        out.tag = RuleTag{}.with_family(kind == StageKind::forward ? "m2" : "m2inv", k);
        b.add_rule(out);
      }
    } else if (kind == StageKind::rl) {
      const std::vector<SymbolId>& phase1 = st;
      const std::vector<SymbolId>& phase2 = en;
      for (std::size_t t = 0; t < T; ++t) {
        Rule r1 = b.draft(prefix + "rho1_" + m1_label(m2bar, t), phase1, phase1, RuleTag{}.with_family("rho", k));
        Rule r2 = b.draft(prefix + "rho2_" + m1_label(m2bar, t), phase2, phase2, RuleTag{}.with_family("rho", k));
        for (std::size_t h = 0; h < hist.size(); ++h) {
          const int s = hist[h].sector;
          RulePart& p1 = r1.parts[static_cast<std::size_t>(s)];
          p1.left = {pos(rl_dep[h][t])};
          p1.right = {neg(left[h][t])};
          RulePart& p2 = r2.parts[static_cast<std::size_t>(s)];
          p2.left = {neg(rl_dep[h][t])};
          p2.right = {pos(left[h][t])};
          r1.domains[static_cast<std::size_t>(s)] = SectorDomain::subset(left[h]);
          r2.domains[static_cast<std::size_t>(s)] = SectorDomain::subset(left[h]);
        }
        b.add_rule(r1);
        b.add_rule(r2);
      }
      Rule turn = b.draft(prefix + "rho12", phase1, phase2, RuleTag{}.with_family("rho", k));
      for (const auto& h : hist) turn.domains[static_cast<std::size_t>(h.sector)] = SectorDomain::locked();
      b.add_rule(turn);
    } else {
      const std::vector<SymbolId>& phase1 = st;
      const std::vector<SymbolId>& phase2 = en;
      for (std::size_t t = 0; t < T; ++t) {
        Rule z1 = b.draft(prefix + "zeta1_" + m1_label(m2bar, t), phase1, phase1, RuleTag{}.with_family("zeta", k));
        Rule z2 = b.draft(prefix + "zeta2_" + m1_label(m2bar, t), phase2, phase2, RuleTag{}.with_family("zeta", k));
        for (std::size_t h = 0; h < hist.size(); ++h) {
          const int s = hist[h].sector;
          RulePart& p1 = z1.parts[static_cast<std::size_t>(s + 1)];
          p1.left = {neg(right[h][t])};
          p1.right = {pos(lr_dep[h][t])};
          RulePart& p2 = z2.parts[static_cast<std::size_t>(s + 1)];
          p2.left = {pos(right[h][t])};
          p2.right = {neg(lr_dep[h][t])};
          z1.domains[static_cast<std::size_t>(s)] = SectorDomain::subset(right[h]);
          z2.domains[static_cast<std::size_t>(s)] = SectorDomain::subset(right[h]);
        }
        b.add_rule(z1);
        b.add_rule(z2);
      }
      Rule turn = b.draft(prefix + "zeta12", phase1, phase2, RuleTag{}.with_family("zeta", k));
      for (const auto& h : hist) turn.domains[static_cast<std::size_t>(h.sector)] = SectorDomain::locked();
      b.add_rule(turn);
    }
    if (k < stages) {
      Rule chi = b.draft("chi" + std::to_string(k), en, start[static_cast<std::size_t>(k + 1)],
                         RuleTag{}.with_family("chi", k));
      std::set<int> open;
      for (const auto& h : hist) open.insert(h.sector);
      // chi(1,2) and chi(4,5) keep the input word; the others see it empty.
      if (kind == StageKind::rl || kind == StageKind::backward) open.insert(input);
      lock_all_except(chi, open);
      const bool left_side = kind == StageKind::rl || kind == StageKind::backward;
      for (std::size_t h = 0; h < hist.size(); ++h) {
        chi.domains[static_cast<std::size_t>(hist[h].sector)] = SectorDomain::subset(left_side ? left[h] : right[h]);
      }
      b.add_rule(chi);
    }
  }
  std::vector<SMachine::HistorySector> history;
  for (std::size_t h = 0; h < hist.size(); ++h) history.push_back({hist[h].sector, left[h], right[h]});
  return b.build(start[1], end[static_cast<std::size_t>(stages)], input, std::move(history));
}

AdmissibleWord m3_input_configuration(const SMachine& m3, const Word& input, const History& h) {
  return standard_configuration(m3, m3.start_letters(), sectors_with(m3, input, h, false));
}

namespace {

int m3_stage_count(const SMachine& m3) {
  int stages = 0;
  for (const Rule& r : m3.rules()) {
    if (r.tag.family == "chi") stages = std::max(stages, r.tag.index + 1);
  }
  return stages;
}

std::string signed_name(const std::string& label, RuleIndex e) { return (e & 1u) ? label + "^-1" : label; }

}  // namespace

History m3_canonical_history(const SMachine& m3, const History& h) {
  const int stages = m3_stage_count(m3);
  if (stages < 1 || m3.history_sectors().empty()) throw Error(ErrorCode::stage_mismatch, m3.name() + " is not a staged machine");
  // Labels of the source machine's positive rules are recovered from the stage-2 copies.
  auto label = [&](RuleIndex e) -> std::string {
    const std::string& hl = m3.alphabet().name(m3.history_sectors().front().left.at(e / 2));
    // history letters are named h<i>_<label>_l
    auto first = hl.find('_');
    return hl.substr(first + 1, hl.size() - first - 3);
  };
  std::vector<std::string> out;
  for (int k = 1; k <= stages; ++k) {
    const std::string prefix = "s" + std::to_string(k) + "_";
    switch (stage_kind(k)) {
      case StageKind::rl:
        for (RuleIndex e : h) out.push_back(signed_name(prefix + "rho1_" + label(e), e));
        out.push_back(prefix + "rho12");
        for (auto it = h.rbegin(); it != h.rend(); ++it) out.push_back(signed_name(prefix + "rho2_" + label(*it), *it));
        break;
      case StageKind::forward:
        for (RuleIndex e : h) out.push_back(signed_name(prefix + label(e), e));
        break;
      case StageKind::lr:
        for (auto it = h.rbegin(); it != h.rend(); ++it) out.push_back(signed_name(prefix + "zeta1_" + label(*it), *it));
        out.push_back(prefix + "zeta12");
        for (RuleIndex e : h) out.push_back(signed_name(prefix + "zeta2_" + label(e), e));
        break;
      case StageKind::backward:
        for (auto it = h.rbegin(); it != h.rend(); ++it) out.push_back(signed_name(prefix + label(*it), *it));
        break;
    }
    if (k < stages) out.push_back("chi" + std::to_string(k));
  }
  History result;
  for (const auto& s : out) result.push_back(m3.rule_at(s));
  return result;
}

namespace {

std::string mirror_name(const std::string& n) { return n + "~"; }

}  // namespace

SMachine mirror_m4(const SMachine& half) {
  const Hardware& hw = half.hardware();
  if (hw.circular) throw Error(ErrorCode::stage_mismatch, "mirroring needs a non-circular machine");
  const Alphabet& a = half.alphabet();
  const int K = hw.part_count();
  MachineBuilder b("m4_" + half.name());
  for (int idx = 0; idx < 2 * K; ++idx) {
    const int j = idx < K ? idx : 2 * K - 1 - idx;
    std::string pname = hw.part_names[static_cast<std::size_t>(j)];
    b.add_part(idx < K ? pname : mirror_name(pname));
  }
  for (int idx = 0; idx < 2 * K; ++idx) {
    const int j = idx < K ? idx : 2 * K - 1 - idx;
    for (SymbolId q : hw.part_letters[static_cast<std::size_t>(j)])
      b.state(idx, idx < K ? a.name(q) : mirror_name(a.name(q)));
  }
  b.finish_parts();
  const int S = hw.sector_count();
  for (int s = 0; s < S; ++s) {
    for (SymbolId y : hw.sector_letters[static_cast<std::size_t>(s)]) b.tape(s, a.name(y));
  }
  for (int s = S - 1; s >= 0; --s) {
    for (SymbolId y : hw.sector_letters[static_cast<std::size_t>(s)]) b.tape(2 * K - 2 - s, mirror_name(a.name(y)));
  }
  auto msym = [&](SymbolId s) { return b.symbol(mirror_name(a.name(s))); };
  auto mword = [&](const Word& w) {
    Word out;
    for (auto it = w.rbegin(); it != w.rend(); ++it) out.push_back(Letter{msym(it->symbol), 0, !it->inverse});
    return out;
  };
  for (std::size_t k = 0; k < half.rule_count(); k += 2) {
    const Rule& r = half.rule(static_cast<RuleIndex>(k));
    Rule out = copy_rule(r, half, b, same, identity_map(K), identity_map(S));
    for (int j = 0; j < K; ++j) {
      const RulePart& src = r.parts[static_cast<std::size_t>(j)];
      RulePart& mp = out.parts[static_cast<std::size_t>(2 * K - 1 - j)];
      mp.from = msym(src.from);
      mp.to = msym(src.to);
      mp.left = mword(src.right);
      mp.right = mword(src.left);
    }
    out.domains[static_cast<std::size_t>(K - 1)] = SectorDomain::locked();
    for (int s = 0; s < S; ++s) {
      const SectorDomain& d = r.domains[static_cast<std::size_t>(s)];
      SectorDomain nd = d;
      if (d.mode == SectorDomain::Mode::subset) {
        std::vector<SymbolId> ls;
        for (SymbolId y : d.letters) ls.push_back(msym(y));
        nd = SectorDomain::subset(ls);
      }
      out.domains[static_cast<std::size_t>(2 * K - 2 - s)] = nd;
    }
    b.add_rule(out);
  }
  auto doubled = [&](const std::vector<SymbolId>& ls) {
    std::vector<SymbolId> out = by_names(half, ls, b);
    for (int idx = K; idx < 2 * K; ++idx) out.push_back(msym(ls[static_cast<std::size_t>(2 * K - 1 - idx)]));
    return out;
  };
  std::vector<SMachine::HistorySector> history;
  for (const auto& h : half.history_sectors()) history.push_back({h.sector, by_names(half, h.left, b), by_names(half, h.right, b)});
  for (const auto& h : half.history_sectors()) {
    history.push_back({2 * K - 2 - h.sector, by_names(half, h.left, b, mirror_name), by_names(half, h.right, b, mirror_name)});
  }
  return b.build(doubled(half.start_letters()), doubled(half.end_letters()), half.input_sector(), std::move(history));
}

SMachine circularize_m5(const SMachine& m4) {
  const Hardware& hw = m4.hardware();
  if (hw.circular) throw Error(ErrorCode::stage_mismatch, "machine is already circular");
  const Alphabet& a = m4.alphabet();
  const int K = hw.part_count();
  MachineBuilder b("m5_" + m4.name(), true);
  int tp = b.add_part("T");
  for (int p = 0; p < K; ++p) b.add_part(hw.part_names[static_cast<std::size_t>(p)]);
  SymbolId t = b.state(tp, "t");
  for (int p = 0; p < K; ++p) {
    for (SymbolId q : hw.part_letters[static_cast<std::size_t>(p)]) b.state(p + 1, a.name(q));
  }
  b.finish_parts();
  for (int s = 0; s < hw.sector_count(); ++s) {
    for (SymbolId y : hw.sector_letters[static_cast<std::size_t>(s)]) b.tape(s + 1, a.name(y));
  }
  std::vector<int> part_map, sector_map;
  for (int p = 0; p < K; ++p) part_map.push_back(p + 1);
  for (int s = 0; s < hw.sector_count(); ++s) sector_map.push_back(s + 1);
  for (std::size_t k = 0; k < m4.rule_count(); k += 2) {
    Rule out = copy_rule(m4.rule(static_cast<RuleIndex>(k)), m4, b, same, part_map, sector_map);
    out.parts[0].from = out.parts[0].to = t;
    out.domains[0] = SectorDomain::locked();
    out.domains[static_cast<std::size_t>(K)] = SectorDomain::locked();
    b.add_rule(out);
  }
  auto with_t = [&](const std::vector<SymbolId>& ls) {
    std::vector<SymbolId> out{t};
    auto rest = by_names(m4, ls, b);
    out.insert(out.end(), rest.begin(), rest.end());
    return out;
  };
  std::vector<SMachine::HistorySector> history;
  for (const auto& h : m4.history_sectors()) history.push_back({h.sector + 1, by_names(m4, h.left, b), by_names(m4, h.right, b)});
  std::optional<int> input;
  if (m4.input_sector()) input = *m4.input_sector() + 1;
  return b.build(with_t(m4.start_letters()), with_t(m4.end_letters()), input, std::move(history));
}

namespace {

// Which sectors every rule of a family locks.
std::vector<bool> locked_by_all(const std::vector<Rule>& rules, const std::function<bool(const Rule&)>& in_set, int sectors) {
  std::vector<bool> all(static_cast<std::size_t>(sectors), true);
  bool any = false;
  for (const Rule& r : rules) {
    if (!in_set(r)) continue;
    any = true;
    for (int s = 0; s < sectors; ++s) {
      if (!r.domains[static_cast<std::size_t>(s)].is_locked()) all[static_cast<std::size_t>(s)] = false;
    }
  }
  if (!any) std::fill(all.begin(), all.end(), false);
  return all;
}

}  // namespace

MainMachineBundle build_main_machine(const ToyRecognizer& toy, int m, int L) {
  if (m < 1) throw Error(ErrorCode::bad_parameters, "m must be at least 1");
  if (L < 8) throw Error(ErrorCode::bad_parameters, "L must be at least 8");
  SMachine m2 = add_history_sectors(toy.machine);
  SMachine m2bar = add_control_letters(m2);
  SMachine m3 = compose_m3(m2bar, m);
  const Hardware& hw = m3.hardware();
  const Alphabet& a3 = m3.alphabet();
  const int P = hw.part_count();
  const int S = hw.sector_count();
  const int input = *m3.input_sector();
  const int runner = input + 1;  // P part right of the input sector
  const int deposit = input + 1;
  const int turns = 2 * m;

  MachineBuilder b("main-half");
  for (int p = 0; p < P; ++p) b.add_part(hw.part_names[static_cast<std::size_t>(p)]);
  std::vector<SymbolId> st, s1, s2start, s2end, s3, s5, ac;
  std::vector<SymbolId> phases;
  for (int p = 0; p < P; ++p) {
    const std::string& pn = hw.part_names[static_cast<std::size_t>(p)];
    st.push_back(b.state(p, pn + "_st"));
    s1.push_back(b.state(p, pn + "_1"));
    if (p == runner) {
      for (int i = 1; i <= turns; ++i) phases.push_back(b.state(p, pn + "_2_" + std::to_string(i)));
      s2start.push_back(phases.front());
      s2end.push_back(phases.back());
    } else {
      SymbolId idle = b.state(p, pn + "_2");
      s2start.push_back(idle);
      s2end.push_back(idle);
    }
    s3.push_back(b.state(p, pn + "_3"));
    for (SymbolId q : hw.part_letters[static_cast<std::size_t>(p)]) b.state(p, a3.name(q));
    s5.push_back(b.state(p, pn + "_5"));
    ac.push_back(b.state(p, pn + "_ac"));
  }
  b.finish_parts();
  for (int s = 0; s < S; ++s) {
    for (SymbolId y : hw.sector_letters[static_cast<std::size_t>(s)]) b.tape(s, a3.name(y));
  }
  const SymbolId alpha = b.symbol("alpha");
  const SymbolId alpha_d = b.tape(deposit, "alpha_d");
  std::vector<SMachine::HistorySector> hist;
  for (const auto& h : m3.history_sectors()) hist.push_back({h.sector, by_names(m3, h.left, b), by_names(m3, h.right, b)});
  std::set<int> input_only{input};
  std::set<int> input_and_history{input};
  for (const auto& h : hist) input_and_history.insert(h.sector);
  const std::size_t T = toy.machine.positive_rule_count();

  Rule start = b.draft("start", st, s1, RuleTag::transition(0, 1));
  lock_all_except(start, {});
  b.add_rule(start);

  Rule ins = b.draft("ins_alpha", s1, s1, RuleTag::step(1));
  ins.parts[static_cast<std::size_t>(runner)].left = {pos(alpha)};
  lock_all_except(ins, input_only);
  b.add_rule(ins);

  b.add_rule(b.draft("t12", s1, s2start, RuleTag::transition(1, 2)));

  for (int i = 1; i <= turns; ++i) {
    std::vector<SymbolId> cur = s2start;
    cur[static_cast<std::size_t>(runner)] = phases[static_cast<std::size_t>(i - 1)];
    const bool leftward = i % 2 == 1;
    Rule z = b.draft("L_z" + std::to_string(i), cur, cur, RuleTag::step(2).with_family("zeta", i));
    z.parts[static_cast<std::size_t>(runner)].left = {Letter{alpha, 0, leftward}};
    z.parts[static_cast<std::size_t>(runner)].right = {Letter{alpha_d, 0, !leftward}};
    lock_all_except(z, {input, deposit});
    b.add_rule(z);
    if (i < turns) {
      std::vector<SymbolId> nxt = cur;
      nxt[static_cast<std::size_t>(runner)] = phases[static_cast<std::size_t>(i)];
      Rule turn = b.draft("L_turn" + std::to_string(i), cur, nxt, RuleTag::step(2).with_family("zeta-turn", i));
      lock_all_except(turn, leftward ? std::set<int>{deposit} : std::set<int>{input});
      b.add_rule(turn);
    }
  }

  b.add_rule(b.draft("t23", s2end, s3, RuleTag::transition(2, 3)));

  for (std::size_t t = 0; t < T; ++t) {
    Rule r = b.draft("ins_" + m1_label(toy.machine, t), s3, s3, RuleTag::step(3));
    for (const auto& h : hist) r.parts[static_cast<std::size_t>(h.sector)].right = {pos(h.left[t])};
    lock_all_except(r, input_and_history);
    b.add_rule(r);
  }

  Rule t34 = b.draft("t34", s3, by_names(m3, m3.start_letters(), b), RuleTag::transition(3, 4));
  lock_all_except(t34, input_and_history);
  for (const auto& h : hist) t34.domains[static_cast<std::size_t>(h.sector)] = SectorDomain::subset(h.left);
  b.add_rule(t34);

  for (std::size_t k = 0; k < m3.rule_count(); k += 2) {
    Rule r = copy_rule(m3.rule(static_cast<RuleIndex>(k)), m3, b, same, identity_map(P), identity_map(S));
    r.tag = RuleTag::step(4).with_family(r.tag.family, r.tag.index);
    b.add_rule(r);
  }

  Rule t45 = b.draft("t45", by_names(m3, m3.end_letters(), b), s5, RuleTag::transition(4, 5));
  lock_all_except(t45, input_and_history);
  for (const auto& h : hist) t45.domains[static_cast<std::size_t>(h.sector)] = SectorDomain::subset(h.left);
  b.add_rule(t45);

  for (std::size_t t = 0; t < T; ++t) {
    Rule r = b.draft("del_" + m1_label(toy.machine, t), s5, s5, RuleTag::step(5));
    for (const auto& h : hist) {
      r.parts[static_cast<std::size_t>(h.sector)].right = {neg(h.left[t])};
      r.domains[static_cast<std::size_t>(h.sector)] = SectorDomain::subset(h.left);
    }
    lock_all_except(r, input_and_history);
    b.add_rule(r);
  }
  Rule del_in = b.draft("del_in", s5, s5, RuleTag::step(5));
  del_in.parts[static_cast<std::size_t>(runner)].left = {neg(alpha)};
  lock_all_except(del_in, input_and_history);
  for (const auto& h : hist) del_in.domains[static_cast<std::size_t>(h.sector)] = SectorDomain::subset(h.left);
  b.add_rule(del_in);

  Rule accept = b.draft("accept", s5, ac, RuleTag::transition(5, 0));
  lock_all_except(accept, {});
  b.add_rule(accept);

  // A transition also locks every sector locked by all rules of either adjacent set.
  for (Rule& r : b.rules()) {
    if (r.tag.kind != RuleTag::Kind::transition) continue;
    const int from = r.tag.from;
    const int to = r.tag.to;
    auto from_locks = locked_by_all(b.rules(), [from](const Rule& x) { return x.tag.is_step(from); }, S);
    auto to_locks = locked_by_all(b.rules(), [to](const Rule& x) { return x.tag.is_step(to); }, S);
    for (int s = 0; s < S; ++s) {
      if (from_locks[static_cast<std::size_t>(s)] || to_locks[static_cast<std::size_t>(s)])
        r.domains[static_cast<std::size_t>(s)] = SectorDomain::locked();
    }
  }

  SMachine half = b.build(st, ac, input, hist);
  SMachine full = circularize_m5(mirror_m4(half));

  MainMachineBundle out{std::move(full), toy, std::move(m3), m, L, 0, {}, {}, {}, 0, 0, 0, 0, {}};
  SMachine& M = out.machine;
  out.N = M.hardware().part_count();
  out.c4_note = "m, N << c4 << L; c4 is recorded only, it drives no construction";
  out.w_st = standard_configuration(M, M.start_letters(), {});
  out.w_ac = standard_configuration(M, M.end_letters(), {});
  out.alpha = M.alphabet().at("alpha");
  out.alpha_mirror = M.alphabet().at("alpha~");
  out.input_sector = M.alphabet().info(out.alpha).part;
  out.mirror_input_sector = M.alphabet().info(out.alpha_mirror).part;
  for (int p = 0; p < M.hardware().part_count(); ++p) {
    const std::string& pn = M.hardware().part_names[static_cast<std::size_t>(p)];
    if (p == 0) {
      out.theta3_letters.push_back(M.alphabet().at("t"));
    } else if (pn.back() == '~') {
      out.theta3_letters.push_back(M.alphabet().at(pn.substr(0, pn.size() - 1) + "_3~"));
    } else {
      out.theta3_letters.push_back(M.alphabet().at(pn + "_3"));
    }
  }
  return out;
}

AdmissibleWord MainMachineBundle::junction_word(long k, long kp) const {
  std::vector<Word> sectors(static_cast<std::size_t>(machine.hardware().sector_count()));
  sectors[static_cast<std::size_t>(input_sector)] = power(alpha, k);
  sectors[static_cast<std::size_t>(mirror_input_sector)] = power(alpha_mirror, -kp);
  return standard_configuration(machine, theta3_letters, sectors);
}

namespace {

void push_power(std::vector<std::string>& out, const std::string& label, long k) {
  for (long i = 0; i < (k < 0 ? -k : k); ++i) out.push_back(k < 0 ? label + "^-1" : label);
}

}  // namespace

History MainMachineBundle::history_to_junction(long k) const {
  std::vector<std::string> labels{"start"};
  push_power(labels, "ins_alpha", k);
  labels.push_back("t12");
  for (int i = 1; i <= 2 * m; ++i) {
    // Odd phases move alpha into the deposit, even phases move it back.
    push_power(labels, "L_z" + std::to_string(i), k);
    if (i < 2 * m) labels.push_back("L_turn" + std::to_string(i));
  }
  labels.push_back("t23");
  History h;
  for (const auto& l : labels) h.push_back(machine.rule_at(l));
  return h;
}

std::optional<History> MainMachineBundle::accepting_history(long k) const {
  auto h1 = toy_accepting_history(toy, k);
  if (!h1) return std::nullopt;
  auto label = [&](RuleIndex e) { return signed_name(toy.machine.rule(e & ~1u).label, e); };
  std::vector<std::string> labels;
  for (auto it = h1->rbegin(); it != h1->rend(); ++it) labels.push_back("ins_" + label(*it));
  labels.push_back("t34");
  History core = m3_canonical_history(m3, *h1);
  for (RuleIndex r : core) labels.push_back(m3.rule(r).signed_label());
  labels.push_back("t45");
  for (RuleIndex e : *h1) labels.push_back("del_" + label(e));
  // del_in removes one alpha next to the runner part; its inverse removes alpha^-1.
  push_power(labels, "del_in", k);
  labels.push_back("accept");
  History h;
  for (const auto& l : labels) h.push_back(machine.rule_at(l));
  return h;
}

bool MainMachineBundle::superscripted(const Rule& r) const {
  return r.tag.is_step(1) || r.tag.is_step(2) || r.tag.is_transition(0, 1) || r.tag.is_transition(1, 2);
}

SMachine build_trimmed_machine(const MainMachineBundle& bundle) {
  const SMachine& M = bundle.machine;
  const Alphabet& a = M.alphabet();
  const Hardware& hw = M.hardware();
  auto keep = [](const Rule& r) {
    return r.tag.is_step(3) || r.tag.is_step(4) || r.tag.is_step(5) || r.tag.is_transition(3, 4) ||
           r.tag.is_transition(4, 5) || r.tag.is_transition(5, 0);
  };
  std::set<SymbolId> used;
  for (const Rule& r : M.rules()) {
    if (!keep(r)) continue;
    for (const RulePart& rp : r.parts) {
      used.insert(rp.from);
      used.insert(rp.to);
    }
  }
  MachineBuilder b("trimmed", hw.circular);
  for (int p = 0; p < hw.part_count(); ++p) b.add_part(hw.part_names[static_cast<std::size_t>(p)]);
  for (int p = 0; p < hw.part_count(); ++p) {
    for (SymbolId q : hw.part_letters[static_cast<std::size_t>(p)]) {
      if (used.count(q)) b.state(p, a.name(q));
    }
  }
  b.finish_parts();
  for (int s = 0; s < hw.sector_count(); ++s) {
    for (SymbolId y : hw.sector_letters[static_cast<std::size_t>(s)]) b.tape(s, a.name(y));
  }
  for (std::size_t k = 0; k < M.rule_count(); k += 2) {
    const Rule& r = M.rule(static_cast<RuleIndex>(k));
    if (keep(r)) b.add_rule(copy_rule(r, M, b, same, identity_map(hw.part_count()), identity_map(hw.sector_count())));
  }
  std::vector<SMachine::HistorySector> history;
  for (const auto& h : M.history_sectors()) history.push_back({h.sector, by_names(M, h.left, b), by_names(M, h.right, b)});
  return b.build(by_names(M, bundle.theta3_letters, b), by_names(M, M.end_letters(), b), M.input_sector(), std::move(history));
}

}  // namespace smw
