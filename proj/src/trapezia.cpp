#include "smw/trapezia.hpp"

#include <sstream>

#include "smw/error.hpp"

namespace smw {

namespace {

int up(int i, int L) { return i % L + 1; }
int down(int i, int L) { return (i + L - 2) % L + 1; }

bool is_t(const SMachine& m, const Letter& x) {
  const SymbolInfo& info = m.alphabet().info(x.symbol);
  return info.kind == LetterKind::state && info.part == 0 && m.hardware().circular;
}

RuleMode mode_of(const MainMachineBundle& b, const Rule& r) {
  if (b.mixed(r)) return RuleMode::mixed;
  return b.superscripted(r) ? RuleMode::superscripted : RuleMode::plain;
}

// Which side of a band applying the signed rule carries superscripts.
bool bottom_superscripted(RuleMode md, bool positive) {
  return md == RuleMode::superscripted || (md == RuleMode::mixed && positive);
}
bool top_superscripted(RuleMode md, bool positive) {
  return md == RuleMode::superscripted || (md == RuleMode::mixed && !positive);
}

Word reduce_and_trim(const Presentation& p, const Word& w) {
  Word r = reduce_word(w);
  std::size_t lo = 0, hi = r.size();
  while (lo < hi && p.symbol(r[lo].symbol).kind == GeneratorKind::tape) ++lo;
  while (hi > lo && p.symbol(r[hi - 1].symbol).kind == GeneratorKind::tape) --hi;
  return Word(r.begin() + static_cast<std::ptrdiff_t>(lo), r.begin() + static_cast<std::ptrdiff_t>(hi));
}

// Machine word of a group word made of q- and tape letters, superscripts erased.
Word to_machine_word(const Presentation& p, const SMachine& m, const Word& w) {
  Word out;
  for (const Letter& x : w) {
    const GeneratorSymbol& g = p.symbol(x.symbol);
    if (g.kind != GeneratorKind::q && g.kind != GeneratorKind::tape)
      throw Error(ErrorCode::malformed_word, "label contains " + p.letter_name(x));
    out.push_back(Letter{m.alphabet().at(g.name), 0, x.inverse});
  }
  return out;
}

class BandBuilder {
 public:
  BandBuilder(const MainMachineBundle& b, const Presentation& p) : b_(b), p_(p) {
    const Alphabet& a = b.machine.alphabet();
    sym_.resize(a.size());
    for (SymbolId s = 0; s < a.size(); ++s) sym_[s] = p.symbol_at(a.name(s));
  }

  Letter g(const Letter& x, int sup) const { return Letter{sym_[x.symbol], static_cast<std::int16_t>(sup), x.inverse}; }
  Word g(const Word& w, int sup) const {
    Word out;
    for (const Letter& x : w) out.push_back(g(x, sup));
    return out;
  }
  Word g(const Word& w) const {
    Word out;
    for (const Letter& x : w) out.push_back(g(x, x.superscript));
    return out;
  }

  // θ_j^(i) for j in [0, N]; θ_0^(i) = θ_N^(i-1).
  Letter theta(const std::string& label, int j, int i) const {
    const int N = b_.N;
    if (j == 0) return Letter{p_.symbol_at(theta_name(label, N)), static_cast<std::int16_t>(i ? down(i, b_.L) : 0), false};
    return Letter{p_.symbol_at(theta_name(label, j)), static_cast<std::int16_t>(i), false};
  }

  std::vector<Cell> positive_band(RuleIndex positive, const Word& bottom) const {
    const SMachine& m = b_.machine;
    const Rule& r = m.rule(positive);
    const RuleMode md = mode_of(b_, r);
    std::vector<Cell> cells;
    for (const Letter& x : bottom) {
      const SymbolInfo& info = m.alphabet().info(x.symbol);
      const int s = x.superscript;
      const int iv = md == RuleMode::superscripted ? s : 0;
      Cell c;
      if (info.kind == LetterKind::state) {
        const RulePart& rp = r.parts[static_cast<std::size_t>(info.part)];
        Word v = g(rp.left, iv);
        v.push_back(g(Letter{rp.to, 0, false}, iv));
        Word vb = g(rp.right, iv);
        v.insert(v.end(), vb.begin(), vb.end());
        c.kind = RelatorKind::theta_q;
        Letter left = theta(r.label, info.part, s);
        Letter right = theta(r.label, info.part + 1, s);
        if (!x.inverse) {
          c.bottom = {g(x, s)};
          c.top = v;
          c.left = left;
          c.right = right;
        } else {
          c.bottom = {g(x, s)};
          c.top = inverse_word(v);
          c.left = right;
          c.right = left;
        }
      } else {
        c.kind = RelatorKind::theta_a;
        Letter th = theta(r.label, info.part + 1, s);
        c.bottom = {g(x, s)};
        c.top = {g(x, iv)};
        c.left = th;
        c.right = th;
      }
      cells.push_back(std::move(c));
    }
    return cells;
  }

 private:
  const MainMachineBundle& b_;
  const Presentation& p_;
  std::vector<SymbolId> sym_;
};

}  // namespace

Word erase_superscripts(const Word& w) {
  Word out = w;
  for (Letter& x : out) x.superscript = 0;
  return out;
}

PermissibleWord lift_word(const SMachine& m, const Word& w, int first, int L) {
  PermissibleWord out{erase_superscripts(w)};
  if (first == 0 || out.letters.empty()) return out;
  int s = first;
  for (std::size_t k = 0; k < out.letters.size(); ++k) {
    if (k > 0) {
      const Letter& prev = out.letters[k - 1];
      const Letter& cur = out.letters[k];
      if (is_t(m, cur) && !cur.inverse) s = up(s, L);
      if (is_t(m, prev) && prev.inverse) s = down(s, L);
    }
    out.letters[k].superscript = static_cast<std::int16_t>(s);
  }
  return out;
}

bool is_permissible(const SMachine& m, const Word& w, int L) {
  bool plain = true;
  for (const Letter& x : w) plain = plain && x.superscript == 0;
  if (plain) return true;
  if (w.empty() || w.front().superscript < 1 || w.front().superscript > L) return false;
  return lift_word(m, w, w.front().superscript, L).letters == w;
}

PermissibleWord make_permissible(const MainMachineBundle& b, const AdmissibleWord& v, RuleIndex rule,
                                 std::optional<int> first) {
  const SMachine& m = b.machine;
  const Rule& r = m.rule(rule);
  const RuleMode md = mode_of(b, m.rule(rule & ~1u));
  const bool sup = bottom_superscripted(md, SMachine::is_positive(rule));
  if (sup && !first)
    throw Error(ErrorCode::superscript_required, "words admissible for " + r.signed_label() + " carry superscripts");
  if (!sup && first)
    throw Error(ErrorCode::superscript_forbidden, "words admissible for " + r.signed_label() + " carry no superscripts");
  if (first && (*first < 1 || *first > b.L)) throw Error(ErrorCode::bad_parameters, "superscript out of [1, L]");
  if (!is_applicable(m, v, rule))
    throw Error(ErrorCode::not_applicable, "word is not admissible for " + r.signed_label());
  return lift_word(m, v.letters(), first.value_or(0), b.L);
}

Word Cell::boundary() const {
  Word w = bottom;
  w.push_back(right);
  Word ti = inverse_word(top);
  w.insert(w.end(), ti.begin(), ti.end());
  w.push_back(left.inv());
  return w;
}

Trapezium computation_to_trapezium(const MainMachineBundle& b, const Presentation& p, const Computation& c,
                                   std::optional<int> first) {
  const SMachine& m = b.machine;
  if (c.history.empty()) throw Error(ErrorCode::empty_history, "a trapezium needs at least one band");
  if (!is_eligible(m, c.history)) throw Error(ErrorCode::ineligible_history, history_to_string(m, c.history));
  if (first && (*first < 1 || *first > b.L)) throw Error(ErrorCode::bad_parameters, "superscript out of [1, L]");
  BandBuilder builder(b, p);
  Trapezium t;
  t.history = c.history;
  t.base = base_of(m, c.start);
  int carry = first.value_or(0);
  Word bottom;  // machine letters with superscripts
  for (std::size_t k = 0; k < c.history.size(); ++k) {
    const RuleIndex r = c.history[k];
    const RuleIndex pos = r & ~1u;
    const bool positive = SMachine::is_positive(r);
    const RuleMode md = mode_of(b, m.rule(pos));
    const bool bsup = bottom_superscripted(md, positive);
    const bool tsup = top_superscripted(md, positive);
    if (k == 0) {
      if (bsup && carry == 0)
        throw Error(ErrorCode::superscript_required, "the first band of " + m.rule(r).signed_label() + " needs a superscript");
      bottom = lift_word(m, c.trace[0].letters(), bsup ? carry : 0, b.L).letters;
    }
    if (bsup) carry = bottom.front().superscript;
    if (tsup && carry == 0)
      throw Error(ErrorCode::superscript_required, "band " + std::to_string(k + 1) + " needs a superscript");
    Word top = lift_word(m, c.trace[k + 1].letters(), tsup ? carry : 0, b.L).letters;
    ThetaBand band;
    band.rule = r;
    band.bottom = builder.g(bottom);
    band.top = builder.g(top);
    if (positive) {
      band.cells = builder.positive_band(pos, bottom);
    } else {
      band.cells = builder.positive_band(pos, top);
      for (Cell& cell : band.cells) {
        std::swap(cell.bottom, cell.top);
        cell.left = cell.left.inv();
        cell.right = cell.right.inv();
      }
    }
    t.bands.push_back(std::move(band));
    bottom = std::move(top);
  }
  return t;
}

std::size_t trapezium_area(const Trapezium& t) {
  std::size_t n = 0;
  for (const ThetaBand& band : t.bands) n += band.cells.size();
  return n;
}

TrapeziumCheck check_trapezium(const MainMachineBundle& b, const Presentation& p, const Trapezium& t,
                               const Computation& c) {
  const SMachine& m = b.machine;
  auto fail = [](std::string why) { return TrapeziumCheck{false, std::move(why)}; };
  if (t.height() != c.history.size()) return fail("height differs from the history length");
  auto is_q = [&](const Letter& x) { return p.symbol(x.symbol).kind == GeneratorKind::q; };
  for (std::size_t k = 0; k < t.bands.size(); ++k) {
    const ThetaBand& band = t.bands[k];
    const std::string where = "band " + std::to_string(k + 1) + ": ";
    if (band.rule != c.history[k]) return fail(where + "rule differs from the history");
    if (band.cells.empty()) return fail(where + "no cells");
    Word bottoms, tops;
    for (std::size_t i = 0; i < band.cells.size(); ++i) {
      const Cell& cell = band.cells[i];
      if (!p.has_relator(cell.boundary()))
        return fail(where + "cell " + std::to_string(i) + " boundary " + p.word_text(cell.boundary()) + " is not a relator");
      if (i + 1 < band.cells.size() && !(cell.right == band.cells[i + 1].left))
        return fail(where + "θ-edges of cells " + std::to_string(i) + " and " + std::to_string(i + 1) + " differ");
      bottoms.insert(bottoms.end(), cell.bottom.begin(), cell.bottom.end());
      tops.insert(tops.end(), cell.top.begin(), cell.top.end());
    }
    if (reduce_and_trim(p, bottoms) != band.bottom) return fail(where + "cell bottoms do not spell the bottom label");
    if (reduce_and_trim(p, tops) != band.top) return fail(where + "cell tops do not spell the top label");
    for (const Word* label : {&band.bottom, &band.top}) {
      if (label->empty() || !is_q(label->front()) || !is_q(label->back()))
        return fail(where + "label does not start and end with q-letters");
    }
    if (k + 1 < t.bands.size() && band.top != t.bands[k + 1].bottom) return fail(where + "top differs from the next bottom");
    if (to_machine_word(p, m, band.bottom) != c.trace[k].letters()) return fail(where + "bottom does not erase to the trace");
    if (to_machine_word(p, m, band.top) != c.trace[k + 1].letters()) return fail(where + "top does not erase to the trace");
  }
  return {};
}

std::string dump_trapezium(const MainMachineBundle& b, const Presentation& p, const Trapezium& t) {
  std::ostringstream os;
  for (const ThetaBand& band : t.bands) {
    os << b.machine.rule(band.rule).signed_label() << " | " << p.word_text(band.bottom) << " | " << p.word_text(band.top)
       << "\n";
  }
  return os.str();
}

DiskVerdict is_disk_word(const MainMachineBundle& b, const PermissibleWord& v, const SearchOptions& opt) {
  const SMachine& m = b.machine;
  DiskVerdict out;
  const Word e = erase_superscripts(v.letters);
  const std::size_t L = static_cast<std::size_t>(b.L);
  if (e.empty() || e.size() % L != 0) {
    out.verdict = Verdict::no;
    out.reason = "erasure is not an L-th power";
    return out;
  }
  const Word w(e.begin(), e.begin() + static_cast<std::ptrdiff_t>(e.size() / L));
  for (std::size_t i = 0; i < e.size(); ++i) {
    if (!(e[i] == w[i % w.size()])) {
      out.verdict = Verdict::no;
      out.reason = "erasure is not an L-th power";
      return out;
    }
  }
  if (!is_admissible(m, w)) {
    out.verdict = Verdict::no;
    out.reason = "root is not an admissible word";
    return out;
  }
  if (!is_permissible(m, v.letters, b.L)) {
    out.verdict = Verdict::no;
    out.reason = "word is not permissible";
    return out;
  }
  AdmissibleWord root(m, w);
  out.root = root;
  if (root == b.w_ac || root == b.w_st) {
    out.verdict = Verdict::yes;
    out.reason = "hub word";
    out.witness = Computation{root, {}, {root}};
    return out;
  }
  out.search = bidirectional_search(m, root, {b.w_ac, b.w_st}, opt);
  out.verdict = out.search.verdict;
  if (out.verdict == Verdict::yes) {
    if (*out.search.target == b.w_ac) {
      out.witness = run_history(m, root, *out.search.witness);
      out.reason = "accepting computation";
    } else {
      History h;
      for (auto it = out.search.witness->rbegin(); it != out.search.witness->rend(); ++it)
        h.push_back(SMachine::inverse_of(*it));
      out.witness = run_history(m, b.w_st, h);
      out.reason = "reachable from the start word";
    }
  } else if (out.verdict == Verdict::no) {
    out.reason = "component of the root exhausted";
  } else {
    out.reason = "search budget exhausted";
  }
  return out;
}

std::size_t disk_diagram_cells(const MainMachineBundle& b, const Presentation& p, const AdmissibleWord& w,
                               const Computation& c) {
  const SMachine& m = b.machine;
  Computation replay;
  try {
    replay = run_history(m, c.start, c.history);
  } catch (const Error& e) {
    throw Error(ErrorCode::witness_invalid, e.what());
  }
  if (replay.trace != c.trace) throw Error(ErrorCode::witness_invalid, "trace does not replay");
  if (c.history.empty()) {
    if (c.start == w && (w == b.w_ac || w == b.w_st)) return 1;
    throw Error(ErrorCode::witness_invalid, "an empty witness only fits a hub word");
  }
  const bool accepting = c.start == w && c.end() == b.w_ac;
  const bool from_start = c.start == b.w_st && c.end() == w;
  if (!accepting && !from_start) throw Error(ErrorCode::witness_invalid, "computation links neither W to W_ac nor W_st to W");
  Trapezium t = computation_to_trapezium(b, p, c, 1);
  return 1 + static_cast<std::size_t>(b.L) * trapezium_area(t);
}

}  // namespace smw
