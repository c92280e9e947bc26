#include "smw/execution.hpp"

#include "smw/error.hpp"

namespace smw {

namespace {

bool admissible_impl(const SMachine& m, const Word& w) {
  const Alphabet& a = m.alphabet();
  const Hardware& hw = m.hardware();
  const int P = hw.part_count();
  if (w.empty() || !a.is_state(w.front().symbol) || !a.is_state(w.back().symbol)) return false;
  if (!is_reduced(w)) return false;
  std::size_t i = 0;
  while (i + 1 < w.size()) {
    const Letter q = w[i];
    std::size_t j = i + 1;
    while (j < w.size() && !a.is_state(w[j].symbol)) ++j;
    if (j == w.size()) return false;
    const int part = a.info(q.symbol).part;
    std::optional<int> sector = q.inverse ? hw.sector_left_of(part) : hw.sector_right_of(part);
    if (!sector) return false;
    for (std::size_t k = i + 1; k < j; ++k) {
      if (a.info(w[k].symbol).part != *sector) return false;
    }
    const Letter next = w[j];
    if (next != q.inv()) {
      if (next.inverse != q.inverse) return false;
      const int np = a.info(next.symbol).part;
      int want = q.inverse ? part - 1 : part + 1;
      if (hw.circular) want = (want + P) % P;
      if (np != want) return false;
    }
    i = j;
  }
  return true;
}

}  // namespace

AdmissibleWord::AdmissibleWord(const SMachine& m, Word letters) : letters_(std::move(letters)) {
  if (!admissible_impl(m, letters_))
    throw Error(ErrorCode::malformed_word, "not admissible: " + word_to_string(m.alphabet(), letters_));
}

bool is_admissible(const SMachine& m, const Word& w) { return admissible_impl(m, w); }

AdmissibleWord parse_admissible(const SMachine& m, std::string_view text) {
  return AdmissibleWord(m, parse_word(m.alphabet(), text));
}

std::string to_string(const SMachine& m, const AdmissibleWord& w) { return word_to_string(m.alphabet(), w.letters()); }

std::vector<BaseLetter> base_of(const SMachine& m, const AdmissibleWord& w) {
  std::vector<BaseLetter> base;
  for (const Letter& x : w.letters()) {
    if (m.alphabet().is_state(x.symbol)) base.push_back({m.alphabet().info(x.symbol).part, x.inverse});
  }
  return base;
}

std::string base_to_string(const SMachine& m, const std::vector<BaseLetter>& base) {
  std::string s;
  for (std::size_t i = 0; i < base.size(); ++i) {
    if (i) s += ' ';
    s += m.hardware().part_names[base[i].part];
    if (base[i].inverse) s += "^-1";
  }
  return s;
}

bool has_standard_base(const SMachine& m, const AdmissibleWord& w) {
  auto base = base_of(m, w);
  if (static_cast<int>(base.size()) != m.hardware().part_count()) return false;
  for (std::size_t i = 0; i < base.size(); ++i) {
    if (base[i].inverse || base[i].part != static_cast<int>(i)) return false;
  }
  return true;
}

std::size_t state_length(const SMachine& m, const Word& w) {
  std::size_t n = 0;
  for (const Letter& x : w) n += m.alphabet().is_state(x.symbol) ? 1 : 0;
  return n;
}

std::size_t tape_length(const SMachine& m, const Word& w) { return w.size() - state_length(m, w); }

namespace {

bool applicable_impl(const SMachine& m, const Word& w, const Rule& r) {
  const Alphabet& a = m.alphabet();
  for (const Letter& x : w) {
    const SymbolInfo& info = a.info(x.symbol);
    if (info.kind == LetterKind::state) {
      if (r.parts[info.part].from != x.symbol) return false;
    } else if (!r.allows(x.symbol)) {
      return false;
    }
  }
  return true;
}

Word substitute(const SMachine& m, const Word& w, const Rule& r) {
  const Alphabet& a = m.alphabet();
  Word out;
  out.reserve(w.size() + 8);
  for (const Letter& x : w) {
    const SymbolInfo& info = a.info(x.symbol);
    if (info.kind == LetterKind::tape) {
      out.push_back(x.plain());
      continue;
    }
    const RulePart& rp = r.parts[info.part];
    if (!x.inverse) {
      out.insert(out.end(), rp.left.begin(), rp.left.end());
      out.push_back(Letter{rp.to, 0, false});
      out.insert(out.end(), rp.right.begin(), rp.right.end());
    } else {
      for (auto it = rp.right.rbegin(); it != rp.right.rend(); ++it) out.push_back(it->inv());
      out.push_back(Letter{rp.to, 0, true});
      for (auto it = rp.left.rbegin(); it != rp.left.rend(); ++it) out.push_back(it->inv());
    }
  }
  out = reduce_word(std::move(out));
  std::size_t first = 0;
  while (first < out.size() && !a.is_state(out[first].symbol)) ++first;
  std::size_t last = out.size();
  while (last > first && !a.is_state(out[last - 1].symbol)) --last;
  return Word(out.begin() + static_cast<std::ptrdiff_t>(first), out.begin() + static_cast<std::ptrdiff_t>(last));
}

}  // namespace

bool is_applicable(const SMachine& m, const AdmissibleWord& w, RuleIndex rule) {
  return admissible_impl(m, w.letters()) && applicable_impl(m, w.letters(), m.rule(rule));
}

std::optional<AdmissibleWord> try_apply(const SMachine& m, const AdmissibleWord& w, RuleIndex rule) {
  const Rule& r = m.rule(rule);
  if (!applicable_impl(m, w.letters(), r)) return std::nullopt;
  return AdmissibleWord::unchecked(substitute(m, w.letters(), r));
}

AdmissibleWord apply_rule(const SMachine& m, const AdmissibleWord& w, RuleIndex rule) {
  const Rule& r = m.rule(rule);
  if (!admissible_impl(m, w.letters()))
    throw Error(ErrorCode::malformed_word, "not admissible: " + word_to_string(m.alphabet(), w.letters()));
  if (!applicable_impl(m, w.letters(), r))
    throw Error(ErrorCode::not_applicable, r.signed_label() + " to " + word_to_string(m.alphabet(), w.letters()));
  return AdmissibleWord(m, substitute(m, w.letters(), r));
}

std::string history_to_string(const SMachine& m, const History& h) {
  std::string s;
  for (std::size_t i = 0; i < h.size(); ++i) {
    if (i) s += ' ';
    s += m.rule(h[i]).signed_label();
  }
  return s;
}

History parse_history(const SMachine& m, std::string_view text) {
  History h;
  std::size_t i = 0;
  while (i < text.size()) {
    while (i < text.size() && static_cast<unsigned char>(text[i]) <= ' ') ++i;
    std::size_t j = i;
    while (j < text.size() && static_cast<unsigned char>(text[j]) > ' ') ++j;
    if (j > i) h.push_back(m.rule_at(text.substr(i, j - i)));
    i = j;
  }
  return h;
}

Computation run_history(const SMachine& m, const AdmissibleWord& w, const History& h) {
  if (!admissible_impl(m, w.letters()))
    throw Error(ErrorCode::malformed_word, "not admissible: " + word_to_string(m.alphabet(), w.letters()));
  Computation c{w, h, {w}};
  c.trace.reserve(h.size() + 1);
  for (std::size_t k = 0; k < h.size(); ++k) {
    auto next = try_apply(m, c.trace.back(), h[k]);
    if (!next)
      throw Error(ErrorCode::not_applicable_at,
                  "step " + std::to_string(k) + " (" + m.rule(h[k]).signed_label() + ") on " +
                      word_to_string(m.alphabet(), c.trace.back().letters()));
    c.trace.push_back(std::move(*next));
  }
  return c;
}

std::vector<std::string> step_history(const SMachine& m, const History& h) {
  std::vector<std::string> out;
  int last_step = -1;
  for (RuleIndex k : h) {
    const Rule& r = m.rule(k);
    switch (r.tag.kind) {
      case RuleTag::Kind::none:
        throw Error(ErrorCode::untagged_rule, r.signed_label());
      case RuleTag::Kind::step:
        if (r.tag.from != last_step) out.push_back("(" + std::to_string(r.tag.from) + ")");
        last_step = r.tag.from;
        break;
      case RuleTag::Kind::transition: {
        int a = r.positive ? r.tag.from : r.tag.to;
        int b = r.positive ? r.tag.to : r.tag.from;
        out.push_back("(" + std::to_string(a) + std::to_string(b) + ")");
        last_step = -1;
        break;
      }
    }
  }
  return out;
}

bool is_reduced_history(const History& h) {
  for (std::size_t i = 1; i < h.size(); ++i) {
    if (h[i] == SMachine::inverse_of(h[i - 1])) return false;
  }
  return true;
}

namespace {

bool cancellation_allowed(const SMachine& m, RuleIndex first) {
  const Rule& r = m.rule(first);
  return r.positive && r.tag.is_transition(2, 3);
}

}  // namespace

bool is_eligible(const SMachine& m, const History& h) {
  for (std::size_t i = 1; i < h.size(); ++i) {
    if (h[i] == SMachine::inverse_of(h[i - 1]) && !cancellation_allowed(m, h[i - 1])) return false;
  }
  return true;
}

Computation ComputationView::materialize() const {
  return Computation{trace.front(), History(history.begin(), history.end()),
                     std::vector<AdmissibleWord>(trace.begin(), trace.end())};
}

namespace {

struct Walker {
  const SMachine& m;
  const EnumerationOptions& opt;
  const std::function<bool(const ComputationView&)>& visit;
  std::vector<AdmissibleWord> trace;
  History history;
  bool exact_only = false;  // iterative deepening: report only at full depth
  int target = 0;

  void run(int depth) {
    const bool at_target = static_cast<int>(history.size()) == target;
    if (!exact_only || at_target) {
      if (!visit(ComputationView{trace, history})) return;
    }
    if (depth == 0) return;
    const AdmissibleWord w = trace.back();  // trace grows below
    if (w.size() == 0) return;
    const Letter first = w.letters().front();
    const int part = m.alphabet().info(first.symbol).part;
    for (RuleIndex k : m.rules_from(part, first.symbol)) {
      if (!history.empty() && k == SMachine::inverse_of(history.back())) {
        if (opt.filter == HistoryFilter::reduced) continue;
        if (opt.filter == HistoryFilter::eligible && !cancellation_allowed(m, history.back())) continue;
      }
      if (opt.allow && !opt.allow(m.rule(k))) continue;
      auto next = try_apply(m, w, k);
      if (!next) continue;
      if (opt.max_tape != static_cast<std::size_t>(-1) && tape_length(m, next->letters()) > opt.max_tape) continue;
      trace.push_back(std::move(*next));
      history.push_back(k);
      run(depth - 1);
      trace.pop_back();
      history.pop_back();
    }
  }
};

}  // namespace

void for_each_computation(const SMachine& m, const AdmissibleWord& start, const EnumerationOptions& opt,
                          const std::function<bool(const ComputationView&)>& visit) {
  if (!admissible_impl(m, start.letters()))
    throw Error(ErrorCode::malformed_word, "not admissible: " + word_to_string(m.alphabet(), start.letters()));
  Walker w{m, opt, visit, {start}, {}};
  w.run(opt.depth);
}

std::vector<Computation> enumerate_computations(const SMachine& m, const AdmissibleWord& start, int depth,
                                                HistoryFilter filter) {
  std::vector<Computation> out;
  EnumerationOptions opt;
  opt.filter = filter;
  std::function<bool(const ComputationView&)> collect = [&](const ComputationView& v) {
    out.push_back(v.materialize());
    return true;
  };
  for (int d = 0; d <= depth; ++d) {
    opt.depth = d;
    Walker w{m, opt, collect, {start}, {}, true, d};
    w.run(d);
  }
  return out;
}

}  // namespace smw
