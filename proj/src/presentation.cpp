#include "smw/presentation.hpp"

#include <algorithm>
#include <sstream>

#include "smw/error.hpp"

namespace smw {

std::string_view to_string(GeneratorKind k) {
  switch (k) {
    case GeneratorKind::q: return "q";
    case GeneratorKind::tape: return "tape";
    case GeneratorKind::theta: return "theta";
    case GeneratorKind::stable: return "stable";
  }
  return "?";
}

std::string_view to_string(RelatorKind k) {
  switch (k) {
    case RelatorKind::theta_q: return "theta-q";
    case RelatorKind::theta_a: return "theta-a";
    case RelatorKind::hub: return "hub";
    case RelatorKind::hnn: return "hnn";
  }
  return "?";
}

namespace {

GeneratorKind parse_generator_kind(std::string_view s) {
  if (s == "q") return GeneratorKind::q;
  if (s == "tape") return GeneratorKind::tape;
  if (s == "theta") return GeneratorKind::theta;
  if (s == "stable") return GeneratorKind::stable;
  throw Error(ErrorCode::parse_error, "unknown generator kind '" + std::string(s) + "'");
}

RelatorKind parse_relator_kind(std::string_view s) {
  if (s == "theta-q") return RelatorKind::theta_q;
  if (s == "theta-a") return RelatorKind::theta_a;
  if (s == "hub") return RelatorKind::hub;
  if (s == "hnn") return RelatorKind::hnn;
  throw Error(ErrorCode::parse_error, "unknown relator kind '" + std::string(s) + "'");
}

}  // namespace

Word cyclic_reduce(Word w) {
  w = reduce_word(std::move(w));
  std::size_t lo = 0, hi = w.size();
  while (hi - lo >= 2 && w[lo] == w[hi - 1].inv()) {
    ++lo;
    --hi;
  }
  return Word(w.begin() + static_cast<std::ptrdiff_t>(lo), w.begin() + static_cast<std::ptrdiff_t>(hi));
}

Word canonical_relator(const Word& w) {
  Word c = cyclic_reduce(w);
  const std::size_t n = c.size();
  std::size_t best = 0;
  for (std::size_t r = 1; r < n; ++r) {
    for (std::size_t i = 0; i < n; ++i) {
      const Letter& a = c[(r + i) % n];
      const Letter& b = c[(best + i) % n];
      if (a == b) continue;
      if (a < b) best = r;
      break;
    }
  }
  std::rotate(c.begin(), c.begin() + static_cast<std::ptrdiff_t>(best), c.end());
  return c;
}

SymbolId Presentation::intern(const std::string& name, GeneratorKind kind, int index, const std::string& rule) {
  auto it = by_name_.find(name);
  if (it != by_name_.end()) return it->second;
  auto id = static_cast<SymbolId>(symbols_.size());
  symbols_.push_back(GeneratorSymbol{name, kind, index, rule});
  by_name_.emplace(name, id);
  return id;
}

std::optional<SymbolId> Presentation::find_symbol(std::string_view name) const {
  auto it = by_name_.find(std::string(name));
  if (it == by_name_.end()) return std::nullopt;
  return it->second;
}

SymbolId Presentation::symbol_at(std::string_view name) const {
  auto s = find_symbol(name);
  if (!s) throw Error(ErrorCode::unknown_generator, "no generator named '" + std::string(name) + "'");
  return *s;
}

void Presentation::declare(SymbolId symbol, int superscript) {
  Letter x{symbol, static_cast<std::int16_t>(superscript), false};
  if (generator_set_.insert(Word{x}).second) generators_.push_back(x);
}

bool Presentation::is_generator(const Letter& x) const {
  return generator_set_.count(Word{Letter{x.symbol, x.superscript, false}}) > 0;
}

void Presentation::add_relator(Relator r) {
  for (const Letter& x : r.word) {
    if (x.symbol >= symbols_.size() || !is_generator(x))
      throw Error(ErrorCode::unknown_generator, "relator uses undeclared letter");
  }
  r.word = canonical_relator(r.word);
  relator_set_.insert(r.word);
  relators_.push_back(std::move(r));
}

bool Presentation::has_relator(const Word& w) const {
  return relator_set_.count(canonical_relator(w)) > 0 || relator_set_.count(canonical_relator(inverse_word(w))) > 0;
}

std::string Presentation::letter_name(const Letter& x) const {
  std::string s = symbols_.at(x.symbol).name;
  if (x.superscript != 0) s += "{" + std::to_string(x.superscript) + "}";
  return s;
}

std::string Presentation::word_text(const Word& w) const {
  if (w.empty()) return "1";
  std::string s;
  for (std::size_t i = 0; i < w.size(); ++i) {
    if (i) s += '.';
    s += letter_name(w[i]);
    if (w[i].inverse) s += "^-1";
  }
  return s;
}

Word Presentation::parse_word(std::string_view text) const {
  Word w;
  if (text == "1") return w;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t dot = text.find('.', pos);
    std::string_view tok = text.substr(pos, dot == std::string_view::npos ? std::string_view::npos : dot - pos);
    Letter x;
    if (tok.size() > 3 && tok.substr(tok.size() - 3) == "^-1") {
      x.inverse = true;
      tok.remove_suffix(3);
    }
    if (!tok.empty() && tok.back() == '}') {
      auto open = tok.rfind('{');
      if (open == std::string_view::npos) throw Error(ErrorCode::parse_error, "bad superscript in '" + std::string(tok) + "'");
      x.superscript = static_cast<std::int16_t>(std::stoi(std::string(tok.substr(open + 1, tok.size() - open - 2))));
      tok = tok.substr(0, open);
    }
    x.symbol = symbol_at(tok);
    if (!is_generator(x)) throw Error(ErrorCode::unknown_generator, "'" + letter_name(x) + "' is not a generator");
    w.push_back(x);
    if (dot == std::string_view::npos) break;
    pos = dot + 1;
  }
  return w;
}

std::string theta_name(const std::string& rule, int j) { return "T#" + rule + "#" + std::to_string(j); }

Word with_superscript(const Word& w, int superscript) {
  Word out = w;
  for (Letter& x : out) x.superscript = static_cast<std::int16_t>(superscript);
  return out;
}

Word to_group_word(const Presentation& p, const SMachine& m, const Word& w) {
  Word out;
  out.reserve(w.size());
  for (const Letter& x : w) {
    Letter y{p.symbol_at(m.alphabet().name(x.symbol)), x.superscript, x.inverse};
    if (!p.is_generator(y)) throw Error(ErrorCode::unknown_generator, "'" + p.letter_name(y) + "' is not a generator");
    out.push_back(y);
  }
  return out;
}

Presentation compile_machine(const SMachine& m, int L, const std::function<RuleMode(const Rule&)>& mode,
                             std::string name) {
  const Hardware& hw = m.hardware();
  if (!hw.circular) throw Error(ErrorCode::invalid_machine, "group presentations need a circular machine");
  if (L < 1) throw Error(ErrorCode::bad_parameters, "L must be positive");
  const int N = hw.part_count();
  const Alphabet& a = m.alphabet();
  Presentation out(std::move(name), L, N);

  std::vector<SymbolId> sym(a.size());
  for (SymbolId s = 0; s < a.size(); ++s) {
    sym[s] = out.intern(a.name(s), a.is_state(s) ? GeneratorKind::q : GeneratorKind::tape, a.info(s).part);
  }
  std::vector<bool> sup(a.size(), false), plain(a.size(), false);
  bool lifted = false;  // some rule carries superscripts; then every tape letter has L copies
  for (std::size_t k = 0; k < m.rule_count(); k += 2) {
    const Rule& r = m.rule(static_cast<RuleIndex>(k));
    const RuleMode md = mode(r);
    for (const RulePart& rp : r.parts) {
      (md == RuleMode::plain ? plain : sup)[rp.from] = true;
      (md == RuleMode::superscripted ? sup : plain)[rp.to] = true;
    }
    lifted = lifted || md != RuleMode::plain;
  }
  for (SymbolId s = 0; s < a.size(); ++s) {
    if (a.is_state(s)) {
      if (!sup[s] && !plain[s]) plain[s] = true;
      if (plain[s]) out.declare(sym[s], 0);
      if (sup[s]) {
        for (int i = 1; i <= L; ++i) out.declare(sym[s], i);
      }
    } else {
      out.declare(sym[s], 0);
      if (lifted) {
        for (int i = 1; i <= L; ++i) out.declare(sym[s], i);
      }
    }
  }

  auto dec = [L](int i) { return i == 0 ? 0 : (i + L - 2) % L + 1; };
  auto lift = [&](const Word& w, int i) {
    Word r;
    for (const Letter& x : w) r.push_back(Letter{sym[x.symbol], static_cast<std::int16_t>(i), x.inverse});
    return r;
  };

  for (std::size_t k = 0; k < m.rule_count(); k += 2) {
    const Rule& r = m.rule(static_cast<RuleIndex>(k));
    const RuleMode md = mode(r);
    std::vector<SymbolId> thetas;
    for (int j = 1; j <= N; ++j) thetas.push_back(out.intern(theta_name(r.label, j), GeneratorKind::theta, j, r.label));
    std::vector<int> sups;
    if (md == RuleMode::plain) {
      sups.push_back(0);
    } else {
      for (int i = 1; i <= L; ++i) sups.push_back(i);
    }
    for (int i : sups) {
      for (int j = 1; j <= N; ++j) out.declare(thetas[static_cast<std::size_t>(j - 1)], i);
    }
    // θ_j for j in [0, N]; θ_0^(i) is θ_N^(i-1).
    auto theta = [&](int j, int i) {
      if (j == 0) return Letter{thetas.back(), static_cast<std::int16_t>(dec(i)), false};
      return Letter{thetas[static_cast<std::size_t>(j - 1)], static_cast<std::int16_t>(i), false};
    };
    for (int i : sups) {
      const int iu = i;
      const int iv = md == RuleMode::superscripted ? i : 0;
      for (int p = 0; p < N; ++p) {
        const RulePart& rp = r.parts[static_cast<std::size_t>(p)];
        Word v = lift(rp.left, iv);
        v.push_back(Letter{sym[rp.to], static_cast<std::int16_t>(iv), false});
        Word vb = lift(rp.right, iv);
        v.insert(v.end(), vb.begin(), vb.end());
        Word w{Letter{sym[rp.from], static_cast<std::int16_t>(iu), false}, theta(p + 1, i)};
        Word vi = inverse_word(v);
        w.insert(w.end(), vi.begin(), vi.end());
        w.push_back(theta(p, i).inv());
        out.add_relator(Relator{std::move(w), RelatorKind::theta_q, r.label, p, i});
      }
      for (int s = 0; s < hw.sector_count(); ++s) {
        const SectorDomain& d = r.domains[static_cast<std::size_t>(s)];
        if (d.is_locked()) continue;
        const std::vector<SymbolId>& letters =
            d.mode == SectorDomain::Mode::subset ? d.letters : hw.sector_letters[static_cast<std::size_t>(s)];
        for (SymbolId y : letters) {
          Letter th = theta(s + 1, i);
          Word w{Letter{sym[y], static_cast<std::int16_t>(iu), false}, th, Letter{sym[y], static_cast<std::int16_t>(iv), true},
                 th.inv()};
          out.add_relator(Relator{std::move(w), RelatorKind::theta_a, r.label, s, i});
        }
      }
    }
  }
  return out;
}

namespace {

RuleMode bundle_mode(const MainMachineBundle& b, const Rule& r) {
  if (b.mixed(r)) return RuleMode::mixed;
  return b.superscripted(r) ? RuleMode::superscripted : RuleMode::plain;
}

Word power_word(const Word& w, int n) {
  Word out;
  for (int i = 0; i < n; ++i) out.insert(out.end(), w.begin(), w.end());
  return out;
}

}  // namespace

Presentation compile_group_M(const MainMachineBundle& b) {
  return compile_machine(b.machine, b.L, [&b](const Rule& r) { return bundle_mode(b, r); }, "M");
}

Presentation add_hub_relations(Presentation p, const MainMachineBundle& b) {
  if (p.L() != b.L || p.N() != b.N)
    throw Error(ErrorCode::superscript_mismatch, "presentation was compiled with other L or N than the bundle");
  Word hub1;
  for (int i = 1; i <= b.L; ++i) {
    Word c = to_group_word(p, b.machine, with_superscript(b.w_st.letters(), i));
    hub1.insert(hub1.end(), c.begin(), c.end());
  }
  p.add_relator(Relator{std::move(hub1), RelatorKind::hub, {}, 1, 0});
  p.add_relator(Relator{power_word(to_group_word(p, b.machine, b.w_ac.letters()), b.L), RelatorKind::hub, {}, 2, 0});
  return p;
}

Presentation compile_group_G(const MainMachineBundle& b) {
  Presentation p = add_hub_relations(compile_group_M(b), b);
  p.rename("G");
  return p;
}

std::pair<Presentation, Presentation> compile_trimmed(const MainMachineBundle& b) {
  SMachine t = build_trimmed_machine(b);
  Presentation mbar = compile_machine(t, b.L, [](const Rule&) { return RuleMode::plain; }, "Mbar");
  Presentation gbar = mbar;
  gbar.rename("Gbar");
  Word wac = to_group_word(gbar, t, translate(b.machine, t, b.w_ac).letters());
  gbar.add_relator(Relator{power_word(wac, b.L), RelatorKind::hub, {}, 2, 0});
  return {std::move(mbar), std::move(gbar)};
}

Presentation hnn_Gk(Presentation p, const MainMachineBundle& b, long k) {
  SymbolId x = p.intern("#x", GeneratorKind::stable, 0);
  p.declare(x, 0);
  Word w{Letter{x, 0, false}};
  Word wk = to_group_word(p, b.machine, b.junction_word(k, k).letters());
  w.insert(w.end(), wk.begin(), wk.end());
  w.push_back(Letter{x, 0, true});
  Word wac = inverse_word(to_group_word(p, b.machine, b.w_ac.letters()));
  w.insert(w.end(), wac.begin(), wac.end());
  p.add_relator(Relator{std::move(w), RelatorKind::hnn, {}, 0, 0});
  p.rename(p.name() + "_" + std::to_string(k));
  return p;
}

Presentation hnn_Gbar(Presentation p, const MainMachineBundle& b) {
  SymbolId y = p.intern("#y", GeneratorKind::stable, 0);
  p.declare(y, 0);
  Word wac = to_group_word(p, b.machine, b.w_ac.letters());
  Word w{Letter{y, 0, false}};
  w.insert(w.end(), wac.begin(), wac.end());
  w.push_back(Letter{y, 0, true});
  Word inv = inverse_word(wac);
  w.insert(w.end(), inv.begin(), inv.end());
  p.add_relator(Relator{std::move(w), RelatorKind::hnn, {}, 0, 0});
  p.rename(p.name() + "_hnn");
  return p;
}

int mu(const Presentation& p, const Word& w) {
  long sum = 0;
  for (const Letter& x : w) {
    if (x.symbol >= p.symbol_count() || !p.is_generator(x))
      throw Error(ErrorCode::unknown_generator, "mu: undeclared letter");
    const GeneratorSymbol& g = p.symbol(x.symbol);
    if (g.kind == GeneratorKind::q && g.index == 0) sum += x.inverse ? -1 : 1;
  }
  const long L = p.L();
  return static_cast<int>(((sum % L) + L) % L);
}

Word nu(const Presentation& p, const Word& w) {
  Word out;
  for (const Letter& x : w) {
    if (x.symbol >= p.symbol_count() || !p.is_generator(x))
      throw Error(ErrorCode::unknown_generator, "nu: undeclared letter");
    const GeneratorSymbol& g = p.symbol(x.symbol);
    if (g.kind == GeneratorKind::q) throw Error(ErrorCode::q_letter_present, "nu is undefined on q-letters: " + p.letter_name(x));
    if (g.kind != GeneratorKind::tape) out.push_back(x);
  }
  return reduce_word(std::move(out));
}

std::string export_presentation(const Presentation& p, ExportFormat f) {
  std::ostringstream os;
  if (f == ExportFormat::plain) {
    os << "presentation " << p.name() << "\n";
    os << "L " << p.L() << "\nN " << p.N() << "\n";
    os << "symbols " << p.symbol_count() << "\n";
    for (SymbolId s = 0; s < p.symbol_count(); ++s) {
      const GeneratorSymbol& g = p.symbol(s);
      os << to_string(g.kind) << ' ' << g.index << ' ' << g.name;
      if (!g.rule.empty()) os << ' ' << g.rule;
      os << "\n";
    }
    os << "generators " << p.generators().size() << "\n";
    for (const Letter& x : p.generators()) os << p.letter_name(x) << "\n";
    os << "relators " << p.relators().size() << "\n";
    for (const Relator& r : p.relators()) {
      os << to_string(r.kind) << ' ' << (r.rule.empty() ? "-" : r.rule) << ' ' << r.index << ' ' << r.superscript
         << " : " << p.word_text(r.word) << "\n";
    }
    os << "end\n";
    return os.str();
  }
  // Free-group syntax of computational algebra systems; generators are
  // addressed by position, their names kept as strings.
  std::unordered_map<std::string, std::size_t> pos;
  os << "# presentation " << p.name() << " L=" << p.L() << " N=" << p.N() << "\n";
  os << "F := FreeGroup(";
  if (p.generators().empty()) {
    os << "0";
  } else {
    os << "[\n";
    for (std::size_t i = 0; i < p.generators().size(); ++i) {
      const std::string n = p.letter_name(p.generators()[i]);
      pos.emplace(n, i + 1);
      os << "  \"" << n << "\"" << (i + 1 < p.generators().size() ? ",\n" : "\n");
    }
    os << "]";
  }
  os << ");;\n";
  os << "g := GeneratorsOfGroup(F);;\n";
  os << "rels := [";
  for (std::size_t k = 0; k < p.relators().size(); ++k) {
    os << (k ? ",\n  " : "\n  ");
    const Word& w = p.relators()[k].word;
    if (w.empty()) {
      os << "One(F)";
      continue;
    }
    for (std::size_t i = 0; i < w.size(); ++i) {
      if (i) os << '*';
      os << "g[" << pos.at(p.letter_name(Letter{w[i].symbol, w[i].superscript, false})) << "]";
      if (w[i].inverse) os << "^-1";
    }
  }
  os << (p.relators().empty() ? "];;\n" : "\n];;\n");
  os << "P := F / rels;;\n";
  return os.str();
}

Presentation parse_presentation(std::string_view text) {
  std::istringstream in{std::string(text)};
  std::string line, word;
  auto fail = [](const std::string& why) { return Error(ErrorCode::parse_error, "presentation: " + why); };
  auto expect_count = [&](const std::string& key) {
    if (!std::getline(in, line)) throw fail("missing '" + key + "'");
    std::istringstream ls(line);
    std::size_t n = 0;
    if (!(ls >> word >> n) || word != key) throw fail("expected '" + key + " <count>', got '" + line + "'");
    return n;
  };
  if (!std::getline(in, line) || line.rfind("presentation ", 0) != 0) throw fail("missing header");
  std::string name = line.substr(13);
  int L = static_cast<int>(expect_count("L"));
  int N = static_cast<int>(expect_count("N"));
  Presentation p(name, L, N);
  std::size_t nsym = expect_count("symbols");
  for (std::size_t i = 0; i < nsym; ++i) {
    if (!std::getline(in, line)) throw fail("truncated symbols");
    std::istringstream ls(line);
    std::string kind, sname, rule;
    int index = 0;
    if (!(ls >> kind >> index >> sname)) throw fail("bad symbol line '" + line + "'");
    ls >> rule;
    p.intern(sname, parse_generator_kind(kind), index, rule);
  }
  std::size_t ngen = expect_count("generators");
  for (std::size_t i = 0; i < ngen; ++i) {
    if (!std::getline(in, line)) throw fail("truncated generators");
    int sup = 0;
    std::string_view tok = line;
    if (!tok.empty() && tok.back() == '}') {
      auto open = tok.rfind('{');
      if (open == std::string_view::npos) throw fail("bad generator '" + line + "'");
      sup = std::stoi(std::string(tok.substr(open + 1, tok.size() - open - 2)));
      tok = tok.substr(0, open);
    }
    p.declare(p.symbol_at(tok), sup);
  }
  std::size_t nrel = expect_count("relators");
  for (std::size_t i = 0; i < nrel; ++i) {
    if (!std::getline(in, line)) throw fail("truncated relators");
    auto colon = line.find(" : ");
    if (colon == std::string::npos) throw fail("bad relator line '" + line + "'");
    std::istringstream ls(line.substr(0, colon));
    std::string kind, rule;
    Relator r;
    if (!(ls >> kind >> rule >> r.index >> r.superscript)) throw fail("bad relator line '" + line + "'");
    r.kind = parse_relator_kind(kind);
    if (rule != "-") r.rule = rule;
    r.word = p.parse_word(line.substr(colon + 3));
    p.add_relator(std::move(r));
  }
  if (!std::getline(in, line) || line != "end") throw fail("missing 'end'");
  return p;
}

}  // namespace smw
