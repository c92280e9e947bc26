#include "smw/machine_io.hpp"

#include <charconv>
#include <cstdio>
#include <sstream>

#include "smw/error.hpp"

namespace smw {

namespace {

std::string letters_to_string(const Alphabet& a, const std::vector<SymbolId>& ls, char sep) {
  std::string s;
  for (std::size_t i = 0; i < ls.size(); ++i) {
    if (i) s += sep;
    s += a.name(ls[i]);
  }
  return s;
}

std::vector<std::string> tokenize(std::string_view line) {
  std::vector<std::string> out;
  std::string cur;
  auto flush = [&] {
    if (!cur.empty()) out.push_back(std::move(cur));
    cur.clear();
  };
  for (char c : line) {
    if (static_cast<unsigned char>(c) <= ' ') {
      flush();
    } else if (c == '[' || c == ']') {
      flush();
      out.emplace_back(1, c);
    } else {
      cur += c;
    }
  }
  flush();
  return out;
}

[[noreturn]] void bad(std::size_t line_no, const std::string& what) {
  throw Error(ErrorCode::parse_error, "line " + std::to_string(line_no) + ": " + what);
}

int to_int(std::size_t line_no, std::string_view s) {
  int v = 0;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || p != s.data() + s.size()) bad(line_no, "expected integer, got '" + std::string(s) + "'");
  return v;
}

}  // namespace

std::string print_machine(const SMachine& m) {
  const Alphabet& a = m.alphabet();
  const Hardware& hw = m.hardware();
  const int P = hw.part_count();
  std::ostringstream out;
  out << "machine " << m.name() << "\n";
  out << "HARDWARE\n";
  out << "circular " << (hw.circular ? 1 : 0) << "\n";
  for (int p = 0; p < P; ++p) out << "part " << hw.part_names[p] << " : " << letters_to_string(a, hw.part_letters[p], ' ') << "\n";
  for (int s = 0; s < hw.sector_count(); ++s) {
    out << "sector " << s << " :";
    if (!hw.sector_letters[s].empty()) out << ' ' << letters_to_string(a, hw.sector_letters[s], ' ');
    out << "\n";
  }
  out << "RULES\n";
  for (std::size_t k = 0; k < m.rule_count(); k += 2) {
    const Rule& r = m.rule(static_cast<RuleIndex>(k));
    out << "rule " << r.label;
    if (r.tag.kind != RuleTag::Kind::none || !r.tag.family.empty()) out << " tag=" << tag_to_string(r.tag);
    out << " :";
    int p = 0;
    while (p < P) {
      int q = p;
      while (q + 1 < P && r.domains[q].is_locked()) ++q;
      out << " [";
      for (int i = p; i <= q; ++i) out << ' ' << a.name(r.parts[i].from);
      out << " ->";
      if (!r.parts[p].left.empty()) out << ' ' << word_to_string(a, r.parts[p].left);
      for (int i = p; i <= q; ++i) out << ' ' << a.name(r.parts[i].to);
      if (!r.parts[q].right.empty()) out << ' ' << word_to_string(a, r.parts[q].right);
      out << " ]";
      p = q + 1;
    }
    for (int s = 0; s < hw.sector_count(); ++s) {
      const SectorDomain& d = r.domains[s];
      bool wrap = hw.circular && s == P - 1;
      if (d.mode == SectorDomain::Mode::subset) {
        out << " dom " << s << "={" << letters_to_string(a, d.letters, ',') << "}";
      } else if (d.is_locked() && wrap) {
        out << " dom " << s << "={}";
      }
    }
    out << "\n";
  }
  out << "DISTINGUISHED\n";
  out << "start " << letters_to_string(a, m.start_letters(), ' ') << "\n";
  out << "end " << letters_to_string(a, m.end_letters(), ' ') << "\n";
  if (m.input_sector()) out << "input " << *m.input_sector() << "\n";
  for (const auto& h : m.history_sectors()) {
    out << "history " << h.sector << " : " << letters_to_string(a, h.left, ' ') << " | "
        << letters_to_string(a, h.right, ' ') << "\n";
  }
  out << "END\n";
  return out.str();
}

SMachine parse_machine(std::string_view text) {
  enum class Section { none, hardware, rules, distinguished, done } section = Section::none;
  std::string name;
  bool circular = false;
  std::unique_ptr<MachineBuilder> b;
  std::vector<std::pair<std::size_t, std::vector<std::string>>> rule_lines;
  std::vector<std::pair<int, std::vector<std::string>>> sector_lines;
  std::vector<std::string> start, end;
  std::optional<int> input;
  std::vector<std::pair<std::size_t, std::vector<std::string>>> history_lines;
  std::vector<std::pair<std::string, std::vector<std::string>>> parts;

  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    auto nl = text.find('\n', pos);
    auto line = text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
    pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
    ++line_no;
    auto toks = tokenize(line);
    if (toks.empty() || toks[0][0] == '#') continue;
    const std::string& key = toks[0];
    if (key == "machine") {
      if (toks.size() != 2) bad(line_no, "expected 'machine <name>'");
      name = toks[1];
    } else if (key == "HARDWARE") {
      section = Section::hardware;
    } else if (key == "RULES") {
      section = Section::rules;
    } else if (key == "DISTINGUISHED") {
      section = Section::distinguished;
    } else if (key == "END") {
      section = Section::done;
    } else if (section == Section::hardware && key == "circular") {
      if (toks.size() != 2) bad(line_no, "expected 'circular 0|1'");
      circular = toks[1] == "1";
    } else if (section == Section::hardware && key == "part") {
      if (toks.size() < 4 || toks[2] != ":") bad(line_no, "expected 'part <name> : <letters>'");
      parts.emplace_back(toks[1], std::vector<std::string>(toks.begin() + 3, toks.end()));
    } else if (section == Section::hardware && key == "sector") {
      if (toks.size() < 3 || toks[2] != ":") bad(line_no, "expected 'sector <index> : <letters>'");
      sector_lines.emplace_back(to_int(line_no, toks[1]), std::vector<std::string>(toks.begin() + 3, toks.end()));
    } else if (section == Section::rules && key == "rule") {
      rule_lines.emplace_back(line_no, toks);
    } else if (section == Section::distinguished && key == "start") {
      start.assign(toks.begin() + 1, toks.end());
    } else if (section == Section::distinguished && key == "end") {
      end.assign(toks.begin() + 1, toks.end());
    } else if (section == Section::distinguished && key == "input") {
      if (toks.size() != 2) bad(line_no, "expected 'input <sector>'");
      input = to_int(line_no, toks[1]);
    } else if (section == Section::distinguished && key == "history") {
      history_lines.emplace_back(line_no, toks);
    } else {
      bad(line_no, "unexpected '" + key + "'");
    }
  }
  if (section != Section::done) throw Error(ErrorCode::parse_error, "missing END");
  if (name.empty()) throw Error(ErrorCode::parse_error, "missing machine name");

  b = std::make_unique<MachineBuilder>(name, circular);
  for (auto& [pname, letters] : parts) {
    int p = b->add_part(pname);
    for (auto& l : letters) b->state(p, l);
  }
  b->finish_parts();
  const int P = b->part_count();
  const int S = b->sector_count();
  for (auto& [s, letters] : sector_lines) {
    if (s < 0 || s >= S) throw Error(ErrorCode::parse_error, "sector index out of range: " + std::to_string(s));
    for (auto& l : letters) b->tape(s, l);
  }
  const Alphabet& a = b->alphabet();
  auto lookup = [&](std::size_t ln, const std::string& tok) -> SymbolId {
    auto id = a.find(tok);
    if (!id) bad(ln, "unknown letter '" + tok + "'");
    return *id;
  };

  for (auto& [ln, toks] : rule_lines) {
    if (toks.size() < 3) bad(ln, "short rule line");
    Rule r;
    r.label = toks[1];
    std::size_t i = 2;
    if (toks[i].rfind("tag=", 0) == 0) {
      r.tag = parse_tag(std::string_view(toks[i]).substr(4));
      ++i;
    }
    if (i >= toks.size() || toks[i] != ":") bad(ln, "expected ':' after rule label");
    ++i;
    r.parts.resize(static_cast<std::size_t>(P));
    r.domains.assign(static_cast<std::size_t>(S), SectorDomain::full());
    int next_part = 0;
    while (i < toks.size() && toks[i] == "[") {
      ++i;
      std::vector<SymbolId> lhs;
      while (i < toks.size() && toks[i] != "->") lhs.push_back(lookup(ln, toks[i++]));
      if (i >= toks.size()) bad(ln, "missing '->'");
      ++i;
      Word rhs;
      while (i < toks.size() && toks[i] != "]") {
        if (toks[i] != "1") rhs.push_back(parse_letter(a, toks[i]));
        ++i;
      }
      if (i >= toks.size()) bad(ln, "missing ']'");
      ++i;
      if (lhs.empty()) bad(ln, "empty substitution group");
      for (std::size_t k = 0; k < lhs.size(); ++k) {
        if (!a.is_state(lhs[k]) || a.info(lhs[k]).part != next_part + static_cast<int>(k))
          bad(ln, "substitution group out of part order");
      }
      std::vector<std::size_t> state_pos;
      for (std::size_t k = 0; k < rhs.size(); ++k) {
        if (a.is_state(rhs[k].symbol)) state_pos.push_back(k);
      }
      if (state_pos.size() != lhs.size()) bad(ln, "group sides have different state letter counts");
      for (std::size_t k = 0; k + 1 < state_pos.size(); ++k) {
        if (state_pos[k + 1] != state_pos[k] + 1) bad(ln, "tape letters inside a locked group");
      }
      for (std::size_t k = 0; k < lhs.size(); ++k) {
        const Letter& q = rhs[state_pos[k]];
        int p = next_part + static_cast<int>(k);
        if (q.inverse || a.info(q.symbol).part != p) bad(ln, "target letter in the wrong part");
        r.parts[p].from = lhs[k];
        r.parts[p].to = q.symbol;
        if (k + 1 < lhs.size()) r.domains[p] = SectorDomain::locked();
      }
      r.parts[next_part].left.assign(rhs.begin(), rhs.begin() + static_cast<std::ptrdiff_t>(state_pos.front()));
      int last_part = next_part + static_cast<int>(lhs.size()) - 1;
      r.parts[last_part].right.assign(rhs.begin() + static_cast<std::ptrdiff_t>(state_pos.back()) + 1, rhs.end());
      next_part = last_part + 1;
    }
    if (next_part != P) bad(ln, "rule does not cover every part");
    while (i < toks.size()) {
      if (toks[i] != "dom" || i + 1 >= toks.size()) bad(ln, "expected 'dom <s>={...}'");
      const std::string& spec = toks[i + 1];
      auto eq = spec.find('=');
      if (eq == std::string::npos || spec.size() < eq + 3 || spec[eq + 1] != '{' || spec.back() != '}')
        bad(ln, "malformed domain '" + spec + "'");
      int s = to_int(ln, std::string_view(spec).substr(0, eq));
      if (s < 0 || s >= S) bad(ln, "domain sector out of range");
      std::string body = spec.substr(eq + 2, spec.size() - eq - 3);
      std::vector<SymbolId> letters;
      std::size_t start_pos = 0;
      while (start_pos < body.size()) {
        auto comma = body.find(',', start_pos);
        auto tok = body.substr(start_pos, comma == std::string::npos ? std::string::npos : comma - start_pos);
        letters.push_back(lookup(ln, tok));
        start_pos = comma == std::string::npos ? body.size() : comma + 1;
      }
      r.domains[s] = letters.empty() ? SectorDomain::locked() : SectorDomain{SectorDomain::Mode::subset, {}};
      if (!letters.empty()) r.domains[s] = SectorDomain::subset(letters);
      i += 2;
    }
    b->add_rule(std::move(r));
  }

  auto resolve = [&](const std::vector<std::string>& ls) {
    std::vector<SymbolId> out;
    for (auto& l : ls) out.push_back(lookup(0, l));
    return out;
  };
  std::vector<SMachine::HistorySector> history;
  for (auto& [ln, toks] : history_lines) {
    if (toks.size() < 3 || toks[2] != ":") bad(ln, "expected 'history <s> : <left> | <right>'");
    SMachine::HistorySector h;
    h.sector = to_int(ln, toks[1]);
    bool right = false;
    for (std::size_t k = 3; k < toks.size(); ++k) {
      if (toks[k] == "|") {
        right = true;
        continue;
      }
      (right ? h.right : h.left).push_back(lookup(ln, toks[k]));
    }
    history.push_back(std::move(h));
  }
  return b->build(resolve(start), resolve(end), input, std::move(history));
}

std::string machine_hash(const SMachine& m) {
  std::string text = print_machine(m);
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : text) h = (h ^ c) * 1099511628211ull;
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace smw
