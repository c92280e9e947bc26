#include "smw/machine.hpp"

#include <algorithm>
#include <charconv>

#include "smw/error.hpp"

namespace smw {

namespace {

[[noreturn]] void invalid(const std::string& what) { throw Error(ErrorCode::invalid_machine, what); }

int parse_int(std::string_view s) {
  int v = 0;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || p != s.data() + s.size()) throw Error(ErrorCode::parse_error, "bad integer '" + std::string(s) + "'");
  return v;
}

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    auto pos = s.find(sep, start);
    out.push_back(s.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

}  // namespace

std::optional<int> Hardware::sector_right_of(int part) const {
  if (part + 1 < part_count()) return part;
  if (circular) return part_count() - 1;
  return std::nullopt;
}

std::optional<int> Hardware::sector_left_of(int part) const {
  if (part > 0) return part - 1;
  if (circular) return part_count() - 1;
  return std::nullopt;
}

SectorDomain SectorDomain::subset(std::vector<SymbolId> letters) {
  std::sort(letters.begin(), letters.end());
  letters.erase(std::unique(letters.begin(), letters.end()), letters.end());
  if (letters.empty()) return locked();
  return SectorDomain{Mode::subset, std::move(letters)};
}

std::string tag_to_string(const RuleTag& tag) {
  std::string s;
  switch (tag.kind) {
    case RuleTag::Kind::none: s = "none"; break;
    case RuleTag::Kind::step: s = "step:" + std::to_string(tag.from); break;
    case RuleTag::Kind::transition:
      s = "transition:" + std::to_string(tag.from) + ":" + std::to_string(tag.to);
      break;
  }
  if (!tag.family.empty()) s += "/" + tag.family + ":" + std::to_string(tag.index);
  return s;
}

RuleTag parse_tag(std::string_view text) {
  RuleTag tag;
  auto slash = text.find('/');
  auto head = text.substr(0, slash);
  auto fields = split(head, ':');
  if (fields[0] == "none" && fields.size() == 1) {
    tag.kind = RuleTag::Kind::none;
  } else if (fields[0] == "step" && fields.size() == 2) {
    tag.kind = RuleTag::Kind::step;
    tag.from = parse_int(fields[1]);
  } else if (fields[0] == "transition" && fields.size() == 3) {
    tag.kind = RuleTag::Kind::transition;
    tag.from = parse_int(fields[1]);
    tag.to = parse_int(fields[2]);
  } else {
    throw Error(ErrorCode::parse_error, "bad rule tag '" + std::string(text) + "'");
  }
  if (slash != std::string_view::npos) {
    auto fam = split(text.substr(slash + 1), ':');
    if (fam.size() != 2 || fam[0].empty()) throw Error(ErrorCode::parse_error, "bad rule family in '" + std::string(text) + "'");
    tag.family = std::string(fam[0]);
    tag.index = parse_int(fam[1]);
  }
  return tag;
}

Rule Rule::inverse() const {
  Rule r = *this;
  r.positive = !positive;
  for (auto& p : r.parts) {
    std::swap(p.from, p.to);
    p.left = inverse_word(p.left);
    p.right = inverse_word(p.right);
  }
  return r;
}

SMachine::SMachine(std::string name, std::shared_ptr<Alphabet> alphabet, Hardware hw,
                   std::vector<Rule> positive_rules, std::vector<SymbolId> start_letters,
                   std::vector<SymbolId> end_letters, std::optional<int> input_sector)
    : name_(std::move(name)),
      alphabet_(std::move(alphabet)),
      hw_(std::move(hw)),
      start_(std::move(start_letters)),
      end_(std::move(end_letters)),
      input_sector_(input_sector) {
  rules_.reserve(positive_rules.size() * 2);
  for (auto& r : positive_rules) {
    if (!r.positive) invalid("rule '" + r.label + "' passed as positive is negative");
    Rule inv = r.inverse();
    rules_.push_back(std::move(r));
    rules_.push_back(std::move(inv));
  }
  validate_and_index();
}

void SMachine::validate_and_index() {
  const int P = hw_.part_count();
  const int S = hw_.sector_count();
  const Alphabet& a = *alphabet_;
  if (P == 0) invalid("machine without parts");
  if (S != (hw_.circular ? P : P - 1)) invalid("sector count does not match part count");
  for (int p = 0; p < P; ++p) {
    if (hw_.part_letters[p].empty()) invalid("part " + hw_.part_names[p] + " has no letters");
    for (SymbolId q : hw_.part_letters[p]) {
      if (!a.is_state(q) || a.info(q).part != p) invalid("letter " + a.name(q) + " misfiled in part " + hw_.part_names[p]);
    }
  }
  for (int s = 0; s < S; ++s) {
    for (SymbolId y : hw_.sector_letters[s]) {
      if (a.is_state(y) || a.info(y).part != s) invalid("letter " + a.name(y) + " misfiled in sector " + std::to_string(s));
    }
  }
  auto check_letters = [&](const std::vector<SymbolId>& ls, const char* what) {
    if (static_cast<int>(ls.size()) != P) invalid(std::string(what) + " letters must name one letter per part");
    for (int p = 0; p < P; ++p) {
      if (!a.is_state(ls[p]) || a.info(ls[p]).part != p) invalid(std::string(what) + " letter outside its part");
    }
  };
  check_letters(start_, "start");
  check_letters(end_, "end");
  if (input_sector_ && (*input_sector_ < 0 || *input_sector_ >= S)) invalid("input sector out of range");

  for (std::size_t k = 0; k < rules_.size(); ++k) {
    Rule& r = rules_[k];
    const std::string& L = r.label;
    if (!is_valid_name(L)) invalid("invalid rule label '" + L + "'");
    if (static_cast<int>(r.parts.size()) != P || static_cast<int>(r.domains.size()) != S)
      invalid("rule " + L + " does not cover the hardware");
    // A sector without letters can only hold the empty word; record it as locked.
    for (int s = 0; s < S; ++s) {
      if (hw_.sector_letters[s].empty()) r.domains[s] = SectorDomain::locked();
    }
    for (int s = 0; s < S; ++s) {
      for (SymbolId y : r.domains[s].letters) {
        if (a.is_state(y) || a.info(y).part != s) invalid("rule " + L + ": domain letter outside sector");
      }
    }
    r.allowed_.assign(a.size(), 0);
    for (int s = 0; s < S; ++s) {
      const auto& d = r.domains[s];
      if (d.mode == SectorDomain::Mode::full) {
        for (SymbolId y : hw_.sector_letters[s]) r.allowed_[y] = 1;
      } else {
        for (SymbolId y : d.letters) r.allowed_[y] = 1;
      }
    }
    for (int p = 0; p < P; ++p) {
      const RulePart& rp = r.parts[p];
      for (SymbolId q : {rp.from, rp.to}) {
        if (!a.is_state(q) || a.info(q).part != p) invalid("rule " + L + ": state letter outside part " + hw_.part_names[p]);
      }
      auto check_side = [&](const Word& w, std::optional<int> sector, const char* side) {
        if (w.empty()) return;
        if (!sector) invalid("rule " + L + ": " + side + " word at the edge of a non-circular base");
        if (r.domains[*sector].is_locked()) invalid("rule " + L + ": " + side + " word in a locked sector");
        if (!is_reduced(w)) invalid("rule " + L + ": unreduced " + side + " word");
        for (const Letter& x : w) {
          if (a.is_state(x.symbol) || a.info(x.symbol).part != *sector || !r.allowed_[x.symbol])
            invalid("rule " + L + ": " + side + " word letter outside the sector domain");
        }
      };
      check_side(rp.left, hw_.sector_left_of(p), "left");
      check_side(rp.right, hw_.sector_right_of(p), "right");
    }
    std::string key = r.signed_label();
    if (!by_label_.emplace(key, static_cast<RuleIndex>(k)).second) invalid("duplicate rule label " + key);
  }

  order_.resize(rules_.size());
  for (std::size_t k = 0; k < rules_.size(); ++k) order_[k] = static_cast<RuleIndex>(k);
  std::sort(order_.begin(), order_.end(), [&](RuleIndex x, RuleIndex y) {
    const Rule& rx = rules_[x];
    const Rule& ry = rules_[y];
    if (rx.label != ry.label) return rx.label < ry.label;
    return rx.positive && !ry.positive;
  });
  from_index_.assign(a.size(), {});
  for (RuleIndex k : order_) {
    for (const RulePart& rp : rules_[k].parts) from_index_[rp.from].push_back(k);
  }
}

std::optional<RuleIndex> SMachine::find_rule(std::string_view signed_label) const {
  auto it = by_label_.find(std::string(signed_label));
  if (it == by_label_.end()) return std::nullopt;
  return it->second;
}

RuleIndex SMachine::rule_at(std::string_view signed_label) const {
  if (auto r = find_rule(signed_label)) return *r;
  throw Error(ErrorCode::parse_error, "unknown rule '" + std::string(signed_label) + "' in " + name_);
}

std::span<const RuleIndex> SMachine::rules_from(int /*part*/, SymbolId symbol) const {
  return from_index_[symbol];
}

MachineBuilder::MachineBuilder(std::string name, bool circular)
    : name_(std::move(name)), alphabet_(std::make_shared<Alphabet>()) {
  hw_.circular = circular;
}

int MachineBuilder::add_part(std::string name) {
  if (parts_done_) invalid("parts already finished");
  hw_.part_names.push_back(std::move(name));
  hw_.part_letters.emplace_back();
  return hw_.part_count() - 1;
}

void MachineBuilder::finish_parts() {
  if (parts_done_) return;
  parts_done_ = true;
  int P = hw_.part_count();
  hw_.sector_letters.assign(static_cast<std::size_t>(hw_.circular ? P : std::max(P - 1, 0)), {});
}

SymbolId MachineBuilder::state(int part, std::string name) {
  SymbolId id = alphabet_->add(std::move(name), LetterKind::state, part);
  hw_.part_letters.at(part).push_back(id);
  return id;
}

SymbolId MachineBuilder::tape(int sector, std::string name) {
  finish_parts();
  SymbolId id = alphabet_->add(std::move(name), LetterKind::tape, sector);
  hw_.sector_letters.at(sector).push_back(id);
  return id;
}

Rule MachineBuilder::draft(std::string label, const std::vector<SymbolId>& from,
                           const std::vector<SymbolId>& to, RuleTag tag) const {
  Rule r;
  r.label = std::move(label);
  r.tag = std::move(tag);
  r.parts.resize(from.size());
  for (std::size_t p = 0; p < from.size(); ++p) {
    r.parts[p].from = from[p];
    r.parts[p].to = to[p];
  }
  r.domains.assign(hw_.sector_letters.size(), SectorDomain::full());
  return r;
}

void MachineBuilder::add_rule(Rule r) { rules_.push_back(std::move(r)); }

SMachine MachineBuilder::build(std::vector<SymbolId> start, std::vector<SymbolId> end,
                               std::optional<int> input_sector,
                               std::vector<SMachine::HistorySector> history) {
  finish_parts();
  SMachine m(name_, alphabet_, hw_, rules_, std::move(start), std::move(end), input_sector);
  m.set_history_sectors(std::move(history));
  return m;
}

}  // namespace smw
