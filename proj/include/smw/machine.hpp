#pragma once

#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "smw/word.hpp"

namespace smw {

/// Parts Q_0..Q_{P-1}. Sector s lies between part s and part s+1; a circular
/// machine has one more sector, P-1, wrapping from the last part back to Q_0.
struct Hardware {
  std::vector<std::string> part_names;
  std::vector<std::vector<SymbolId>> part_letters;
  std::vector<std::vector<SymbolId>> sector_letters;
  bool circular = false;

  int part_count() const { return static_cast<int>(part_names.size()); }
  int sector_count() const { return static_cast<int>(sector_letters.size()); }
  std::optional<int> sector_right_of(int part) const;
  std::optional<int> sector_left_of(int part) const;
};

struct RulePart {
  SymbolId from = 0;
  SymbolId to = 0;
  Word left;   // a_i, lives in the sector left of the part
  Word right;  // b_i, lives in the sector right of the part
};

struct SectorDomain {
  enum class Mode { full, locked, subset };
  Mode mode = Mode::full;
  std::vector<SymbolId> letters;  // sorted, only for subset

  static SectorDomain full() { return {}; }
  static SectorDomain locked() { return {Mode::locked, {}}; }
  static SectorDomain subset(std::vector<SymbolId> letters);
  bool is_locked() const { return mode == Mode::locked; }
  friend bool operator==(const SectorDomain&, const SectorDomain&) = default;
};

/// Rule-family bookkeeping. `step` rules belong to set Θ_from; `transition`
/// rules go from set `from` to set `to` (0 stands for the start/accept side).
/// `family`/`index` name the sub-family inside a set (chi, zeta, ...).
struct RuleTag {
  enum class Kind { none, step, transition };
  Kind kind = Kind::none;
  int from = 0;
  int to = 0;
  std::string family;
  int index = 0;

  static RuleTag step(int set) { return {Kind::step, set, 0, {}, 0}; }
  static RuleTag transition(int from, int to) { return {Kind::transition, from, to, {}, 0}; }
  RuleTag with_family(std::string f, int i = 0) const {
    RuleTag t = *this;
    t.family = std::move(f);
    t.index = i;
    return t;
  }
  bool is_transition(int a, int b) const { return kind == Kind::transition && from == a && to == b; }
  bool is_step(int s) const { return kind == Kind::step && from == s; }
  friend bool operator==(const RuleTag&, const RuleTag&) = default;
};

std::string tag_to_string(const RuleTag& tag);
RuleTag parse_tag(std::string_view text);

class Rule {
 public:
  std::string label;  // label of the positive rule
  bool positive = true;
  std::vector<RulePart> parts;
  std::vector<SectorDomain> domains;
  RuleTag tag;

  /// "label" for positive rules, "label^-1" for negative ones.
  std::string signed_label() const { return positive ? label : label + "^-1"; }
  Rule inverse() const;
  bool allows(SymbolId tape_symbol) const { return allowed_[tape_symbol] != 0; }

 private:
  friend class SMachine;
  std::vector<unsigned char> allowed_;  // indexed by symbol, filled by SMachine
};

using RuleIndex = std::uint32_t;

/// An S-machine. Rules are stored in pairs: index 2k is the k-th positive
/// rule, 2k+1 its inverse.
class SMachine {
 public:
  SMachine() = default;
  SMachine(std::string name, std::shared_ptr<Alphabet> alphabet, Hardware hw,
           std::vector<Rule> positive_rules, std::vector<SymbolId> start_letters,
           std::vector<SymbolId> end_letters, std::optional<int> input_sector);

  const std::string& name() const { return name_; }
  const Alphabet& alphabet() const { return *alphabet_; }
  const std::shared_ptr<Alphabet>& alphabet_ptr() const { return alphabet_; }
  const Hardware& hardware() const { return hw_; }
  const std::vector<Rule>& rules() const { return rules_; }
  const Rule& rule(RuleIndex i) const { return rules_[i]; }
  std::size_t rule_count() const { return rules_.size(); }
  std::size_t positive_rule_count() const { return rules_.size() / 2; }
  static RuleIndex inverse_of(RuleIndex i) { return i ^ 1u; }
  static bool is_positive(RuleIndex i) { return (i & 1u) == 0; }

  /// Accepts "label" or "label^-1".
  std::optional<RuleIndex> find_rule(std::string_view signed_label) const;
  RuleIndex rule_at(std::string_view signed_label) const;

  const std::vector<SymbolId>& start_letters() const { return start_; }
  const std::vector<SymbolId>& end_letters() const { return end_; }
  std::optional<int> input_sector() const { return input_sector_; }

  /// Metadata for machines with history sectors: per history sector, the
  /// left and right alphabets indexed by the source machine's positive rules.
  struct HistorySector {
    int sector = 0;
    std::vector<SymbolId> left;
    std::vector<SymbolId> right;
    friend bool operator==(const HistorySector&, const HistorySector&) = default;
  };
  const std::vector<HistorySector>& history_sectors() const { return history_; }
  void set_history_sectors(std::vector<HistorySector> h) { history_ = std::move(h); }

  /// Rule indices sorted by label, positive before negative.
  const std::vector<RuleIndex>& enumeration_order() const { return order_; }
  /// Rules (in enumeration order) whose source letter in `part` is `symbol`.
  std::span<const RuleIndex> rules_from(int part, SymbolId symbol) const;

  std::vector<SymbolId> letters_of_part(int part) const { return hw_.part_letters[part]; }

 private:
  void validate_and_index();

  std::string name_;
  std::shared_ptr<Alphabet> alphabet_;
  Hardware hw_;
  std::vector<Rule> rules_;
  std::vector<SymbolId> start_;
  std::vector<SymbolId> end_;
  std::optional<int> input_sector_;
  std::vector<HistorySector> history_;
  std::vector<RuleIndex> order_;
  std::unordered_map<std::string, RuleIndex> by_label_;
  std::vector<std::vector<RuleIndex>> from_index_;  // by symbol
};

/// Incremental construction helper used by every constructor.
class MachineBuilder {
 public:
  explicit MachineBuilder(std::string name, bool circular = false);

  int add_part(std::string name);
  SymbolId state(int part, std::string name);
  SymbolId tape(int sector, std::string name);
  /// Sector count is fixed once all parts are declared.
  void finish_parts();

  SymbolId symbol(std::string_view name) const { return alphabet_->at(name); }
  const Alphabet& alphabet() const { return *alphabet_; }
  const Hardware& hardware() const { return hw_; }
  int part_count() const { return hw_.part_count(); }
  int sector_count() const { return hw_.sector_count(); }

  /// A rule mapping from[i] -> to[i] on every part with empty words and full domains.
  Rule draft(std::string label, const std::vector<SymbolId>& from,
             const std::vector<SymbolId>& to, RuleTag tag = {}) const;
  void add_rule(Rule r);
  std::vector<Rule>& rules() { return rules_; }

  SMachine build(std::vector<SymbolId> start, std::vector<SymbolId> end,
                 std::optional<int> input_sector,
                 std::vector<SMachine::HistorySector> history = {});

 private:
  std::string name_;
  std::shared_ptr<Alphabet> alphabet_;
  Hardware hw_;
  std::vector<Rule> rules_;
  bool parts_done_ = false;
};

}  // namespace smw
