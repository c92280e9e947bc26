#pragma once

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "smw/machine.hpp"

namespace smw {

/// A reduced word q1 u1 q2 ... us q(s+1) satisfying the adjacency conditions
/// of its hardware. Equality is syntactic.
class AdmissibleWord {
 public:
  AdmissibleWord() = default;
  /// Validates against the hardware; throws malformed_word.
  AdmissibleWord(const SMachine& m, Word letters);
  static AdmissibleWord unchecked(Word letters) {
    AdmissibleWord w;
    w.letters_ = std::move(letters);
    return w;
  }

  const Word& letters() const { return letters_; }
  std::size_t size() const { return letters_.size(); }

  friend bool operator==(const AdmissibleWord&, const AdmissibleWord&) = default;

 private:
  Word letters_;
};

struct AdmissibleWordHash {
  std::size_t operator()(const AdmissibleWord& w) const noexcept { return WordHash{}(w.letters()); }
};

bool is_admissible(const SMachine& m, const Word& w);
AdmissibleWord parse_admissible(const SMachine& m, std::string_view text);
std::string to_string(const SMachine& m, const AdmissibleWord& w);

struct BaseLetter {
  int part = 0;
  bool inverse = false;
  friend bool operator==(const BaseLetter&, const BaseLetter&) = default;
};
std::vector<BaseLetter> base_of(const SMachine& m, const AdmissibleWord& w);
std::string base_to_string(const SMachine& m, const std::vector<BaseLetter>& base);
/// The configuration base Q_0 Q_1 ... Q_{P-1}.
bool has_standard_base(const SMachine& m, const AdmissibleWord& w);

std::size_t state_length(const SMachine& m, const Word& w);
std::size_t tape_length(const SMachine& m, const Word& w);

bool is_applicable(const SMachine& m, const AdmissibleWord& w, RuleIndex rule);
/// Returns nullopt instead of throwing; used on hot paths.
std::optional<AdmissibleWord> try_apply(const SMachine& m, const AdmissibleWord& w, RuleIndex rule);
AdmissibleWord apply_rule(const SMachine& m, const AdmissibleWord& w, RuleIndex rule);

using History = std::vector<RuleIndex>;

std::string history_to_string(const SMachine& m, const History& h);
History parse_history(const SMachine& m, std::string_view text);

struct Computation {
  AdmissibleWord start;
  History history;
  std::vector<AdmissibleWord> trace;  // size history.size() + 1

  const AdmissibleWord& end() const { return trace.back(); }
};

/// Throws not_applicable_at with the failing position.
Computation run_history(const SMachine& m, const AdmissibleWord& w, const History& h);

/// Step history of a main-machine history: runs of same-set rules collapse to
/// "(i)", transition rules become "(ij)" with the digits swapped for inverses.
std::vector<std::string> step_history(const SMachine& m, const History& h);

bool is_reduced_history(const History& h);
/// Reduced except for θ(23)·θ(23)⁻¹ subwords.
bool is_eligible(const SMachine& m, const History& h);

enum class HistoryFilter { reduced, eligible, all };

struct ComputationView {
  std::span<const AdmissibleWord> trace;
  std::span<const RuleIndex> history;

  const AdmissibleWord& start() const { return trace.front(); }
  const AdmissibleWord& end() const { return trace.back(); }
  Computation materialize() const;
};

struct EnumerationOptions {
  int depth = 0;
  HistoryFilter filter = HistoryFilter::reduced;
  std::function<bool(const Rule&)> allow;  // empty means every rule
  std::size_t max_tape = static_cast<std::size_t>(-1);  // prune words with more tape letters
};

/// Depth-first, lexicographic in the enumeration order, prefixes before
/// extensions. The visitor returns false to stop descending below the view.
void for_each_computation(const SMachine& m, const AdmissibleWord& start, const EnumerationOptions& opt,
                          const std::function<bool(const ComputationView&)>& visit);

/// Breadth-first: all computations of length 0, then 1, ... each exactly once.
std::vector<Computation> enumerate_computations(const SMachine& m, const AdmissibleWord& start, int depth,
                                                HistoryFilter filter);

}  // namespace smw
