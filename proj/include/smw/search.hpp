#pragma once

#include <functional>
#include <optional>
#include <string_view>
#include <vector>

#include "smw/execution.hpp"

namespace smw {

enum class Verdict { yes, no, unknown };
std::string_view to_string(Verdict v);

struct SearchOptions {
  std::size_t max_depth = 10000;     // total length of a witness
  std::size_t max_states = 200000;   // visited words over both sides
  std::size_t max_tape = static_cast<std::size_t>(-1);
  std::function<bool(const Rule&)> allow;  // empty means every rule
};

struct SearchResult {
  Verdict verdict = Verdict::unknown;
  std::optional<History> witness;  // from the source to the target it met
  std::optional<AdmissibleWord> target;
  std::size_t states = 0;
  std::size_t depth = 0;           // layers expanded over both sides
  bool budget_exhausted = false;   // stopped by max_states or max_depth
  bool tape_capped = false;        // some neighbor was dropped by max_tape
};

/// Breadth-first from both ends, one whole layer at a time on the side with
/// the smaller frontier. `no` is returned only when one side's component is
/// exhausted without ever hitting a cap; every `yes` carries a witness.
SearchResult bidirectional_search(const SMachine& m, const AdmissibleWord& source,
                                  const std::vector<AdmissibleWord>& targets, const SearchOptions& opt);

}  // namespace smw
