#pragma once

#include <optional>
#include <string>
#include <vector>

#include "smw/constructors.hpp"
#include "smw/presentation.hpp"
#include "smw/search.hpp"

namespace smw {

/// A machine word carrying superscripts that erases to an admissible word.
struct PermissibleWord {
  Word letters;
  friend bool operator==(const PermissibleWord&, const PermissibleWord&) = default;
};

Word erase_superscripts(const Word& w);

/// Lifts w with superscript `first` on its first letter. The superscript is
/// constant except at a t-junction: it goes up by one entering t and down by
/// one leaving t^-1 (modulo L, values in [1, L]). first = 0 gives the plain word.
PermissibleWord lift_word(const SMachine& m, const Word& w, int first, int L);
/// True if w is plain or equals the lift of its erasure from its first superscript.
bool is_permissible(const SMachine& m, const Word& w, int L);

/// The permissible word lifting a θ-admissible V: superscripted exactly when
/// θ is in the superscripted family or is θ(23) itself.
PermissibleWord make_permissible(const MainMachineBundle& b, const AdmissibleWord& v, RuleIndex rule,
                                 std::optional<int> first);

/// One relator instance; its boundary reads bottom·right·top^-1·left^-1.
struct Cell {
  RelatorKind kind = RelatorKind::theta_q;
  Word bottom;
  Word top;
  Letter left;
  Letter right;

  Word boundary() const;
};

struct ThetaBand {
  RuleIndex rule = 0;
  Word bottom;  // trimmed labels, as group words
  Word top;
  std::vector<Cell> cells;
};

struct Trapezium {
  std::vector<ThetaBand> bands;
  History history;
  std::vector<BaseLetter> base;

  std::size_t height() const { return bands.size(); }
};

/// Band-by-band realization of an eligible computation. `first` is the
/// superscript used wherever a superscripted label begins.
Trapezium computation_to_trapezium(const MainMachineBundle& b, const Presentation& p, const Computation& c,
                                   std::optional<int> first);
std::size_t trapezium_area(const Trapezium& t);

struct TrapeziumCheck {
  bool ok = true;
  std::string failure;
};
/// Every cell is a relator of p, neighbouring θ-edges agree, consecutive bands
/// share labels, labels start and end with q-letters and the erasures of the
/// outer labels are the computation's end words.
TrapeziumCheck check_trapezium(const MainMachineBundle& b, const Presentation& p, const Trapezium& t,
                               const Computation& c);

/// One line per band: `label | bottom | top`.
std::string dump_trapezium(const MainMachineBundle& b, const Presentation& p, const Trapezium& t);

struct DiskVerdict {
  Verdict verdict = Verdict::unknown;
  std::string reason;
  std::optional<AdmissibleWord> root;     // W with V^∅ = W^L
  std::optional<Computation> witness;     // W -> W_ac or W_st -> W
  SearchResult search;
};

/// Checks V^∅ = W^L and then searches for a computation linking W to W_st or W_ac.
DiskVerdict is_disk_word(const MainMachineBundle& b, const PermissibleWord& v, const SearchOptions& opt);

/// 1 + L·area of the trapezium of C, the cells of a disk diagram built from one
/// hub and L trapezia. C must run W -> W_ac or W_st -> W (W_ac with an empty
/// computation is the hub alone); throws witness_invalid otherwise.
std::size_t disk_diagram_cells(const MainMachineBundle& b, const Presentation& p, const AdmissibleWord& w,
                               const Computation& c);

}  // namespace smw
