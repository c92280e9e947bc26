#pragma once

#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <utility>
#include <vector>

#include "smw/constructors.hpp"
#include "smw/word.hpp"

namespace smw {

enum class GeneratorKind { q, tape, theta, stable };
enum class RelatorKind { theta_q, theta_a, hub, hnn };

std::string_view to_string(GeneratorKind k);
std::string_view to_string(RelatorKind k);

/// A base symbol; its generators are the symbol itself and/or its
/// superscripted copies. `index` is the part for q-letters, the sector for
/// tape letters and the subscript j in [1, N] for θ-letters.
struct GeneratorSymbol {
  std::string name;
  GeneratorKind kind = GeneratorKind::q;
  int index = 0;
  std::string rule;  // θ-letters only
};

struct Relator {
  Word word;  // cyclically reduced, least rotation
  RelatorKind kind = RelatorKind::theta_q;
  std::string rule;   // empty for hubs
  int index = 0;      // part (θ,q), sector (θ,a)
  int superscript = 0;
};

/// Cyclic reduction followed by the lexicographically least rotation.
Word cyclic_reduce(Word w);
Word canonical_relator(const Word& w);

class Presentation {
 public:
  Presentation() = default;
  Presentation(std::string name, int L, int N) : name_(std::move(name)), L_(L), N_(N) {}

  const std::string& name() const { return name_; }
  void rename(std::string n) { name_ = std::move(n); }
  int L() const { return L_; }
  int N() const { return N_; }

  SymbolId intern(const std::string& name, GeneratorKind kind, int index, const std::string& rule = {});
  std::optional<SymbolId> find_symbol(std::string_view name) const;
  SymbolId symbol_at(std::string_view name) const;  // throws unknown_generator
  const GeneratorSymbol& symbol(SymbolId id) const { return symbols_[id]; }
  std::size_t symbol_count() const { return symbols_.size(); }

  /// Declares the generator symbol^(superscript); superscript 0 is the plain letter.
  void declare(SymbolId symbol, int superscript);
  bool is_generator(const Letter& x) const;
  /// Positive generator letters in declaration order.
  const std::vector<Letter>& generators() const { return generators_; }

  /// Stores the canonical form. Throws unknown_generator on undeclared letters.
  void add_relator(Relator r);
  const std::vector<Relator>& relators() const { return relators_; }
  /// True when w is a relator up to rotation and inversion.
  bool has_relator(const Word& w) const;

  std::string letter_name(const Letter& x) const;
  /// Letter-dot notation: `a.b^-1.c{3}`; the empty word is `1`.
  std::string word_text(const Word& w) const;
  Word parse_word(std::string_view text) const;

 private:
  std::string name_;
  int L_ = 0;
  int N_ = 0;
  std::vector<GeneratorSymbol> symbols_;
  std::unordered_map<std::string, SymbolId> by_name_;
  std::vector<Letter> generators_;
  std::unordered_set<Word, WordHash> generator_set_;
  std::vector<Relator> relators_;
  std::unordered_set<Word, WordHash> relator_set_;
};

/// Name of the θ-letter θ_j of a rule.
std::string theta_name(const std::string& rule, int j);

/// How a rule's relations carry superscripts.
enum class RuleMode { plain, superscripted, mixed };

/// Compiles the (θ,q)- and (θ,a)-relations of every positive rule. N is the
/// machine's part count; the machine must be circular.
Presentation compile_machine(const SMachine& m, int L, const std::function<RuleMode(const Rule&)>& mode,
                             std::string name);

/// Presentation of the group M of the main machine (no hubs).
Presentation compile_group_M(const MainMachineBundle& b);
/// Appends W_st^(1)...W_st^(L) and (W_ac)^L. Throws superscript_mismatch if
/// P was compiled with other L or N.
Presentation add_hub_relations(Presentation p, const MainMachineBundle& b);
/// G = M plus both hubs.
Presentation compile_group_G(const MainMachineBundle& b);
/// The presentations of the trimmed group and of its one-hub quotient.
std::pair<Presentation, Presentation> compile_trimmed(const MainMachineBundle& b);

/// G_k: stable letter and x W(k,k) x^-1 = W_ac.
Presentation hnn_Gk(Presentation p, const MainMachineBundle& b, long k);
/// Stable letter y commuting with W_ac.
Presentation hnn_Gbar(Presentation p, const MainMachineBundle& b);

/// Re-reads a machine word (superscripts kept) as a group word.
Word to_group_word(const Presentation& p, const SMachine& m, const Word& w);
/// Copies every letter with the given superscript (0 keeps them plain).
Word with_superscript(const Word& w, int superscript);

/// Signed number of t-letters (q-letters of part 0) modulo L, in [0, L).
int mu(const Presentation& p, const Word& w);
/// Deletes tape letters and freely reduces; throws q_letter_present.
Word nu(const Presentation& p, const Word& w);

enum class ExportFormat { plain, gap };
std::string export_presentation(const Presentation& p, ExportFormat f);
/// Inverse of the plain export.
Presentation parse_presentation(std::string_view text);

}  // namespace smw
