#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include <json.hpp>

#include "smw/constructors.hpp"
#include "smw/presentation.hpp"
#include "smw/search.hpp"

namespace smw {

/// Suite reports keep keys in insertion order so that dumps are byte-stable.
using Report = nlohmann::ordered_json;

struct HarnessConfig {
  std::string toy = "toy-even";
  int m = 2;
  int L = 12;
  std::uint64_t seed = 20240607;

  std::size_t roundtrip_words = 1000;
  int lr_max_tape = 4;
  int wi_depth = 8;
  int wi_max_tape = 2;          // start words of the LR sweep
  int wi_fragment_max_tape = 1; // start words of the M3 fragment
  int chi_depth = 12;
  int chi_tape_slack = 2;
  int norep_depth = 8;
  int periodic_periods = 5;
  int periodic_max_tape = 3;
  long k_min = 0;
  long k_max = 3;
  std::vector<std::size_t> tape_caps{4, 6, 8, 10, 12};
  std::size_t max_states = 200000;
  std::size_t trapezia = 200;
  int jobs = 1;

  Report to_json() const;
  static HarnessConfig from_json(const Report& j);
};

/// The main machine and its group, built once and shared read-only by suites.
struct HarnessContext {
  HarnessConfig config;
  MainMachineBundle bundle;
  Presentation group;

  explicit HarnessContext(const HarnessConfig& cfg);
};

/// Every machine the constructors ship, for the given parameters.
std::vector<SMachine> shipped_machines(const MainMachineBundle& b);

/// All reduced words over the letters and their inverses, shortest first.
std::vector<Word> reduced_words(const std::vector<SymbolId>& letters, std::size_t max_length);

/// Standard-base words of m with every choice of state letters and total tape
/// length at most max_tape.
std::vector<AdmissibleWord> standard_words(const SMachine& m, std::size_t max_tape);

/// Two-letter-base words q u q' for the parts around `sector` (q' the next
/// part), q u q^-1 and q'^-1 u q', with tape length at most max_tape. When
/// from_rules is set, only state letters that some allowed rule reads are used.
std::vector<AdmissibleWord> two_letter_words(const SMachine& m, int sector, std::size_t max_tape, bool from_rules,
                                             const std::function<bool(const Rule&)>& allow = {});

/// (W·θ)·θ^-1 ≡ W for random θ-admissible standard-base words.
Report check_roundtrip(const std::vector<SMachine>& machines, std::size_t words_per_machine, std::uint64_t seed);

/// t ≤ ||W0|| + ||Wt|| - 2 over reduced standard-base computations of LR({a,b})
/// whose words all have tape length at most max_tape.
Report check_lr_bound(int max_tape);

/// Smallest 2||H1|| + 3||H2|| + 2||H3|| over the factorizations H ≡ H1 H2^k H3.
std::size_t factorization_cost(const History& h);

/// ||Wi|| ≤ ||W0|| + ||Wt|| + cost(H) for every computation from `starts` up to
/// `depth`. Rules acting identically on the start's base are merged; a merged
/// class may follow its own inverse when it has several members. `allow`
/// restricts the machine to a fragment.
Report check_wi_bound(const SMachine& m, const std::vector<AdmissibleWord>& starts, int depth,
                      const std::string& label, const std::function<bool(const Rule&)>& allow = {});

/// Every χ index occurs at most once in reduced standard-base computations.
Report check_chi_occurrences(const SMachine& m3, const std::vector<AdmissibleWord>& starts, int depth,
                             int tape_slack);

/// No nonempty reduced computation from W(k,k) without Θ1/Θ2 returns to W(k,k).
Report check_norep(const MainMachineBundle& b, long k, int depth);

/// Boundary words of H-periodic computations are pairwise distinct, unless some
/// period returns to its own start (such computations are cut there and counted).
Report check_periodic_distinctness(const SMachine& m, const History& h, const std::vector<AdmissibleWord>& starts,
                                   int periods);

struct LanguageOptions {
  std::vector<std::size_t> tape_caps{4, 6, 8, 10, 12};
  std::size_t max_states = 200000;
};
/// Bidirectional search W(k,k) <-> W_ac without Θ1/Θ2, compared with the toy.
Report accepted_language_experiment(const MainMachineBundle& b, long k_min, long k_max, const LanguageOptions& opt);

/// mu, nu, superscript discipline of (θ,t)-relators, hub lengths and relator counts.
Report presentation_audit(const Presentation& g, const MainMachineBundle& b);

/// Trapezia of enumerated eligible computations replay them cell by cell.
Report check_trapezium_correspondence(const MainMachineBundle& b, const Presentation& g, std::size_t count);

/// disk_diagram_cells ≥ N·L·d for the witness of every accepted k.
Report check_disk_cells(const MainMachineBundle& b, const Presentation& g, long k_min, long k_max,
                        const LanguageOptions& opt);

const std::vector<std::string>& suite_names();
/// Throws bad_parameters for an unknown name.
Report run_suite(const std::string& name, const HarnessContext& ctx);
/// Runs `names` on up to config.jobs threads; the output order is the order of `names`.
Report run_suites(const std::vector<std::string>& names, const HarnessContext& ctx);

bool report_passed(const Report& r);
/// One status line per suite plus the violations of failing ones.
std::string render_report(const Report& r);

}  // namespace smw
