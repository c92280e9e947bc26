#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "smw/execution.hpp"
#include "smw/machine.hpp"

namespace smw {

/// A small recognizer standing in for the input machine M1: parts Q0 Q1 Q2,
/// input sector Q0Q1 over {alpha}, and a reference acceptor for the language
/// {alpha^k} it is meant to recognize.
struct ToyRecognizer {
  SMachine machine;
  std::string identity;
  std::function<bool(long)> accepts;

  AdmissibleWord input_configuration(long k) const;
  AdmissibleWord accept_configuration() const;
};

/// Accepts alpha^k exactly for even k.
ToyRecognizer toy_even();
/// Accepts every alpha^k.
ToyRecognizer toy_all();
/// "toy-even" or "toy-all"; throws bad_parameters otherwise.
ToyRecognizer toy_by_name(const std::string& name);

/// An accepting history of the toy for alpha^k, found by breadth-first
/// search over the toy's own configurations, or nullopt.
std::optional<History> toy_accepting_history(const ToyRecognizer& toy, long k);

/// Standard-base word q_0 u_0 q_1 ... q_{P-1}; sector_words[s] fills sector s
/// (missing entries are empty).
AdmissibleWord standard_configuration(const SMachine& m, const std::vector<SymbolId>& letters,
                                      const std::vector<Word>& sector_words);
/// Re-reads a word of one machine in another by letter names.
AdmissibleWord translate(const SMachine& from, const SMachine& to, const AdmissibleWord& w);
History translate_history(const SMachine& from, const SMachine& to, const History& h);

/// LR(Y): parts Q1 P Q2; sector Q1P over Y, sector PQ2 over the copies Y'.
SMachine build_lr(const std::vector<std::string>& letters);
/// The mirror runner RL(Y): parts Q1 R Q2, the runner starts next to Q1 and
/// moves right. Sector Q1R holds the copies, RQ2 holds Y.
SMachine build_rl(const std::vector<std::string>& letters);
/// LR_m(Y): the runner goes back and forth m times; phases 1..2m.
SMachine build_lr_m(const std::vector<std::string>& letters, int m);

/// M2: each part Q_i splits into Q_{i,l} Q_{i,r} with a history sector between.
SMachine add_history_sectors(const SMachine& m1);
/// Input configuration of M2: input word in the input sector, h written in the
/// left alphabet of every history sector. `h` uses M1's positive rule indices.
AdmissibleWord m2_input_configuration(const SMachine& m2, const Word& input, const History& h);

/// M2-bar: each part becomes P_i Q_i R_i with P_iQ_i and Q_iR_i always locked.
SMachine add_control_letters(const SMachine& m2);

/// M3: 4m+1 stages RL, M2bar, LR, M2bar^-1 (m times) and a final RL, linked by
/// the transition rules chi1..chi(4m).
SMachine compose_m3(const SMachine& m2bar, int m);
/// I3(input, h): stage-1 start letters, input word, h in the left alphabets.
AdmissibleWord m3_input_configuration(const SMachine& m3, const Word& input, const History& h);
/// The canonical run of M3 from I3(input, h) through all stages, for an
/// accepting M1 history h (positive rules of M1, by index).
History m3_canonical_history(const SMachine& m3, const History& h);

/// M4: base B (B')^-1, every rule acting identically on both halves.
SMachine mirror_m4(const SMachine& m3);
/// M5: prepends a part {t}; the machine becomes circular and both sectors
/// next to t are locked by every rule.
SMachine circularize_m5(const SMachine& m4);

struct MainMachineBundle {
  SMachine machine;
  ToyRecognizer toy;
  SMachine m3;  // the machine copied into Θ4, on the B3 half
  int m = 2;
  int L = 12;
  int N = 0;
  std::string c4_note;  // the constant c4 has no operational role
  AdmissibleWord w_st;
  AdmissibleWord w_ac;
  SymbolId alpha = 0;
  SymbolId alpha_mirror = 0;
  int input_sector = 0;
  int mirror_input_sector = 0;
  std::vector<SymbolId> theta3_letters;  // one per part

  /// W(k,k') ≡ w1 alpha^k w2 (alpha~)^{-k'} w3 over the Θ3 letters.
  AdmissibleWord junction_word(long k, long kp) const;
  /// History W_st -> ... -> W(k,k) through Θ1, θ(12), Θ2, θ(23).
  History history_to_junction(long k) const;
  /// History W(k,k) -> ... -> W_ac for an accepting toy history, or nullopt.
  std::optional<History> accepting_history(long k) const;

  /// Rules whose relations carry superscripts: start rule, Θ1, θ(12), Θ2.
  bool superscripted(const Rule& r) const;
  bool mixed(const Rule& r) const { return r.tag.is_transition(2, 3); }
  /// Rules of Θ1 and Θ2 (excluded from the accepted-language experiments).
  static bool in_theta12(const Rule& r) { return r.tag.is_step(1) || r.tag.is_step(2); }
};

MainMachineBundle build_main_machine(const ToyRecognizer& toy, int m, int L);

/// M-bar: only Θ3, Θ4, Θ5 and the transitions θ(34), θ(45), accept.
SMachine build_trimmed_machine(const MainMachineBundle& b);

}  // namespace smw
