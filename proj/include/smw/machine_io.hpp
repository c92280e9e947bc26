#pragma once

#include <string>
#include <string_view>

#include "smw/machine.hpp"

namespace smw {

/// Line-oriented machine description:
///
///   machine <name>
///   HARDWARE
///   circular <0|1>
///   part <name> : <letters>
///   sector <index> : <letters>
///   RULES
///   rule <label> [tag=<tag>] : [ q1 q2 -> a q1' q2' b ] [ q3 -> q3' ] ... [dom <s>={x,y}]
///   DISTINGUISHED
///   start <letters>
///   end <letters>
///   input <sector>
///   history <sector> : <left letters> | <right letters>
///   END
///
/// A bracket group spanning several parts means the sectors between them are
/// locked. `dom s={}` locks a sector that a group cannot express (the wrap
/// sector of a circular machine).
std::string print_machine(const SMachine& m);
SMachine parse_machine(std::string_view text);

/// FNV-1a over the canonical serialization, as 16 hex digits.
std::string machine_hash(const SMachine& m);

}  // namespace smw
