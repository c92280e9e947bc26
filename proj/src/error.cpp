#include "smw/error.hpp"

namespace smw {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::not_applicable: return "NotApplicable";
    case ErrorCode::not_applicable_at: return "NotApplicableAt";
    case ErrorCode::malformed_word: return "MalformedWord";
    case ErrorCode::untagged_rule: return "UntaggedRule";
    case ErrorCode::empty_alphabet: return "EmptyAlphabet";
    case ErrorCode::invalid_m: return "InvalidM";
    case ErrorCode::no_input_sector: return "NoInputSector";
    case ErrorCode::stage_mismatch: return "StageMismatch";
    case ErrorCode::bad_parameters: return "BadParameters";
    case ErrorCode::superscript_mismatch: return "SuperscriptMismatch";
    case ErrorCode::unknown_generator: return "UnknownGenerator";
    case ErrorCode::q_letter_present: return "QLetterPresent";
    case ErrorCode::superscript_required: return "SuperscriptRequired";
    case ErrorCode::superscript_forbidden: return "SuperscriptForbidden";
    case ErrorCode::ineligible_history: return "IneligibleHistory";
    case ErrorCode::empty_history: return "EmptyHistory";
    case ErrorCode::witness_invalid: return "WitnessInvalid";
    case ErrorCode::parse_error: return "ParseError";
    case ErrorCode::invalid_machine: return "InvalidMachine";
    case ErrorCode::io_error: return "IoError";
  }
  return "Unknown";
}

}  // namespace smw
