#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace smw {

enum class ErrorCode {
  not_applicable,
  not_applicable_at,
  malformed_word,
  untagged_rule,
  empty_alphabet,
  invalid_m,
  no_input_sector,
  stage_mismatch,
  bad_parameters,
  superscript_mismatch,
  unknown_generator,
  q_letter_present,
  superscript_required,
  superscript_forbidden,
  ineligible_history,
  empty_history,
  witness_invalid,
  parse_error,
  invalid_machine,
  io_error,
};

std::string_view to_string(ErrorCode code);

// All library failures surface as this one exception type; callers branch on code().
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace smw
