#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace smw {

using SymbolId = std::uint32_t;

enum class LetterKind : std::uint8_t { state, tape };

/// One signed occurrence of a symbol. Superscript 0 means "no superscript";
/// otherwise it lies in [1, L]. Machine execution never looks at it.
struct Letter {
  SymbolId symbol = 0;
  std::int16_t superscript = 0;
  bool inverse = false;

  Letter inv() const { return Letter{symbol, superscript, !inverse}; }
  Letter plain() const { return Letter{symbol, 0, inverse}; }

  friend bool operator==(const Letter&, const Letter&) = default;
  friend auto operator<=>(const Letter&, const Letter&) = default;
};

using Word = std::vector<Letter>;

/// Free reduction: cancels adjacent x·x⁻¹ pairs until none remain.
Word reduce_word(Word w);
bool is_reduced(const Word& w);
Word inverse_word(const Word& w);
Word concat(const Word& a, const Word& b);

struct WordHash {
  std::size_t operator()(const Word& w) const noexcept;
};

struct SymbolInfo {
  std::string name;
  LetterKind kind = LetterKind::state;
  // Part index for state letters, sector index for tape letters.
  int part = 0;
};

/// Symbol table of one machine. Names are unique across kinds.
class Alphabet {
 public:
  SymbolId add(std::string name, LetterKind kind, int part);
  std::optional<SymbolId> find(std::string_view name) const;
  SymbolId at(std::string_view name) const;  // throws parse_error when missing
  const SymbolInfo& info(SymbolId id) const { return symbols_[id]; }
  const std::string& name(SymbolId id) const { return symbols_[id].name; }
  bool is_state(SymbolId id) const { return symbols_[id].kind == LetterKind::state; }
  std::size_t size() const { return symbols_.size(); }

 private:
  std::vector<SymbolInfo> symbols_;
  std::unordered_map<std::string, SymbolId> index_;
};

/// Names may not contain whitespace or any of the reserved characters
/// used by the text formats.
bool is_valid_name(std::string_view name);

std::string letter_to_string(const Alphabet& a, const Letter& x);
/// Space-separated, inverses as `x^-1`, superscripts as `x{3}`. Empty word prints as `1`.
std::string word_to_string(const Alphabet& a, const Word& w);
Letter parse_letter(const Alphabet& a, std::string_view token);
Word parse_word(const Alphabet& a, std::string_view text);

}  // namespace smw
