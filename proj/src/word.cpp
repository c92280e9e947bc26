#include "smw/word.hpp"

#include <charconv>

#include "smw/error.hpp"

namespace smw {

Word reduce_word(Word w) {
  std::size_t out = 0;
  for (std::size_t i = 0; i < w.size(); ++i) {
    if (out > 0 && w[out - 1] == w[i].inv()) {
      --out;
    } else {
      w[out++] = w[i];
    }
  }
  w.resize(out);
  return w;
}

bool is_reduced(const Word& w) {
  for (std::size_t i = 1; i < w.size(); ++i) {
    if (w[i - 1] == w[i].inv()) return false;
  }
  return true;
}

Word inverse_word(const Word& w) {
  Word r;
  r.reserve(w.size());
  for (auto it = w.rbegin(); it != w.rend(); ++it) r.push_back(it->inv());
  return r;
}

Word concat(const Word& a, const Word& b) {
  Word r = a;
  r.insert(r.end(), b.begin(), b.end());
  return r;
}

std::size_t WordHash::operator()(const Word& w) const noexcept {
  std::size_t h = 1469598103934665603ull;
  for (const Letter& x : w) {
    std::size_t v = (static_cast<std::size_t>(x.symbol) << 17) ^
                    (static_cast<std::size_t>(static_cast<std::uint16_t>(x.superscript)) << 1) ^
                    (x.inverse ? 1u : 0u);
    h = (h ^ v) * 1099511628211ull;
  }
  return h;
}

bool is_valid_name(std::string_view name) {
  if (name.empty()) return false;
  for (char c : name) {
    if (static_cast<unsigned char>(c) <= ' ') return false;
    switch (c) {
      case '^': case '{': case '}': case '[': case ']': case ';': case ':':
      case ',': case '|': case '=': case '.': case '#': case '(': case ')': case '*':
        return false;
      default: break;
    }
  }
  return true;
}

SymbolId Alphabet::add(std::string name, LetterKind kind, int part) {
  if (!is_valid_name(name)) throw Error(ErrorCode::invalid_machine, "invalid letter name '" + name + "'");
  if (index_.count(name)) throw Error(ErrorCode::invalid_machine, "duplicate letter '" + name + "'");
  auto id = static_cast<SymbolId>(symbols_.size());
  index_.emplace(name, id);
  symbols_.push_back(SymbolInfo{std::move(name), kind, part});
  return id;
}

std::optional<SymbolId> Alphabet::find(std::string_view name) const {
  auto it = index_.find(std::string(name));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

SymbolId Alphabet::at(std::string_view name) const {
  if (auto id = find(name)) return *id;
  throw Error(ErrorCode::parse_error, "unknown letter '" + std::string(name) + "'");
}

std::string letter_to_string(const Alphabet& a, const Letter& x) {
  std::string s = a.name(x.symbol);
  if (x.superscript != 0) s += "{" + std::to_string(x.superscript) + "}";
  if (x.inverse) s += "^-1";
  return s;
}

std::string word_to_string(const Alphabet& a, const Word& w) {
  if (w.empty()) return "1";
  std::string s;
  for (std::size_t i = 0; i < w.size(); ++i) {
    if (i) s += ' ';
    s += letter_to_string(a, w[i]);
  }
  return s;
}

Letter parse_letter(const Alphabet& a, std::string_view token) {
  Letter x;
  if (token.size() > 3 && token.substr(token.size() - 3) == "^-1") {
    x.inverse = true;
    token.remove_suffix(3);
  }
  if (!token.empty() && token.back() == '}') {
    auto open = token.rfind('{');
    if (open == std::string_view::npos) throw Error(ErrorCode::parse_error, "bad superscript in '" + std::string(token) + "'");
    int sup = 0;
    auto digits = token.substr(open + 1, token.size() - open - 2);
    auto [p, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), sup);
    if (ec != std::errc() || p != digits.data() + digits.size() || sup <= 0)
      throw Error(ErrorCode::parse_error, "bad superscript in '" + std::string(token) + "'");
    x.superscript = static_cast<std::int16_t>(sup);
    token = token.substr(0, open);
  }
  x.symbol = a.at(token);
  return x;
}

Word parse_word(const Alphabet& a, std::string_view text) {
  Word w;
  std::size_t i = 0;
  while (i < text.size()) {
    while (i < text.size() && static_cast<unsigned char>(text[i]) <= ' ') ++i;
    std::size_t j = i;
    while (j < text.size() && static_cast<unsigned char>(text[j]) > ' ') ++j;
    if (j > i) {
      auto tok = text.substr(i, j - i);
      if (tok != "1") w.push_back(parse_letter(a, tok));
    }
    i = j;
  }
  return w;
}

}  // namespace smw
