#include "chainunify/theory.hpp"

#include <algorithm>
#include <cctype>
#include <string>

namespace chainunify {

std::string_view to_string(TheoryId theory) {
  switch (theory) {
    case TheoryId::BC0: return "bc0";
    case TheoryId::BC1: return "bc1";
    case TheoryId::DBC: return "dbc";
    case TheoryId::DBC_PRIME: return "dbc-prime";
    case TheoryId::DBC_PLUS: return "dbc-plus";
  }
  return "?";
}

std::optional<TheoryId> parse_theory(std::string_view text) {
  std::string s(text);
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) {
    return c == '_' ? '-' : static_cast<char>(std::tolower(c));
  });
  if (s == "bc0") return TheoryId::BC0;
  if (s == "bc1") return TheoryId::BC1;
  if (s == "dbc") return TheoryId::DBC;
  if (s == "dbc-prime" || s == "dbc'") return TheoryId::DBC_PRIME;
  if (s == "dbc-plus") return TheoryId::DBC_PLUS;
  return std::nullopt;
}

}  // namespace chainunify
