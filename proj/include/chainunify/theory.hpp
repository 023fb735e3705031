#pragma once

#include <optional>
#include <string_view>

namespace chainunify {

enum class TheoryId {
  BC0,        // bc axioms, h free
  BC1,        // bc axioms, h(x, y) = enc(x ^ y), xor is ACUN
  DBC,        // bc, g(h(x, y), y) = x, db axioms including db(bc(X, y), y) = X
  DBC_PRIME,  // DBC without the db/bc collapse rule
  DBC_PLUS,   // DBC with car/cdr projections; normalization only
};

std::string_view to_string(TheoryId theory);

/// Accepts `bc0`, `bc1`, `dbc`, `dbc-prime`/`dbc_prime`, `dbc-plus`/`dbc_plus`
/// (case-insensitive).
std::optional<TheoryId> parse_theory(std::string_view text);

inline bool is_dbc_family(TheoryId t) {
  return t == TheoryId::DBC || t == TheoryId::DBC_PRIME || t == TheoryId::DBC_PLUS;
}

}  // namespace chainunify
