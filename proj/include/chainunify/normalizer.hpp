#pragma once

#include <cstddef>

#include "chainunify/term.hpp"
#include "chainunify/theory.hpp"

namespace chainunify {

/// Redex selection. All strategies reach the same normal form on the
/// supported (convergent) systems; the alternatives exist to check that.
enum class Strategy {
  Innermost,           // recursive call-by-value, memoized
  LeftmostInnermost,   // one step at a time
  RightmostInnermost,  // one step at a time
  Outermost,           // one step at a time, leftmost-outermost
};

struct NormalizeStats {
  std::size_t steps = 0;
};

/// Flattens, sorts, cancels equal pairs, drops `0`, and collapses
/// singleton/empty xor. Only the root xor node is canonicalized.
Term xor_canonical(const Term& t);

/// One rewrite step at the root of `t`, if some rule applies there. The
/// contractum is built without normalizing its subterms. Throws
/// SignatureError on a symbol the theory does not admit.
std::optional<Term> rewrite_at_root(const Term& t, TheoryId theory);

/// Unique normal form of `t` under the theory's rewrite system. For bc1, `h`
/// is expanded into `enc(x ^ y)` and xor is kept canonical after every step.
Term normalize(const Term& t, TheoryId theory, Strategy strategy = Strategy::Innermost,
               NormalizeStats* stats = nullptr);

/// Throws SortError if the sorts differ.
bool equal_modulo(const Term& s, const Term& t, TheoryId theory);

}  // namespace chainunify
