#pragma once

#include <cstddef>
#include <map>
#include <string>
#include <vector>

#include "chainunify/problem.hpp"

namespace chainunify {

enum class ElementFailure { None, OccurCheck, Clash, Inconsistent, NoBranch };

std::string_view to_string(ElementFailure f);

struct ElementResult {
  /// Triangular substitutions over the element variables. Empty on failure.
  std::vector<Substitution> unifiers;
  ElementFailure failure = ElementFailure::None;
  /// Human-readable cause of the first failure met, e.g. `y =? h(v1, y)`.
  std::string detail;

  bool ok() const { return !unifiers.empty(); }
};

struct ElementOptions {
  /// Stop after the first unifier.
  bool first_only = false;
  /// Cap on enumerated branches (identification partitions for bc1).
  std::size_t max_branches = 200000;
};

/// Syntactic unification over element terms with occur check. Bindings are
/// kept as a dag so that repeated subterms are never expanded.
class SyntacticUnifier {
 public:
  bool unify(const Term& s, const Term& t);
  /// Follows variable bindings at the root only.
  Term walk(Term t) const;
  /// Fully applies the bindings.
  Term resolve(const Term& t) const;
  bool bound(const std::string& name) const { return bindings_.count(name) > 0; }
  /// Bindings ordered so that the list is triangular.
  Substitution substitution() const;

  ElementFailure failure() const { return failure_; }
  const std::string& detail() const { return detail_; }

 private:
  bool occurs_in(const std::string& name, const Term& t) const;

  std::map<std::string, Term> bindings_;
  ElementFailure failure_ = ElementFailure::None;
  std::string detail_;
};

/// bc0: h is free; the result is the unique mgu or a failure.
ElementResult solve_bc0(const std::vector<Equation>& equations);

/// bc1: h(x, y) = enc(x ^ y) with xor ACUN. Enumerates identifications of
/// the enc-subterms, then solves the linear part over GF(2).
ElementResult solve_bc1(const std::vector<Equation>& equations, const ElementOptions& options = {});

/// dbc / dbc-prime: each u =? g(x, v) either narrows to x =? h(u, v) or is
/// kept with g free; both branches are explored.
ElementResult solve_dbc(const std::vector<Equation>& equations, const ElementOptions& options = {});

ElementResult solve_elements(const std::vector<Equation>& equations, TheoryId theory,
                             const ElementOptions& options = {});

}  // namespace chainunify
