#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "chainunify/inference.hpp"

namespace chainunify {

struct UnifyOptions {
  /// Stop at the first branch whose element part is solvable and map the
  /// remaining list variables outside nonnil to nil.
  bool decide = false;
  std::size_t max_branches = 10000;
  bool record_trace = false;
  /// Drop unifiers that are instances of another returned unifier. The
  /// check is matching on normal forms, confirmed by normalization.
  bool filter_instances = true;
};

struct Unifier {
  /// Restricted to the variables of the input, images in normal form.
  Substitution substitution;
  /// Variables occurring in the images that the unifier leaves free.
  std::vector<Term> parameters;
  /// Rules applied on the branch that produced it.
  std::vector<TraceEntry> lineage;
};

struct UnifyResult {
  std::vector<Unifier> unifiers;
  /// List-level failures from the search and element failures at leaves.
  std::vector<BranchFailure> failures;
  std::vector<TraceEntry> trace;
  std::size_t branches = 0;
  std::size_t leaves = 0;
  std::size_t m0 = 0;
  std::size_t n0 = 0;
  std::size_t max_pushes = 0;

  bool unifiable() const { return !unifiers.empty(); }
};

/// Full pipeline: list inference, element solving per leaf, extraction.
/// Throws BudgetExceeded when the search outgrows `max_branches`.
UnifyResult unify(const Problem& p, const UnifyOptions& options = {});

/// Renders a normal form for display. Under bc1, `enc(a ^ rest)` prints as
/// `h(a, rest)`.
Term present(const Term& t, TheoryId theory);

/// True if `general` has an instance equal to `specific` modulo the theory
/// on every variable of `vars`, found by syntactic matching of normal forms.
bool matches_instance(const Substitution& general, const Substitution& specific,
                      const std::map<std::string, Term>& vars, TheoryId theory);

}  // namespace chainunify
