#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "chainunify/problem.hpp"

namespace chainunify::oracle {

/// Bounds of the ground search. Enumerated element values have depth at most
/// `max_depth`; enumerated lists have at most `max_list_len` entries of depth
/// at most `max_depth - 1`. Values derived from other values by the
/// equations are not bounded.
struct SearchBudget {
  std::size_t max_depth = 3;
  std::vector<std::string> constants = {"a", "b"};
  std::size_t max_list_len = 3;
  /// Search nodes before BudgetExceeded is thrown.
  std::size_t node_cap = 2000000;
  /// Nonzero: enumerate each variable's values in a shuffled order.
  std::uint64_t seed = 0;
};

/// Variable name to ground normal form.
using GroundSolution = std::map<std::string, Term>;

/// Ground element normal forms of depth at most `depth`, shallow first.
std::vector<Term> element_domain(TheoryId theory, const std::vector<std::string>& constants,
                                 std::size_t depth);

/// Ground lists of at most `max_len` entries drawn from `elements`, shortest first.
std::vector<Term> list_domain(const std::vector<Term>& elements, std::size_t max_len);

/// Every ground solution of the standard-form equations reachable within the
/// budget, in a deterministic order. Throws BudgetExceeded.
std::vector<GroundSolution> brute_force_unifiers(const std::vector<Equation>& equations,
                                                 TheoryId theory, const SearchBudget& budget,
                                                 std::size_t max_solutions = SIZE_MAX);

std::vector<GroundSolution> brute_force_unifiers(const Problem& p, const SearchBudget& budget,
                                                 std::size_t max_solutions = SIZE_MAX);

struct Enumeration {
  std::vector<GroundSolution> solutions;
  /// True when the search space within the bounds was covered.
  bool exhausted = false;
  std::size_t nodes = 0;
};

/// Like brute_force_unifiers, but stops quietly at the node cap.
Enumeration enumerate_solutions(const Problem& p, const SearchBudget& budget,
                                std::size_t max_solutions = SIZE_MAX);

enum class Verdict { Yes, No, Unknown };

std::string_view to_string(Verdict v);

/// Whether some instantiation of the parameters of `general` agrees with
/// `ground` modulo the theory on every variable in `vars`. Unknown when the
/// search budget runs out.
Verdict subsumes(const Substitution& general, const GroundSolution& ground,
                 const std::vector<std::string>& vars, TheoryId theory,
                 const SearchBudget& budget);

/// Exhaustive check for an assignment with exactly one true literal per
/// clause. Clauses name variables; at most 20 distinct names.
bool sat1in3(const std::vector<std::vector<std::string>>& clauses);

}  // namespace chainunify::oracle
