#pragma once

#include <cstddef>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "chainunify/element_solvers.hpp"
#include "chainunify/problem.hpp"
#include "chainunify/propagation_graph.hpp"

namespace chainunify {

enum class RuleId {
  L1, L2, L3a, L3b, L3c, L4a, L4b, L5, L6, L7, L8, L9, L10,
  DB1a, DB1b, DB1c, DB2, DB3a, DB3b, DB4, DB5, DB6a, DB6b, DB7a, DB7b, DB8,
};

std::string_view to_string(RuleId rule);
bool is_dont_care(RuleId rule);

struct TraceEntry {
  std::size_t depth = 0;
  RuleId rule;
  std::vector<Equation> witnesses;

  /// `<depth> <RuleId> on {<witness equations>}`
  std::string to_string() const;
};

struct InferenceState {
  TheoryId theory = TheoryId::BC0;
  /// Sorted, duplicate-free, without trivial equations.
  std::vector<Equation> equations;
  FreshSupply fresh;
  std::map<RuleId, std::size_t> counters;
  std::vector<TraceEntry> lineage;
  std::size_t depth = 0;
  /// bc and db equations of the initial problem.
  std::size_t m0 = 0;
  /// Variables of the initial problem.
  std::size_t n0 = 0;

  std::size_t pushes() const;
  /// Canonical text of the equation set, used to detect revisited states.
  std::string key() const;
};

InferenceState initial_state(const Problem& p);

struct Failure {
  /// Unset for element-level failures.
  std::optional<RuleId> rule;
  std::string reason;
  std::vector<Equation> witnesses;
  std::optional<OccurCheckCycle> cycle;
  ElementFailure element = ElementFailure::None;
};

/// Applies don't-care rules by priority until none applies. Returns the
/// failure if L6 or L7 fires. `trace`, if given, receives every step.
std::optional<Failure> saturate_dont_care(InferenceState& s,
                                          std::vector<TraceEntry>* trace = nullptr);

/// Children of an L-reduced state at its least peak, in the order
/// nil-branch first. Empty if the state has no peak.
std::vector<InferenceState> expand_dont_know(const InferenceState& s);

/// At most one outgoing arc per class and no directed cycle.
bool is_d_solved(const std::vector<Equation>& list_equations);

struct SolvedForm {
  /// Triangular: no lhs occurs in its own or any later rhs.
  std::vector<Equation> list_part;
  std::vector<Equation> element_residue;
  /// Representatives of the nonnil classes of the final state.
  std::set<std::string> nonnil;
  std::map<RuleId, std::size_t> counters;
  std::vector<TraceEntry> lineage;
};

struct BranchFailure {
  Failure failure;
  std::vector<TraceEntry> lineage;
};

struct SearchOptions {
  std::size_t max_branches = 10000;
  bool record_trace = false;
};

struct SearchReport {
  std::vector<SolvedForm> solved;
  std::vector<BranchFailure> failures;
  std::vector<TraceEntry> trace;
  std::size_t branches = 0;
  std::size_t pruned_duplicates = 0;
  std::size_t m0 = 0;
  std::size_t n0 = 0;
  /// Largest L4b + L5 count seen on any branch.
  std::size_t max_pushes = 0;
};

/// Depth-first search alternating saturation and don't-know expansion.
/// `on_leaf` is called for every d-solved leaf and may stop the search by
/// returning true. Throws BudgetExceeded past `max_branches` nodes.
SearchReport solve_lists(const Problem& p, const SearchOptions& options,
                         const std::function<bool(const SolvedForm&)>& on_leaf = {});

/// Triangular substitution read off the solved form, followed by the element
/// solution. With `nil_complete`, unbound list variables outside nonnil are
/// mapped to nil. Throws InconsistentInput if the element solution binds a
/// variable the list part already binds.
Substitution extract_unifier(const SolvedForm& sf, const Substitution& element_solution,
                             bool nil_complete);

}  // namespace chainunify
