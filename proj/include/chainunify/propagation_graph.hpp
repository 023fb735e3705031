#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "chainunify/problem.hpp"

namespace chainunify {

enum class ArcLabel { Cons, Bc, Db };

std::string_view to_string(ArcLabel label);

struct Arc {
  std::string from;  // class representative of the equation's lhs
  ArcLabel label;
  std::string to;    // class representative of the list argument
  Equation witness;
};

/// One step of an occur-check cycle. `forward` is false when a chaining
/// edge is walked against its direction (printed as `X <bc Y`).
struct CycleStep {
  std::string from;
  ArcLabel label;
  bool forward;
  std::string to;
};

struct OccurCheckCycle {
  std::vector<CycleStep> steps;

  /// The class the cycle starts and ends at.
  const std::string& start() const { return steps.front().from; }
  std::string to_string() const;
};

enum class Relation {
  BcStar,    // reflexive-transitive closure of >bc
  DbStar,    // reflexive-transitive closure of >db
  CPlus,     // transitive closure of >bc union >db
  CSimStar,  // reflexive-transitive-symmetric closure of >bc union >db
};

/// Graph over classes of list variables. Classes merge variables related by
/// `U =? V` equations; each cons/bc/db equation contributes one arc.
class PropagationGraph {
 public:
  static PropagationGraph build(const std::vector<Equation>& equations);

  /// Representative (lexicographically least member) of the variable's class.
  /// Variables not in the graph are their own class.
  std::string class_of(const std::string& var) const;
  std::vector<std::string> classes() const;
  std::vector<std::string> members(const std::string& rep) const;
  const std::vector<Arc>& arcs() const { return arcs_; }
  std::vector<const Arc*> outgoing(const std::string& rep) const;

  /// Representatives of the classes that no unifier can map to nil.
  const std::set<std::string>& nonnil() const { return nonnil_; }
  bool is_nonnil(const std::string& var) const { return nonnil_.count(class_of(var)) > 0; }

  /// A cycle through at least one cons arc, where chaining edges may be
  /// walked in either direction; rotated to start at its least class.
  std::optional<OccurCheckCycle> occur_check() const;

  bool related(Relation relation, const std::string& from, const std::string& to) const;

  /// One line per arc: `[<class>] -<label>-> [<class>] via <equation>`.
  std::string dump() const;

 private:
  std::string find(const std::string& v) const;
  std::string class_label(const std::string& rep) const;

  std::map<std::string, std::string> parent_;
  std::vector<Arc> arcs_;
  std::set<std::string> nonnil_;
};

}  // namespace chainunify
