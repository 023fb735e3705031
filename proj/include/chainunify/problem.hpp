#pragma once

#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "chainunify/term.hpp"
#include "chainunify/theory.hpp"

namespace chainunify {

/// Equation shapes of a problem in standard form. `Xor` (u =? v1 ^ ... ^ vn)
/// only occurs under bc1.
enum class Shape {
  VarVarL,  // U =? V
  Bc,       // U =? bc(V, y)
  Db,       // U =? db(V, y)
  Cons,     // U =? cons(v, W)
  Nil,      // U =? nil
  VarVarE,  // u =? v
  H,        // v =? h(w, x)
  G,        // u =? g(w, y)
  Const,    // u =? a
  Xor,      // u =? v1 ^ ... ^ vn
};

std::string_view to_string(Shape shape);

struct Equation {
  Term lhs;
  Term rhs;
  Shape shape;

  bool is_list() const { return lhs->sort() == Sort::List; }
};

/// Shape of `lhs =? rhs` if it is in standard form under `theory`.
std::optional<Shape> classify(const Term& lhs, const Term& rhs, TheoryId theory);

/// Builds a standard-form equation; throws std::invalid_argument otherwise.
Equation make_equation(const Term& lhs, const Term& rhs, TheoryId theory);

bool operator==(const Equation& a, const Equation& b);
bool operator<(const Equation& a, const Equation& b);
std::string to_string(const Equation& e);

using RawEquation = std::pair<Term, Term>;

struct Problem {
  TheoryId theory = TheoryId::BC0;
  std::vector<Equation> equations;
  FreshSupply fresh;
  std::set<std::string> constants;
  /// The equations as given, before standardization.
  std::vector<RawEquation> original;
  /// Variables of `original`, by name.
  std::map<std::string, Term> original_vars;

  std::vector<Equation> list_equations() const;
  std::vector<Equation> element_equations() const;
  std::map<std::string, Term> variables() const;
};

/// Rejects theories that only exist for normalization and symbols the
/// theory does not admit in a unification problem.
void check_unification_signature(const Term& t, TheoryId theory);

/// Flattens arbitrary well-typed equations into standard form. Every
/// non-variable proper subterm is named by a fresh variable; identical
/// subterms share one name. Constants in argument positions are named
/// through `u =? a`, and `enc(t)` becomes `h(t, 0)` under bc1.
Problem to_standard_form(const std::vector<RawEquation>& raw, TheoryId theory,
                         std::set<std::string> constants = {});

}  // namespace chainunify
