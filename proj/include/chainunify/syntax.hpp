#pragma once

#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "chainunify/problem.hpp"

namespace chainunify {

/// A problem file before standardization.
///
///   problem bc0 {
///     const a, b;
///     U =? cons(x, W);   // comment
///     U =? bc(V, y);
///   }
///
/// Declared names are constants. Otherwise an upper-case initial marks a
/// list variable and a lower-case initial an element variable. `[t1, t2]`
/// abbreviates cons(t1, cons(t2, nil)) and `^` is left-associative xor.
struct ProblemText {
  TheoryId theory = TheoryId::BC0;
  std::set<std::string> constants;
  std::vector<RawEquation> equations;
};

/// Throws SyntaxError (with line and column) or SortError.
ProblemText parse_problem_text(std::string_view text);

/// parse_problem_text followed by to_standard_form.
Problem parse_problem(std::string_view text);

/// Input of the normalize command: `(const a, b;)* term`.
struct TermText {
  std::set<std::string> constants;
  Term term;
};

TermText parse_term_text(std::string_view text);

/// A single term, with the given names read as constants.
Term parse_term(std::string_view text, const std::set<std::string>& constants = {});

/// Concrete syntax accepted by parse_problem_text.
std::string print_problem(const ProblemText& p);

}  // namespace chainunify
