#pragma once

#include <cctype>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "chainunify/syntax.hpp"
#include "chainunify/unify.hpp"

namespace chainunify::testsupport {

inline std::string read_data(const std::string& name) {
  std::ifstream in(std::string(CHAINUNIFY_TEST_DATA) + "/" + name);
  if (!in) throw std::runtime_error("missing test data " + name);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline std::string data_path(const std::string& name) {
  return std::string(CHAINUNIFY_TEST_DATA) + "/" + name;
}

/// Bindings written in the concrete syntax; upper-case names are lists.
inline Substitution substitution_of(const std::vector<std::pair<std::string, std::string>>& bindings,
                                    const std::set<std::string>& constants) {
  Substitution s;
  for (const auto& [name, text] : bindings) {
    const Sort sort = std::isupper(static_cast<unsigned char>(name[0])) ? Sort::List : Sort::Element;
    s.bind(var(name, sort), parse_term(text, constants));
  }
  return s;
}

/// Each is an instance of the other on the problem variables.
inline bool same_up_to_renaming(const Substitution& a, const Substitution& b, const Problem& p) {
  return matches_instance(a, b, p.original_vars, p.theory) &&
         matches_instance(b, a, p.original_vars, p.theory);
}

inline bool has_unifier(const UnifyResult& r, const Substitution& expected, const Problem& p) {
  for (const auto& u : r.unifiers) {
    if (same_up_to_renaming(u.substitution, expected, p)) return true;
  }
  return false;
}

}  // namespace chainunify::testsupport
