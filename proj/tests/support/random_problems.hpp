#pragma once

#include <random>
#include <string>
#include <vector>

#include "chainunify/problem.hpp"

namespace chainunify::testsupport {

/// Random problems whose equations already have standard-form shapes, over
/// at most `max_vars` variables and the constants a, b.
class ProblemGenerator {
 public:
  ProblemGenerator(TheoryId theory, unsigned seed, int max_vars = 6)
      : theory_(theory), rng_(seed), max_vars_(max_vars) {}

  std::vector<RawEquation> raw() {
    const int lists = 1 + pick(std::min(3, max_vars_ - 1));
    const int elements = 1 + pick(max_vars_ - lists);
    return raw(1 + pick(4), lists, elements);
  }

  /// `equations` equations over the given numbers of list and element variables.
  std::vector<RawEquation> raw(int equations, int lists, int elements) {
    static const char* list_names[] = {"U", "V", "W", "X", "Y"};
    static const char* element_names[] = {"x", "y", "z", "u", "v"};
    L_.clear();
    E_.clear();
    for (int i = 0; i < lists; ++i) {
      L_.push_back(list_var(i < 5 ? list_names[i] : "L" + std::to_string(i)));
    }
    for (int i = 0; i < elements; ++i) {
      E_.push_back(element_var(i < 5 ? element_names[i] : "e" + std::to_string(i)));
    }
    std::vector<RawEquation> out;
    for (int i = 0; i < equations; ++i) {
      out.push_back(pick(4) == 0 ? element_equation() : list_equation());
    }
    return out;
  }

  Problem problem() { return to_standard_form(raw(), theory_, {"a", "b"}); }

 private:
  int pick(int n) { return std::uniform_int_distribution<int>(0, n - 1)(rng_); }
  const Term& L() { return L_[pick(static_cast<int>(L_.size()))]; }
  const Term& E() { return E_[pick(static_cast<int>(E_.size()))]; }

  RawEquation list_equation() {
    const bool dbc = theory_ == TheoryId::DBC;
    switch (pick(dbc ? 9 : 7)) {
      case 0: return {L(), L()};
      case 1: return {L(), nil()};
      case 2:
      case 3: return {L(), cons(E(), L())};
      case 4:
      case 5:
      case 6: return {L(), bc(L(), E())};
      default: return {L(), db(L(), E())};
    }
  }

  RawEquation element_equation() {
    switch (pick(theory_ == TheoryId::BC0 ? 3 : 4)) {
      case 0: return {E(), E()};
      case 1: return {E(), constant(pick(2) ? "a" : "b")};
      case 2: return {E(), h(E(), E())};
      default:
        if (theory_ == TheoryId::DBC) return {E(), g(E(), E())};
        return {E(), xor_of({E(), E()})};
    }
  }

  TheoryId theory_;
  std::mt19937 rng_;
  int max_vars_;
  std::vector<Term> L_, E_;
};

}  // namespace chainunify::testsupport
