#pragma once

#include <random>
#include <string>
#include <vector>

#include "chainunify/term.hpp"
#include "chainunify/theory.hpp"

namespace chainunify::testsupport {

/// Random ground terms over a small constant pool, using only the symbols the
/// theory admits.
class TermGenerator {
 public:
  TermGenerator(TheoryId theory, unsigned seed, std::vector<std::string> constants = {"a", "b", "c"})
      : theory_(theory), rng_(seed) {
    for (auto& c : constants) constants_.push_back(constant(c));
  }

  std::mt19937& rng() { return rng_; }

  Term element(int depth) {
    if (depth <= 0 || pick(3) == 0) return constants_[pick(constants_.size())];
    const bool dbc = is_dbc_family(theory_);
    const int choices = theory_ == TheoryId::BC1 ? 3 : (dbc ? 3 : 1);
    switch (pick(choices)) {
      case 0: return h(element(depth - 1), element(depth - 1));
      case 1:
        if (dbc) return g(element(depth - 1), element(depth - 1));
        return enc(element(depth - 1));
      default:
        if (dbc) {
          Term y = element(depth - 1);
          return g(h(element(depth - 1), y), y);
        }
        return xor_of({element(depth - 1), element(depth - 1)});
    }
  }

  Term list(int depth, int max_len = 3) {
    if (depth <= 0) return plain_list(max_len, 1);
    const bool dbc = is_dbc_family(theory_);
    switch (pick(dbc ? 5 : 4)) {
      case 0: return nil();
      case 1: return cons(element(depth - 1), list(depth - 1, max_len));
      case 2: return plain_list(max_len, depth - 1);
      case 3: return bc(list(depth - 1, max_len), element(depth - 1));
      default: return db(list(depth - 1, max_len), element(depth - 1));
    }
  }

  Term plain_list(int max_len, int element_depth) {
    std::vector<Term> elems;
    const std::size_t n = pick(static_cast<std::size_t>(max_len) + 1);
    for (std::size_t i = 0; i < n; ++i) elems.push_back(element(element_depth));
    return list_of(elems);
  }

  std::size_t pick(std::size_t n) { return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng_); }

 private:
  TheoryId theory_;
  std::mt19937 rng_;
  std::vector<Term> constants_;
};

}  // namespace chainunify::testsupport
