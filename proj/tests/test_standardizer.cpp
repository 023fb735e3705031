#include <gtest/gtest.h>

#include "chainunify/errors.hpp"
#include "chainunify/problem.hpp"

using namespace chainunify;

namespace {

const Term a = constant("a");
const Term x = element_var("x");
const Term y = element_var("y");
const Term U = list_var("U");
const Term V = list_var("V");

bool all_standard(const Problem& p) {
  for (const auto& e : p.equations) {
    if (!classify(e.lhs, e.rhs, p.theory)) return false;
  }
  return true;
}

}  // namespace

TEST(Classify, Shapes) {
  EXPECT_EQ(classify(U, bc(V, x), TheoryId::BC0), Shape::Bc);
  EXPECT_EQ(classify(U, cons(x, V), TheoryId::BC0), Shape::Cons);
  EXPECT_EQ(classify(x, a, TheoryId::BC0), Shape::Const);
  EXPECT_EQ(classify(x, h(y, x), TheoryId::BC0), Shape::H);
  EXPECT_EQ(classify(U, db(V, x), TheoryId::DBC), Shape::Db);
  EXPECT_EQ(classify(x, xor_of({y, x}), TheoryId::BC1), Shape::Xor);
  EXPECT_FALSE(classify(U, bc(cons(x, V), y), TheoryId::BC0));
  EXPECT_FALSE(classify(x, h(a, y), TheoryId::BC0));
  EXPECT_FALSE(classify(U, db(V, x), TheoryId::BC0));
}

TEST(StandardForm, FlattensNestedTerms) {
  Problem p = to_standard_form({{U, bc(cons(h(x, a), V), y)}}, TheoryId::BC0, {"a"});
  EXPECT_TRUE(all_standard(p));
  EXPECT_EQ(p.original_vars.size(), 4u);
  EXPECT_GE(p.equations.size(), 4u);
}

TEST(StandardForm, SharesIdenticalSubterms) {
  Problem p = to_standard_form({{x, h(h(a, y), h(a, y))}}, TheoryId::BC0, {"a"});
  std::size_t hs = 0;
  for (const auto& e : p.equations) hs += e.shape == Shape::H;
  EXPECT_EQ(hs, 2u);
}

TEST(StandardForm, NonVariableSidesAreNamed) {
  Problem p = to_standard_form({{h(x, a), h(y, a)}}, TheoryId::BC0, {"a"});
  EXPECT_TRUE(all_standard(p));
  for (const auto& e : p.equations) EXPECT_TRUE(e.lhs->is_var());
}

TEST(StandardForm, EncBecomesHWithZero) {
  Problem p = to_standard_form({{x, enc(y)}}, TheoryId::BC1);
  EXPECT_TRUE(all_standard(p));
  bool found = false;
  for (const auto& e : p.equations) found = found || e.shape == Shape::H;
  EXPECT_TRUE(found);
}

TEST(StandardForm, RejectsForeignSymbols) {
  EXPECT_THROW(to_standard_form({{x, g(y, a)}}, TheoryId::BC0, {"a"}), SignatureError);
  EXPECT_THROW(to_standard_form({{x, g(y, a)}}, TheoryId::BC1, {"a"}), SignatureError);
  EXPECT_THROW(to_standard_form({{U, x}}, TheoryId::BC0), SortError);
}

TEST(StandardForm, KeepsOriginalEquations) {
  std::vector<RawEquation> raw{{U, cons(x, nil())}};
  Problem p = to_standard_form(raw, TheoryId::BC0);
  ASSERT_EQ(p.original.size(), 1u);
  EXPECT_TRUE(equal(p.original[0].second, cons(x, nil())));
  EXPECT_TRUE(all_standard(p));
}
