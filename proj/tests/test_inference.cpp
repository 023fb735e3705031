#include <gtest/gtest.h>

#include "chainunify/errors.hpp"
#include "chainunify/inference.hpp"
#include "chainunify/syntax.hpp"
#include "chainunify/unify.hpp"
#include "support/golden.hpp"

using namespace chainunify;
using testsupport::has_unifier;
using testsupport::read_data;
using testsupport::substitution_of;

namespace {

UnifyResult run(const Problem& p) { return unify(p, UnifyOptions{}); }

bool mentions(const UnifyResult& r, std::string_view text) {
  for (const auto& f : r.failures) {
    if (f.failure.reason.find(text) != std::string::npos) return true;
  }
  return false;
}

}  // namespace

TEST(Golden, NilBranchForW) {
  Problem p = parse_problem(read_data("cbc_nil_branch.problem"));
  UnifyResult r = run(p);
  ASSERT_EQ(r.unifiers.size(), 1u);
  auto want = substitution_of({{"U", "[h(z, a)]"},
                               {"V", "[z]"},
                               {"V2", "nil"},
                               {"W", "nil"},
                               {"x", "h(z, a)"},
                               {"y", "a"}},
                              {"a"});
  EXPECT_TRUE(has_unifier(r, want, p)) << r.unifiers[0].substitution.to_string();
}

TEST(Golden, NonNilBranchFailsOnElements) {
  Problem p = parse_problem(read_data("cbc_nil_branch.problem"));
  UnifyResult r = run(p);
  // The fresh head of V carries a search-generated name.
  EXPECT_TRUE(mentions(r, "y =? h(v#1, y)"));
}

TEST(Golden, FreeHeadKeepsOnlyNilTail) {
  // Without the constraint on x the non-nil branch would need h(v, a) = a.
  Problem p = parse_problem(read_data("cbc_free_head.problem"));
  UnifyResult r = run(p);
  ASSERT_EQ(r.unifiers.size(), 1u);
  const Term* w = r.unifiers[0].substitution.image("W");
  ASSERT_NE(w, nullptr);
  EXPECT_TRUE((*w)->is_nil());
}

TEST(Golden, OccurCheckCycle) {
  Problem p = parse_problem(read_data("dbc_cycle.problem"));
  UnifyResult r = run(p);
  EXPECT_FALSE(r.unifiable());
  EXPECT_TRUE(mentions(r, "Occur-Check Violation: U >db V >cons W >bc U"));
}

TEST(Golden, SplitThroughDb) {
  Problem p = parse_problem(read_data("dbc_split.problem"));
  UnifyResult r = run(p);
  ASSERT_EQ(r.unifiers.size(), 1u);
  auto want = substitution_of({{"U", "cons(g(y, y), db(V1, y))"},
                               {"U1", "db(V1, y)"},
                               {"V", "cons(y, V1)"},
                               {"x", "g(y, y)"}},
                              {});
  EXPECT_TRUE(has_unifier(r, want, p));
}

TEST(Golden, DbLoopIsNil) {
  Problem p = parse_problem(read_data("dbc_db_loop.problem"));
  UnifyResult r = run(p);
  ASSERT_EQ(r.unifiers.size(), 1u);
  EXPECT_TRUE(has_unifier(r, substitution_of({{"U", "nil"}, {"V", "nil"}}, {}), p));
}

TEST(Golden, BcDbLoopHasTwoUnifiers) {
  Problem p = parse_problem(read_data("dbc_bc_db_loop.problem"));
  UnifyResult r = run(p);
  ASSERT_EQ(r.unifiers.size(), 2u);
  EXPECT_TRUE(has_unifier(r, substitution_of({{"U", "nil"}, {"V", "nil"}}, {}), p));
  EXPECT_TRUE(has_unifier(r, substitution_of({{"U", "bc(V, x)"}, {"y", "x"}}, {}), p));
}

TEST(Golden, ChainSolvedForm) {
  Problem p = parse_problem(read_data("dbc_chain.problem"));
  UnifyResult r = run(p);
  ASSERT_EQ(r.unifiers.size(), 1u);
  // U = cons(u, U1) with V = cons(v, V1) and the chain collapsing on x = y, t = z.
  auto want = substitution_of({{"V", "cons(v, V1)"},
                               {"u", "h(v, y)"},
                               {"U1", "bc(V1, h(v, y))"},
                               {"U", "cons(h(v, y), bc(V1, h(v, y)))"},
                               {"W", "cons(h(v, y), bc(V1, h(v, y)))"},
                               {"T", "bc(cons(h(v, y), bc(V1, h(v, y))), z)"},
                               {"x", "y"},
                               {"t", "z"}},
                              {});
  EXPECT_TRUE(has_unifier(r, want, p)) << r.unifiers[0].substitution.to_string();
}

TEST(Inference, NilRuleForcesChainNil) {
  Problem p = parse_problem("problem bc0 { U =? bc(V, x); U =? nil; }");
  UnifyResult r = run(p);
  ASSERT_EQ(r.unifiers.size(), 1u);
  EXPECT_TRUE(has_unifier(r, substitution_of({{"U", "nil"}, {"V", "nil"}}, {}), p));
}

TEST(Inference, ConsNilClash) {
  Problem p = parse_problem("problem bc0 { U =? cons(x, V); U =? nil; }");
  EXPECT_FALSE(run(p).unifiable());
}

TEST(Inference, SizeConflict) {
  // U is one element longer than itself.
  Problem p = parse_problem("problem bc0 { U =? cons(x, V); V =? bc(U, y); }");
  UnifyResult r = run(p);
  EXPECT_FALSE(r.unifiable());
}

TEST(Inference, BcCancellation) {
  Problem p = parse_problem("problem bc0 { U =? bc(V, x); U =? bc(W, x); U =? cons(u, U1); }");
  UnifyResult r = run(p);
  ASSERT_TRUE(r.unifiable());
  for (const auto& u : r.unifiers) {
    Substitution s = u.substitution.resolved();
    EXPECT_TRUE(equal(s.apply(list_var("V")), s.apply(list_var("W"))));
  }
}

TEST(Inference, EmptyProblemIsIdentity) {
  Problem p = parse_problem("problem bc0 { }");
  UnifyResult r = run(p);
  ASSERT_EQ(r.unifiers.size(), 1u);
  EXPECT_TRUE(r.unifiers[0].substitution.empty());
}

TEST(Inference, DecideModeNilCompletes) {
  Problem p = parse_problem("problem bc0 { U =? bc(V, x); }");
  UnifyOptions o;
  o.decide = true;
  UnifyResult r = unify(p, o);
  ASSERT_EQ(r.unifiers.size(), 1u);
  const Term* v = r.unifiers[0].substitution.image("V");
  ASSERT_NE(v, nullptr);
  EXPECT_TRUE((*v)->is_nil());
}

TEST(Inference, PushesStayWithinBound) {
  Problem p = parse_problem(read_data("dbc_chain.problem"));
  UnifyResult r = run(p);
  EXPECT_LE(r.max_pushes, r.m0 * r.n0);
}

TEST(Inference, BranchCapThrows) {
  Problem p = parse_problem(read_data("dbc_chain.problem"));
  UnifyOptions o;
  o.max_branches = 1;
  EXPECT_THROW(unify(p, o), BudgetExceeded);
}

TEST(Inference, DSolvedCheck) {
  const TheoryId t = TheoryId::BC0;
  Term U = list_var("U"), V = list_var("V"), x = element_var("x");
  EXPECT_TRUE(is_d_solved({make_equation(U, bc(V, x), t)}));
  EXPECT_FALSE(is_d_solved({make_equation(U, bc(V, x), t), make_equation(V, bc(U, x), t)}));
  EXPECT_FALSE(is_d_solved({make_equation(U, bc(V, x), t), make_equation(U, cons(x, V), t)}));
}

TEST(Inference, TraceRecordsRules) {
  Problem p = parse_problem(read_data("cbc_nil_branch.problem"));
  UnifyOptions o;
  o.record_trace = true;
  UnifyResult r = unify(p, o);
  ASSERT_FALSE(r.trace.empty());
  EXPECT_EQ(r.trace.front().rule, RuleId::L5);
  EXPECT_EQ(r.trace.front().to_string(), "0 L5 on {U =? cons(x, W), U =? bc(V, y)}");
}
