// Acceptance run: one PASS/FAIL line per criterion, nonzero exit on any FAIL.

#include <chrono>
#include <cmath>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "chainunify/cli.hpp"
#include "chainunify/errors.hpp"
#include "chainunify/normalizer.hpp"
#include "chainunify/oracle.hpp"
#include "chainunify/syntax.hpp"
#include "chainunify/unify.hpp"
#include "support/golden.hpp"
#include "support/random_problems.hpp"
#include "support/random_terms.hpp"

using namespace chainunify;
using testsupport::has_unifier;
using testsupport::read_data;
using testsupport::substitution_of;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

struct Outcome {
  bool pass = true;
  std::string detail;
};

// Shared by the step-bound and finitariness criteria.
struct RunLog {
  std::size_t runs = 0;
  std::size_t push_violations = 0;
  std::size_t budget_hits = 0;
  std::vector<std::string> budget_problems;
};

RunLog all_runs;

std::string describe(const Problem& p) {
  std::string out;
  for (const auto& [l, r] : p.original) out += to_string(l) + " =? " + to_string(r) + "; ";
  return out;
}

// Full (--all) unification, recorded in the shared log. Empty on BudgetExceeded.
std::optional<UnifyResult> logged_unify(const Problem& p) {
  ++all_runs.runs;
  try {
    UnifyResult r = unify(p);
    if (r.max_pushes > r.m0 * r.n0) ++all_runs.push_violations;
    return r;
  } catch (const BudgetExceeded&) {
    ++all_runs.budget_hits;
    all_runs.budget_problems.push_back(describe(p));
    return std::nullopt;
  }
}

bool mentions(const UnifyResult& r, std::string_view text) {
  for (const auto& f : r.failures) {
    if (f.failure.reason.find(text) != std::string::npos) return true;
  }
  return false;
}

// 1 ------------------------------------------------------------------------

Outcome golden() {
  Outcome o;
  std::ostringstream d;
  auto check = [&](const std::string& name, const std::function<bool(const Problem&, const UnifyResult&)>& ok,
                   const std::string& file) {
    Problem p = parse_problem(read_data(file));
    auto t0 = Clock::now();
    auto r = logged_unify(p);
    const double t = seconds_since(t0);
    const bool good = r && ok(p, *r) && t < 1.0;
    if (!good) {
      o.pass = false;
      d << " " << name << "=FAIL";
    }
  };

  check("nil-branch", [](const Problem& p, const UnifyResult& r) {
    return r.unifiers.size() == 1 &&
           has_unifier(r, substitution_of({{"U", "[h(z, a)]"}, {"V", "[z]"}, {"V2", "nil"},
                                           {"W", "nil"}, {"x", "h(z, a)"}, {"y", "a"}}, {"a"}), p);
  }, "cbc_nil_branch.problem");

  check("element-failure", [](const Problem&, const UnifyResult& r) {
    return mentions(r, "y =? h(v#1, y)");
  }, "cbc_nil_branch.problem");

  // A unifier with W non-nil would need h(v, a) = a for the head v of V2.
  bool nonnil_w = false;
  check("nonnil-W", [&](const Problem&, const UnifyResult& r) {
    for (const auto& u : r.unifiers) {
      const Term* w = u.substitution.image("W");
      if (w && !(*w)->is_nil()) nonnil_w = true;
    }
    return nonnil_w;
  }, "cbc_free_head.problem");
  if (!nonnil_w) {
    Problem p = parse_problem(read_data("cbc_free_head.problem"));
    auto en = oracle::enumerate_solutions(p, oracle::SearchBudget{});
    std::size_t with_w = 0;
    for (const auto& s : en.solutions) with_w += !s.at("W")->is_nil();
    d << " (ground search: " << en.solutions.size() << " solutions, " << with_w << " with W non-nil"
      << (en.exhausted ? ", exhaustive)" : ", capped)");
  }

  check("cycle", [](const Problem&, const UnifyResult& r) {
    return !r.unifiable() && mentions(r, "Occur-Check Violation: U >db V >cons W >bc U");
  }, "dbc_cycle.problem");

  check("split", [](const Problem& p, const UnifyResult& r) {
    return r.unifiers.size() == 1 &&
           has_unifier(r, substitution_of({{"U", "cons(g(y, y), db(V1, y))"}, {"U1", "db(V1, y)"},
                                           {"V", "cons(y, V1)"}, {"x", "g(y, y)"}}, {}), p);
  }, "dbc_split.problem");

  check("db-loop", [](const Problem& p, const UnifyResult& r) {
    return r.unifiers.size() == 1 &&
           has_unifier(r, substitution_of({{"U", "nil"}, {"V", "nil"}}, {}), p);
  }, "dbc_db_loop.problem");

  check("bc-db-loop", [](const Problem& p, const UnifyResult& r) {
    return r.unifiers.size() == 2 &&
           has_unifier(r, substitution_of({{"U", "nil"}, {"V", "nil"}}, {}), p) &&
           has_unifier(r, substitution_of({{"U", "bc(V, x)"}, {"y", "x"}}, {}), p);
  }, "dbc_bc_db_loop.problem");

  check("chain", [](const Problem& p, const UnifyResult& r) {
    return r.unifiers.size() == 1 &&
           has_unifier(r, substitution_of({{"V", "cons(v, V1)"}, {"u", "h(v, y)"},
                                           {"U1", "bc(V1, h(v, y))"},
                                           {"U", "cons(h(v, y), bc(V1, h(v, y)))"},
                                           {"W", "cons(h(v, y), bc(V1, h(v, y)))"},
                                           {"T", "bc(cons(h(v, y), bc(V1, h(v, y))), z)"},
                                           {"x", "y"}, {"t", "z"}}, {}), p);
  }, "dbc_chain.problem");

  o.detail = o.pass ? "8/8 examples reproduced" : "failed:" + d.str();
  return o;
}

// 2 ------------------------------------------------------------------------

Outcome attack() {
  const std::set<std::string> consts{"A", "B", "I", "m", "v", "w"};
  auto t0 = Clock::now();
  Problem p = parse_problem(
      "problem bc1 { const A, B, I, m, v, w; bc([I, z], w) =? cons(h(I, w), [h(m, h(A, v))]); }");
  auto r = logged_unify(p);
  const double t = seconds_since(t0);
  if (!r || !r->unifiable()) return {false, "no unifier"};
  const Term* z = r->unifiers.front().substitution.image("z");
  const Term want = parse_term("m ^ h(A, v) ^ h(I, w)", consts);
  const bool ok = z && equal_modulo(*z, want, TheoryId::BC1) && t < 1.0;
  std::ostringstream d;
  d << "z := " << (z ? to_string(present(*z, TheoryId::BC1)) : "unbound") << " in " << t << " s";
  return {ok, d.str()};
}

// 3 ------------------------------------------------------------------------

Outcome gadget() {
  ProblemText text = encode_1in3(parse_clauses(read_data("gadget.cnf")));
  Problem p = to_standard_form(text.equations, text.theory, text.constants);
  auto r = logged_unify(p);
  if (!r) return {false, "branch cap exceeded"};
  const std::vector<std::string> xs{"x_p", "x_q", "x_r"};
  std::size_t matched = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    std::vector<std::pair<std::string, std::string>> want;
    for (std::size_t j = 0; j < xs.size(); ++j) want.push_back({xs[j], i == j ? "c" : "b"});
    matched += has_unifier(*r, substitution_of(want, text.constants), p);
  }
  oracle::SearchBudget b;
  b.constants = {"a", "b", "c"};
  b.max_depth = 2;
  auto ground = oracle::brute_force_unifiers(p, b);
  std::size_t ground_ok = 0;
  for (const auto& s : ground) {
    std::size_t cs = 0, bs = 0;
    for (const auto& x : xs) {
      cs += equal(s.at(x), constant("c"));
      bs += equal(s.at(x), constant("b"));
    }
    ground_ok += cs == 1 && bs == 2;
  }
  const bool ok = r->unifiers.size() == 3 && matched == 3 && ground.size() == 3 && ground_ok == 3;
  std::ostringstream d;
  d << r->unifiers.size() << " unifiers, " << matched << "/3 expected; ground search finds "
    << ground.size() << " solutions";
  return {ok, d.str()};
}

// 4 ------------------------------------------------------------------------

Outcome one_in_three() {
  std::mt19937 rng(11);
  std::size_t agree = 0;
  const std::size_t total = 50;
  auto t0 = Clock::now();
  for (std::size_t i = 0; i < total; ++i) {
    const int nv = 3 + static_cast<int>(rng() % 8);
    const int nc = 1 + static_cast<int>(rng() % 8);
    std::vector<std::vector<std::string>> clauses;
    for (int c = 0; c < nc; ++c) {
      std::vector<std::string> clause;
      for (int j = 0; j < 3; ++j) clause.push_back("p" + std::to_string(rng() % nv));
      clauses.push_back(clause);
    }
    ProblemText text = encode_1in3(clauses);
    Problem p = to_standard_form(text.equations, text.theory, text.constants);
    UnifyOptions opts;
    opts.decide = true;
    agree += unify(p, opts).unifiable() == oracle::sat1in3(clauses);
  }
  const double t = seconds_since(t0);
  std::ostringstream d;
  d << agree << "/" << total << " verdicts agree in " << t << " s";
  return {agree == total && t < 60.0, d.str()};
}

// 5 ------------------------------------------------------------------------

std::vector<Problem> random_problems(TheoryId theory, std::size_t count) {
  testsupport::ProblemGenerator gen(theory, 7);
  std::vector<Problem> out;
  while (out.size() < count) {
    try {
      out.push_back(gen.problem());
    } catch (const std::exception&) {
    }
  }
  return out;
}

bool sound(const Problem& p, const Unifier& u) {
  const Substitution s = u.substitution.resolved();
  const std::vector<std::function<Term(const Term&)>> shapes{
      [](const Term&) { return nil(); },
      [](const Term& k) { return list_of({k}); },
  };
  for (const auto& [l, r] : p.original) {
    const Term sl = s.apply(l), sr = s.apply(r);
    if (!equal_modulo(sl, sr, p.theory)) return false;
    // Parameters become fresh constants, list parameters nil or [k].
    for (const auto& shape : shapes) {
      Substitution ground;
      std::map<std::string, Term> vars = vars_of(sl);
      collect_vars(sr, vars);
      std::size_t i = 0;
      for (const auto& [name, v] : vars) {
        Term k = constant("k" + std::to_string(i++));
        ground.bind(v, v->sort() == Sort::List ? shape(k) : k);
      }
      if (!equal_modulo(ground.apply(sl), ground.apply(sr), p.theory)) return false;
    }
  }
  return true;
}

Outcome soundness() {
  std::ostringstream d;
  bool ok = true;
  auto t0 = Clock::now();
  for (TheoryId theory : {TheoryId::BC0, TheoryId::BC1, TheoryId::DBC}) {
    std::size_t unifiers = 0, bad = 0, solvable = 0;
    for (const Problem& p : random_problems(theory, 500)) {
      auto r = logged_unify(p);
      if (!r) continue;
      solvable += r->unifiable();
      for (const auto& u : r->unifiers) {
        ++unifiers;
        if (!sound(p, u)) ++bad;
      }
    }
    ok = ok && bad == 0;
    d << to_string(theory) << " " << unifiers - bad << "/" << unifiers << " sound (" << solvable
      << "/500 solvable); ";
  }
  const double t = seconds_since(t0);
  d << t << " s";
  return {ok && t < 300.0, d.str()};
}

// 6 ------------------------------------------------------------------------

Outcome completeness() {
  std::ostringstream d;
  bool ok = true;
  auto t0 = Clock::now();
  for (TheoryId theory : {TheoryId::BC0, TheoryId::BC1, TheoryId::DBC}) {
    std::size_t solutions = 0, covered = 0, unknown = 0, missed_problems = 0, i = 0;
    for (const Problem& p : random_problems(theory, 200)) {
      ++i;
      auto r = logged_unify(p);
      if (!r) continue;
      oracle::SearchBudget b;
      b.node_cap = 100000;
      b.seed = i;
      auto en = oracle::enumerate_solutions(p, b, 20);
      std::vector<std::string> names;
      for (const auto& [n, v] : p.original_vars) names.push_back(n);
      bool missed = false;
      for (const auto& s : en.solutions) {
        ++solutions;
        Substitution gs;
        for (const auto& n : names) gs.bind(p.original_vars.at(n), s.at(n));
        bool found = false, unsure = false;
        for (const auto& u : r->unifiers) {
          if (matches_instance(u.substitution, gs, p.original_vars, theory)) {
            found = true;
            break;
          }
        }
        for (std::size_t k = 0; !found && k < r->unifiers.size(); ++k) {
          auto v = oracle::subsumes(r->unifiers[k].substitution, s, names, theory, b);
          found = v == oracle::Verdict::Yes;
          unsure = unsure || v == oracle::Verdict::Unknown;
        }
        if (found) {
          ++covered;
        } else {
          unknown += unsure;
          missed = true;
        }
      }
      missed_problems += missed;
    }
    ok = ok && covered == solutions;
    d << to_string(theory) << " " << covered << "/" << solutions << " ground solutions covered";
    if (missed_problems) d << " (" << missed_problems << " problems with misses, " << unknown << " undecided)";
    d << "; ";
  }
  const double t = seconds_since(t0);
  d << t << " s";
  return {ok && t < 600.0, d.str()};
}

// 7 ------------------------------------------------------------------------

// Linked blocks U_k = cons(x_k, W_k) = bc(V_k, y), W_k = bc(U_{k+1}, x_k),
// x_k = h(z_k, y), truncated to `n` equations.
Problem chain_family(std::size_t n) {
  std::vector<RawEquation> raw;
  const Term y = element_var("y");
  raw.push_back({y, constant("a")});
  for (std::size_t k = 0; raw.size() < n; ++k) {
    const std::string s = std::to_string(k);
    const Term U = list_var("U" + s), W = list_var("W" + s), V = list_var("V" + s),
               x = element_var("x" + s);
    raw.push_back({U, cons(x, W)});
    raw.push_back({U, bc(V, y)});
    raw.push_back({W, bc(list_var("U" + std::to_string(k + 1)), x)});
    raw.push_back({x, h(element_var("z" + s), y)});
  }
  raw.resize(n);
  return to_standard_form(raw, TheoryId::BC0, {"a"});
}

Outcome step_bound() {
  std::ostringstream d;
  d << all_runs.runs - all_runs.push_violations << "/" << all_runs.runs
    << " runs within m0*n0 pushes; ";
  std::vector<double> xs, ys;
  for (std::size_t n : {10, 20, 40, 80}) {
    std::size_t reps = 0;
    auto t0 = Clock::now();
    bool unifiable = false;
    do {
      Problem p = chain_family(n);
      UnifyOptions opts;
      opts.decide = true;
      unifiable = unify(p, opts).unifiable();
      ++reps;
    } while (seconds_since(t0) < 0.2);
    const double per_run = seconds_since(t0) / static_cast<double>(reps);
    xs.push_back(std::log(static_cast<double>(n)));
    ys.push_back(std::log(per_run));
    d << "n=" << n << ":" << per_run * 1e3 << "ms" << (unifiable ? "" : "(unsat)") << " ";
  }
  const double mx = (xs[0] + xs[1] + xs[2] + xs[3]) / 4, my = (ys[0] + ys[1] + ys[2] + ys[3]) / 4;
  double num = 0, den = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    num += (xs[i] - mx) * (ys[i] - my);
    den += (xs[i] - mx) * (xs[i] - mx);
  }
  const double slope = num / den;
  d << "fitted exponent " << slope;
  return {all_runs.push_violations == 0 && slope < 3.0, d.str()};
}

// 8 ------------------------------------------------------------------------

struct PropertyCheck {
  std::string name;
  std::size_t counterexamples = 0;
  std::size_t equal_cases = 0;
  std::size_t total = 0;
};

// Both sides compared under two rewriting strategies, which must agree.
bool same(const Term& s, const Term& t, TheoryId theory) {
  const bool a = equal(normalize(s, theory), normalize(t, theory));
  const bool b = equal(normalize(s, theory, Strategy::Outermost), normalize(t, theory, Strategy::Outermost));
  if (a != b) throw std::logic_error("strategies disagree on " + to_string(s) + " vs " + to_string(t));
  return a;
}

class Disguiser {
 public:
  Disguiser(TheoryId theory, testsupport::TermGenerator& gen) : theory_(theory), gen_(gen) {}

  // A term equal to `t` modulo the theory, usually syntactically different.
  Term element(const Term& t) {
    switch (gen_.pick(3)) {
      case 0: return normalize(t, theory_);
      case 1:
        if (is_dbc_family(theory_)) {
          Term y = gen_.element(1);
          return g(h(t, y), y);
        }
        if (theory_ == TheoryId::BC1) {
          Term k = gen_.element(1);
          return xor_of({t, k, k});
        }
        return t;
      default: return t;
    }
  }

  Term list(const Term& t) {
    switch (gen_.pick(3)) {
      case 0: return normalize(t, theory_);
      case 1:
        if (theory_ == TheoryId::DBC) {
          Term x = gen_.element(1);
          return db(bc(t, x), x);
        }
        return t;
      default: return t;
    }
  }

 private:
  TheoryId theory_;
  testsupport::TermGenerator& gen_;
};

std::vector<PropertyCheck> properties() {
  const std::size_t n = 300;
  std::vector<PropertyCheck> out;
  auto run = [&](const std::string& name, TheoryId theory, unsigned seed,
                 const std::function<std::pair<bool, bool>(testsupport::TermGenerator&, Disguiser&)>& trial) {
    testsupport::TermGenerator gen(theory, seed);
    Disguiser dis(theory, gen);
    PropertyCheck c{name + "/" + std::string(to_string(theory))};
    for (std::size_t i = 0; i < n; ++i) {
      auto [holds, equal_case] = trial(gen, dis);
      ++c.total;
      c.counterexamples += !holds;
      c.equal_cases += equal_case;
    }
    out.push_back(c);
  };

  for (TheoryId theory : {TheoryId::BC0, TheoryId::BC1, TheoryId::DBC}) {
    run("bc-list", theory, 101, [theory](auto& gen, auto& dis) {
      Term t1 = gen.list(2), t = gen.element(2);
      Term t2 = gen.pick(2) ? dis.list(t1) : gen.list(2);
      const bool same_lists = same(t1, t2, theory);
      return std::pair{same(bc(t1, t), bc(t2, t), theory) == same_lists, same_lists};
    });
    run("bc-iv", theory, 102, [theory](auto& gen, auto& dis) {
      Term l = gen.pick(4) ? gen.list(2) : bc(nil(), gen.element(1));
      Term t1 = gen.element(2);
      Term t2 = gen.pick(2) ? dis.element(t1) : gen.element(2);
      const bool rhs = same(l, nil(), theory) || same(t1, t2, theory);
      return std::pair{same(bc(l, t1), bc(l, t2), theory) == rhs, rhs};
    });
    run("cons", theory, 103, [theory](auto& gen, auto& dis) {
      Term u1 = gen.element(2), l1 = gen.list(2);
      Term u2 = gen.pick(2) ? dis.element(u1) : gen.element(2);
      Term l2 = gen.pick(2) ? dis.list(l1) : gen.list(2);
      const bool parts = same(u1, u2, theory) && same(l1, l2, theory);
      return std::pair{same(cons(u1, l1), cons(u2, l2), theory) == parts, parts};
    });
    run("h", theory, 104, [theory](auto& gen, auto& dis) {
      Term x = gen.element(2), y1 = gen.element(2);
      Term y2 = gen.pick(2) ? dis.element(y1) : gen.element(2);
      // Semi-cancellative: each argument position on its own.
      const bool right = same(h(x, y1), h(x, y2), theory) == same(y1, y2, theory);
      const bool left = same(h(y1, x), h(y2, x), theory) == same(y1, y2, theory);
      return std::pair{right && left, same(y1, y2, theory)};
    });
  }

  run("g-left", TheoryId::DBC, 105, [](auto& gen, auto& dis) {
    Term t1 = gen.element(2);
    Term t2 = gen.pick(2) ? dis.element(t1) : gen.element(2);
    // Half the time g(s, t1) is a redex.
    Term s = gen.pick(2) ? h(gen.element(1), t1) : gen.element(2);
    const bool lhs = same(g(s, t1), g(s, t2), TheoryId::DBC);
    return std::pair{!lhs || same(t1, t2, TheoryId::DBC), lhs};
  });
  run("db-iv", TheoryId::DBC, 106, [](auto& gen, auto& dis) {
    Term l = gen.pick(4) ? gen.list(2) : db(nil(), gen.element(1));
    Term x = gen.element(2);
    Term y = gen.pick(2) ? dis.element(x) : gen.element(2);
    const bool rhs = same(l, nil(), TheoryId::DBC) || same(x, y, TheoryId::DBC);
    return std::pair{same(db(l, x), db(l, y), TheoryId::DBC) == rhs, rhs};
  });
  run("db-inverts-bc", TheoryId::DBC_PRIME, 107, [](auto& gen, auto&) {
    Term u = normalize(gen.list(2), TheoryId::DBC_PRIME);
    Term x = normalize(gen.element(2), TheoryId::DBC_PRIME);
    return std::pair{same(db(bc(u, x), x), u, TheoryId::DBC_PRIME), true};
  });
  return out;
}

Outcome property_suite() {
  std::ostringstream d;
  bool ok = true;
  std::size_t checks = 0;
  for (const auto& c : properties()) {
    checks += c.total;
    if (c.counterexamples) {
      ok = false;
      d << c.name << ": " << c.counterexamples << " counterexamples; ";
    } else if (c.equal_cases == 0) {
      ok = false;
      d << c.name << ": no equal cases drawn; ";
    }
  }
  const Term t = constant("a"), u = constant("b");
  const bool collapses = same(g(h(g(t, u), u), u), g(t, u), TheoryId::DBC);
  const bool distinct = !same(h(g(t, u), u), t, TheoryId::DBC);
  ok = ok && collapses && distinct;
  d << checks << " instances, 0 counterexamples" << (ok ? "" : " expected")
    << "; g not right-cancellative: " << (collapses && distinct ? "witnessed" : "NOT witnessed");
  return {ok, d.str()};
}

// 9 ------------------------------------------------------------------------

Outcome finitariness() {
  std::ostringstream d;
  d << all_runs.runs - all_runs.budget_hits << "/" << all_runs.runs
    << " full runs finished under the default branch cap";
  for (std::size_t i = 0; i < all_runs.budget_problems.size() && i < 3; ++i) {
    d << "; over cap: " << all_runs.budget_problems[i];
  }
  return {all_runs.budget_hits == 0, d.str()};
}

}  // namespace

int main() {
  struct Item {
    const char* name;
    std::function<Outcome()> run;
  };
  // The step-bound and finitariness lines read the log of runs 1 to 6.
  const std::vector<Item> items{
      {"golden examples", golden},
      {"attack demo", attack},
      {"1-in-3 gadget", gadget},
      {"1-in-3 equivalence", one_in_three},
      {"soundness", soundness},
      {"completeness", completeness},
      {"step bound and growth", step_bound},
      {"cancellation properties", property_suite},
      {"finitariness", finitariness},
  };
  int failed = 0;
  for (std::size_t i = 0; i < items.size(); ++i) {
    Outcome o;
    try {
      o = items[i].run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    failed += !o.pass;
    std::cout << (o.pass ? "PASS" : "FAIL") << " " << i + 1 << " " << items[i].name << ": " << o.detail
              << std::endl;
  }
  return failed ? 1 : 0;
}
