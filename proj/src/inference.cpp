#include "chainunify/inference.hpp"

#include <algorithm>
#include <functional>
#include <set>
#include <sstream>

#include "chainunify/errors.hpp"

namespace chainunify {

std::string_view to_string(RuleId rule) {
  switch (rule) {
    case RuleId::L1: return "L1";
    case RuleId::L2: return "L2";
    case RuleId::L3a: return "L3a";
    case RuleId::L3b: return "L3b";
    case RuleId::L3c: return "L3c";
    case RuleId::L4a: return "L4a";
    case RuleId::L4b: return "L4b";
    case RuleId::L5: return "L5";
    case RuleId::L6: return "L6";
    case RuleId::L7: return "L7";
    case RuleId::L8: return "L8";
    case RuleId::L9: return "L9";
    case RuleId::L10: return "L10";
    case RuleId::DB1a: return "DB1a";
    case RuleId::DB1b: return "DB1b";
    case RuleId::DB1c: return "DB1c";
    case RuleId::DB2: return "DB2";
    case RuleId::DB3a: return "DB3a";
    case RuleId::DB3b: return "DB3b";
    case RuleId::DB4: return "DB4";
    case RuleId::DB5: return "DB5";
    case RuleId::DB6a: return "DB6a";
    case RuleId::DB6b: return "DB6b";
    case RuleId::DB7a: return "DB7a";
    case RuleId::DB7b: return "DB7b";
    case RuleId::DB8: return "DB8";
  }
  return "?";
}

bool is_dont_care(RuleId rule) {
  switch (rule) {
    case RuleId::L8:
    case RuleId::L9:
    case RuleId::L10:
    case RuleId::DB6a:
    case RuleId::DB6b:
    case RuleId::DB7a:
    case RuleId::DB7b:
    case RuleId::DB8: return false;
    default: return true;
  }
}

std::string TraceEntry::to_string() const {
  std::string out = std::to_string(depth) + " " + std::string(chainunify::to_string(rule)) + " on {";
  for (std::size_t i = 0; i < witnesses.size(); ++i) {
    if (i) out += ", ";
    out += chainunify::to_string(witnesses[i]);
  }
  return out + "}";
}

std::size_t InferenceState::pushes() const {
  std::size_t n = 0;
  for (RuleId r : {RuleId::L4b, RuleId::L5}) {
    if (auto it = counters.find(r); it != counters.end()) n += it->second;
  }
  return n;
}

std::string InferenceState::key() const {
  std::string out;
  for (const auto& e : equations) {
    out += to_string(e);
    out += ';';
  }
  return out;
}

namespace {

// True if variable `a` should survive elimination in favour of `b`:
// variables of the input are kept over fresh ones, then the least name.
bool keep_over(const std::string& a, const std::string& b) {
  return std::make_pair(is_fresh_name(a), a) < std::make_pair(is_fresh_name(b), b);
}

bool is_var_var(const Equation& e) {
  return e.shape == Shape::VarVarL || e.shape == Shape::VarVarE;
}

void canonicalize(std::vector<Equation>& eqs, TheoryId theory) {
  std::vector<Equation> out;
  out.reserve(eqs.size());
  for (auto& e : eqs) {
    if (is_var_var(e)) {
      if (e.lhs->name() == e.rhs->name()) continue;
      if (keep_over(e.lhs->name(), e.rhs->name())) e = make_equation(e.rhs, e.lhs, theory);
    }
    out.push_back(std::move(e));
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  eqs = std::move(out);
}

std::string lower_hint(const std::string& name) {
  std::string out = name;
  if (!out.empty()) out[0] = static_cast<char>(std::tolower(static_cast<unsigned char>(out[0])));
  return out;
}

class Engine {
 public:
  Engine(InferenceState& s, std::vector<TraceEntry>* trace) : s_(s), trace_(trace) { index(); }

  std::optional<Failure> saturate() {
    for (std::size_t steps = 0;; ++steps) {
      if (steps > 1000000) throw BudgetExceeded("don't-care saturation exceeded 10^6 steps");
      if (eliminate()) continue;
      if (auto f = size_conflict()) return f;
      graph_ = PropagationGraph::build(s_.equations);
      if (auto cycle = graph_.occur_check()) {
        Failure f;
        f.rule = RuleId::L6;
        f.cycle = cycle;
        f.reason = "Occur-Check Violation: " + cycle->to_string();
        for (const auto& step : cycle->steps) {
          for (const auto& arc : graph_.arcs()) {
            const bool match = step.forward ? (arc.from == step.from && arc.to == step.to)
                                            : (arc.from == step.to && arc.to == step.from);
            if (match && arc.label == step.label) {
              f.witnesses.push_back(arc.witness);
              break;
            }
          }
        }
        return f;
      }
      if (tier1() || tier2() || tier3() || tier4()) continue;
      return std::nullopt;
    }
  }

  std::vector<InferenceState> expand() {
    graph_ = PropagationGraph::build(s_.equations);
    for (const auto& [u, idx] : arcs_by_lhs()) {
      if (idx.size() < 2) continue;
      const Equation e1 = s_.equations[idx[0]];
      const Equation e2 = s_.equations[idx[1]];
      std::vector<InferenceState> out;
      auto child = [&](RuleId rule, auto&& build) {
        InferenceState c = s_;
        c.depth = s_.depth + 1;
        Engine eng(c, trace_);
        build(eng);
        (void)rule;
        out.push_back(std::move(c));
      };
      const Term& U = e1.lhs;
      if (e1.shape == Shape::Bc && e2.shape == Shape::Bc) {
        child(RuleId::L8, [&](Engine& g) { g.all_nil(RuleId::L8, e1, e2); });
        child(RuleId::L9, [&](Engine& g) { g.push_bc_bc(RuleId::L9, e1, e2); });
        child(RuleId::L10, [&](Engine& g) {
          g.apply(RuleId::L10, {e1, e2}, {e1},
                  {g.eq(e1.rhs->arg(0), e2.rhs->arg(0)), g.eq(e1.rhs->arg(1), e2.rhs->arg(1))});
        });
      } else if (e1.shape == Shape::Db && e2.shape == Shape::Db) {
        child(RuleId::DB6a, [&](Engine& g) { g.all_nil(RuleId::DB6a, e1, e2); });
        for (const Equation* e : {&e1, &e2}) {
          const Term& V = e->rhs->arg(0);
          if (graph_.related(Relation::DbStar, V->name(), U->name())) continue;
          child(RuleId::DB7a, [&](Engine& g) {
            g.apply(RuleId::DB7a, {e1, e2}, {*e}, {g.eq(V, bc(U, e->rhs->arg(1)))});
          });
        }
        child(RuleId::DB8, [&](Engine& g) {
          g.apply(RuleId::DB8, {e1, e2}, {e1},
                  {g.eq(e1.rhs->arg(0), e2.rhs->arg(0)), g.eq(e1.rhs->arg(1), e2.rhs->arg(1))});
        });
      } else {
        const Equation& eb = e1.shape == Shape::Bc ? e1 : e2;
        const Equation& ed = e1.shape == Shape::Bc ? e2 : e1;
        child(RuleId::DB6b, [&](Engine& g) { g.all_nil(RuleId::DB6b, eb, ed); });
        const Term& W = ed.rhs->arg(0);
        if (!graph_.related(Relation::DbStar, W->name(), U->name())) {
          child(RuleId::DB7b, [&](Engine& g) {
            g.apply(RuleId::DB7b, {eb, ed}, {ed}, {g.eq(W, bc(U, ed.rhs->arg(1)))});
          });
        }
      }
      return out;
    }
    return {};
  }

 private:
  Equation eq(const Term& lhs, const Term& rhs) const { return make_equation(lhs, rhs, s_.theory); }

  void index() {
    cons_.clear();
    bc_.clear();
    db_.clear();
    nil_.clear();
    for (std::size_t i = 0; i < s_.equations.size(); ++i) {
      const Equation& e = s_.equations[i];
      switch (e.shape) {
        case Shape::Cons: cons_[e.lhs->name()].push_back(i); break;
        case Shape::Bc: bc_[e.lhs->name()].push_back(i); break;
        case Shape::Db: db_[e.lhs->name()].push_back(i); break;
        case Shape::Nil: nil_[e.lhs->name()].push_back(i); break;
        default: break;
      }
    }
  }

  std::map<std::string, std::vector<std::size_t>> arcs_by_lhs() const {
    std::map<std::string, std::vector<std::size_t>> out;
    for (const auto* m : {&cons_, &bc_, &db_}) {
      for (const auto& [u, idx] : *m) out[u].insert(out[u].end(), idx.begin(), idx.end());
    }
    for (auto& [u, idx] : out) std::sort(idx.begin(), idx.end());
    return out;
  }

  void apply(RuleId rule, std::vector<Equation> witnesses, const std::vector<Equation>& remove,
             std::vector<Equation> add) {
    ++s_.counters[rule];
    TraceEntry entry{s_.depth, rule, std::move(witnesses)};
    if (trace_) trace_->push_back(entry);
    s_.lineage.push_back(std::move(entry));
    std::vector<Equation> next;
    next.reserve(s_.equations.size() + add.size());
    for (const auto& e : s_.equations) {
      if (std::find(remove.begin(), remove.end(), e) == remove.end()) next.push_back(e);
    }
    for (auto& e : add) next.push_back(std::move(e));
    canonicalize(next, s_.theory);
    s_.equations = std::move(next);
    index();
  }

  // L1 and element-variable elimination: X =? Y with X occurring elsewhere.
  bool eliminate() {
    for (std::size_t i = 0; i < s_.equations.size(); ++i) {
      const Equation e = s_.equations[i];
      if (!is_var_var(e)) continue;
      const std::string& x = e.lhs->name();
      bool elsewhere = false;
      for (std::size_t j = 0; j < s_.equations.size() && !elsewhere; ++j) {
        if (j == i) continue;
        elsewhere = occurs(x, s_.equations[j].lhs) || occurs(x, s_.equations[j].rhs);
      }
      if (!elsewhere) continue;
      Substitution sub;
      sub.bind(e.lhs, e.rhs);
      std::vector<Equation> next;
      next.reserve(s_.equations.size());
      for (std::size_t j = 0; j < s_.equations.size(); ++j) {
        const Equation& o = s_.equations[j];
        next.push_back(j == i ? o : make_equation(sub.apply(o.lhs), sub.apply(o.rhs), s_.theory));
      }
      ++s_.counters[RuleId::L1];
      TraceEntry entry{s_.depth, RuleId::L1, {e}};
      if (trace_) trace_->push_back(entry);
      s_.lineage.push_back(std::move(entry));
      canonicalize(next, s_.theory);
      s_.equations = std::move(next);
      index();
      return true;
    }
    return false;
  }

  std::optional<Failure> size_conflict() const {
    for (const auto& [u, idx] : cons_) {
      auto it = nil_.find(u);
      if (it == nil_.end()) continue;
      Failure f;
      f.rule = RuleId::L7;
      f.witnesses = {s_.equations[idx[0]], s_.equations[it->second[0]]};
      f.reason = "Size Conflict: " + to_string(f.witnesses[0]) + ", " + to_string(f.witnesses[1]);
      return f;
    }
    return std::nullopt;
  }

  const Equation& at(std::size_t i) const { return s_.equations[i]; }

  bool has(const std::map<std::string, std::vector<std::size_t>>& m, const std::string& u) const {
    return m.count(u) > 0;
  }

  Equation nil_eq(const Term& U) const { return eq(U, nil()); }

  bool tier1() {
    // L2: two cons equations on the same variable.
    for (const auto& [u, idx] : cons_) {
      if (idx.size() < 2) continue;
      const Equation keep = at(idx[0]);
      const Equation drop = at(idx[1]);
      apply(RuleId::L2, {drop, keep}, {drop},
            {eq(drop.rhs->arg(0), keep.rhs->arg(0)), eq(drop.rhs->arg(1), keep.rhs->arg(1))});
      return true;
    }
    if (nil_rules(bc_, Shape::Bc, RuleId::L3a, RuleId::L3b, RuleId::L3c, Relation::BcStar)) {
      return true;
    }
    // L4a: U =? bc(V, x), U =? bc(W, x).
    for (const auto& [u, idx] : bc_) {
      for (std::size_t a = 0; a < idx.size(); ++a) {
        for (std::size_t b = a + 1; b < idx.size(); ++b) {
          const Equation e1 = at(idx[a]);
          const Equation e2 = at(idx[b]);
          if (!equal(e1.rhs->arg(1), e2.rhs->arg(1))) continue;
          apply(RuleId::L4a, {e1, e2}, {e2}, {eq(e2.rhs->arg(0), e1.rhs->arg(0))});
          return true;
        }
      }
    }
    if (nil_rules(db_, Shape::Db, RuleId::DB1a, RuleId::DB1b, RuleId::DB1c, Relation::DbStar)) {
      return true;
    }
    // DB2: U =? db(V, x), U =? db(V, y) with U nonnil.
    for (const auto& [u, idx] : db_) {
      if (!graph_.is_nonnil(u)) continue;
      for (std::size_t a = 0; a < idx.size(); ++a) {
        for (std::size_t b = a + 1; b < idx.size(); ++b) {
          const Equation e1 = at(idx[a]);
          const Equation e2 = at(idx[b]);
          if (!equal(e1.rhs->arg(0), e2.rhs->arg(0))) continue;
          apply(RuleId::DB2, {e1, e2}, {e2}, {eq(e1.rhs->arg(1), e2.rhs->arg(1))});
          return true;
        }
      }
    }
    return false;
  }

  // The three nil rules for bc (L3a-c) or db (DB1a-c).
  bool nil_rules(const std::map<std::string, std::vector<std::size_t>>& m, Shape, RuleId ra,
                 RuleId rb, RuleId rc, Relation star) {
    for (const auto& [u, idx] : m) {
      if (!has(nil_, u)) continue;
      const Equation e = at(idx[0]);
      apply(ra, {e, at(nil_.at(u)[0])}, {e}, {nil_eq(e.rhs->arg(0))});
      return true;
    }
    for (const auto& [u, idx] : m) {
      for (std::size_t i : idx) {
        const Equation e = at(i);
        const std::string& v = e.rhs->arg(0)->name();
        if (!has(nil_, v)) continue;
        apply(rb, {e, at(nil_.at(v)[0])}, {e}, {nil_eq(e.lhs)});
        return true;
      }
    }
    for (const auto& [u, idx] : m) {
      for (std::size_t i : idx) {
        const Equation e = at(i);
        const Term& V = e.rhs->arg(0);
        if (!graph_.related(star, V->name(), u)) continue;
        apply(rc, {e}, {e}, {nil_eq(e.lhs), nil_eq(V)});
        return true;
      }
    }
    return false;
  }

  bool tier2() {
    for (const auto& [u, idx] : bc_) {
      if (idx.size() < 2 || !graph_.is_nonnil(u)) continue;
      push_bc_bc(RuleId::L4b, at(idx[0]), at(idx[1]));
      return true;
    }
    return false;
  }

  bool tier3() {
    for (const auto& [u, idx] : db_) {
      for (std::size_t i : idx) {
        const Equation e = at(i);
        const Term& V = e.rhs->arg(0);
        if (graph_.related(Relation::CPlus, V->name(), u) &&
            !graph_.related(Relation::DbStar, V->name(), u)) {
          apply(RuleId::DB5, {e}, {e}, {eq(V, bc(e.lhs, e.rhs->arg(1)))});
          return true;
        }
      }
    }
    return false;
  }

  bool tier4() {
    // L5: cons/bc peak.
    for (const auto& [u, idx] : bc_) {
      if (!has(cons_, u)) continue;
      const Equation c = at(cons_.at(u)[0]);
      const Equation e = at(idx[0]);
      Splitter sp(*this);
      auto [y, V1] = sp.split(e.rhs->arg(0));
      const Term& x = c.rhs->arg(0);
      sp.add.push_back(eq(x, h(y, e.rhs->arg(1))));
      sp.add.push_back(eq(c.rhs->arg(1), bc(V1, x)));
      apply(RuleId::L5, {c, e}, {e}, std::move(sp.add));
      return true;
    }
    // DB3a: nonnil db/db peak.
    for (const auto& [u, idx] : db_) {
      if (idx.size() < 2 || !graph_.is_nonnil(u)) continue;
      const Equation e1 = at(idx[0]);
      const Equation e2 = at(idx[1]);
      Splitter sp(*this);
      auto [v, V1] = sp.split(e1.rhs->arg(0));
      auto [w, W1] = sp.split(e2.rhs->arg(0));
      auto [uu, U1] = sp.split(e1.lhs);
      sp.add.push_back(eq(U1, db(V1, v)));
      sp.add.push_back(eq(U1, db(W1, w)));
      sp.add.push_back(eq(uu, g(v, e1.rhs->arg(1))));
      sp.add.push_back(eq(uu, g(w, e2.rhs->arg(1))));
      apply(RuleId::DB3a, {e1, e2}, {e1, e2}, std::move(sp.add));
      return true;
    }
    // DB3b: nonnil bc/db peak.
    for (const auto& [u, idx] : bc_) {
      if (!has(db_, u) || !graph_.is_nonnil(u)) continue;
      const Equation eb = at(idx[0]);
      const Equation ed = at(db_.at(u)[0]);
      Splitter sp(*this);
      auto [v, V1] = sp.split(eb.rhs->arg(0));
      auto [w, W1] = sp.split(ed.rhs->arg(0));
      auto [uu, U1] = sp.split(eb.lhs);
      sp.add.push_back(eq(U1, bc(V1, uu)));
      sp.add.push_back(eq(U1, db(W1, w)));
      sp.add.push_back(eq(uu, h(v, eb.rhs->arg(1))));
      sp.add.push_back(eq(w, h(uu, ed.rhs->arg(1))));
      apply(RuleId::DB3b, {eb, ed}, {eb, ed}, std::move(sp.add));
      return true;
    }
    // DB4: cons/db peak.
    for (const auto& [u, idx] : db_) {
      if (!has(cons_, u)) continue;
      const Equation c = at(cons_.at(u)[0]);
      const Equation e = at(idx[0]);
      Splitter sp(*this);
      auto [y, V1] = sp.split(e.rhs->arg(0));
      const Term& x = c.rhs->arg(0);
      sp.add.push_back(eq(x, g(y, e.rhs->arg(1))));
      sp.add.push_back(eq(c.rhs->arg(1), db(V1, y)));
      apply(RuleId::DB4, {c, e}, {e}, std::move(sp.add));
      return true;
    }
    return false;
  }

  // Writes list variables as cons cells, reusing an existing cons equation
  // for the variable when there is one.
  struct Splitter {
    explicit Splitter(Engine& e) : engine(e) {}

    std::pair<Term, Term> split(const Term& V) {
      if (auto it = done.find(V->name()); it != done.end()) return it->second;
      std::pair<Term, Term> out;
      if (auto it = engine.cons_.find(V->name()); it != engine.cons_.end()) {
        const Equation& c = engine.at(it->second[0]);
        out = {c.rhs->arg(0), c.rhs->arg(1)};
      } else {
        Term head = engine.s_.fresh.fresh(Sort::Element, lower_hint(V->name()));
        Term tail = engine.s_.fresh.fresh(Sort::List, V->name());
        add.push_back(engine.eq(V, cons(head, tail)));
        out = {head, tail};
      }
      done.emplace(V->name(), out);
      return out;
    }

    Engine& engine;
    std::map<std::string, std::pair<Term, Term>> done;
    std::vector<Equation> add;
  };

  // L4b and L9: U =? bc(V, x), U =? bc(W, y) pushed below cons.
  void push_bc_bc(RuleId rule, const Equation& e1, const Equation& e2) {
    Splitter sp(*this);
    const Term& V = e1.rhs->arg(0);
    const Term& W = e2.rhs->arg(0);
    auto [v, Z] = sp.split(V);
    Term w;
    if (auto it = sp.done.find(W->name()); it != sp.done.end()) {
      w = it->second.first;
    } else if (auto c = cons_.find(W->name()); c != cons_.end()) {
      const Equation& ce = at(c->second[0]);
      w = ce.rhs->arg(0);
      sp.add.push_back(eq(ce.rhs->arg(1), Z));
    } else {
      w = s_.fresh.fresh(Sort::Element, lower_hint(W->name()));
      sp.add.push_back(eq(W, cons(w, Z)));
    }
    auto [u, U1] = sp.split(e1.lhs);
    sp.add.push_back(eq(U1, bc(Z, u)));
    sp.add.push_back(eq(u, h(v, e1.rhs->arg(1))));
    sp.add.push_back(eq(u, h(w, e2.rhs->arg(1))));
    apply(rule, {e1, e2}, {e1, e2}, std::move(sp.add));
  }

  void all_nil(RuleId rule, const Equation& e1, const Equation& e2) {
    apply(rule, {e1, e2}, {e1, e2},
          {nil_eq(e1.lhs), nil_eq(e1.rhs->arg(0)), nil_eq(e2.rhs->arg(0))});
  }

  InferenceState& s_;
  std::vector<TraceEntry>* trace_;
  PropagationGraph graph_;
  std::map<std::string, std::vector<std::size_t>> cons_, bc_, db_, nil_;
};

// Orders equations so that no lhs occurs in its own or a later rhs.
std::vector<Equation> triangular_order(const std::vector<Equation>& eqs) {
  std::map<std::string, const Equation*> def;
  for (const auto& e : eqs) def.emplace(e.lhs->name(), &e);
  std::vector<const Equation*> order;
  std::set<std::string> done;
  std::function<void(const Equation&)> visit = [&](const Equation& e) {
    if (!done.insert(e.lhs->name()).second) return;
    for (const auto& [v, t] : vars_of(e.rhs)) {
      if (auto it = def.find(v); it != def.end()) visit(*it->second);
    }
    order.push_back(&e);
  };
  for (const auto& e : eqs) visit(e);
  std::reverse(order.begin(), order.end());
  std::vector<Equation> out;
  for (const auto* e : order) out.push_back(*e);
  return out;
}

}  // namespace

InferenceState initial_state(const Problem& p) {
  InferenceState s;
  s.theory = p.theory;
  s.equations = p.equations;
  canonicalize(s.equations, p.theory);
  s.fresh = p.fresh;
  for (const auto& e : p.equations) {
    if (e.shape == Shape::Bc || e.shape == Shape::Db) ++s.m0;
  }
  s.n0 = p.variables().size();
  return s;
}

std::optional<Failure> saturate_dont_care(InferenceState& s, std::vector<TraceEntry>* trace) {
  return Engine(s, trace).saturate();
}

std::vector<InferenceState> expand_dont_know(const InferenceState& s) {
  InferenceState copy = s;
  return Engine(copy, nullptr).expand();
}

bool is_d_solved(const std::vector<Equation>& list_equations) {
  std::map<std::string, std::vector<std::string>> succ;
  std::map<std::string, int> defs;
  for (const auto& e : list_equations) {
    if (!e.is_list()) continue;
    if (++defs[e.lhs->name()] > 1) return false;
    for (const auto& [v, t] : vars_of(e.rhs)) {
      if (t->sort() == Sort::List) succ[e.lhs->name()].push_back(v);
    }
  }
  std::map<std::string, int> state;
  std::function<bool(const std::string&)> cyclic = [&](const std::string& v) {
    int& st = state[v];
    if (st == 1) return true;
    if (st == 2) return false;
    st = 1;
    for (const auto& w : succ[v]) {
      if (cyclic(w)) return true;
    }
    state[v] = 2;
    return false;
  };
  for (const auto& [v, ws] : succ) {
    if (cyclic(v)) return false;
  }
  return true;
}

SearchReport solve_lists(const Problem& p, const SearchOptions& options,
                         const std::function<bool(const SolvedForm&)>& on_leaf) {
  SearchReport report;
  InferenceState root = initial_state(p);
  report.m0 = root.m0;
  report.n0 = root.n0;
  std::vector<InferenceState> stack{std::move(root)};
  std::set<std::string> seen;
  std::vector<TraceEntry>* trace = options.record_trace ? &report.trace : nullptr;
  while (!stack.empty()) {
    InferenceState st = std::move(stack.back());
    stack.pop_back();
    if (++report.branches > options.max_branches) {
      throw BudgetExceeded("search exceeded " + std::to_string(options.max_branches) +
                           " branches");
    }
    auto failure = saturate_dont_care(st, trace);
    report.max_pushes = std::max(report.max_pushes, st.pushes());
    if (failure) {
      report.failures.push_back(BranchFailure{std::move(*failure), st.lineage});
      continue;
    }
    if (!seen.insert(st.key()).second) {
      ++report.pruned_duplicates;
      continue;
    }
    auto children = expand_dont_know(st);
    if (!children.empty()) {
      if (trace) {
        for (const auto& c : children) trace->push_back(c.lineage.back());
      }
      for (auto it = children.rbegin(); it != children.rend(); ++it) stack.push_back(std::move(*it));
      continue;
    }
    SolvedForm sf;
    std::vector<Equation> list_part;
    for (const auto& e : st.equations) {
      (e.is_list() ? list_part : sf.element_residue).push_back(e);
    }
    if (!is_d_solved(list_part)) {
      Failure f;
      f.rule = RuleId::L6;
      f.reason = "leaf is not in d-solved form";
      report.failures.push_back(BranchFailure{std::move(f), st.lineage});
      continue;
    }
    sf.list_part = triangular_order(list_part);
    sf.nonnil = PropagationGraph::build(st.equations).nonnil();
    sf.counters = st.counters;
    sf.lineage = st.lineage;
    report.solved.push_back(sf);
    if (on_leaf && on_leaf(report.solved.back())) break;
  }
  return report;
}

Substitution extract_unifier(const SolvedForm& sf, const Substitution& element_solution,
                             bool nil_complete) {
  Substitution out;
  std::set<std::string> bound;
  for (const auto& e : sf.list_part) {
    out.bind(e.lhs, e.rhs);
    bound.insert(e.lhs->name());
  }
  for (const auto& [v, t] : element_solution.bindings()) {
    if (bound.count(v->name())) {
      throw InconsistentInput("element solution rebinds " + v->name());
    }
    out.bind(v, t);
  }
  if (nil_complete) {
    std::map<std::string, Term> params;
    for (const auto& [v, t] : out.bindings()) collect_vars(t, params);
    for (const auto& e : sf.element_residue) {
      collect_vars(e.lhs, params);
      collect_vars(e.rhs, params);
    }
    PropagationGraph gr = PropagationGraph::build(sf.list_part);
    for (const auto& [name, t] : params) {
      if (t->sort() != Sort::List || out.binds(name) || gr.is_nonnil(name)) continue;
      out.bind(t, nil());
    }
  }
  return out;
}

}  // namespace chainunify
