#include "chainunify/element_solvers.hpp"

#include <algorithm>
#include <functional>
#include <numeric>
#include <set>
#include <unordered_map>

#include "chainunify/errors.hpp"

namespace chainunify {

std::string_view to_string(ElementFailure f) {
  switch (f) {
    case ElementFailure::None: return "none";
    case ElementFailure::OccurCheck: return "occur-check";
    case ElementFailure::Clash: return "clash";
    case ElementFailure::Inconsistent: return "inconsistent";
    case ElementFailure::NoBranch: return "no branch";
  }
  return "?";
}

Term SyntacticUnifier::walk(Term t) const {
  while (t->is_var()) {
    auto it = bindings_.find(t->name());
    if (it == bindings_.end()) break;
    t = it->second;
  }
  return t;
}

bool SyntacticUnifier::occurs_in(const std::string& name, const Term& t) const {
  std::set<const TermNode*> seen;
  std::vector<Term> stack{t};
  while (!stack.empty()) {
    Term cur = stack.back();
    stack.pop_back();
    if (cur->ground() || !seen.insert(cur.get()).second) continue;
    if (cur->is_var()) {
      if (cur->name() == name) return true;
      auto it = bindings_.find(cur->name());
      if (it != bindings_.end()) stack.push_back(it->second);
      continue;
    }
    for (const auto& a : cur->args()) stack.push_back(a);
  }
  return false;
}

bool SyntacticUnifier::unify(const Term& s, const Term& t) {
  std::vector<std::pair<Term, Term>> work{{s, t}};
  while (!work.empty()) {
    auto [x, y] = work.back();
    work.pop_back();
    Term a = walk(x);
    Term b = walk(y);
    if (equal(a, b)) continue;
    if (!a->is_var() && b->is_var()) std::swap(a, b);
    if (a->is_var()) {
      if (occurs_in(a->name(), b)) {
        failure_ = ElementFailure::OccurCheck;
        detail_ = a->name() + " =? " + to_string(b);
        return false;
      }
      bindings_.emplace(a->name(), b);
      continue;
    }
    if (a->kind() != b->kind() || a->name() != b->name() || a->arity() != b->arity()) {
      failure_ = ElementFailure::Clash;
      detail_ = to_string(a) + " =? " + to_string(b);
      return false;
    }
    for (std::size_t i = 0; i < a->arity(); ++i) work.emplace_back(a->arg(i), b->arg(i));
  }
  return true;
}

Term SyntacticUnifier::resolve(const Term& t) const {
  std::unordered_map<const TermNode*, Term> memo;
  std::function<Term(const Term&)> go = [&](const Term& u) -> Term {
    if (u->ground()) return u;
    if (auto it = memo.find(u.get()); it != memo.end()) return it->second;
    Term out;
    if (u->is_var()) {
      auto it = bindings_.find(u->name());
      out = it == bindings_.end() ? u : go(it->second);
    } else {
      std::vector<Term> args;
      args.reserve(u->arity());
      for (const auto& a : u->args()) args.push_back(go(a));
      out = with_args(u, std::move(args));
    }
    memo.emplace(u.get(), out);
    return out;
  };
  return go(t);
}

Substitution SyntacticUnifier::substitution() const {
  std::vector<std::string> order;
  std::set<std::string> done;
  std::function<void(const std::string&)> visit = [&](const std::string& name) {
    if (!done.insert(name).second) return;
    for (const auto& [v, term] : vars_of(bindings_.at(name))) {
      if (bindings_.count(v)) visit(v);
    }
    order.push_back(name);
  };
  for (const auto& [name, t] : bindings_) visit(name);
  std::reverse(order.begin(), order.end());
  Substitution out;
  for (const auto& name : order) {
    const Term& image = bindings_.at(name);
    out.bind(var(name, image->sort()), image);
  }
  return out;
}

ElementResult solve_bc0(const std::vector<Equation>& equations) {
  SyntacticUnifier u;
  ElementResult r;
  for (const auto& e : equations) {
    if (e.shape == Shape::G || e.shape == Shape::Xor) {
      throw SignatureError("bc0 element problems admit no " + std::string(to_string(e.shape)) +
                           " equations");
    }
    if (!u.unify(e.lhs, e.rhs)) {
      r.failure = u.failure();
      r.detail = u.detail();
      return r;
    }
  }
  r.unifiers.push_back(u.substitution());
  return r;
}

ElementResult solve_dbc(const std::vector<Equation>& equations, const ElementOptions& options) {
  ElementResult r;
  SyntacticUnifier base;
  std::vector<const Equation*> gs;
  for (const auto& e : equations) {
    if (e.shape == Shape::Xor) throw SignatureError("dbc element problems admit no xor");
    if (e.shape == Shape::G) {
      gs.push_back(&e);
      continue;
    }
    if (!base.unify(e.lhs, e.rhs)) {
      r.failure = base.failure();
      r.detail = base.detail();
      return r;
    }
  }
  std::size_t branches = 0;
  auto note_failure = [&](const SyntacticUnifier& u) {
    if (r.failure == ElementFailure::None) {
      r.failure = u.failure();
      r.detail = u.detail();
    }
  };
  // kept[i]: the i-th g-equation was kept with g free.
  std::vector<bool> kept(gs.size(), false);
  std::function<bool(std::size_t, const SyntacticUnifier&)> dfs =
      [&](std::size_t i, const SyntacticUnifier& u) -> bool {
    if (++branches > options.max_branches) {
      throw BudgetExceeded("dbc element search exceeded " + std::to_string(options.max_branches) +
                           " branches");
    }
    if (i == gs.size()) {
      // A kept g over h(s, v) with the same v would reduce; its solutions
      // are the ones the narrowing branch already produces.
      for (std::size_t k = 0; k < gs.size(); ++k) {
        if (!kept[k]) continue;
        const Term& rhs = gs[k]->rhs;
        Term x = u.resolve(rhs->arg(0));
        if (x->kind() == Kind::H && equal(x->arg(1), u.resolve(rhs->arg(1)))) return false;
      }
      r.unifiers.push_back(u.substitution());
      return options.first_only;
    }
    const Equation& e = *gs[i];
    const Term& x = e.rhs->arg(0);
    const Term& v = e.rhs->arg(1);
    SyntacticUnifier narrow = u;
    if (narrow.unify(x, h(e.lhs, v))) {
      kept[i] = false;
      if (dfs(i + 1, narrow)) return true;
    } else {
      note_failure(narrow);
    }
    SyntacticUnifier keep = u;
    if (keep.unify(e.lhs, e.rhs)) {
      kept[i] = true;
      bool stop = dfs(i + 1, keep);
      kept[i] = false;
      if (stop) return true;
    } else {
      note_failure(keep);
    }
    return false;
  };
  dfs(0, base);
  if (r.ok()) {
    r.failure = ElementFailure::None;
    r.detail.clear();
  } else if (r.failure == ElementFailure::None) {
    r.failure = ElementFailure::NoBranch;
  }
  return r;
}

namespace {

using Bits = std::vector<char>;

void xor_into(Bits& dst, const Bits& src) {
  for (std::size_t i = 0; i < dst.size(); ++i) dst[i] ^= src[i];
}

bool any(const Bits& b) {
  return std::any_of(b.begin(), b.end(), [](char c) { return c != 0; });
}

struct Row {
  Bits unk;
  Bits atom;
};

struct Alien {
  Term lhs;
  Term w;
  Term x;
  Term arg;
};

class Bc1Solver {
 public:
  Bc1Solver(const std::vector<Equation>& equations, const ElementOptions& options)
      : options_(options) {
    std::map<std::string, Term> vars;
    std::set<std::string> consts;
    for (const auto& e : equations) {
      if (e.shape == Shape::G) throw SignatureError("bc1 element problems admit no g");
      collect_vars(e.lhs, vars);
      collect_vars(e.rhs, vars);
      if (e.shape == Shape::Const && !e.rhs->is_zero()) consts.insert(e.rhs->name());
      if (e.shape == Shape::H) aliens_.push_back(Alien{e.lhs, e.rhs->arg(0), e.rhs->arg(1), nullptr});
    }
    // One extra unknown per enc-term stands for its whole argument.
    for (std::size_t i = 0; i < aliens_.size(); ++i) {
      aliens_[i].arg = element_var("t#enc" + std::to_string(i));
      vars.emplace(aliens_[i].arg->name(), aliens_[i].arg);
    }
    for (const auto& [name, t] : vars) {
      unknown_index_[name] = unknowns_.size();
      unknowns_.push_back(t);
    }
    for (const auto& c : consts) {
      const_index_[c] = const_terms_.size();
      const_terms_.push_back(constant(c));
    }
    equations_ = equations;
    for (const auto& a : aliens_) {
      in_alien_arg_.insert(a.w->name());
      in_alien_arg_.insert(a.x->name());
    }
  }

  ElementResult run() {
    ElementResult r;
    const std::size_t k = aliens_.size();
    std::vector<std::size_t> block(k, 0);
    std::size_t partitions = 0;
    // Restricted growth strings enumerate set partitions of the aliens.
    std::function<bool(std::size_t, std::size_t)> rec = [&](std::size_t i, std::size_t used) {
      if (i == k) {
        if (++partitions > options_.max_branches) {
          throw BudgetExceeded("bc1 element search exceeded " +
                               std::to_string(options_.max_branches) + " partitions");
        }
        solve_partition(block, used, r);
        return options_.first_only && r.ok();
      }
      for (std::size_t b = 0; b <= used && b < k; ++b) {
        block[i] = b;
        if (rec(i + 1, std::max(used, b + 1))) return true;
      }
      return false;
    };
    rec(0, 0);
    if (r.ok()) {
      r.failure = ElementFailure::None;
      r.detail.clear();
    } else if (r.failure == ElementFailure::None) {
      r.failure = ElementFailure::Inconsistent;
    }
    return r;
  }

 private:
  std::size_t nu() const { return unknowns_.size(); }

  Row var_row(const std::string& name, std::size_t na) const {
    Row row{Bits(nu(), 0), Bits(na, 0)};
    row.unk[unknown_index_.at(name)] ^= 1;
    return row;
  }

  void solve_partition(const std::vector<std::size_t>& block, std::size_t nblocks, ElementResult& r) {
    const std::size_t nc = const_terms_.size();
    const std::size_t na = nc + nblocks;
    std::vector<Row> rows;
    for (const auto& e : equations_) {
      Row row = var_row(e.lhs->name(), na);
      switch (e.shape) {
        case Shape::VarVarE: row.unk[unknown_index_.at(e.rhs->name())] ^= 1; break;
        case Shape::Const:
          if (!e.rhs->is_zero()) row.atom[const_index_.at(e.rhs->name())] ^= 1;
          break;
        case Shape::Xor:
          for (const auto& a : e.rhs->args()) row.unk[unknown_index_.at(a->name())] ^= 1;
          break;
        case Shape::H: continue;  // handled through the aliens below
        default: throw std::logic_error("unexpected element equation " + to_string(e));
      }
      rows.push_back(std::move(row));
    }
    std::vector<std::size_t> rep(nblocks, aliens_.size());
    for (std::size_t i = 0; i < aliens_.size(); ++i) {
      const Alien& a = aliens_[i];
      Row row = var_row(a.lhs->name(), na);
      row.atom[nc + block[i]] ^= 1;
      rows.push_back(std::move(row));
      Row def = var_row(a.arg->name(), na);
      def.unk[unknown_index_.at(a.w->name())] ^= 1;
      def.unk[unknown_index_.at(a.x->name())] ^= 1;
      rows.push_back(std::move(def));
      if (rep[block[i]] == aliens_.size()) {
        rep[block[i]] = i;
      } else {
        // Identified enc-terms have equal arguments.
        Row eq = var_row(a.arg->name(), na);
        eq.unk[unknown_index_.at(aliens_[rep[block[i]]].arg->name())] ^= 1;
        rows.push_back(std::move(eq));
      }
    }

    // Column order: bind unknowns that no enc argument mentions first, so
    // that the ones feeding enc arguments stay free where possible.
    std::vector<std::size_t> head;
    std::vector<std::size_t> tail;
    std::vector<std::size_t> args;
    for (std::size_t c = 0; c < nu(); ++c) {
      const std::string& n = unknowns_[c]->name();
      (n.starts_with("t#enc") ? args : in_alien_arg_.count(n) ? tail : head).push_back(c);
    }
    auto key = [&](std::size_t c) {
      const std::string& n = unknowns_[c]->name();
      return std::make_pair(!is_fresh_name(n), n);
    };
    std::sort(head.begin(), head.end(), [&](auto a, auto b) { return key(a) < key(b); });
    std::sort(tail.begin(), tail.end(), [&](auto a, auto b) { return key(a) < key(b); });

    std::size_t tries = 0;
    ElementFailure last = ElementFailure::Inconsistent;
    std::string last_detail = "linear system has no solution";
    do {
      std::vector<std::size_t> order = head;
      order.insert(order.end(), tail.begin(), tail.end());
      order.insert(order.end(), args.begin(), args.end());
      auto outcome = eliminate(rows, order, na, nc, rep);
      if (outcome.ok) {
        r.unifiers.push_back(std::move(outcome.unifier));
        return;
      }
      last = outcome.failure;
      last_detail = outcome.detail;
      // Only a cyclic enc dependency can be cured by another pivot choice.
      if (last != ElementFailure::OccurCheck) break;
    } while (++tries < 720 && std::next_permutation(tail.begin(), tail.end(), [&](auto a, auto b) {
               return key(a) < key(b);
             }));
    if (r.failure == ElementFailure::None || r.failure == ElementFailure::Inconsistent) {
      r.failure = last;
      r.detail = last_detail;
    }
  }

  struct Outcome {
    bool ok = false;
    Substitution unifier;
    ElementFailure failure = ElementFailure::None;
    std::string detail;
  };

  Outcome eliminate(std::vector<Row> rows, const std::vector<std::size_t>& order, std::size_t na,
                    std::size_t nc, const std::vector<std::size_t>& rep) const {
    Outcome out;
    std::vector<std::size_t> pivot_row(nu(), rows.size());
    std::vector<bool> used(rows.size(), false);
    for (std::size_t c : order) {
      std::size_t p = rows.size();
      for (std::size_t i = 0; i < rows.size(); ++i) {
        if (!used[i] && rows[i].unk[c]) {
          p = i;
          break;
        }
      }
      if (p == rows.size()) continue;
      used[p] = true;
      pivot_row[c] = p;
      for (std::size_t i = 0; i < rows.size(); ++i) {
        if (i != p && rows[i].unk[c]) {
          xor_into(rows[i].unk, rows[p].unk);
          xor_into(rows[i].atom, rows[p].atom);
        }
      }
    }
    for (std::size_t i = 0; i < rows.size(); ++i) {
      if (!used[i] && any(rows[i].atom)) {
        out.failure = ElementFailure::Inconsistent;
        out.detail = "xor constraints have no solution";
        return out;
      }
    }
    // Linear form of every unknown in terms of free unknowns and atoms.
    std::vector<Row> form(nu());
    for (std::size_t c = 0; c < nu(); ++c) {
      if (pivot_row[c] == rows.size()) {
        form[c] = Row{Bits(nu(), 0), Bits(na, 0)};
        form[c].unk[c] = 1;
      } else {
        form[c] = rows[pivot_row[c]];
        form[c].unk[c] = 0;
      }
    }
    const std::size_t nblocks = na - nc;
    std::vector<Row> arg(nblocks);
    for (std::size_t b = 0; b < nblocks; ++b) {
      arg[b] = form[unknown_index_.at(aliens_[rep[b]].arg->name())];
    }
    for (std::size_t b1 = 0; b1 < nblocks; ++b1) {
      for (std::size_t b2 = b1 + 1; b2 < nblocks; ++b2) {
        if (arg[b1].unk == arg[b2].unk && arg[b1].atom == arg[b2].atom) {
          out.failure = ElementFailure::Inconsistent;
          out.detail = "enc-terms forced equal without being identified";
          return out;
        }
      }
    }
    // Cycle check on enc dependencies (an enc-term inside its own argument).
    std::vector<int> state(nblocks, 0);
    std::function<bool(std::size_t)> cyclic = [&](std::size_t b) {
      if (state[b] == 1) return true;
      if (state[b] == 2) return false;
      state[b] = 1;
      for (std::size_t d = 0; d < nblocks; ++d) {
        if (arg[b].atom[nc + d] && cyclic(d)) return true;
      }
      state[b] = 2;
      return false;
    };
    for (std::size_t b = 0; b < nblocks; ++b) {
      if (cyclic(b)) {
        const Alien& a = aliens_[rep[b]];
        out.failure = ElementFailure::OccurCheck;
        out.detail = to_string(a.lhs) + " =? h(" + to_string(a.w) + ", " + to_string(a.x) + ")";
        return out;
      }
    }
    std::vector<Term> alien_term(nblocks);
    std::function<std::vector<Term>(const Row&)> build_parts = [&](const Row& row) {
      std::vector<Term> parts;
      for (std::size_t c = 0; c < nu(); ++c) {
        if (row.unk[c]) parts.push_back(unknowns_[c]);
      }
      for (std::size_t i = 0; i < nc; ++i) {
        if (row.atom[i]) parts.push_back(const_terms_[i]);
      }
      for (std::size_t b = 0; b < nblocks; ++b) {
        if (!row.atom[nc + b]) continue;
        if (!alien_term[b]) {
          // Built from the combined argument: the two halves may share
          // enc-terms that cancel.
          std::vector<Term> inner = build_parts(arg[b]);
          if (inner.empty()) inner.push_back(zero());
          Term first = inner.front();
          inner.erase(inner.begin());
          alien_term[b] = h(first, inner.empty() ? zero() : xor_of(std::move(inner)));
        }
        parts.push_back(alien_term[b]);
      }
      return parts;
    };
    auto build = [&](const Row& row) { return xor_of(build_parts(row)); };
    for (std::size_t c = 0; c < nu(); ++c) {
      if (pivot_row[c] == rows.size()) continue;
      out.unifier.bind(unknowns_[c], build(form[c]));
    }
    out.ok = true;
    return out;
  }

  ElementOptions options_;
  std::vector<Equation> equations_;
  std::vector<Alien> aliens_;
  std::vector<Term> unknowns_;
  std::map<std::string, std::size_t> unknown_index_;
  std::vector<Term> const_terms_;
  std::map<std::string, std::size_t> const_index_;
  std::set<std::string> in_alien_arg_;
};

}  // namespace

ElementResult solve_bc1(const std::vector<Equation>& equations, const ElementOptions& options) {
  return Bc1Solver(equations, options).run();
}

ElementResult solve_elements(const std::vector<Equation>& equations, TheoryId theory,
                             const ElementOptions& options) {
  switch (theory) {
    case TheoryId::BC0: return solve_bc0(equations);
    case TheoryId::BC1: return solve_bc1(equations, options);
    case TheoryId::DBC:
    case TheoryId::DBC_PRIME: return solve_dbc(equations, options);
    default: throw SignatureError("no element solver for " + std::string(to_string(theory)));
  }
}

}  // namespace chainunify
