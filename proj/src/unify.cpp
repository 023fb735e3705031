#include "chainunify/unify.hpp"

#include <algorithm>
#include <functional>
#include <set>
#include <unordered_map>
#include <unordered_set>

#include "chainunify/element_solvers.hpp"
#include "chainunify/normalizer.hpp"

namespace chainunify {

namespace {

Term substitute(const Term& t, const std::map<std::string, Term>& m,
                std::unordered_map<const TermNode*, Term>& memo) {
  if (t->ground()) return t;
  if (t->is_var()) {
    auto it = m.find(t->name());
    return it == m.end() ? t : it->second;
  }
  if (auto it = memo.find(t.get()); it != memo.end()) return it->second;
  std::vector<Term> args;
  args.reserve(t->arity());
  bool changed = false;
  for (const auto& a : t->args()) {
    args.push_back(substitute(a, m, memo));
    changed = changed || args.back().get() != a.get();
  }
  Term out = changed ? with_args(t, std::move(args)) : t;
  memo.emplace(t.get(), out);
  return out;
}

Term substitute(const Term& t, const std::map<std::string, Term>& m) {
  std::unordered_map<const TermNode*, Term> memo;
  return substitute(t, m, memo);
}

class Matcher {
 public:
  Matcher(std::map<std::string, Term>& tau, TheoryId theory) : tau_(tau), theory_(theory) {}

  bool match(const Term& pattern, const Term& target) {
    if (pattern->is_var()) return bind(pattern, target);
    if (pattern->kind() == target->kind() && pattern->name() == target->name() &&
        pattern->arity() == target->arity()) {
      for (std::size_t i = 0; i < pattern->arity(); ++i) {
        if (!match(pattern->arg(i), target->arg(i))) return false;
      }
      return true;
    }
    // bc(P, e) or db(P, e) against an unfolded list: guess the shape of P.
    const bool chain = pattern->kind() == Kind::Bc || pattern->kind() == Kind::Db;
    if (!chain || !pattern->arg(0)->is_var() || tau_.count(pattern->arg(0)->name())) return false;
    if (target->is_nil()) return bind(pattern->arg(0), nil());
    if (theory_ == TheoryId::BC1 || target->kind() != Kind::Cons) return false;
    const Term& head = target->arg(0);
    if (head->kind() != (pattern->kind() == Kind::Bc ? Kind::H : Kind::G)) return false;
    if (!match(pattern->arg(1), head->arg(1))) return false;
    return unfold(pattern->kind(), pattern->arg(0), head->arg(1), target);
  }

 private:
  bool bind(const Term& v, const Term& t) {
    if (v->sort() != t->sort()) return false;
    auto [it, fresh] = tau_.emplace(v->name(), t);
    return fresh || equal(it->second, t);
  }

  // Solves kind(P, iv) = target for the unbound P, with `iv` concrete.
  bool unfold(Kind kind, const Term& P, const Term& iv, const Term& target) {
    if (target->is_nil()) return bind(P, nil());
    if (target->kind() == kind && equal(target->arg(1), iv)) return bind(P, target->arg(0));
    if (target->kind() != Kind::Cons) return false;
    const Term& head = target->arg(0);
    if (head->kind() != (kind == Kind::Bc ? Kind::H : Kind::G) || !equal(head->arg(1), iv)) {
      return false;
    }
    Term rest = list_var("P#" + std::to_string(++counter_));
    if (!bind(P, cons(head->arg(0), rest))) return false;
    return unfold(kind, rest, kind == Kind::Bc ? head : head->arg(0), target->arg(1));
  }

  std::map<std::string, Term>& tau_;
  TheoryId theory_;
  std::size_t counter_ = 0;
};

Term image_or_self(const Substitution& s, const Term& v) {
  const Term* img = s.image(v->name());
  return img ? *img : v;
}

std::string param_base(const std::string& name) {
  std::string base = name.substr(0, name.find('#'));
  return base.empty() ? "v" : base;
}

struct Candidate {
  Unifier unifier;
  std::string key;
};

class Finisher {
 public:
  Finisher(const Problem& p) : p_(p) {
    for (const auto& [name, v] : p.original_vars) names_.insert(name);
  }

  Candidate finish(const Substitution& raw, const std::vector<TraceEntry>& lineage) const {
    Substitution restricted = raw.restricted(names_);
    std::vector<std::pair<Term, Term>> bindings;
    for (const auto& [v, img] : restricted.bindings()) {
      Term nf = normalize(img, p_.theory);
      if (nf->is_var() && nf->name() == v->name()) continue;
      bindings.emplace_back(v, nf);
    }
    std::sort(bindings.begin(), bindings.end(),
              [](const auto& a, const auto& b) { return a.first->name() < b.first->name(); });

    // Rename parameters introduced by the search in order of appearance.
    std::map<std::string, Term> rename;
    std::map<std::string, std::size_t> next_index;
    std::unordered_set<const TermNode*> seen;
    std::function<void(const Term&)> visit = [&](const Term& t) {
      if (t->ground() || !seen.insert(t.get()).second) return;
      if (t->is_var()) {
        if (!is_fresh_name(t->name()) || rename.count(t->name())) return;
        const std::string base = param_base(t->name());
        std::string name;
        do {
          name = base + std::to_string(++next_index[base]);
        } while (names_.count(name));
        rename.emplace(t->name(), var(name, t->sort()));
        return;
      }
      for (const auto& a : t->args()) visit(a);
    };
    for (const auto& [v, img] : bindings) visit(img);

    Candidate c;
    std::set<std::string> bound;
    for (const auto& [v, img] : bindings) {
      c.unifier.substitution.bind(v, substitute(img, rename));
      bound.insert(v->name());
    }
    std::map<std::string, Term> params;
    for (const auto& [v, img] : c.unifier.substitution.bindings()) collect_vars(img, params);
    for (const auto& [name, v] : p_.original_vars) {
      if (!bound.count(name)) params.emplace(name, v);
    }
    for (const auto& [name, v] : params) c.unifier.parameters.push_back(v);
    c.unifier.lineage = lineage;
    // Printing would expand shared subterms; hashes do not.
    for (const auto& [v, img] : c.unifier.substitution.bindings()) {
      c.key += v->name() + "=" + std::to_string(img->hash()) + ";";
    }
    return c;
  }

 private:
  const Problem& p_;
  std::set<std::string> names_;
};

}  // namespace

bool matches_instance(const Substitution& general, const Substitution& specific,
                      const std::map<std::string, Term>& vars, TheoryId theory) {
  std::map<std::string, Term> tau;
  for (const auto& [name, v] : vars) {
    if (!general.binds(name)) tau.emplace(name, image_or_self(specific, v));
  }
  // Match images whose variables are not all determined yet; the others
  // are only checked by normalization below.
  Matcher matcher(tau, theory);
  std::vector<bool> pending(vars.size(), true);
  for (bool progress = true; progress;) {
    progress = false;
    std::size_t i = 0;
    for (const auto& [name, v] : vars) {
      const std::size_t k = i++;
      if (!pending[k] || !general.binds(name)) continue;
      const Term& pattern = *general.image(name);
      bool open = false;
      for (const auto& [w, t] : vars_of(pattern)) open = open || !tau.count(w);
      if (!open) {
        pending[k] = false;
        continue;
      }
      // A failed attempt may succeed once other images fix more parameters.
      auto saved = tau;
      if (!matcher.match(pattern, image_or_self(specific, v))) {
        tau = std::move(saved);
        continue;
      }
      pending[k] = false;
      progress = true;
    }
  }
  // Unfolding introduces auxiliary list variables bound later in tau.
  std::map<std::string, Term> aux;
  for (const auto& [name, t] : tau) {
    if (name.starts_with("P#")) aux.emplace(name, t);
  }
  for (bool changed = !aux.empty(); changed;) {
    changed = false;
    for (auto& [name, t] : tau) {
      Term next = substitute(t, aux);
      if (!equal(next, t)) {
        t = next;
        changed = true;
      }
    }
  }
  for (const auto& [name, v] : vars) {
    Term lhs = normalize(substitute(image_or_self(general, v), tau), theory);
    Term rhs = normalize(image_or_self(specific, v), theory);
    if (!equal(lhs, rhs)) return false;
  }
  return true;
}

Term present(const Term& t, TheoryId theory) {
  if (theory != TheoryId::BC1 || t->arity() == 0) return t;
  std::vector<Term> args;
  for (const auto& a : t->args()) args.push_back(present(a, theory));
  if (t->kind() == Kind::Enc && t->arg(0)->kind() == Kind::Xor) {
    const Term& x = t->arg(0);
    std::vector<Term> rest(x->args().begin() + 1, x->args().end());
    for (auto& r : rest) r = present(r, theory);
    return h(present(x->arg(0), theory), xor_of(std::move(rest)));
  }
  return with_args(t, std::move(args));
}

UnifyResult unify(const Problem& p, const UnifyOptions& options) {
  UnifyResult result;
  Finisher finisher(p);
  std::vector<Candidate> candidates;
  std::multimap<std::string, std::size_t> keys;
  auto same = [](const Substitution& a, const Substitution& b) {
    if (a.size() != b.size()) return false;
    for (std::size_t i = 0; i < a.size(); ++i) {
      const auto& [v, s] = a.bindings()[i];
      const auto& [w, t] = b.bindings()[i];
      if (v->name() != w->name() || !equal(s, t)) return false;
    }
    return true;
  };

  auto on_leaf = [&](const SolvedForm& sf) {
    ++result.leaves;
    ElementOptions eo;
    eo.first_only = options.decide;
    ElementResult er = solve_elements(sf.element_residue, p.theory, eo);
    if (!er.ok()) {
      Failure f;
      f.reason = er.detail;
      f.element = er.failure;
      result.failures.push_back(BranchFailure{std::move(f), sf.lineage});
      return false;
    }
    for (const auto& u : er.unifiers) {
      Candidate c = finisher.finish(extract_unifier(sf, u, options.decide), sf.lineage);
      auto [lo, hi] = keys.equal_range(c.key);
      const bool seen = std::any_of(lo, hi, [&](const auto& kv) {
        return same(candidates[kv.second].unifier.substitution, c.unifier.substitution);
      });
      if (seen) continue;
      keys.emplace(c.key, candidates.size());
      candidates.push_back(std::move(c));
    }
    return options.decide;
  };

  SearchOptions so;
  so.max_branches = options.max_branches;
  so.record_trace = options.record_trace;
  SearchReport report = solve_lists(p, so, on_leaf);
  for (auto& f : report.failures) result.failures.push_back(std::move(f));
  result.trace = std::move(report.trace);
  result.branches = report.branches;
  result.m0 = report.m0;
  result.n0 = report.n0;
  result.max_pushes = report.max_pushes;

  std::vector<Candidate> kept;
  for (auto& c : candidates) {
    if (options.filter_instances) {
      const auto& vars = p.original_vars;
      bool covered = std::any_of(kept.begin(), kept.end(), [&](const Candidate& k) {
        return matches_instance(k.unifier.substitution, c.unifier.substitution, vars, p.theory);
      });
      if (covered) continue;
      std::erase_if(kept, [&](const Candidate& k) {
        return matches_instance(c.unifier.substitution, k.unifier.substitution, vars, p.theory);
      });
    }
    kept.push_back(std::move(c));
  }
  for (auto& c : kept) result.unifiers.push_back(std::move(c.unifier));
  return result;
}

}  // namespace chainunify
