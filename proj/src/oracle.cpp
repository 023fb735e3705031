#include "chainunify/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <set>
#include <tuple>

#include "chainunify/errors.hpp"
#include "chainunify/normalizer.hpp"

namespace chainunify::oracle {

std::string_view to_string(Verdict v) {
  switch (v) {
    case Verdict::Yes: return "yes";
    case Verdict::No: return "no";
    case Verdict::Unknown: return "unknown";
  }
  return "?";
}

namespace {

void sort_shallow_first(std::vector<Term>& ts) {
  std::sort(ts.begin(), ts.end(), [](const Term& a, const Term& b) {
    if (a->depth() != b->depth()) return a->depth() < b->depth();
    return compare(a, b) < 0;
  });
  ts.erase(std::unique(ts.begin(), ts.end(), [](const Term& a, const Term& b) { return equal(a, b); }),
           ts.end());
}

std::vector<Term> xor_domain(const std::vector<std::string>& constants, std::size_t depth) {
  std::vector<Term> atoms;
  for (const auto& c : constants) atoms.push_back(constant(c));
  if (depth > 1) {
    for (const auto& e : xor_domain(constants, depth - 1)) atoms.push_back(enc(e));
  }
  std::vector<Term> out{zero()};
  for (std::size_t i = 0; i < atoms.size(); ++i) {
    out.push_back(atoms[i]);
    for (std::size_t j = i + 1; j < atoms.size(); ++j) out.push_back(xor_of({atoms[i], atoms[j]}));
  }
  sort_shallow_first(out);
  return out;
}

}  // namespace

std::vector<Term> element_domain(TheoryId theory, const std::vector<std::string>& constants,
                                 std::size_t depth) {
  if (depth == 0) return {};
  if (theory == TheoryId::BC1) return xor_domain(constants, depth);
  std::vector<Term> out;
  for (const auto& c : constants) out.push_back(constant(c));
  for (std::size_t d = 2; d <= depth; ++d) {
    std::vector<Term> prev = out;
    for (const auto& s : prev) {
      for (const auto& t : prev) {
        out.push_back(h(s, t));
        if (is_dbc_family(theory)) {
          const bool redex = s->kind() == Kind::H && equal(s->arg(1), t);
          if (!redex) out.push_back(g(s, t));
        }
      }
    }
    sort_shallow_first(out);
  }
  return out;
}

std::vector<Term> list_domain(const std::vector<Term>& elements, std::size_t max_len) {
  std::vector<Term> out{nil()};
  std::vector<Term> layer{nil()};
  for (std::size_t len = 1; len <= max_len; ++len) {
    std::vector<Term> next;
    for (const auto& e : elements) {
      for (const auto& rest : layer) next.push_back(cons(e, rest));
    }
    out.insert(out.end(), next.begin(), next.end());
    layer = std::move(next);
  }
  return out;
}

namespace {

struct Constraint {
  Shape shape;
  int lhs;
  std::vector<int> args;
  Term value;  // the constant of a Const equation
};

class Search {
 public:
  Search(const std::vector<Equation>& equations, TheoryId theory, const SearchBudget& budget)
      : theory_(theory), budget_(budget) {
    std::map<std::string, int> index;
    auto id = [&](const Term& v) {
      auto [it, fresh] = index.emplace(v->name(), static_cast<int>(names_.size()));
      if (fresh) {
        names_.push_back(v->name());
        sorts_.push_back(v->sort());
      }
      return it->second;
    };
    for (const auto& e : equations) {
      Constraint c{e.shape, id(e.lhs), {}, nullptr};
      if (e.shape == Shape::Const) {
        c.value = e.rhs;
      } else if (e.rhs->is_var()) {
        c.args.push_back(id(e.rhs));
      } else {
        for (const auto& a : e.rhs->args()) c.args.push_back(id(a));
      }
      constraints_.push_back(std::move(c));
    }
    // Variable names are visited in sorted order for determinism.
    order_.resize(names_.size());
    for (std::size_t i = 0; i < order_.size(); ++i) order_[i] = static_cast<int>(i);
    std::sort(order_.begin(), order_.end(),
              [&](int a, int b) { return names_[a] < names_[b]; });
    occurrences_.assign(names_.size(), 0);
    defined_.assign(names_.size(), 0);
    for (const auto& c : constraints_) {
      ++occurrences_[c.lhs];
      defined_[c.lhs] = 1;
      for (int a : c.args) ++occurrences_[a];
    }
    val_.assign(names_.size(), nullptr);
  }

  std::vector<GroundSolution> run(std::size_t max_solutions) {
    max_solutions_ = max_solutions;
    dfs();
    return std::move(solutions_);
  }

  Enumeration enumerate(std::size_t max_solutions) {
    Enumeration out;
    try {
      out.solutions = run(max_solutions);
      out.exhausted = out.solutions.size() < max_solutions;
    } catch (const BudgetExceeded&) {
      out.solutions = std::move(solutions_);
    }
    out.nodes = nodes_;
    return out;
  }

 private:
  using Trail = std::vector<int>;

  // 1: newly assigned, 0: already that value, -1: conflict.
  int assign(int v, const Term& t, Trail& trail) {
    if (val_[v]) return equal(val_[v], t) ? 0 : -1;
    val_[v] = t;
    trail.push_back(v);
    return 1;
  }

  Term nf(const Term& t) const { return normalize(t, theory_); }

  // The value that h(w, x) takes, given both arguments.
  Term h_value(const Term& w, const Term& x) const { return nf(h(w, x)); }

  // Inverts bc(V, y) = U for V.
  std::optional<Term> bc_inverse(const Term& U, const Term& y) const {
    auto elems = as_list(U);
    if (!elems) return std::nullopt;
    std::vector<Term> out;
    Term prev = y;
    for (const auto& e : *elems) {
      if (theory_ == TheoryId::BC1) {
        if (e->kind() != Kind::Enc) return std::nullopt;
        out.push_back(nf(xor_of({e->arg(0), prev})));
      } else {
        if (e->kind() != Kind::H || !equal(e->arg(1), prev)) return std::nullopt;
        out.push_back(e->arg(0));
      }
      prev = e;
    }
    return list_of(out);
  }

  // 1: progress, 0: nothing to do, -1: conflict. Branching alternatives for
  // g-equations are offered through `alternatives`.
  int propagate(const Constraint& c, Trail& trail,
                std::vector<std::pair<int, Term>>& alternatives) {
    auto known = [&](int v) { return val_[v] != nullptr; };
    const Term& L = val_[c.lhs];
    bool all = known(c.lhs);
    for (int a : c.args) all = all && known(a);
    if (all) return equal(L, rhs_value(c)) ? 0 : -1;
    auto set = [&](int v, const Term& t) { return t ? assign(v, t, trail) : 0; };
    auto both = [](int r1, int r2) { return r1 < 0 || r2 < 0 ? -1 : std::max(r1, r2); };

    switch (c.shape) {
      case Shape::VarVarL:
      case Shape::VarVarE:
        return L ? set(c.args[0], L) : set(c.lhs, val_[c.args[0]]);
      case Shape::Nil: return set(c.lhs, nil());
      case Shape::Const: return set(c.lhs, c.value);
      default: break;
    }
    bool args_known = true;
    for (int a : c.args) args_known = args_known && known(a);
    if (args_known) return set(c.lhs, rhs_value(c));
    if (!L) return 0;

    switch (c.shape) {
      case Shape::Cons: {
        if (L->kind() != Kind::Cons) return -1;
        return both(set(c.args[0], L->arg(0)), set(c.args[1], L->arg(1)));
      }
      case Shape::Bc: {
        const int V = c.args[0], y = c.args[1];
        if (L->is_nil()) return set(V, nil());
        if (known(y)) {
          auto inv = bc_inverse(L, val_[y]);
          return inv ? set(V, *inv) : -1;
        }
        if (!known(V)) return 0;
        auto v = as_list(val_[V]);
        if (!v) return -1;
        if (v->empty()) return L->is_nil() ? 0 : -1;
        if (L->kind() != Kind::Cons) return -1;
        const Term& e = L->arg(0);
        if (theory_ == TheoryId::BC1) {
          if (e->kind() != Kind::Enc) return -1;
          return set(y, nf(xor_of({e->arg(0), v->front()})));
        }
        if (e->kind() != Kind::H || !equal(e->arg(0), v->front())) return -1;
        return set(y, e->arg(1));
      }
      case Shape::Db: {
        const int V = c.args[0], y = c.args[1];
        if (L->is_nil()) return set(V, nil());
        if (known(y)) return set(V, nf(bc(L, val_[y])));
        if (!known(V)) return 0;
        auto v = as_list(val_[V]);
        if (!v) return -1;
        if (v->empty()) return L->is_nil() ? 0 : -1;
        if (L->kind() != Kind::Cons) return -1;
        // g(v1, y) normalizes to the first entry of L.
        const Term& v1 = v->front();
        const Term& e = L->arg(0);
        const std::size_t before = alternatives.size();
        if (v1->kind() == Kind::H && equal(v1->arg(0), e)) alternatives.emplace_back(y, v1->arg(1));
        if (e->kind() == Kind::G && equal(e->arg(0), v1)) alternatives.emplace_back(y, e->arg(1));
        return alternatives.size() == before ? -1 : 0;
      }
      case Shape::H: {
        const int w = c.args[0], x = c.args[1];
        if (theory_ != TheoryId::BC1) {
          if (L->kind() != Kind::H) return -1;
          return both(set(w, L->arg(0)), set(x, L->arg(1)));
        }
        if (L->kind() != Kind::Enc) return -1;
        if (known(w)) return set(x, nf(xor_of({L->arg(0), val_[w]})));
        if (known(x)) return set(w, nf(xor_of({L->arg(0), val_[x]})));
        return 0;
      }
      case Shape::G: {
        const int w = c.args[0], y = c.args[1];
        if (!known(y) || known(w)) return 0;
        alternatives.emplace_back(w, h(L, val_[y]));
        if (L->kind() == Kind::G && equal(L->arg(1), val_[y])) {
          alternatives.emplace_back(w, L->arg(0));
        }
        return 0;
      }
      case Shape::Xor: {
        int missing = -1;
        std::vector<Term> parts{L};
        for (int a : c.args) {
          if (known(a)) {
            parts.push_back(val_[a]);
          } else if (missing < 0 || missing == a) {
            if (missing == a) return 0;  // repeated unknown cancels
            missing = a;
          } else {
            return 0;
          }
        }
        return set(missing, nf(xor_of(parts)));
      }
      default: return 0;
    }
  }

  Term rhs_value(const Constraint& c) const {
    auto v = [&](std::size_t i) { return val_[c.args[i]]; };
    switch (c.shape) {
      case Shape::VarVarL:
      case Shape::VarVarE: return v(0);
      case Shape::Nil: return nil();
      case Shape::Const: return c.value;
      case Shape::Cons: return cons(v(0), v(1));
      case Shape::Bc: return nf(bc(v(0), v(1)));
      case Shape::Db: return nf(db(v(0), v(1)));
      case Shape::H: return h_value(v(0), v(1));
      case Shape::G: return nf(g(v(0), v(1)));
      case Shape::Xor: {
        std::vector<Term> parts;
        for (std::size_t i = 0; i < c.args.size(); ++i) parts.push_back(v(i));
        return nf(xor_of(parts));
      }
    }
    return nullptr;
  }

  const std::vector<Term>& domain(Sort sort) {
    if (elements_.empty()) {
      elements_ = element_domain(theory_, budget_.constants, budget_.max_depth);
      lists_ = list_domain(element_domain(theory_, budget_.constants, budget_.max_depth - 1),
                           budget_.max_list_len);
    }
    return sort == Sort::Element ? elements_ : lists_;
  }

  const std::vector<Term>& values(int v) {
    if (budget_.seed == 0) return domain(sorts_[v]);
    if (shuffled_.empty()) shuffled_.resize(names_.size());
    auto& out = shuffled_[v];
    if (out.empty()) {
      out = domain(sorts_[v]);
      std::mt19937_64 rng(budget_.seed ^ std::hash<std::string>{}(names_[v]));
      std::shuffle(out.begin(), out.end(), rng);
    }
    return out;
  }

  void dfs() {
    if (solutions_.size() >= max_solutions_) return;
    if (++nodes_ > budget_.node_cap) {
      throw BudgetExceeded("oracle search exceeded " + std::to_string(budget_.node_cap) + " nodes");
    }
    Trail trail;
    std::vector<std::pair<int, Term>> alternatives;
    bool conflict = false;
    for (bool progress = true; progress && !conflict;) {
      progress = false;
      alternatives.clear();
      for (const auto& c : constraints_) {
        const int r = propagate(c, trail, alternatives);
        if (r < 0) {
          conflict = true;
          break;
        }
        if (r > 0) progress = true;
      }
    }
    if (!conflict) {
      if (!alternatives.empty()) {
        const int v = alternatives.front().first;
        for (const auto& [w, t] : alternatives) {
          if (w != v) continue;
          val_[v] = t;
          dfs();
          val_[v] = nullptr;
        }
      } else if (int v = pick(); v >= 0) {
        for (const auto& t : values(v)) {
          val_[v] = t;
          dfs();
          val_[v] = nullptr;
          if (solutions_.size() >= max_solutions_) break;
        }
      } else {
        GroundSolution s;
        for (std::size_t i = 0; i < names_.size(); ++i) s.emplace(names_[i], val_[i]);
        solutions_.push_back(std::move(s));
      }
    }
    for (int v : trail) val_[v] = nullptr;
  }

  // Variables that become known by propagation once `known` are, ignoring
  // the actual values. G-equations count as determining their first
  // argument since the value is one of at most two candidates.
  std::vector<char> closure(std::vector<char> known) const {
    for (bool progress = true; progress;) {
      progress = false;
      auto learn = [&](int v) {
        if (!known[v]) {
          known[v] = 1;
          progress = true;
        }
      };
      for (const auto& c : constraints_) {
        bool args = true;
        for (int a : c.args) args = args && known[a];
        const bool lhs = known[c.lhs];
        if (args) learn(c.lhs);
        if (!lhs) continue;
        switch (c.shape) {
          case Shape::VarVarL:
          case Shape::VarVarE:
          case Shape::Cons: for (int a : c.args) learn(a); break;
          case Shape::H:
            if (theory_ != TheoryId::BC1) {
              for (int a : c.args) learn(a);
            } else if (known[c.args[0]] || known[c.args[1]]) {
              for (int a : c.args) learn(a);
            }
            break;
          case Shape::Bc:
            if (known[c.args[0]] || known[c.args[1]]) {
              for (int a : c.args) learn(a);
            }
            break;
          case Shape::Db:
            if (known[c.args[1]]) learn(c.args[0]);
            if (known[c.args[0]]) learn(c.args[1]);
            break;
          case Shape::G:
            if (known[c.args[1]]) learn(c.args[0]);
            break;
          case Shape::Xor: {
            int missing = 0;
            for (int a : c.args) missing += !known[a];
            if (missing == 1) {
              for (int a : c.args) learn(a);
            }
            break;
          }
          default: break;
        }
      }
    }
    return known;
  }

  double domain_size(int v) { return static_cast<double>(domain(sorts_[v]).size()); }

  // Unassigned variable to enumerate: the one whose value determines the
  // most others per enumerated value. When no single variable determines
  // anything, pairs are considered and the cheaper member goes first.
  int pick() {
    std::vector<char> known(names_.size(), 0);
    std::vector<int> open;
    for (int v : order_) {
      if (val_[v]) {
        known[v] = 1;
      } else {
        open.push_back(v);
      }
    }
    if (open.empty()) return -1;
    if (auto it = pick_memo_.find(known); it != pick_memo_.end()) return it->second;
    auto gain = [&](std::vector<int> seeds) {
      std::vector<char> k = known;
      for (int v : seeds) k[v] = 1;
      k = closure(k);
      std::size_t n = 0;
      for (int v : open) n += k[v];
      return static_cast<double>(n - seeds.size());
    };
    auto base_key = [&](int v) {
      return std::make_tuple(domain_size(v), defined_[v], -occurrences_[v]);
    };
    int best = -1;
    double best_score = 0;
    // Arguments of an equation with a known lhs are checked against that
    // value right away, which prunes hardest.
    for (const auto& c : constraints_) {
      if (!known[c.lhs] || c.shape == Shape::Cons) continue;
      for (int v : c.args) {
        if (known[v]) continue;
        if (best < 0 || base_key(v) < base_key(best)) best = v;
      }
    }
    if (best >= 0) {
      pick_memo_.emplace(known, best);
      return best;
    }
    for (int v : open) {
      const double score = gain({v}) / std::log2(domain_size(v) + 1);
      if (score > best_score || (score == best_score && best >= 0 && score > 0 &&
                                 base_key(v) < base_key(best))) {
        best = v;
        best_score = score;
      }
    }
    if (best < 0) {
      for (std::size_t i = 0; i < open.size(); ++i) {
        for (std::size_t j = i + 1; j < open.size(); ++j) {
          const int v = open[i], w = open[j];
          const double score =
              gain({v, w}) / (std::log2(domain_size(v) + 1) + std::log2(domain_size(w) + 1));
          if (score > best_score) {
            best_score = score;
            best = domain_size(v) <= domain_size(w) ? v : w;
          }
        }
      }
    }
    if (best < 0) {
      best = open.front();
      for (int v : open) {
        if (base_key(v) < base_key(best)) best = v;
      }
    }
    pick_memo_.emplace(known, best);
    return best;
  }

  TheoryId theory_;
  SearchBudget budget_;
  std::vector<std::string> names_;
  std::vector<Sort> sorts_;
  std::vector<int> order_;
  std::vector<int> occurrences_;
  std::vector<int> defined_;
  std::map<std::vector<char>, int> pick_memo_;
  std::vector<Constraint> constraints_;
  std::vector<Term> val_;
  std::vector<Term> elements_, lists_;
  std::vector<std::vector<Term>> shuffled_;
  std::vector<GroundSolution> solutions_;
  std::size_t max_solutions_ = SIZE_MAX;
  std::size_t nodes_ = 0;
};

}  // namespace

std::vector<GroundSolution> brute_force_unifiers(const std::vector<Equation>& equations,
                                                 TheoryId theory, const SearchBudget& budget,
                                                 std::size_t max_solutions) {
  return Search(equations, theory, budget).run(max_solutions);
}

std::vector<GroundSolution> brute_force_unifiers(const Problem& p, const SearchBudget& budget,
                                                 std::size_t max_solutions) {
  return brute_force_unifiers(p.equations, p.theory, budget, max_solutions);
}

Enumeration enumerate_solutions(const Problem& p, const SearchBudget& budget,
                                std::size_t max_solutions) {
  return Search(p.equations, p.theory, budget).enumerate(max_solutions);
}

Verdict subsumes(const Substitution& general, const GroundSolution& ground,
                 const std::vector<std::string>& vars, TheoryId theory,
                 const SearchBudget& budget) {
  Substitution resolved = general.resolved();
  std::vector<RawEquation> raw;
  for (const auto& name : vars) {
    auto it = ground.find(name);
    if (it == ground.end()) continue;
    const Term* img = resolved.image(name);
    raw.emplace_back(img ? *img : var(name, it->second->sort()), it->second);
  }
  Problem p;
  try {
    p = to_standard_form(raw, theory);
  } catch (const Error&) {
    return Verdict::No;
  }
  try {
    return brute_force_unifiers(p, budget, 1).empty() ? Verdict::No : Verdict::Yes;
  } catch (const BudgetExceeded&) {
    return Verdict::Unknown;
  }
}

bool sat1in3(const std::vector<std::vector<std::string>>& clauses) {
  std::map<std::string, int> index;
  for (const auto& c : clauses) {
    for (const auto& v : c) index.emplace(v, static_cast<int>(index.size()));
  }
  if (index.size() > 20) throw InconsistentInput("sat1in3 supports at most 20 variables");
  std::vector<std::vector<int>> cs;
  for (const auto& c : clauses) {
    std::vector<int> ids;
    for (const auto& v : c) ids.push_back(index.at(v));
    cs.push_back(std::move(ids));
  }
  const std::uint32_t n = static_cast<std::uint32_t>(index.size());
  for (std::uint32_t m = 0; m < (1u << n); ++m) {
    const bool ok = std::all_of(cs.begin(), cs.end(), [&](const std::vector<int>& c) {
      int trues = 0;
      for (int v : c) trues += (m >> v) & 1u;
      return trues == 1;
    });
    if (ok) return true;
  }
  return false;
}

}  // namespace chainunify::oracle
