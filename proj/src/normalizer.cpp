#include "chainunify/normalizer.hpp"

#include <algorithm>
#include <unordered_map>

#include "chainunify/errors.hpp"

namespace chainunify {

namespace {

void check_symbol(Kind kind, TheoryId theory) {
  switch (kind) {
    case Kind::Xor:
    case Kind::Enc:
      if (theory != TheoryId::BC1) {
        throw SignatureError(std::string(to_string(kind)) + " is only available in bc1");
      }
      break;
    case Kind::G:
    case Kind::Db:
      if (!is_dbc_family(theory)) {
        throw SignatureError(std::string(to_string(kind)) + " is not part of " +
                             std::string(to_string(theory)));
      }
      break;
    case Kind::Car:
    case Kind::Cdr:
      if (theory != TheoryId::DBC_PLUS) {
        throw SignatureError(std::string(to_string(kind)) + " requires dbc-plus");
      }
      break;
    default: break;
  }
}

// h(x, y) under the theory: bc1 interprets it, the others keep it free.
Term chain_h(const Term& x, const Term& y, TheoryId theory) {
  if (theory == TheoryId::BC1) return enc(xor_of({x, y}));
  return h(x, y);
}

}  // namespace

Term xor_canonical(const Term& t) {
  if (t->kind() != Kind::Xor) return t;
  std::vector<Term> flat;
  for (const auto& a : t->args()) {
    if (a->kind() == Kind::Xor) {
      flat.insert(flat.end(), a->args().begin(), a->args().end());
    } else if (!a->is_zero()) {
      flat.push_back(a);
    }
  }
  std::sort(flat.begin(), flat.end(), TermLess{});
  std::vector<Term> kept;
  for (std::size_t i = 0; i < flat.size();) {
    std::size_t j = i;
    while (j < flat.size() && equal(flat[j], flat[i])) ++j;
    if ((j - i) % 2 == 1 && !flat[i]->is_zero()) kept.push_back(flat[i]);
    i = j;
  }
  return xor_of(std::move(kept));
}

std::optional<Term> rewrite_at_root(const Term& t, TheoryId theory) {
  check_symbol(t->kind(), theory);
  switch (t->kind()) {
    case Kind::H:
      if (theory == TheoryId::BC1) return enc(xor_of({t->arg(0), t->arg(1)}));
      return std::nullopt;
    case Kind::Xor:
      if (theory == TheoryId::BC1) {
        Term c = xor_canonical(t);
        if (!equal(c, t)) return c;
      }
      return std::nullopt;
    case Kind::Bc: {
      const Term& list = t->arg(0);
      const Term& iv = t->arg(1);
      if (list->is_nil()) return nil();
      if (list->kind() == Kind::Cons) {
        Term head = chain_h(list->arg(0), iv, theory);
        return cons(head, bc(list->arg(1), head));
      }
      return std::nullopt;
    }
    case Kind::G: {
      const Term& left = t->arg(0);
      if (left->kind() == Kind::H && equal(left->arg(1), t->arg(1))) return left->arg(0);
      return std::nullopt;
    }
    case Kind::Db: {
      const Term& list = t->arg(0);
      const Term& iv = t->arg(1);
      if (theory != TheoryId::DBC_PRIME && list->kind() == Kind::Bc && equal(list->arg(1), iv)) {
        return list->arg(0);
      }
      if (list->is_nil()) return nil();
      if (list->kind() == Kind::Cons) {
        return cons(g(list->arg(0), iv), db(list->arg(1), list->arg(0)));
      }
      return std::nullopt;
    }
    case Kind::Car:
      if (t->arg(0)->kind() == Kind::Cons) return t->arg(0)->arg(0);
      return std::nullopt;
    case Kind::Cdr:
      if (t->arg(0)->kind() == Kind::Cons) return t->arg(0)->arg(1);
      return std::nullopt;
    default: return std::nullopt;
  }
}

namespace {

class InnermostNormalizer {
 public:
  InnermostNormalizer(TheoryId theory, NormalizeStats* stats) : theory_(theory), stats_(stats) {}

  Term run(const Term& t) {
    check_symbol(t->kind(), theory_);
    if (t->arity() == 0) return t;
    if (auto it = memo_.find(t.get()); it != memo_.end()) return it->second;
    std::vector<Term> args;
    args.reserve(t->arity());
    for (const auto& a : t->args()) args.push_back(run(a));
    Term r = with_args(t, std::move(args));
    if (auto c = rewrite_at_root(r, theory_)) {
      if (stats_) ++stats_->steps;
      r = run(*c);
    }
    memo_.emplace(t.get(), r);
    keep_alive_.push_back(t);
    return r;
  }

 private:
  TheoryId theory_;
  NormalizeStats* stats_;
  std::unordered_map<const TermNode*, Term> memo_;
  std::vector<Term> keep_alive_;
};

// One step at the first redex in the order given by `strategy`.
std::optional<Term> step(const Term& t, TheoryId theory, Strategy strategy) {
  if (strategy == Strategy::Outermost) {
    if (auto c = rewrite_at_root(t, theory)) return c;
  }
  const std::size_t n = t->arity();
  for (std::size_t k = 0; k < n; ++k) {
    const std::size_t i = strategy == Strategy::RightmostInnermost ? n - 1 - k : k;
    if (auto c = step(t->arg(i), theory, strategy)) {
      std::vector<Term> args = t->args();
      args[i] = *c;
      return with_args(t, std::move(args));
    }
  }
  if (strategy != Strategy::Outermost) return rewrite_at_root(t, theory);
  return std::nullopt;
}

Term canonicalize_xor_everywhere(const Term& t) {
  if (t->arity() == 0) return t;
  std::vector<Term> args;
  args.reserve(t->arity());
  for (const auto& a : t->args()) args.push_back(canonicalize_xor_everywhere(a));
  return xor_canonical(with_args(t, std::move(args)));
}

}  // namespace

Term normalize(const Term& t, TheoryId theory, Strategy strategy, NormalizeStats* stats) {
  if (strategy == Strategy::Innermost) return InnermostNormalizer(theory, stats).run(t);
  Term cur = theory == TheoryId::BC1 ? canonicalize_xor_everywhere(t) : t;
  while (auto next = step(cur, theory, strategy)) {
    if (stats) ++stats->steps;
    cur = theory == TheoryId::BC1 ? canonicalize_xor_everywhere(*next) : *next;
  }
  return cur;
}

bool equal_modulo(const Term& s, const Term& t, TheoryId theory) {
  if (s->sort() != t->sort()) {
    throw SortError("cannot compare " + to_string(s) + " with " + to_string(t) +
                    ": sorts differ");
  }
  return equal(normalize(s, theory), normalize(t, theory));
}

}  // namespace chainunify
