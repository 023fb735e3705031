#include "chainunify/term.hpp"

#include <algorithm>
#include <sstream>
#include <stdexcept>
#include <functional>
#include <unordered_map>
#include <unordered_set>

#include "chainunify/errors.hpp"

namespace chainunify {

std::string_view to_string(Sort sort) {
  return sort == Sort::Element ? "element" : "list";
}

std::string_view to_string(Kind kind) {
  switch (kind) {
    case Kind::Var: return "var";
    case Kind::Const: return "const";
    case Kind::Nil: return "nil";
    case Kind::Cons: return "cons";
    case Kind::Bc: return "bc";
    case Kind::Db: return "db";
    case Kind::H: return "h";
    case Kind::G: return "g";
    case Kind::Xor: return "xor";
    case Kind::Enc: return "enc";
    case Kind::Car: return "car";
    case Kind::Cdr: return "cdr";
  }
  return "?";
}

namespace {

std::size_t mix(std::size_t seed, std::size_t value) {
  return seed ^ (value + 0x9e3779b97f4a7c15ULL + (seed << 6) + (seed >> 2));
}

// Expected argument sorts per symbol.
std::vector<Sort> signature(Kind kind) {
  switch (kind) {
    case Kind::Cons: return {Sort::Element, Sort::List};
    case Kind::Bc:
    case Kind::Db: return {Sort::List, Sort::Element};
    case Kind::H:
    case Kind::G: return {Sort::Element, Sort::Element};
    case Kind::Enc: return {Sort::Element};
    case Kind::Car:
    case Kind::Cdr: return {Sort::List};
    default: return {};
  }
}

void check_args(Kind kind, const std::vector<Term>& args) {
  if (kind == Kind::Xor) {
    for (const auto& a : args) {
      if (a->sort() != Sort::Element) {
        throw SortError("xor argument must be an element, got " + to_string(a));
      }
    }
    return;
  }
  const auto sig = signature(kind);
  if (sig.size() != args.size()) {
    throw SortError(std::string(to_string(kind)) + " expects " + std::to_string(sig.size()) +
                    " arguments");
  }
  for (std::size_t i = 0; i < sig.size(); ++i) {
    if (args[i]->sort() != sig[i]) {
      throw SortError(std::string(to_string(kind)) + " argument " + std::to_string(i + 1) +
                      " must be " + std::string(to_string(sig[i])) + ", got " +
                      to_string(args[i]));
    }
  }
}

Term make_node(Kind kind, Sort sort, std::string name, std::vector<Term> args) {
  return std::make_shared<const TermNode>(kind, sort, std::move(name), std::move(args));
}

}  // namespace

TermNode::TermNode(Kind kind, Sort sort, std::string name, std::vector<Term> args)
    : kind_(kind), sort_(sort), name_(std::move(name)), args_(std::move(args)) {
  hash_ = mix(static_cast<std::size_t>(kind_), std::hash<std::string>{}(name_));
  size_ = 1;
  depth_ = 1;
  ground_ = kind_ != Kind::Var;
  for (const auto& a : args_) {
    hash_ = mix(hash_, a->hash());
    size_ += a->size();
    depth_ = std::max(depth_, a->depth() + 1);
    ground_ = ground_ && a->ground();
  }
}

Sort result_sort(Kind kind) {
  switch (kind) {
    case Kind::Nil:
    case Kind::Cons:
    case Kind::Bc:
    case Kind::Db:
    case Kind::Cdr: return Sort::List;
    default: return Sort::Element;
  }
}

std::strong_ordering compare(const Term& a, const Term& b) {
  if (a.get() == b.get()) return std::strong_ordering::equal;
  if (auto c = a->kind() <=> b->kind(); c != 0) return c;
  if (auto c = a->name() <=> b->name(); c != 0) return c;
  if (a->kind() == Kind::Var) {
    if (auto c = a->sort() <=> b->sort(); c != 0) return c;
  }
  if (auto c = a->arity() <=> b->arity(); c != 0) return c;
  for (std::size_t i = 0; i < a->arity(); ++i) {
    if (auto c = compare(a->arg(i), b->arg(i)); c != 0) return c;
  }
  return std::strong_ordering::equal;
}

bool equal(const Term& a, const Term& b) {
  if (a.get() == b.get()) return true;
  if (a->hash() != b->hash()) return false;
  return compare(a, b) == 0;
}

Term var(std::string name, Sort sort) {
  if (name.empty()) throw std::invalid_argument("empty variable name");
  return make_node(Kind::Var, sort, std::move(name), {});
}

Term element_var(std::string name) { return var(std::move(name), Sort::Element); }
Term list_var(std::string name) { return var(std::move(name), Sort::List); }

Term constant(std::string name) {
  if (name.empty()) throw std::invalid_argument("empty constant name");
  return make_node(Kind::Const, Sort::Element, std::move(name), {});
}

Term zero() {
  static const Term z = constant(std::string(kXorZero));
  return z;
}

Term nil() {
  static const Term n = make_node(Kind::Nil, Sort::List, {}, {});
  return n;
}

Term make_unchecked(Kind kind, std::vector<Term> args, std::string name) {
  if (kind == Kind::Nil) return nil();
  return make_node(kind, result_sort(kind), std::move(name), std::move(args));
}

namespace {

Term checked(Kind kind, std::vector<Term> args) {
  check_args(kind, args);
  return make_node(kind, result_sort(kind), {}, std::move(args));
}

}  // namespace

Term cons(Term head, Term tail) { return checked(Kind::Cons, {std::move(head), std::move(tail)}); }
Term bc(Term list, Term iv) { return checked(Kind::Bc, {std::move(list), std::move(iv)}); }
Term db(Term list, Term iv) { return checked(Kind::Db, {std::move(list), std::move(iv)}); }
Term h(Term left, Term right) { return checked(Kind::H, {std::move(left), std::move(right)}); }
Term g(Term left, Term right) { return checked(Kind::G, {std::move(left), std::move(right)}); }
Term enc(Term arg) { return checked(Kind::Enc, {std::move(arg)}); }
Term car(Term list) { return checked(Kind::Car, {std::move(list)}); }
Term cdr(Term list) { return checked(Kind::Cdr, {std::move(list)}); }

Term xor_of(std::vector<Term> args) {
  check_args(Kind::Xor, args);
  std::vector<Term> flat;
  flat.reserve(args.size());
  for (auto& a : args) {
    if (a->kind() == Kind::Xor) {
      flat.insert(flat.end(), a->args().begin(), a->args().end());
    } else {
      flat.push_back(std::move(a));
    }
  }
  if (flat.empty()) return zero();
  if (flat.size() == 1) return flat.front();
  std::sort(flat.begin(), flat.end(), TermLess{});
  return make_node(Kind::Xor, Sort::Element, {}, std::move(flat));
}

Term list_of(std::span<const Term> elements) {
  Term out = nil();
  for (auto it = elements.rbegin(); it != elements.rend(); ++it) out = cons(*it, out);
  return out;
}

Term list_of(std::initializer_list<Term> elements) {
  return list_of(std::span<const Term>(elements.begin(), elements.size()));
}

Term with_args(const Term& t, std::vector<Term> args) {
  if (t->kind() == Kind::Xor) return xor_of(std::move(args));
  bool same = args.size() == t->arity();
  for (std::size_t i = 0; same && i < args.size(); ++i) same = args[i].get() == t->arg(i).get();
  if (same) return t;
  return make_node(t->kind(), t->sort(), t->name(), std::move(args));
}

bool well_typed(const Term& t) {
  switch (t->kind()) {
    case Kind::Var:
    case Kind::Const:
      return !t->name().empty() && (t->kind() == Kind::Var || t->sort() == Sort::Element);
    case Kind::Nil:
      return t->arity() == 0;
    case Kind::Xor:
      if (t->arity() < 2) return false;
      for (const auto& a : t->args()) {
        if (a->sort() != Sort::Element || a->kind() == Kind::Xor || !well_typed(a)) return false;
      }
      return true;
    default: {
      const auto sig = signature(t->kind());
      if (sig.size() != t->arity()) return false;
      for (std::size_t i = 0; i < sig.size(); ++i) {
        if (t->arg(i)->sort() != sig[i] || !well_typed(t->arg(i))) return false;
      }
      return t->sort() == result_sort(t->kind());
    }
  }
}

namespace {

void collect_vars(const Term& t, std::map<std::string, Term>& out,
                  std::unordered_set<const TermNode*>& seen) {
  if (t->ground() || !seen.insert(t.get()).second) return;
  if (t->is_var()) {
    out.emplace(t->name(), t);
    return;
  }
  for (const auto& a : t->args()) collect_vars(a, out, seen);
}

bool occurs(std::string_view name, const Term& t, std::unordered_set<const TermNode*>& seen) {
  if (t->ground() || !seen.insert(t.get()).second) return false;
  if (t->is_var()) return t->name() == name;
  return std::any_of(t->args().begin(), t->args().end(),
                     [&](const Term& a) { return occurs(name, a, seen); });
}

}  // namespace

void collect_vars(const Term& t, std::map<std::string, Term>& out) {
  std::unordered_set<const TermNode*> seen;
  collect_vars(t, out, seen);
}

std::map<std::string, Term> vars_of(const Term& t) {
  std::map<std::string, Term> out;
  collect_vars(t, out);
  return out;
}

bool occurs(std::string_view name, const Term& t) {
  std::unordered_set<const TermNode*> seen;
  return occurs(name, t, seen);
}

std::optional<std::vector<Term>> as_list(const Term& t) {
  std::vector<Term> out;
  const TermNode* cur = t.get();
  while (cur->kind() == Kind::Cons) {
    out.push_back(cur->arg(0));
    cur = cur->arg(1).get();
  }
  if (cur->kind() != Kind::Nil) return std::nullopt;
  return out;
}

namespace {

void print(std::ostream& os, const Term& t) {
  switch (t->kind()) {
    case Kind::Var:
    case Kind::Const: os << t->name(); return;
    case Kind::Nil: os << "nil"; return;
    case Kind::Xor: {
      for (std::size_t i = 0; i < t->arity(); ++i) {
        if (i) os << " ^ ";
        print(os, t->arg(i));
      }
      return;
    }
    case Kind::Cons:
      if (auto elems = as_list(t)) {
        os << '[';
        for (std::size_t i = 0; i < elems->size(); ++i) {
          if (i) os << ", ";
          print(os, (*elems)[i]);
        }
        os << ']';
        return;
      }
      break;
    default: break;
  }
  os << to_string(t->kind()) << '(';
  for (std::size_t i = 0; i < t->arity(); ++i) {
    if (i) os << ", ";
    print(os, t->arg(i));
  }
  os << ')';
}

// Shared subterms are rewritten once; unchanged nodes are returned as is.
Term substitute_once(const Term& t, const std::string& name, const Term& image,
                     std::unordered_map<const TermNode*, Term>& memo) {
  if (t->ground()) return t;
  if (t->is_var()) return t->name() == name ? image : t;
  if (auto it = memo.find(t.get()); it != memo.end()) return it->second;
  std::vector<Term> args;
  args.reserve(t->arity());
  bool changed = false;
  for (const auto& a : t->args()) {
    args.push_back(substitute_once(a, name, image, memo));
    changed = changed || args.back().get() != a.get();
  }
  Term out = changed ? with_args(t, std::move(args)) : t;
  memo.emplace(t.get(), out);
  return out;
}

}  // namespace

std::string to_string(const Term& t) {
  std::ostringstream os;
  print(os, t);
  return os.str();
}

void Substitution::bind(const Term& variable, const Term& image) {
  if (!variable->is_var()) throw std::invalid_argument("binding target is not a variable");
  if (variable->sort() != image->sort()) {
    throw SortError("cannot bind " + std::string(chainunify::to_string(variable->sort())) + " variable " +
                    variable->name() + " to " + chainunify::to_string(image));
  }
  if (binds(variable->name())) {
    throw std::invalid_argument("variable " + variable->name() + " already bound");
  }
  bindings_.emplace_back(variable, image);
}

bool Substitution::binds(std::string_view name) const { return image(name) != nullptr; }

const Term* Substitution::image(std::string_view name) const {
  for (const auto& [v, t] : bindings_) {
    if (v->name() == name) return &t;
  }
  return nullptr;
}

Term Substitution::apply(const Term& t) const {
  Term out = t;
  for (const auto& [v, image] : bindings_) {
    std::unordered_map<const TermNode*, Term> memo;
    out = substitute_once(out, v->name(), image, memo);
  }
  return out;
}

Substitution Substitution::resolved() const {
  // One simultaneous pass with shared memo tables; a cyclic binding list
  // falls back to the fixpoint below.
  std::unordered_map<std::string, std::size_t> index;
  for (std::size_t i = 0; i < bindings_.size(); ++i) index.emplace(bindings_[i].first->name(), i);
  std::vector<Term> done(bindings_.size());
  std::vector<char> active(bindings_.size(), 0);
  std::unordered_map<const TermNode*, Term> memo;
  bool cyclic = false;
  std::function<Term(const Term&)> walk = [&](const Term& t) -> Term {
    if (t->ground() || cyclic) return t;
    if (t->is_var()) {
      auto it = index.find(t->name());
      if (it == index.end()) return t;
      const std::size_t i = it->second;
      if (done[i]) return done[i];
      if (active[i]) {
        cyclic = true;
        return t;
      }
      active[i] = 1;
      done[i] = walk(bindings_[i].second);
      active[i] = 0;
      return done[i];
    }
    if (auto it = memo.find(t.get()); it != memo.end()) return it->second;
    std::vector<Term> args;
    args.reserve(t->arity());
    bool changed = false;
    for (const auto& a : t->args()) {
      args.push_back(walk(a));
      changed = changed || args.back().get() != a.get();
    }
    Term out = changed ? with_args(t, std::move(args)) : t;
    memo.emplace(t.get(), out);
    return out;
  };
  for (std::size_t i = 0; i < bindings_.size() && !cyclic; ++i) walk(bindings_[i].first);
  if (!cyclic) {
    Substitution out;
    for (std::size_t i = 0; i < bindings_.size(); ++i) out.bindings_.emplace_back(bindings_[i].first, done[i]);
    return out;
  }

  Substitution out;
  for (const auto& [v, image] : bindings_) out.bindings_.emplace_back(v, apply(image));
  // Images resolved against the full list may still mention variables bound
  // earlier when the list is not triangular; iterate to a fixpoint.
  for (std::size_t round = 0; round < bindings_.size(); ++round) {
    bool changed = false;
    for (auto& [v, image] : out.bindings_) {
      Term next = out.apply(image);
      if (!equal(next, image)) {
        image = next;
        changed = true;
      }
    }
    if (!changed) break;
  }
  return out;
}

Substitution Substitution::restricted(const std::set<std::string>& names) const {
  Substitution out;
  for (const auto& [v, image] : resolved().bindings_) {
    if (names.count(v->name())) out.bindings_.emplace_back(v, image);
  }
  return out;
}

bool Substitution::triangular() const {
  for (std::size_t i = 0; i < bindings_.size(); ++i) {
    const auto& name = bindings_[i].first->name();
    for (std::size_t j = i; j < bindings_.size(); ++j) {
      if (occurs(name, bindings_[j].second)) return false;
    }
  }
  return true;
}

Substitution Substitution::compose(const Substitution& first, const Substitution& then) {
  const Substitution a = first.resolved();
  const Substitution b = then.resolved();
  Substitution out;
  for (const auto& [v, image] : a.bindings_) {
    Term img = b.apply(image);
    if (img->is_var() && img->name() == v->name()) continue;
    out.bindings_.emplace_back(v, img);
  }
  for (const auto& [v, image] : b.bindings_) {
    if (!a.binds(v->name())) out.bindings_.emplace_back(v, image);
  }
  return out;
}

std::string Substitution::to_string() const {
  std::string out = "{";
  for (std::size_t i = 0; i < bindings_.size(); ++i) {
    if (i) out += ", ";
    out += bindings_[i].first->name() + " := " + chainunify::to_string(bindings_[i].second);
  }
  return out + "}";
}

Term apply_substitution(const Substitution& s, const Term& t) { return s.apply(t); }

void FreshSupply::reserve(const std::string& name) { used_.insert(name); }

void FreshSupply::reserve_vars(const Term& t) {
  for (const auto& [name, v] : vars_of(t)) used_.insert(name);
}

Term FreshSupply::fresh(Sort sort, std::string_view hint) {
  std::string base(hint);
  if (auto pos = base.find('#'); pos != std::string::npos) base.resize(pos);
  if (base.empty()) base = sort == Sort::List ? "V" : "v";
  for (;;) {
    std::string name = base + "#" + std::to_string(++counter_);
    if (used_.insert(name).second) return var(std::move(name), sort);
  }
}

bool is_fresh_name(std::string_view name) { return name.find('#') != std::string_view::npos; }

}  // namespace chainunify
