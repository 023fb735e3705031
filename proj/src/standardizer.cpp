#include <algorithm>
#include <cctype>
#include <stdexcept>
#include <unordered_map>

#include "chainunify/errors.hpp"
#include "chainunify/problem.hpp"

namespace chainunify {

std::string_view to_string(Shape shape) {
  switch (shape) {
    case Shape::VarVarL: return "VAR_VAR_L";
    case Shape::Bc: return "BC";
    case Shape::Db: return "DB";
    case Shape::Cons: return "CONS";
    case Shape::Nil: return "NIL";
    case Shape::VarVarE: return "VAR_VAR_E";
    case Shape::H: return "H";
    case Shape::G: return "G";
    case Shape::Const: return "CONST";
    case Shape::Xor: return "XOR";
  }
  return "?";
}

namespace {

bool is_var_of(const Term& t, Sort sort) { return t->is_var() && t->sort() == sort; }

}  // namespace

std::optional<Shape> classify(const Term& lhs, const Term& rhs, TheoryId theory) {
  if (!lhs->is_var() || lhs->sort() != rhs->sort()) return std::nullopt;
  const bool dbc = theory == TheoryId::DBC || theory == TheoryId::DBC_PRIME;
  if (lhs->sort() == Sort::List) {
    switch (rhs->kind()) {
      case Kind::Var: return Shape::VarVarL;
      case Kind::Nil: return Shape::Nil;
      case Kind::Cons:
        if (is_var_of(rhs->arg(0), Sort::Element) && is_var_of(rhs->arg(1), Sort::List)) {
          return Shape::Cons;
        }
        return std::nullopt;
      case Kind::Bc:
      case Kind::Db:
        if (rhs->kind() == Kind::Db && !dbc) return std::nullopt;
        if (is_var_of(rhs->arg(0), Sort::List) && is_var_of(rhs->arg(1), Sort::Element)) {
          return rhs->kind() == Kind::Bc ? Shape::Bc : Shape::Db;
        }
        return std::nullopt;
      default: return std::nullopt;
    }
  }
  switch (rhs->kind()) {
    case Kind::Var: return Shape::VarVarE;
    case Kind::Const: return Shape::Const;
    case Kind::H:
    case Kind::G:
      if (rhs->kind() == Kind::G && !dbc) return std::nullopt;
      if (rhs->arg(0)->is_var() && rhs->arg(1)->is_var()) {
        return rhs->kind() == Kind::H ? Shape::H : Shape::G;
      }
      return std::nullopt;
    case Kind::Xor:
      if (theory != TheoryId::BC1) return std::nullopt;
      for (const auto& a : rhs->args()) {
        if (!a->is_var()) return std::nullopt;
      }
      return Shape::Xor;
    default: return std::nullopt;
  }
}

Equation make_equation(const Term& lhs, const Term& rhs, TheoryId theory) {
  auto shape = classify(lhs, rhs, theory);
  if (!shape) {
    throw std::invalid_argument("not a standard-form equation: " + to_string(lhs) + " =? " +
                                to_string(rhs));
  }
  return Equation{lhs, rhs, *shape};
}

bool operator==(const Equation& a, const Equation& b) {
  return equal(a.lhs, b.lhs) && equal(a.rhs, b.rhs);
}

bool operator<(const Equation& a, const Equation& b) {
  if (auto c = compare(a.lhs, b.lhs); c != 0) return c < 0;
  return compare(a.rhs, b.rhs) < 0;
}

std::string to_string(const Equation& e) { return to_string(e.lhs) + " =? " + to_string(e.rhs); }

std::vector<Equation> Problem::list_equations() const {
  std::vector<Equation> out;
  for (const auto& e : equations) {
    if (e.is_list()) out.push_back(e);
  }
  return out;
}

std::vector<Equation> Problem::element_equations() const {
  std::vector<Equation> out;
  for (const auto& e : equations) {
    if (!e.is_list()) out.push_back(e);
  }
  return out;
}

std::map<std::string, Term> Problem::variables() const {
  std::map<std::string, Term> out;
  for (const auto& e : equations) {
    collect_vars(e.lhs, out);
    collect_vars(e.rhs, out);
  }
  return out;
}

void check_unification_signature(const Term& t, TheoryId theory) {
  if (theory != TheoryId::BC0 && theory != TheoryId::BC1 && theory != TheoryId::DBC) {
    throw SignatureError(std::string(to_string(theory)) +
                         " is a normalization theory, not a unification theory");
  }
  switch (t->kind()) {
    case Kind::Car:
    case Kind::Cdr:
      throw SignatureError(std::string(to_string(t->kind())) +
                           " is not allowed in unification problems");
    case Kind::G:
    case Kind::Db:
      if (theory != TheoryId::DBC) {
        throw SignatureError(std::string(to_string(t->kind())) + " is not part of " +
                             std::string(to_string(theory)));
      }
      break;
    case Kind::Xor:
    case Kind::Enc:
      if (theory != TheoryId::BC1) {
        throw SignatureError(std::string(to_string(t->kind())) + " is only available in bc1");
      }
      break;
    default: break;
  }
  for (const auto& a : t->args()) check_unification_signature(a, theory);
}

namespace {

void collect_constants(const Term& t, std::set<std::string>& out) {
  if (t->is_const()) out.insert(t->name());
  for (const auto& a : t->args()) collect_constants(a, out);
}

class Flattener {
 public:
  explicit Flattener(Problem& p) : p_(p) {}

  void add(const Term& s, const Term& t) {
    if (s->is_var()) {
      emit(s, flat_root(t));
    } else if (t->is_var()) {
      emit(t, flat_root(s));
    } else {
      emit(name(s), flat_root(t));
    }
  }

 private:
  Term name(const Term& t) {
    if (t->is_var()) return t;
    if (auto it = names_.find(t); it != names_.end()) return it->second;
    Term v = p_.fresh.fresh(t->sort(), hint(t));
    names_.emplace(t, v);
    emit(v, flat_root(t));
    return v;
  }

  Term flat_root(const Term& t) {
    switch (t->kind()) {
      case Kind::Var:
      case Kind::Const:
      case Kind::Nil: return t;
      case Kind::Enc: return h(name(t->arg(0)), name(zero()));
      default: {
        std::vector<Term> args;
        args.reserve(t->arity());
        for (const auto& a : t->args()) args.push_back(name(a));
        return with_args(t, std::move(args));
      }
    }
  }

  void emit(const Term& lhs, const Term& rhs) {
    p_.equations.push_back(make_equation(lhs, rhs, p_.theory));
  }

  static std::string hint(const Term& t) {
    if (t->sort() == Sort::List) return "V";
    if (t->is_zero()) return "z";
    if (t->is_const() && std::isalpha(static_cast<unsigned char>(t->name()[0]))) {
      return std::string(1, static_cast<char>(std::tolower(static_cast<unsigned char>(t->name()[0]))));
    }
    return "v";
  }

  Problem& p_;
  std::unordered_map<Term, Term, TermHash, TermEqual> names_;
};

}  // namespace

Problem to_standard_form(const std::vector<RawEquation>& raw, TheoryId theory,
                         std::set<std::string> constants) {
  Problem p;
  p.theory = theory;
  p.constants = std::move(constants);
  p.original = raw;
  for (const auto& [s, t] : raw) {
    if (s->sort() != t->sort()) {
      throw SortError("equation sides differ in sort: " + to_string(s) + " =? " + to_string(t));
    }
    if (!well_typed(s) || !well_typed(t)) {
      throw SortError("ill-typed equation: " + to_string(s) + " =? " + to_string(t));
    }
    check_unification_signature(s, theory);
    check_unification_signature(t, theory);
    collect_vars(s, p.original_vars);
    collect_vars(t, p.original_vars);
    collect_constants(s, p.constants);
    collect_constants(t, p.constants);
  }
  if (theory == TheoryId::BC1) p.constants.erase(std::string(kXorZero));
  for (const auto& [name, v] : p.original_vars) p.fresh.reserve(name);
  Flattener flattener(p);
  for (const auto& [s, t] : raw) flattener.add(s, t);
  return p;
}

}  // namespace chainunify
