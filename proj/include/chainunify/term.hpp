#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace chainunify {

enum class Sort : std::uint8_t { Element, List };

std::string_view to_string(Sort sort);

enum class Kind : std::uint8_t {
  Var,
  Const,
  Nil,
  Cons,
  Bc,
  Db,
  H,
  G,
  Xor,
  Enc,
  Car,
  Cdr,
};

std::string_view to_string(Kind kind);

/// Name of the XOR unit constant.
inline constexpr std::string_view kXorZero = "0";

class TermNode;

/// Immutable, structurally compared term. Subterms may be shared.
using Term = std::shared_ptr<const TermNode>;

class TermNode {
 public:
  TermNode(Kind kind, Sort sort, std::string name, std::vector<Term> args);

  Kind kind() const { return kind_; }
  Sort sort() const { return sort_; }
  /// Variable or constant name; empty for function nodes.
  const std::string& name() const { return name_; }
  const std::vector<Term>& args() const { return args_; }
  const Term& arg(std::size_t i) const { return args_[i]; }
  std::size_t arity() const { return args_.size(); }
  std::size_t hash() const { return hash_; }
  std::size_t size() const { return size_; }
  std::size_t depth() const { return depth_; }

  bool is_var() const { return kind_ == Kind::Var; }
  bool is_const() const { return kind_ == Kind::Const; }
  bool is_nil() const { return kind_ == Kind::Nil; }
  bool is_zero() const { return kind_ == Kind::Const && name_ == kXorZero; }
  bool ground() const { return ground_; }

 private:
  Kind kind_;
  Sort sort_;
  std::string name_;
  std::vector<Term> args_;
  std::size_t hash_;
  std::size_t size_;
  std::size_t depth_;
  bool ground_;
};

/// Total structural order: kind, then name, then arguments left to right.
std::strong_ordering compare(const Term& a, const Term& b);
bool equal(const Term& a, const Term& b);

struct TermLess {
  bool operator()(const Term& a, const Term& b) const { return compare(a, b) < 0; }
};

struct TermEqual {
  bool operator()(const Term& a, const Term& b) const { return equal(a, b); }
};

struct TermHash {
  std::size_t operator()(const Term& t) const { return t->hash(); }
};

// Checked constructors. Each throws SortError when an argument has the wrong
// sort, so every term built through them is well typed.
Term var(std::string name, Sort sort);
Term element_var(std::string name);
Term list_var(std::string name);
Term constant(std::string name);
Term zero();
Term nil();
Term cons(Term head, Term tail);
Term bc(Term list, Term iv);
Term db(Term list, Term iv);
Term h(Term left, Term right);
Term g(Term left, Term right);
Term enc(Term arg);
Term car(Term list);
Term cdr(Term list);
/// Canonical xor: nested xor nodes are flattened and arguments sorted.
/// Equal pairs are kept; cancellation belongs to the normalizer. A single
/// argument collapses to itself and no arguments to the unit `0`.
Term xor_of(std::vector<Term> args);
/// `[t1, ..., tn]` as nested cons cells ending in nil.
Term list_of(std::span<const Term> elements);
Term list_of(std::initializer_list<Term> elements);

/// Builds a node of the given kind without checking argument sorts. The sort
/// of the result is the result sort of the symbol. Used to construct
/// ill-typed terms for tests and by generic rebuild code.
Term make_unchecked(Kind kind, std::vector<Term> args, std::string name = {});

/// Rebuilds `t` with new arguments (same symbol), re-flattening xor.
Term with_args(const Term& t, std::vector<Term> args);

/// Result sort of a symbol.
Sort result_sort(Kind kind);

/// True iff every node satisfies the argument sorts of the signature.
bool well_typed(const Term& t);

/// Collects the variables of `t` (by name) into `out`.
void collect_vars(const Term& t, std::map<std::string, Term>& out);
std::map<std::string, Term> vars_of(const Term& t);
bool occurs(std::string_view name, const Term& t);

/// If `t` is a proper list `[t1, ..., tn]`, its elements.
std::optional<std::vector<Term>> as_list(const Term& t);

/// Concrete syntax: lists print as `[a, b]`, xor as `a ^ b`.
std::string to_string(const Term& t);

/// Idempotence-aware substitution kept in triangular (dag-solved) order:
/// for bindings x1 -> t1, ..., xn -> tn, xi occurs in no tj with j >= i.
class Substitution {
 public:
  using Binding = std::pair<Term, Term>;

  Substitution() = default;

  /// Appends `variable -> image`. Throws SortError on a sort mismatch and
  /// std::invalid_argument if `variable` is not a variable or is already bound.
  void bind(const Term& variable, const Term& image);

  const std::vector<Binding>& bindings() const { return bindings_; }
  bool empty() const { return bindings_.empty(); }
  std::size_t size() const { return bindings_.size(); }
  bool binds(std::string_view name) const;
  /// Image of `name` as stored (not resolved), or nullptr.
  const Term* image(std::string_view name) const;

  /// Applies the bindings in triangular order, then re-canonicalizes xor.
  Term apply(const Term& t) const;

  /// Equivalent idempotent substitution: every image fully resolved.
  Substitution resolved() const;

  /// Restriction to the given variable names (after resolution).
  Substitution restricted(const std::set<std::string>& names) const;

  /// Bindings satisfy the triangular occurrence condition.
  bool triangular() const;

  /// `then ∘ first`: applying the result equals applying `first` and then
  /// `then`. Both operands are resolved first; the result is idempotent.
  static Substitution compose(const Substitution& first, const Substitution& then);

  std::string to_string() const;

 private:
  std::vector<Binding> bindings_;
};

Term apply_substitution(const Substitution& s, const Term& t);

/// Issues variable names of the form `hint#k` that are never reused within
/// one problem. Names already in use are reserved up front.
class FreshSupply {
 public:
  FreshSupply() = default;
  explicit FreshSupply(std::size_t counter) : counter_(counter) {}

  void reserve(const std::string& name);
  void reserve_vars(const Term& t);
  Term fresh(Sort sort, std::string_view hint);
  std::size_t counter() const { return counter_; }

 private:
  std::size_t counter_ = 0;
  std::set<std::string> used_;
};

/// Names issued by FreshSupply contain this marker.
bool is_fresh_name(std::string_view name);

}  // namespace chainunify
