#include "chainunify/syntax.hpp"

#include <cctype>
#include <sstream>

#include "chainunify/errors.hpp"

namespace chainunify {

namespace {

enum class Tok { Ident, Zero, Punct, Arrow, End };

struct Token {
  Tok kind;
  std::string text;
  std::size_t line;
  std::size_t column;
};

bool ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }

bool ident_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '\'' || c == '#';
}

std::vector<Token> tokenize(std::string_view text) {
  std::vector<Token> out;
  std::size_t line = 1, col = 1;
  std::size_t i = 0;
  auto advance = [&](std::size_t n) {
    for (std::size_t k = 0; k < n; ++k, ++i) {
      if (text[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
  };
  while (i < text.size()) {
    const char c = text[i];
    if (std::isspace(static_cast<unsigned char>(c))) {
      advance(1);
      continue;
    }
    if (c == '/' && i + 1 < text.size() && text[i + 1] == '/') {
      while (i < text.size() && text[i] != '\n') advance(1);
      continue;
    }
    const std::size_t l = line, k = col;
    if (ident_start(c)) {
      std::size_t j = i;
      while (j < text.size() && ident_char(text[j])) ++j;
      out.push_back({Tok::Ident, std::string(text.substr(i, j - i)), l, k});
      advance(j - i);
    } else if (c == '0') {
      out.push_back({Tok::Zero, "0", l, k});
      advance(1);
    } else if (c == '=' && i + 1 < text.size() && text[i + 1] == '?') {
      out.push_back({Tok::Arrow, "=?", l, k});
      advance(2);
    } else if (std::string_view("()[],;{}^").find(c) != std::string_view::npos) {
      out.push_back({Tok::Punct, std::string(1, c), l, k});
      advance(1);
    } else {
      throw SyntaxError(std::string("unexpected character '") + c + "'", l, k);
    }
  }
  out.push_back({Tok::End, "", line, col});
  return out;
}

struct Symbol {
  Kind kind;
  std::size_t arity;
};

std::optional<Symbol> function_symbol(const std::string& name) {
  if (name == "cons") return Symbol{Kind::Cons, 2};
  if (name == "bc") return Symbol{Kind::Bc, 2};
  if (name == "db") return Symbol{Kind::Db, 2};
  if (name == "h") return Symbol{Kind::H, 2};
  if (name == "g") return Symbol{Kind::G, 2};
  if (name == "enc") return Symbol{Kind::Enc, 1};
  if (name == "car") return Symbol{Kind::Car, 1};
  if (name == "cdr") return Symbol{Kind::Cdr, 1};
  return std::nullopt;
}

class Parser {
 public:
  explicit Parser(std::string_view text) : toks_(tokenize(text)) {}

  ProblemText problem() {
    ProblemText out;
    expect_word("problem");
    const Token& th = expect(Tok::Ident, "theory name");
    auto theory = parse_theory(th.text);
    if (!theory) throw SyntaxError("unknown theory '" + th.text + "'", th.line, th.column);
    out.theory = *theory;
    expect_punct("{");
    while (!at_punct("}")) {
      if (at_word("const")) {
        declarations();
        continue;
      }
      const Token& start = peek();
      Term lhs = term();
      expect(Tok::Arrow, "'=?'");
      Term rhs = term();
      if (lhs->sort() != rhs->sort()) {
        throw SortError(std::to_string(start.line) + ":" + std::to_string(start.column) +
                        ": sides of the equation have different sorts");
      }
      expect_punct(";");
      out.equations.emplace_back(lhs, rhs);
    }
    expect_punct("}");
    expect(Tok::End, "end of input");
    out.constants = constants_;
    return out;
  }

  TermText term_input() {
    while (at_word("const")) declarations();
    TermText out;
    out.term = term();
    expect(Tok::End, "end of input");
    out.constants = constants_;
    return out;
  }

  Term single_term(const std::set<std::string>& constants) {
    constants_ = constants;
    Term t = term();
    expect(Tok::End, "end of input");
    return t;
  }

 private:
  const Token& peek() const { return toks_[pos_]; }
  const Token& next() { return toks_[pos_ < toks_.size() - 1 ? pos_++ : pos_]; }

  bool at_punct(std::string_view p) const { return peek().kind == Tok::Punct && peek().text == p; }
  bool at_word(std::string_view w) const { return peek().kind == Tok::Ident && peek().text == w; }

  [[noreturn]] void fail(const std::string& what) const {
    const Token& t = peek();
    const std::string found = t.kind == Tok::End ? "end of input" : "'" + t.text + "'";
    throw SyntaxError("expected " + what + ", found " + found, t.line, t.column);
  }

  const Token& expect(Tok kind, const std::string& what) {
    if (peek().kind != kind) fail(what);
    return next();
  }

  void expect_punct(std::string_view p) {
    if (!at_punct(p)) fail("'" + std::string(p) + "'");
    next();
  }

  void expect_word(std::string_view w) {
    if (!at_word(w)) fail("'" + std::string(w) + "'");
    next();
  }

  void declarations() {
    expect_word("const");
    do {
      const Token& t = expect(Tok::Ident, "constant name");
      if (function_symbol(t.text) || t.text == "nil" || t.text == "const") {
        throw SyntaxError("reserved word '" + t.text + "' used as a constant", t.line, t.column);
      }
      constants_.insert(t.text);
      if (!at_punct(",")) break;
      next();
    } while (true);
    expect_punct(";");
  }

  Term term() {
    const Token start = peek();
    std::vector<Term> parts{primary()};
    while (at_punct("^")) {
      next();
      parts.push_back(primary());
    }
    if (parts.size() == 1) return parts.front();
    return checked(start, [&] { return xor_of(std::move(parts)); });
  }

  template <typename F>
  Term checked(const Token& at, F&& build) {
    try {
      return build();
    } catch (const SortError& e) {
      throw SortError(std::to_string(at.line) + ":" + std::to_string(at.column) + ": " + e.what());
    }
  }

  Term primary() {
    const Token t = peek();
    if (t.kind == Tok::Zero) {
      next();
      return zero();
    }
    if (at_punct("[")) {
      next();
      std::vector<Term> elems;
      if (!at_punct("]")) {
        elems.push_back(term());
        while (at_punct(",")) {
          next();
          elems.push_back(term());
        }
      }
      expect_punct("]");
      return checked(t, [&] { return list_of(elems); });
    }
    if (at_punct("(")) {
      next();
      Term inner = term();
      expect_punct(")");
      return inner;
    }
    if (t.kind != Tok::Ident) fail("a term");
    next();
    if (t.text == "nil") return nil();
    if (auto sym = function_symbol(t.text); sym && at_punct("(")) {
      next();
      std::vector<Term> args{term()};
      while (at_punct(",")) {
        next();
        args.push_back(term());
      }
      expect_punct(")");
      if (args.size() != sym->arity) {
        throw SyntaxError(t.text + " expects " + std::to_string(sym->arity) + " argument(s)",
                          t.line, t.column);
      }
      return checked(t, [&] {
        switch (sym->kind) {
          case Kind::Cons: return cons(args[0], args[1]);
          case Kind::Bc: return bc(args[0], args[1]);
          case Kind::Db: return db(args[0], args[1]);
          case Kind::H: return h(args[0], args[1]);
          case Kind::G: return g(args[0], args[1]);
          case Kind::Enc: return enc(args[0]);
          case Kind::Car: return car(args[0]);
          default: return cdr(args[0]);
        }
      });
    }
    if (at_punct("(")) throw SyntaxError("unknown function '" + t.text + "'", t.line, t.column);
    if (constants_.count(t.text)) return constant(t.text);
    const bool upper = std::isupper(static_cast<unsigned char>(t.text[0]));
    return var(t.text, upper ? Sort::List : Sort::Element);
  }

  std::vector<Token> toks_;
  std::size_t pos_ = 0;
  std::set<std::string> constants_;
};

}  // namespace

ProblemText parse_problem_text(std::string_view text) { return Parser(text).problem(); }

Problem parse_problem(std::string_view text) {
  ProblemText p = parse_problem_text(text);
  return to_standard_form(p.equations, p.theory, p.constants);
}

TermText parse_term_text(std::string_view text) { return Parser(text).term_input(); }

Term parse_term(std::string_view text, const std::set<std::string>& constants) {
  return Parser(text).single_term(constants);
}

std::string print_problem(const ProblemText& p) {
  std::ostringstream os;
  os << "problem " << to_string(p.theory) << " {\n";
  if (!p.constants.empty()) {
    os << "  const ";
    bool first = true;
    for (const auto& c : p.constants) {
      os << (first ? "" : ", ") << c;
      first = false;
    }
    os << ";\n";
  }
  for (const auto& [l, r] : p.equations) os << "  " << to_string(l) << " =? " << to_string(r) << ";\n";
  os << "}\n";
  return os.str();
}

}  // namespace chainunify
