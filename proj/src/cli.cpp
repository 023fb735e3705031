#include "chainunify/cli.hpp"

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"

#include "chainunify/errors.hpp"
#include "chainunify/normalizer.hpp"
#include "chainunify/unify.hpp"

namespace chainunify {

std::vector<std::vector<std::string>> parse_clauses(std::string_view text) {
  std::vector<std::vector<std::string>> out;
  std::istringstream lines{std::string(text)};
  std::string line;
  for (std::size_t n = 1; std::getline(lines, line); ++n) {
    std::istringstream words(line);
    std::vector<std::string> clause;
    std::string w;
    while (words >> w) clause.push_back(w);
    if (clause.empty() || clause.front().front() == '#') continue;
    const std::string where = "line " + std::to_string(n) + ": ";
    if (clause.size() != 3) {
      throw FormatError(where + "expected 3 literals, found " + std::to_string(clause.size()));
    }
    for (const auto& lit : clause) {
      if (lit.front() == '-' || lit.front() == '~' || lit.front() == '!') {
        throw FormatError(where + "negative literal '" + lit + "'");
      }
      const bool ok = std::all_of(lit.begin(), lit.end(), [](char c) {
        return std::isalnum(static_cast<unsigned char>(c)) || c == '_';
      });
      if (!ok) throw FormatError(where + "bad variable name '" + lit + "'");
    }
    out.push_back(std::move(clause));
  }
  return out;
}

ProblemText encode_1in3(const std::vector<std::vector<std::string>>& clauses) {
  ProblemText p;
  p.theory = TheoryId::DBC;
  p.constants = {"a", "b", "c"};
  const Term a = constant("a"), b = constant("b"), c = constant("c");
  for (const auto& clause : clauses) {
    Term t = h(a, b);
    for (std::size_t i = 0; i < clause.size(); ++i) {
      t = g(t, element_var("x_" + clause[i]));
      if (i + 1 < clause.size()) t = h(t, b);
    }
    p.equations.emplace_back(t, g(h(a, b), c));
  }
  return p;
}

namespace {

std::string read_input(const std::string& path, std::istream& in) {
  if (path.empty() || path == "-") {
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
  }
  std::ifstream f(path);
  if (!f) throw InconsistentInput("cannot read " + path);
  std::ostringstream os;
  os << f.rdbuf();
  return os.str();
}

std::string show(const Term& t, TheoryId theory) { return to_string(present(t, theory)); }

std::size_t default_max_branches() {
  if (const char* env = std::getenv("CHAINUNIFY_MAX_BRANCHES")) {
    try {
      return std::stoul(env);
    } catch (const std::exception&) {
    }
  }
  return 10000;
}

struct UnifyFlags {
  std::string file;
  bool all = false;
  bool decide = false;
  std::size_t max_branches = 10000;
  bool trace = false;
  bool json = false;
};

std::string failure_text(const BranchFailure& f) {
  if (f.failure.element != ElementFailure::None) {
    return "element equations unsolvable (" + std::string(to_string(f.failure.element)) +
           "): " + f.failure.reason;
  }
  return f.failure.reason;
}

int cmd_unify(const UnifyFlags& flags, std::istream& in, std::ostream& out) {
  Problem p = parse_problem(read_input(flags.file, in));
  UnifyOptions opts;
  opts.decide = flags.decide;
  opts.max_branches = flags.max_branches;
  opts.record_trace = flags.trace;
  UnifyResult r = unify(p, opts);

  std::vector<std::string> reasons;
  for (const auto& f : r.failures) {
    std::string s = failure_text(f);
    if (std::find(reasons.begin(), reasons.end(), s) == reasons.end()) reasons.push_back(s);
  }

  if (flags.json) {
    nlohmann::json j;
    j["theory"] = std::string(to_string(p.theory));
    j["unifiable"] = r.unifiable();
    j["mode"] = flags.decide ? "decide" : "all";
    j["branches"] = r.branches;
    j["unifiers"] = nlohmann::json::array();
    for (const auto& u : r.unifiers) {
      nlohmann::json b = nlohmann::json::object();
      for (const auto& [v, img] : u.substitution.bindings()) b[v->name()] = show(img, p.theory);
      nlohmann::json params = nlohmann::json::array();
      for (const auto& v : u.parameters) params.push_back(v->name());
      j["unifiers"].push_back({{"bindings", b}, {"parameters", params}});
    }
    j["failures"] = reasons;
    if (flags.trace) {
      nlohmann::json tr = nlohmann::json::array();
      for (const auto& t : r.trace) tr.push_back(t.to_string());
      j["trace"] = tr;
    }
    out << j.dump(2) << '\n';
    return r.unifiable() ? kExitUnifiable : kExitNotUnifiable;
  }

  if (flags.trace) {
    out << "standard form:\n";
    for (const auto& e : p.equations) out << "  " << to_string(e) << '\n';
    out << "propagation graph:\n";
    std::istringstream dump(PropagationGraph::build(p.equations).dump());
    for (std::string line; std::getline(dump, line);) out << "  " << line << '\n';
    out << "trace:\n";
    for (const auto& t : r.trace) out << "  " << t.to_string() << '\n';
  }
  if (!r.unifiable()) {
    out << "not unifiable\n";
    for (const auto& s : reasons) out << "  " << s << '\n';
    return kExitNotUnifiable;
  }
  out << "unifiable: " << r.unifiers.size() << " unifier" << (r.unifiers.size() == 1 ? "" : "s")
      << '\n';
  for (std::size_t i = 0; i < r.unifiers.size(); ++i) {
    const Unifier& u = r.unifiers[i];
    out << "unifier " << i + 1 << ":\n";
    if (u.substitution.empty()) out << "  (identity)\n";
    for (const auto& [v, img] : u.substitution.bindings()) {
      out << "  " << v->name() << " := " << show(img, p.theory) << '\n';
    }
    if (!u.parameters.empty()) {
      out << "  parameters:";
      for (std::size_t k = 0; k < u.parameters.size(); ++k) {
        out << (k ? ", " : " ") << u.parameters[k]->name();
      }
      out << '\n';
    }
  }
  return kExitUnifiable;
}

int cmd_normalize(const std::string& file, const std::string& theory_name, std::istream& in,
                  std::ostream& out) {
  auto theory = parse_theory(theory_name);
  if (!theory) throw InconsistentInput("unknown theory '" + theory_name + "'");
  TermText t = parse_term_text(read_input(file, in));
  out << to_string(normalize(t.term, *theory)) << '\n';
  return 0;
}

int cmd_encode(const std::string& file, std::istream& in, std::ostream& out) {
  out << print_problem(encode_1in3(parse_clauses(read_input(file, in))));
  return 0;
}

// Atoms of a bc1 normal form that the intruder cannot build from public
// names and intercepted blocks.
Term secret_part(const Term& z, const std::set<std::string>& public_names,
                 const std::vector<Term>& intercepted) {
  std::function<bool(const Term&)> known = [&](const Term& t) {
    if (t->is_const()) return public_names.count(t->name()) > 0;
    for (const auto& c : intercepted) {
      if (equal(c, t)) return true;
    }
    if (t->kind() == Kind::Enc || t->kind() == Kind::Xor) {
      return std::all_of(t->args().begin(), t->args().end(), known);
    }
    return false;
  };
  std::vector<Term> atoms = z->kind() == Kind::Xor ? z->args() : std::vector<Term>{z};
  std::vector<Term> rest;
  for (const auto& a : atoms) {
    if (!known(a)) rest.push_back(a);
  }
  return xor_of(std::move(rest));
}

int cmd_attack(const std::string& theory_name, bool namestamp_second, std::ostream& out) {
  auto theory = parse_theory(theory_name);
  if (!theory || (*theory != TheoryId::BC0 && *theory != TheoryId::BC1)) {
    throw InconsistentInput("attack-demo supports bc0 and bc1 only");
  }
  const std::set<std::string> consts{"A", "B", "I", "m", "v", "w"};
  const Term A = constant("A"), I = constant("I"), m = constant("m"), v = constant("v"),
             w = constant("w"), z = element_var("z");
  // A sends the encrypted body to B; the intruder replays its blocks.
  std::vector<Term> sent = namestamp_second ? std::vector<Term>{m, A} : std::vector<Term>{A, m};
  // Unfolded with h kept symbolic; equal to the bc1 normal form modulo bc1.
  Term body = normalize(bc(list_of(std::span<const Term>(sent)), v), TheoryId::BC0);
  std::vector<Term> blocks = *as_list(body);
  Term lhs = namestamp_second ? bc(list_of({z, I}), w) : bc(list_of({I, z}), w);
  Term rhs = namestamp_second ? list_of({blocks[0], h(I, blocks[0])})
                              : cons(h(I, w), list_of({blocks[1]}));

  ProblemText text;
  text.theory = *theory;
  text.constants = consts;
  text.equations.emplace_back(lhs, rhs);
  out << "scenario: namestamp as " << (namestamp_second ? "second" : "first")
      << " block, theory " << to_string(*theory) << '\n';
  out << "A -> B encrypted body: " << show(body, *theory) << '\n';
  out << "B solves: " << to_string(lhs) << " =? " << to_string(rhs) << '\n';

  Problem p = to_standard_form(text.equations, text.theory, text.constants);
  UnifyResult r = unify(p);
  if (!r.unifiable()) {
    out << "no unifier: B cannot accept the intruder's message\n";
    out << "FAIL: no attack found\n";
    return kExitNotUnifiable;
  }
  const Term* zi = r.unifiers.front().substitution.image("z");
  Term zv = zi ? *zi : z;
  out << "z := " << show(zv, *theory) << '\n';

  std::set<std::string> public_names{"A", "B", "I", "w"};
  std::vector<Term> intercepted;
  for (const auto& b : blocks) intercepted.push_back(normalize(b, *theory));
  Term leaked = secret_part(normalize(zv, *theory), public_names, intercepted);
  if (equal(leaked, m)) {
    const Term expected = xor_of({m, h(A, v), h(I, w)});
    const bool pass = *theory == TheoryId::BC1 && equal_modulo(zv, expected, *theory);
    out << "intruder recovers m by removing known blocks from z\n";
    out << (pass ? "PASS" : "FAIL") << ": z = m ^ h(A, v) ^ h(I, w) modulo bc1\n";
    return pass ? kExitUnifiable : kExitNotUnifiable;
  }
  out << "no attack: intruder obtains only " << show(leaked, *theory) << '\n';
  return kExitNotUnifiable;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::istream& in, std::ostream& out,
            std::ostream& err) {
  CLI::App app{"Unification modulo block-chaining theories"};
  app.name("chainunify");
  app.require_subcommand(1);

  UnifyFlags uf;
  uf.max_branches = default_max_branches();
  auto* unify_cmd = app.add_subcommand("unify", "Solve a problem file");
  unify_cmd->add_option("file", uf.file, "Problem file ('-' or omitted: stdin)");
  auto* all_flag = unify_cmd->add_flag("--all", uf.all, "Enumerate the complete unifier set");
  unify_cmd->add_flag("--decide", uf.decide, "Stop at the first unifier, nil-completed")
      ->excludes(all_flag);
  unify_cmd->add_option("--max-branches", uf.max_branches, "Search branch cap")
      ->check(CLI::PositiveNumber);
  unify_cmd->add_flag("--trace", uf.trace, "Print the standard form, graph and rule trace");
  unify_cmd->add_flag("--json", uf.json, "Machine-readable output");

  std::string norm_file, norm_theory = "bc0";
  auto* norm_cmd = app.add_subcommand("normalize", "Print the normal form of a term");
  norm_cmd->add_option("file", norm_file, "Term file ('-' or omitted: stdin)");
  norm_cmd->add_option("--theory", norm_theory, "bc0, bc1, dbc, dbc-prime or dbc-plus");

  std::string enc_file;
  auto* enc_cmd = app.add_subcommand("encode-1in3", "Encode positive 1-in-3 clauses as a dbc problem");
  enc_cmd->add_option("file", enc_file, "Clause file ('-' or omitted: stdin)");

  std::string attack_theory = "bc1";
  bool namestamp_second = false;
  auto* attack_cmd = app.add_subcommand("attack-demo", "Replay the CBC namestamp attack");
  attack_cmd->add_option("--theory", attack_theory, "bc1 (default) or bc0");
  attack_cmd->add_flag("--namestamp-second", namestamp_second,
                       "Place the sender's name in the second block");

  std::vector<std::string> rev(args.rbegin(), args.rend());
  try {
    app.parse(rev);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : kExitUsage;
  }

  try {
    if (unify_cmd->parsed()) return cmd_unify(uf, in, out);
    if (norm_cmd->parsed()) return cmd_normalize(norm_file, norm_theory, in, out);
    if (enc_cmd->parsed()) return cmd_encode(enc_file, in, out);
    if (attack_cmd->parsed()) return cmd_attack(attack_theory, namestamp_second, out);
  } catch (const BudgetExceeded& e) {
    err << "budget exceeded: " << e.what() << '\n';
    return kExitBudget;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  }
  return kExitUsage;
}

}  // namespace chainunify
