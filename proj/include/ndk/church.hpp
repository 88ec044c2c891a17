#pragma once

// The untyped λ-calculus with Church's three conversion rules:
//
//   I    λx[M]        -> λy[M{y/x}]      y not occurring in M
//   II   {λx[M]}(N)   -> M{N/x}          (contraction)
//   III  M{N/x}       -> {λx[M]}(N)      (expansion, the inverse of II)
//
// The proviso of II and III (bound variables of M distinct from x and from
// the free variables of N) is met by renaming bound variables of M with Rule I
// before the rule fires; those renamings are not recorded as steps.

#include <cstddef>
#include <deque>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "ndk/lexer.hpp"
#include "ndk/syntax.hpp"

namespace ndk::lambda {

enum class UKind { Var, Lam, App };

struct UNode;
using UTerm = std::shared_ptr<const UNode>;

struct UNode {
  UKind kind;
  Name name;  // variable or binder
  UTerm fn;   // Lam body, App function
  UTerm arg;  // App argument
};

inline UTerm var(Name x) { return std::make_shared<const UNode>(UNode{UKind::Var, std::move(x), nullptr, nullptr}); }
inline UTerm abs(Name x, UTerm body) {
  return std::make_shared<const UNode>(UNode{UKind::Lam, std::move(x), std::move(body), nullptr});
}
inline UTerm apply(UTerm f, UTerm a) {
  return std::make_shared<const UNode>(UNode{UKind::App, {}, std::move(f), std::move(a)});
}

inline std::size_t size(const UTerm& t) {
  switch (t->kind) {
    case UKind::Var: return 1;
    case UKind::Lam: return 1 + size(t->fn);
    case UKind::App: return 1 + size(t->fn) + size(t->arg);
  }
  return 1;
}

inline UTerm child(const UTerm& t, int k) {
  if (t->kind == UKind::Lam && k == 0) return t->fn;
  if (t->kind == UKind::App) return k == 0 ? t->fn : k == 1 ? t->arg : nullptr;
  return nullptr;
}

inline UTerm at(const UTerm& t, const Path& p) {
  UTerm cur = t;
  for (int k : p) {
    cur = child(cur, k);
    if (!cur) return nullptr;
  }
  return cur;
}

inline UTerm replaceAt(const UTerm& t, const Path& p, const UTerm& with, std::size_t depth = 0) {
  if (depth == p.size()) return with;
  if (t->kind == UKind::Lam) return abs(t->name, replaceAt(t->fn, p, with, depth + 1));
  if (p[depth] == 0) return apply(replaceAt(t->fn, p, with, depth + 1), t->arg);
  return apply(t->fn, replaceAt(t->arg, p, with, depth + 1));
}

inline void freeVars(const UTerm& t, std::set<Name>& out, std::multiset<Name>& bound) {
  switch (t->kind) {
    case UKind::Var:
      if (!bound.count(t->name)) out.insert(t->name);
      return;
    case UKind::Lam:
      bound.insert(t->name);
      freeVars(t->fn, out, bound);
      bound.erase(bound.find(t->name));
      return;
    case UKind::App:
      freeVars(t->fn, out, bound);
      freeVars(t->arg, out, bound);
      return;
  }
}

inline std::set<Name> freeVars(const UTerm& t) {
  std::set<Name> out;
  std::multiset<Name> bound;
  freeVars(t, out, bound);
  return out;
}

inline void boundVars(const UTerm& t, std::set<Name>& out) {
  if (t->kind == UKind::Lam) {
    out.insert(t->name);
    boundVars(t->fn, out);
  } else if (t->kind == UKind::App) {
    boundVars(t->fn, out);
    boundVars(t->arg, out);
  }
}

inline void allVars(const UTerm& t, std::set<Name>& out) {
  out.insert(t->name);
  if (t->fn) allVars(t->fn, out);
  if (t->arg) allVars(t->arg, out);
}

inline bool alphaEq(const UTerm& a, const UTerm& b, std::vector<std::pair<Name, Name>>& env) {
  if (a->kind != b->kind) return false;
  switch (a->kind) {
    case UKind::Var:
      return detail::sameVar(env, a->name, b->name);
    case UKind::Lam: {
      env.emplace_back(a->name, b->name);
      bool ok = alphaEq(a->fn, b->fn, env);
      env.pop_back();
      return ok;
    }
    case UKind::App:
      return alphaEq(a->fn, b->fn, env) && alphaEq(a->arg, b->arg, env);
  }
  return false;
}

inline bool alphaEq(const UTerm& a, const UTerm& b) {
  std::vector<std::pair<Name, Name>> env;
  return alphaEq(a, b, env);
}

/// Canonical nameless rendering: equal strings iff α-equivalent terms.
inline std::string alphaKey(const UTerm& t, std::vector<Name>& env) {
  switch (t->kind) {
    case UKind::Var:
      for (std::size_t i = env.size(); i-- > 0;)
        if (env[i] == t->name) return std::to_string(env.size() - 1 - i);
      return "'" + t->name;
    case UKind::Lam: {
      env.push_back(t->name);
      std::string s = "L(" + alphaKey(t->fn, env) + ")";
      env.pop_back();
      return s;
    }
    case UKind::App:
      return "A(" + alphaKey(t->fn, env) + "," + alphaKey(t->arg, env) + ")";
  }
  return "";
}

inline std::string alphaKey(const UTerm& t) {
  std::vector<Name> env;
  return alphaKey(t, env);
}

/// Capture-avoiding substitution M{N/x}.
inline UTerm subst(const UTerm& m, const Name& x, const UTerm& n, const std::set<Name>& fvN) {
  switch (m->kind) {
    case UKind::Var:
      return m->name == x ? n : m;
    case UKind::App:
      return apply(subst(m->fn, x, n, fvN), subst(m->arg, x, n, fvN));
    case UKind::Lam: {
      if (m->name == x) return m;
      std::set<Name> fvBody = freeVars(m->fn);
      if (!fvBody.count(x)) return m;
      if (!fvN.count(m->name)) return abs(m->name, subst(m->fn, x, n, fvN));
      std::set<Name> avoid = fvN;
      avoid.insert(fvBody.begin(), fvBody.end());
      avoid.insert(x);
      Name y = freshName(m->name, avoid);
      UTerm body = subst(m->fn, m->name, var(y), {y});
      return abs(y, subst(body, x, n, fvN));
    }
  }
  return m;
}

inline UTerm subst(const UTerm& m, const Name& x, const UTerm& n) { return subst(m, x, n, freeVars(n)); }

/// Rename bound variables of `m` that clash with `avoid` (Rule I, silently).
inline UTerm renameBound(const UTerm& m, const std::set<Name>& avoid) {
  switch (m->kind) {
    case UKind::Var:
      return m;
    case UKind::App:
      return apply(renameBound(m->fn, avoid), renameBound(m->arg, avoid));
    case UKind::Lam: {
      UTerm body = renameBound(m->fn, avoid);
      if (!avoid.count(m->name)) return abs(m->name, body);
      std::set<Name> used = avoid;
      allVars(body, used);
      Name y = freshName(m->name, used);
      return abs(y, subst(body, m->name, var(y)));
    }
  }
  return m;
}

// ---------------------------------------------------------------------------
// Rules

enum class ConvRule { I, II, III };

inline const char* ruleName(ConvRule r) {
  switch (r) {
    case ConvRule::I: return "I";
    case ConvRule::II: return "II";
    case ConvRule::III: return "III";
  }
  return "?";
}

struct ConvStep {
  ConvRule rule;
  Path position;
  UTerm before;  // whole term
  UTerm after;   // whole term
};

class NotARedex : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class IllFormedExpansion : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Redex {
  Path position;
  bool provisoHolds;  // Rule II applies without renaming bound variables first
};

inline bool isRedex(const UTerm& t) { return t->kind == UKind::App && t->fn->kind == UKind::Lam; }

inline bool proviso(const UTerm& m, const Name& x, const UTerm& n) {
  std::set<Name> bv;
  boundVars(m, bv);
  if (bv.count(x)) return false;
  for (const auto& v : freeVars(n))
    if (bv.count(v)) return false;
  return true;
}

namespace detail {
inline void scan(const UTerm& t, Path& at, std::vector<Redex>& out) {
  if (isRedex(t)) out.push_back({at, proviso(t->fn->fn, t->fn->name, t->arg)});
  for (int k = 0; k < 2; ++k) {
    UTerm c = child(t, k);
    if (!c) continue;
    at.push_back(k);
    scan(c, at, out);
    at.pop_back();
  }
}
}  // namespace detail

/// Every β-redex, leftmost-outermost first.
inline std::vector<Redex> redexes(const UTerm& t) {
  std::vector<Redex> out;
  Path at;
  detail::scan(t, at, out);
  return out;
}

/// Payload for Rule III: the subterm is to be read as body{arg/x}. For
/// Rule I only `x` is used, as the new bound variable name.
struct Expansion {
  UTerm body;
  Name x;
  UTerm arg;
};

inline UTerm contract(const UTerm& redex) { return subst(redex->fn->fn, redex->fn->name, redex->arg); }

inline std::pair<UTerm, ConvStep> step(const UTerm& t, const Path& pos, ConvRule rule,
                                       const std::optional<Expansion>& payload = std::nullopt) {
  UTerm sub = at(t, pos);
  if (!sub) throw NotARedex("no subterm at " + formatPath(pos));
  UTerm replaced;
  switch (rule) {
    case ConvRule::II:
      if (!isRedex(sub)) throw NotARedex("no β-redex at " + formatPath(pos));
      replaced = contract(sub);
      break;
    case ConvRule::III: {
      if (!payload) throw IllFormedExpansion("Rule III needs an expansion payload");
      std::set<Name> avoid = freeVars(payload->arg);
      avoid.insert(payload->x);
      UTerm body = renameBound(payload->body, avoid);
      if (!alphaEq(subst(body, payload->x, payload->arg), sub))
        throw IllFormedExpansion("payload does not reproduce the subterm at " + formatPath(pos));
      replaced = apply(abs(payload->x, body), payload->arg);
      break;
    }
    case ConvRule::I: {
      if (sub->kind != UKind::Lam) throw NotARedex("Rule I needs an abstraction at " + formatPath(pos));
      if (!payload) throw IllFormedExpansion("Rule I needs the new variable name");
      std::set<Name> vars;
      allVars(sub->fn, vars);
      if (vars.count(payload->x) && payload->x != sub->name)
        throw IllFormedExpansion(payload->x + " occurs in the body");
      replaced = abs(payload->x, subst(sub->fn, sub->name, var(payload->x)));
      break;
    }
  }
  UTerm after = replaceAt(t, pos, replaced);
  return {after, ConvStep{rule, pos, t, after}};
}

/// The Rule III step undoing a Rule II step (or vice versa).
inline ConvStep mirror(const ConvStep& s) {
  if (s.rule == ConvRule::II) {
    UTerm redex = at(s.before, s.position);
    Expansion e{redex->fn->fn, redex->fn->name, redex->arg};
    return step(s.after, s.position, ConvRule::III, e).second;
  }
  if (s.rule == ConvRule::III) return step(s.after, s.position, ConvRule::II).second;
  throw std::invalid_argument("Rule I steps are their own mirror");
}

// ---------------------------------------------------------------------------
// Normalization

enum class Strategy { NormalOrder, Applicative };

struct NormalizeResult {
  UTerm term;
  std::vector<ConvStep> steps;
  bool timedOut = false;
};

inline constexpr std::size_t kDefaultMaxSteps = 10000;

namespace detail {
inline bool innermost(const UTerm& t, Path& at) {
  for (int k = 0; k < 2; ++k) {
    UTerm c = child(t, k);
    if (!c) continue;
    at.push_back(k);
    if (innermost(c, at)) return true;
    at.pop_back();
  }
  return isRedex(t);
}
}  // namespace detail

inline std::optional<Path> nextRedex(const UTerm& t, Strategy s) {
  if (s == Strategy::NormalOrder) {
    auto all = redexes(t);
    if (all.empty()) return std::nullopt;
    return all.front().position;
  }
  Path at;
  if (detail::innermost(t, at)) return at;
  return std::nullopt;
}

inline NormalizeResult normalize(const UTerm& t, std::size_t maxSteps = kDefaultMaxSteps,
                                 Strategy strategy = Strategy::NormalOrder) {
  NormalizeResult out{t, {}, false};
  while (auto pos = nextRedex(out.term, strategy)) {
    if (out.steps.size() >= maxSteps) {
      out.timedOut = true;
      break;
    }
    auto [next, s] = step(out.term, *pos, ConvRule::II);
    out.term = next;
    out.steps.push_back(std::move(s));
  }
  return out;
}

/// Re-apply recorded steps from `initial`; throws NotARedex or
/// IllFormedExpansion if a step no longer applies.
inline UTerm replay(const UTerm& initial, const std::vector<ConvStep>& steps) {
  UTerm cur = initial;
  for (const auto& s : steps) {
    if (!alphaEq(cur, s.before)) throw NotARedex("trace does not start from the current term");
    if (s.rule == ConvRule::II) {
      cur = step(cur, s.position, ConvRule::II).first;
    } else if (s.rule == ConvRule::III) {
      UTerm redex = at(s.after, s.position);
      cur = step(cur, s.position, ConvRule::III, Expansion{redex->fn->fn, redex->fn->name, redex->arg}).first;
    } else {
      cur = step(cur, s.position, ConvRule::I, Expansion{nullptr, at(s.after, s.position)->name, nullptr}).first;
    }
  }
  return cur;
}

// ---------------------------------------------------------------------------
// Convertibility

struct Conversion {
  bool yes = false;
  std::vector<ConvStep> steps;  // from a to b: contractions, then expansions
  UTerm meeting;                // common reduct (up to α)
};

/// Bounded bidirectional search for a common reduct. `budget` bounds the
/// number of contraction steps explored from each side; `maxTerms` bounds
/// the number of distinct terms visited per side. Never answers yes falsely;
/// a no-answer means "unknown".
inline Conversion convertible(const UTerm& a, const UTerm& b, std::size_t budget, std::size_t maxTerms = 4096) {
  struct Visit {
    UTerm term;
    int parent;
    std::optional<ConvStep> via;
    std::size_t depth;
  };
  auto explore = [&](const UTerm& start) {
    std::vector<Visit> seen{{start, -1, std::nullopt, 0}};
    std::unordered_map<std::string, int> index{{alphaKey(start), 0}};
    for (std::size_t i = 0; i < seen.size() && seen.size() < maxTerms; ++i) {
      if (seen[i].depth >= budget) continue;
      UTerm cur = seen[i].term;
      for (const auto& r : redexes(cur)) {
        auto [next, s] = step(cur, r.position, ConvRule::II);
        auto key = alphaKey(next);
        if (index.count(key)) continue;
        index.emplace(key, static_cast<int>(seen.size()));
        seen.push_back({next, static_cast<int>(i), s, seen[i].depth + 1});
        if (seen.size() >= maxTerms) break;
      }
    }
    return std::pair{std::move(seen), std::move(index)};
  };
  auto [left, leftIndex] = explore(a);
  auto [right, rightIndex] = explore(b);

  auto pathTo = [](const std::vector<Visit>& v, int i) {
    std::vector<ConvStep> out;
    for (; v[i].parent >= 0; i = v[i].parent) out.push_back(*v[i].via);
    return std::vector<ConvStep>(out.rbegin(), out.rend());
  };

  // Prefer the meeting point with the shortest combined path.
  int bestL = -1, bestR = -1;
  std::size_t bestLen = SIZE_MAX;
  for (const auto& [key, li] : leftIndex) {
    auto it = rightIndex.find(key);
    if (it == rightIndex.end()) continue;
    std::size_t len = left[li].depth + right[it->second].depth;
    if (len < bestLen || (len == bestLen && (li < bestL || (li == bestL && it->second < bestR)))) {
      bestLen = len;
      bestL = li;
      bestR = it->second;
    }
  }
  if (bestL < 0) return {};

  Conversion out;
  out.yes = true;
  out.meeting = left[bestL].term;
  out.steps = pathTo(left, bestL);
  std::vector<ConvStep> fromB = pathTo(right, bestR);
  // Walk back from the meeting point to b by expansions; the first one starts
  // at b's reduct, which is α-equal to the meeting term.
  for (auto it = fromB.rbegin(); it != fromB.rend(); ++it) out.steps.push_back(mirror(*it));
  return out;
}

// ---------------------------------------------------------------------------
// Church numerals

inline UTerm numeral(unsigned n) {
  UTerm body = var("x");
  for (unsigned i = 0; i < n; ++i) body = apply(var("f"), body);
  return abs("f", abs("x", body));
}

/// n if `t` is α-equal to the numeral n.
inline std::optional<unsigned> asNumeral(const UTerm& t) {
  if (t->kind != UKind::Lam || t->fn->kind != UKind::Lam) return std::nullopt;
  const Name& f = t->name;
  const Name& x = t->fn->name;
  if (f == x) return std::nullopt;
  unsigned n = 0;
  UTerm cur = t->fn->fn;
  while (cur->kind == UKind::App) {
    if (cur->fn->kind != UKind::Var || cur->fn->name != f) return std::nullopt;
    cur = cur->arg;
    ++n;
  }
  if (cur->kind != UKind::Var || cur->name != x) return std::nullopt;
  return n;
}

inline UTerm plusCombinator() {
  // λm.λn.λf.λx. m f (n f x)
  return abs("m", abs("n", abs("f", abs("x", apply(apply(var("m"), var("f")),
                                                   apply(apply(var("n"), var("f")), var("x")))))));
}

inline UTerm timesCombinator() {
  // λm.λn.λf. m (n f)
  return abs("m", abs("n", abs("f", apply(var("m"), apply(var("n"), var("f"))))));
}

// ---------------------------------------------------------------------------
// Concrete syntax: `\x y. M`, juxtaposition, parentheses, `#n` numerals,
// and infix `+` / `*` on numerals (lowest precedence, `*` tighter).

namespace detail {
class LParser {
 public:
  explicit LParser(TokenStream& ts) : ts_(ts) {}

  UTerm expr() {
    if (ts_.accept("\\") || ts_.accept("λ")) {
      std::vector<Name> xs{ts_.ident()};
      while (ts_.peek().kind == Token::Kind::Ident) xs.push_back(ts_.ident());
      ts_.expect(".");
      UTerm body = expr();
      for (auto it = xs.rbegin(); it != xs.rend(); ++it) body = abs(*it, body);
      return body;
    }
    return sum();
  }

 private:
  UTerm sum() {
    UTerm t = product();
    while (ts_.accept("+")) t = apply(apply(plusCombinator(), t), product());
    return t;
  }
  UTerm product() {
    UTerm t = application();
    while (ts_.accept("*")) t = apply(apply(timesCombinator(), t), application());
    return t;
  }
  UTerm application() {
    UTerm t = atom();
    while (startsAtom()) t = apply(t, atom());
    // A trailing abstraction is the last argument.
    if (ts_.peek().is("\\") || ts_.peek().is("λ")) t = apply(t, expr());
    return t;
  }
  bool startsAtom() const {
    const Token& t = ts_.peek();
    return t.kind == Token::Kind::Ident || t.is("(") || t.is("#");
  }
  UTerm atom() {
    if (ts_.peek().kind == Token::Kind::Ident) return var(ts_.ident());
    if (ts_.accept("(")) {
      UTerm t = expr();
      ts_.expect(")");
      return t;
    }
    if (ts_.accept("#")) {
      if (ts_.peek().kind != Token::Kind::Number) ts_.fail({"numeral"});
      return numeral(static_cast<unsigned>(std::stoul(ts_.next().text)));
    }
    if (ts_.peek().is("\\") || ts_.peek().is("λ")) return expr();
    ts_.fail({"variable", "'('", "'#'", "'\\'"});
  }

  TokenStream& ts_;
};
}  // namespace detail

inline UTerm parse(std::string_view src, int line = 1) {
  TokenStream ts(tokenize(src, line));
  detail::LParser p(ts);
  UTerm t = p.expr();
  if (!ts.atEnd()) ts.fail({"end of input"});
  return t;
}

struct TermLine {
  int line;
  std::string text;
  UTerm term;
};

/// One term per line; blank lines and `#` comments are skipped.
inline std::vector<TermLine> parseLines(std::string_view src) {
  std::vector<TermLine> out;
  int lineNo = 0;
  std::size_t start = 0;
  while (start < src.size()) {
    std::size_t end = src.find('\n', start);
    if (end == std::string_view::npos) end = src.size();
    std::string_view line = src.substr(start, end - start);
    start = end + 1;
    ++lineNo;
    if (tokenize(line, lineNo).size() == 1) continue;
    out.push_back({lineNo, std::string(line), parse(line, lineNo)});
  }
  return out;
}

namespace detail {
inline void show(std::string& out, const UTerm& t, bool numerals) {
  if (numerals)
    if (auto n = asNumeral(t)) {
      out += "#" + std::to_string(*n);
      return;
    }
  switch (t->kind) {
    case UKind::Var:
      out += t->name;
      return;
    case UKind::Lam:
      out += "\\" + t->name + ". ";
      show(out, t->fn, numerals);
      return;
    case UKind::App: {
      bool fnParens = t->fn->kind == UKind::Lam && !(numerals && asNumeral(t->fn));
      if (fnParens) out += '(';
      show(out, t->fn, numerals);
      if (fnParens) out += ')';
      out += ' ';
      bool argParens = t->arg->kind != UKind::Var && !(numerals && asNumeral(t->arg));
      if (argParens) out += '(';
      show(out, t->arg, numerals);
      if (argParens) out += ')';
      return;
    }
  }
}
}  // namespace detail

/// Render in the concrete syntax; with `numerals`, numeral subterms print as `#n`.
inline std::string show(const UTerm& t, bool numerals = false) {
  std::string out;
  detail::show(out, t, numerals);
  return out;
}

}  // namespace ndk::lambda
