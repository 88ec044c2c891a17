#pragma once

// Concrete syntax for formulas, proof terms, judgements and problem files.
//
//   formulas  P(x)  _|_  A & B  A | B  A -> B  all x:D. A  some x:D. A  Id{D}(a,b)
//   terms     <a,b>  fst(p)  snd(p)  inl(a)  inr(b)  case(p, x.f, y.g)  \x. b
//             app(f,a)  /\x:D. g  extr(f,t)  eps(x. g, s)  inst(p, h.t.d)
//             refl(a,b)  refl[t](a,b)  rewr(p, t.d)  abort(p)
//
// `->` is right-associative; `&` binds tighter than `|`, which binds tighter
// than `->`. Quantifier and abstraction bodies extend as far right as possible.
//
// Problem files hold declarations followed by judgements, one per line:
//
//   sort D
//   const a b : D
//   pred P Q : D
//   pred R : D, D
//   pred A B
//   p : A & B, x : D |- <snd(p), fst(p)> : B & A

#include <fstream>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include "ndk/checker.hpp"
#include "ndk/lexer.hpp"
#include "ndk/syntax.hpp"

namespace ndk {

namespace detail {

class Parser {
 public:
  Parser(TokenStream& ts, const Signature* sig) : ts_(ts), sig_(sig) {}

  // ---- individuals -------------------------------------------------------

  Individual individual() {
    Token t = ts_.peek();
    Name n = ts_.ident();
    for (auto it = boundInd_.rbegin(); it != boundInd_.rend(); ++it)
      if (*it == n) return ivar(n);
    if (sig_)
      if (auto s = sig_->constantSort(n)) return iconst(n, *s);
    (void)t;
    return ivar(n);
  }

  Sort sort() {
    Token t = ts_.peek();
    Name n = ts_.ident();
    if (sig_ && !sig_->hasSort({n})) throw ParseError(t.line, t.col, {"declared sort"}, "'" + n + "'");
    return {n};
  }

  // ---- formulas ----------------------------------------------------------

  Formula formula() {
    Formula lhs = disjunction();
    if (ts_.accept("->")) return implies(lhs, formula());
    return lhs;
  }

  Formula disjunction() {
    Formula f = conjunction();
    while (ts_.accept("|")) f = disj(f, conjunction());
    return f;
  }

  Formula conjunction() {
    Formula f = primary();
    while (ts_.accept("&")) f = conj(f, primary());
    return f;
  }

  Formula primary() {
    const Token& t = ts_.peek();
    if (ts_.accept("(")) {
      Formula f = formula();
      ts_.expect(")");
      return f;
    }
    if (ts_.accept("_|_")) return bottom();
    if (t.kind == Token::Kind::Ident && (t.text == "all" || t.text == "some") &&
        ts_.peek(1).kind == Token::Kind::Ident && ts_.peek(2).is(":")) {
      bool all = ts_.next().text == "all";
      Name x = ts_.ident();
      ts_.expect(":");
      Sort s = sort();
      ts_.expect(".");
      boundInd_.push_back(x);
      Formula body = formula();
      boundInd_.pop_back();
      return all ? forall(x, s, body) : exists(x, s, body);
    }
    if (t.is("Id") && ts_.peek(1).is("{")) {
      ts_.next();
      ts_.expect("{");
      Sort s = sort();
      ts_.expect("}");
      ts_.expect("(");
      Individual a = individual();
      ts_.expect(",");
      Individual b = individual();
      ts_.expect(")");
      return idAt(s, a, b);
    }
    if (t.kind == Token::Kind::Ident) {
      Token tok = ts_.next();
      if (sig_ && !sig_->predicates.count(tok.text))
        throw ParseError(tok.line, tok.col, {"declared predicate"}, "'" + tok.text + "'");
      std::vector<Individual> args;
      if (ts_.accept("(")) {
        args.push_back(individual());
        while (ts_.accept(",")) args.push_back(individual());
        ts_.expect(")");
      }
      if (sig_) {
        std::size_t arity = sig_->predicates.at(tok.text).size();
        if (args.size() != arity)
          throw ParseError(tok.line, tok.col, {std::to_string(arity) + " arguments to " + tok.text},
                           std::to_string(args.size()));
      }
      return atom(tok.text, std::move(args));
    }
    ts_.fail({"formula"});
  }

  // ---- proof terms -------------------------------------------------------

  Term term() {
    const Token& t = ts_.peek();
    if (ts_.accept("\\") || ts_.accept("λ")) {
      Name x = ts_.ident();
      ts_.expect(".");
      return lam(x, term());
    }
    if (ts_.accept("/\\")) {
      Name x = ts_.ident();
      ts_.expect(":");
      Sort s = sort();
      ts_.expect(".");
      boundInd_.push_back(x);
      Term body = term();
      boundInd_.pop_back();
      return tlam(x, s, body);
    }
    if (ts_.accept("<")) {
      Term a = term();
      ts_.expect(",");
      Term b = term();
      ts_.expect(">");
      return pair(a, b);
    }
    if (ts_.accept("(")) {
      Term inner = term();
      ts_.expect(")");
      return inner;
    }
    if (t.kind != Token::Kind::Ident) ts_.fail({"proof term"});
    const bool call = ts_.peek(1).is("(") || (t.text == "refl" && ts_.peek(1).is("["));
    if (!call) return pvar(ts_.next().text);

    const std::string kw = ts_.next().text;
    if (kw == "refl") {
      Evidence ev = Evidence::empty();
      if (ts_.accept("[")) {
        ev = Evidence::variable(ts_.ident());
        ts_.expect("]");
      }
      ts_.expect("(");
      Individual a = individual();
      ts_.expect(",");
      Individual b = individual();
      ts_.expect(")");
      return idIntro(ev, a, b);
    }
    ts_.expect("(");
    Term out;
    if (kw == "fst" || kw == "snd" || kw == "inl" || kw == "inr" || kw == "abort") {
      Term p = term();
      out = kw == "fst" ? fst(p) : kw == "snd" ? snd(p) : kw == "inl" ? inl(p) : kw == "inr" ? inr(p) : abortOf(p);
    } else if (kw == "case") {
      Term p = term();
      ts_.expect(",");
      Name x = ts_.ident();
      ts_.expect(".");
      Term f = term();
      ts_.expect(",");
      Name y = ts_.ident();
      ts_.expect(".");
      Term g = term();
      out = caseOf(p, x, f, y, g);
    } else if (kw == "app") {
      out = term();
      ts_.expect(",");
      out = app(out, term());
      while (ts_.accept(",")) out = app(out, term());
    } else if (kw == "extr") {
      Term f = term();
      ts_.expect(",");
      out = extr(f, individual());
    } else if (kw == "eps") {
      Name x = ts_.ident();
      ts_.expect(".");
      boundInd_.push_back(x);
      Term g = term();
      boundInd_.pop_back();
      ts_.expect(",");
      out = exPair(x, g, individual());
    } else if (kw == "inst") {
      Term p = term();
      ts_.expect(",");
      Name h = ts_.ident();
      ts_.expect(".");
      Name w = ts_.ident();
      ts_.expect(".");
      boundInd_.push_back(w);
      Term d = term();
      boundInd_.pop_back();
      out = inst(p, h, w, d);
    } else if (kw == "rewr") {
      Term p = term();
      ts_.expect(",");
      Name v = ts_.ident();
      ts_.expect(".");
      out = rewr(p, v, term());
    } else {
      ts_.failAt(t, {"fst", "snd", "inl", "inr", "case", "app", "extr", "eps", "inst", "refl", "rewr", "abort"});
    }
    ts_.expect(")");
    return out;
  }

  // ---- judgements ----------------------------------------------------------

  Judgement judgement(std::shared_ptr<const Signature> sig) {
    Context ctx{std::move(sig), {}};
    if (!ts_.peek().is("|-")) {
      do {
        Name n = ts_.ident();
        ts_.expect(":");
        const Token& t = ts_.peek();
        bool isSort = t.kind == Token::Kind::Ident && sig_ && sig_->hasSort({t.text}) &&
                      (ts_.peek(1).is(",") || ts_.peek(1).is("|-"));
        if (isSort) {
          ctx.hyps.push_back({Hyp::Kind::Individual, n, nullptr, sort(), false});
        } else {
          ctx.hyps.push_back({Hyp::Kind::Proof, n, formula(), {}, false});
        }
      } while (ts_.accept(","));
    }
    ts_.expect("|-");
    Term t = term();
    ts_.expect(":");
    Formula f = formula();
    if (!ts_.atEnd()) ts_.fail({"end of line"});
    return {std::move(ctx), std::move(t), std::move(f)};
  }

 private:
  TokenStream& ts_;
  const Signature* sig_;
  std::vector<Name> boundInd_;
};

}  // namespace detail

/// Parse a formula. With a signature, predicates and sorts must be declared
/// and identifiers naming constants resolve to constants.
inline Formula parseFormula(std::string_view src, const Signature* sig = nullptr) {
  TokenStream ts(tokenize(src));
  detail::Parser p(ts, sig);
  Formula f = p.formula();
  if (!ts.atEnd()) ts.fail({"end of input"});
  return f;
}

inline Term parseTerm(std::string_view src, const Signature* sig = nullptr) {
  TokenStream ts(tokenize(src));
  detail::Parser p(ts, sig);
  Term t = p.term();
  if (!ts.atEnd()) ts.fail({"end of input"});
  return t;
}

inline Judgement parseJudgement(std::string_view src, std::shared_ptr<const Signature> sig, int line = 1) {
  TokenStream ts(tokenize(src, line));
  detail::Parser p(ts, sig.get());
  return p.judgement(sig);
}

struct ProblemLine {
  int line;
  std::string text;
  Judgement judgement;
};

struct ProblemFile {
  std::shared_ptr<const Signature> sig;
  std::vector<ProblemLine> judgements;
};

/// Parse a problem file. Declarations must precede their use; every name is
/// declared at most once across sorts, constants and predicates.
inline ProblemFile parseProblem(std::string_view src) {
  auto sig = std::make_shared<Signature>();
  ProblemFile out;
  std::set<Name> declared;
  auto declare = [&](const Token& t) {
    if (!declared.insert(t.text).second)
      throw ParseError(t.line, t.col, {"a fresh name"}, "duplicate declaration '" + t.text + "'");
  };

  int lineNo = 0;
  std::size_t start = 0;
  while (start <= src.size()) {
    std::size_t end = src.find('\n', start);
    if (end == std::string_view::npos) end = src.size();
    std::string_view line = src.substr(start, end - start);
    ++lineNo;
    start = end + 1;

    std::vector<Token> toks = tokenize(line, lineNo);
    if (toks.size() == 1) {
      if (end == src.size()) break;
      continue;
    }
    const Token& head = toks.front();
    if (head.kind == Token::Kind::Ident &&
        (head.text == "sort" || head.text == "const" || head.text == "pred")) {
      TokenStream ts(toks);
      ts.next();
      if (head.text == "sort") {
        do {
          Token t = ts.peek();
          sig->sorts.push_back({ts.ident()});
          declare(t);
        } while (!ts.atEnd());
      } else if (head.text == "const") {
        std::vector<Token> names;
        do names.push_back(ts.peek()), ts.ident();
        while (!ts.peek().is(":"));
        ts.expect(":");
        Token st = ts.peek();
        Sort s{ts.ident()};
        if (!sig->hasSort(s)) ts.failAt(st, {"declared sort"});
        for (const auto& n : names) {
          declare(n);
          sig->constants.emplace_back(n.text, s);
        }
        if (!ts.atEnd()) ts.fail({"end of line"});
      } else {
        std::vector<Token> names;
        do names.push_back(ts.peek()), ts.ident();
        while (!ts.atEnd() && !ts.peek().is(":"));
        std::vector<Sort> args;
        if (ts.accept(":")) {
          do {
            Token st = ts.peek();
            Sort s{ts.ident()};
            if (!sig->hasSort(s)) ts.failAt(st, {"declared sort"});
            args.push_back(s);
          } while (ts.accept(","));
          if (!ts.atEnd()) ts.fail({"',' or end of line"});
        }
        for (const auto& n : names) {
          declare(n);
          sig->predicates[n.text] = args;
        }
      }
    } else {
      TokenStream ts(toks);
      detail::Parser p(ts, sig.get());
      out.judgements.push_back({lineNo, std::string(line), p.judgement(sig)});
    }
    if (end == src.size()) break;
  }
  out.sig = sig;
  return out;
}

inline ProblemFile loadProblem(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parseProblem(ss.str());
}

/// Render a judgement back in the problem-file syntax.
inline std::string show(const Judgement& j, Notation n = Notation::Ascii) {
  std::string out;
  for (std::size_t i = 0; i < j.ctx.hyps.size(); ++i) {
    const Hyp& h = j.ctx.hyps[i];
    if (i) out += ", ";
    out += h.name + " : " + (h.kind == Hyp::Kind::Individual ? h.sort.name : show(h.formula, n));
  }
  out += out.empty() ? "|- " : " |- ";
  return out + show(j.term, n) + " : " + show(j.formula, n);
}

}  // namespace ndk
