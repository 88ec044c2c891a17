#pragma once

// Bidirectional checking of proof terms against formulas.
//
// Constructors are checked against the shape of the goal; variables and
// destructors synthesize. CASE, INST, REWR and ABORT never synthesize: their
// result formula comes from the enclosing goal. A destructor whose principal
// argument is itself a constructor (a β-redex) cannot synthesize that
// argument; in that case candidate formulas are drawn, in a fixed order, from
// the subformulas of the goal and the hypotheses.

#include <algorithm>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "ndk/print.hpp"
#include "ndk/rewrite.hpp"
#include "ndk/syntax.hpp"

namespace ndk {

struct Signature {
  std::vector<Sort> sorts;
  std::vector<std::pair<Name, Sort>> constants;  // declaration order
  std::map<Name, std::vector<Sort>> predicates;

  bool hasSort(const Sort& s) const { return std::find(sorts.begin(), sorts.end(), s) != sorts.end(); }

  std::optional<Sort> constantSort(const Name& n) const {
    for (const auto& [name, sort] : constants)
      if (name == n) return sort;
    return std::nullopt;
  }

  std::vector<Individual> constantsOf(const Sort& s) const {
    std::vector<Individual> out;
    for (const auto& [name, sort] : constants)
      if (sort == s) out.push_back(iconst(name, sort));
    return out;
  }
};

struct Hyp {
  enum class Kind { Proof, Individual };
  Kind kind = Kind::Proof;
  Name name;
  Formula formula;        // proof hypotheses
  Sort sort;              // individual hypotheses
  bool evidence = false;  // bound by REWR: usable only as refl[...] evidence
};

struct Context {
  std::shared_ptr<const Signature> sig = std::make_shared<const Signature>();
  std::vector<Hyp> hyps;

  const Hyp* find(const Name& n) const {
    for (auto it = hyps.rbegin(); it != hyps.rend(); ++it)
      if (it->name == n) return &*it;
    return nullptr;
  }

  std::set<Name> names() const {
    std::set<Name> out;
    for (const auto& h : hyps) out.insert(h.name);
    return out;
  }

  Context withProof(Name n, Formula f, bool evidence = false) const {
    Context c = *this;
    c.hyps.push_back({Hyp::Kind::Proof, std::move(n), std::move(f), {}, evidence});
    return c;
  }

  Context withIndividual(Name n, Sort s) const {
    Context c = *this;
    c.hyps.push_back({Hyp::Kind::Individual, std::move(n), nullptr, std::move(s), false});
    return c;
  }
};

struct Judgement {
  Context ctx;
  Term term;
  Formula formula;
};

enum class DiagKind {
  Mismatch,
  UnboundVariable,
  EigenvariableViolation,
  SortMismatch,
  IllFormedIdEvidence,
  NeedsAnnotation,
  IllFormedFormula,
  DuplicateHypothesis,
};

inline const char* diagName(DiagKind k) {
  switch (k) {
    case DiagKind::Mismatch: return "Mismatch";
    case DiagKind::UnboundVariable: return "UnboundVariable";
    case DiagKind::EigenvariableViolation: return "EigenvariableViolation";
    case DiagKind::SortMismatch: return "SortMismatch";
    case DiagKind::IllFormedIdEvidence: return "IllFormedIdEvidence";
    case DiagKind::NeedsAnnotation: return "NeedsAnnotation";
    case DiagKind::IllFormedFormula: return "IllFormedFormula";
    case DiagKind::DuplicateHypothesis: return "DuplicateHypothesis";
  }
  return "?";
}

struct Diagnostic {
  DiagKind kind;
  Path path;
  std::string message;
  Formula expected;  // Mismatch only
  Formula found;     // Mismatch only, may be null
  Name name;         // offending variable, when there is one

  std::string render() const {
    return std::string(diagName(kind)) + " at " + formatPath(path) + ": " + message;
  }
};

struct CheckResult {
  std::optional<Diagnostic> error;
  std::size_t work = 0;  // rule applications performed

  bool valid() const { return !error; }
};

struct SynthResult {
  Formula formula;
  std::optional<Diagnostic> error;
  std::size_t work = 0;

  bool valid() const { return !error; }
};

namespace detail {

struct Failure {
  Diagnostic diag;
};

inline Path child(const Path& p, int k) {
  Path out = p;
  out.push_back(k);
  return out;
}

inline Term renameProofVar(const Term& body, const Name& from, const Name& to) {
  Subst s;
  s.proof.emplace(from, pvar(to));
  s.evidence.emplace(from, Evidence::variable(to));
  return substitute(body, s);
}

/// Subformulas in Gentzen's sense: a quantified formula contributes its body
/// instantiated at every individual `instances` offers for the bound sort.
template <class Instances>
void subformulas(const Formula& f, std::vector<Formula>& out, const Instances& instances) {
  for (const auto& g : out)
    if (alphaEq(g, f)) return;
  out.push_back(f);
  if (f->kind == FKind::Forall || f->kind == FKind::Exists) {
    subformulas(f->left, out, instances);
    for (const Individual& i : instances(f->sort)) subformulas(substInd(f->left, f->name, i), out, instances);
    return;
  }
  if (f->left) subformulas(f->left, out, instances);
  if (f->right) subformulas(f->right, out, instances);
}

class Checker {
 public:
  std::size_t work = 0;

  [[noreturn]] static void fail(DiagKind k, const Path& p, std::string msg, Name name = {},
                                Formula expected = nullptr, Formula found = nullptr) {
    throw Failure{{k, p, std::move(msg), std::move(expected), std::move(found), std::move(name)}};
  }

  // ---- well-formedness -------------------------------------------------

  static Sort sortOf(const Context& ctx, const Individual& i, const Path& p,
                     const std::map<Name, Sort>& local = {}) {
    if (!i.isVar()) {
      auto s = ctx.sig->constantSort(i.name);
      if (!s) fail(DiagKind::UnboundVariable, p, "undeclared constant " + i.name, i.name);
      if (*s != i.sort)
        fail(DiagKind::SortMismatch, p, "constant " + i.name + " is declared of sort " + s->name, i.name);
      return *s;
    }
    if (auto it = local.find(i.name); it != local.end()) return it->second;
    const Hyp* h = ctx.find(i.name);
    if (!h || h->kind != Hyp::Kind::Individual)
      fail(DiagKind::UnboundVariable, p, "unbound individual " + i.name, i.name);
    return h->sort;
  }

  static void wellFormed(const Context& ctx, const Formula& f, const Path& p,
                         std::map<Name, Sort> local = {}) {
    switch (f->kind) {
      case FKind::Bottom: return;
      case FKind::Atom: {
        auto it = ctx.sig->predicates.find(f->name);
        if (it == ctx.sig->predicates.end())
          fail(DiagKind::IllFormedFormula, p, "undeclared predicate " + f->name, f->name);
        if (it->second.size() != f->args.size())
          fail(DiagKind::IllFormedFormula, p,
               "predicate " + f->name + " expects " + std::to_string(it->second.size()) + " arguments",
               f->name);
        for (std::size_t i = 0; i < f->args.size(); ++i) {
          Sort s = sortOf(ctx, f->args[i], p, local);
          if (s != it->second[i])
            fail(DiagKind::SortMismatch, p,
                 "argument " + f->args[i].name + " of " + f->name + " has sort " + s.name + ", expected " +
                     it->second[i].name,
                 f->args[i].name);
        }
        return;
      }
      case FKind::Id: {
        if (!ctx.sig->hasSort(f->sort))
          fail(DiagKind::IllFormedFormula, p, "undeclared sort " + f->sort.name);
        for (const auto& a : f->args)
          if (sortOf(ctx, a, p, local) != f->sort)
            fail(DiagKind::SortMismatch, p, a.name + " is not of sort " + f->sort.name, a.name);
        return;
      }
      case FKind::And: case FKind::Or: case FKind::Imp:
        wellFormed(ctx, f->left, p, local);
        wellFormed(ctx, f->right, p, local);
        return;
      case FKind::Forall: case FKind::Exists:
        if (!ctx.sig->hasSort(f->sort))
          fail(DiagKind::IllFormedFormula, p, "undeclared sort " + f->sort.name);
        local[f->name] = f->sort;
        wellFormed(ctx, f->left, p, std::move(local));
        return;
    }
  }

  static void validateContext(const Context& ctx) {
    std::set<Name> seen;
    for (const auto& h : ctx.hyps) {
      if (!seen.insert(h.name).second)
        fail(DiagKind::DuplicateHypothesis, {}, "hypothesis " + h.name + " declared twice", h.name);
      if (h.kind == Hyp::Kind::Individual) {
        if (!ctx.sig->hasSort(h.sort))
          fail(DiagKind::IllFormedFormula, {}, "undeclared sort " + h.sort.name + " for " + h.name, h.name);
      } else {
        wellFormed(ctx, h.formula, {});
      }
    }
  }

  // ---- synthesis -------------------------------------------------------

  Formula synth(const Context& ctx, const Term& t, const Path& p) {
    ++work;
    switch (t->kind) {
      case TKind::Var: {
        const Hyp* h = ctx.find(t->name);
        if (!h) fail(DiagKind::UnboundVariable, p, "unbound proof variable " + t->name, t->name);
        if (h->kind != Hyp::Kind::Proof)
          fail(DiagKind::UnboundVariable, p, t->name + " names an individual, not a proof", t->name);
        if (h->evidence)
          fail(DiagKind::NeedsAnnotation, p,
               "evidence variable " + t->name + " may only be carried into refl[" + t->name + "](..)", t->name);
        return h->formula;
      }
      case TKind::Fst:
      case TKind::Snd: {
        Formula f = synth(ctx, t->kids[0], child(p, 0));
        if (f->kind != FKind::And)
          fail(DiagKind::Mismatch, child(p, 0), "expected a conjunction, found " + show(f), {}, nullptr, f);
        return t->kind == TKind::Fst ? f->left : f->right;
      }
      case TKind::App: {
        if (t->kids[0]->kind == TKind::Lam) {
          // A redex synthesizes when its argument and body do.
          const Term& fn = t->kids[0];
          Formula a = synth(ctx, t->kids[1], child(p, 1));
          Name x = binderName(ctx, fn->name, allOf(fn));
          Term body = x == fn->name ? fn->kids[0] : renameProofVar(fn->kids[0], fn->name, x);
          return synth(ctx.withProof(x, a), body, child(child(p, 0), 0));
        }
        Formula f = synth(ctx, t->kids[0], child(p, 0));
        if (f->kind != FKind::Imp)
          fail(DiagKind::Mismatch, child(p, 0), "expected an implication, found " + show(f), {}, nullptr, f);
        check(ctx, t->kids[1], f->left, child(p, 1));
        return f->right;
      }
      case TKind::Extr: {
        if (t->kids[0]->kind == TKind::TLam) {
          const Term& fn = t->kids[0];
          const Individual& w = t->inds[0];
          Sort s = sortOf(ctx, w, p);
          if (s != fn->sort)
            fail(DiagKind::SortMismatch, p, w.name + " has sort " + s.name + ", binder ranges over " + fn->sort.name,
                 w.name);
          eigen(ctx, fn->name, nullptr, child(p, 0));
          Name x = binderName(ctx, fn->name, allOf(fn));
          Term body = x == fn->name ? fn->kids[0] : substInd(fn->kids[0], fn->name, ivar(x));
          Formula g = synth(ctx.withIndividual(x, fn->sort), body, child(child(p, 0), 0));
          return substInd(g, x, w);
        }
        Formula f = synth(ctx, t->kids[0], child(p, 0));
        if (f->kind != FKind::Forall)
          fail(DiagKind::Mismatch, child(p, 0), "expected a universal, found " + show(f), {}, nullptr, f);
        return instantiate(ctx, f, t->inds[0], p);
      }
      case TKind::Pair: {
        Formula a = synth(ctx, t->kids[0], child(p, 0));
        Formula b = synth(ctx, t->kids[1], child(p, 1));
        return conj(a, b);
      }
      case TKind::IdIntro: {
        Sort s = sortOf(ctx, t->inds[0], p);
        Formula f = idAt(s, t->inds[0], t->inds[1]);
        checkIdIntro(ctx, t, f, p);
        return f;
      }
      default:
        fail(DiagKind::NeedsAnnotation, p, "cannot synthesize a formula for this term; a goal is required");
    }
  }

  Formula instantiate(const Context& ctx, const Formula& all, const Individual& w, const Path& p) {
    Sort s = sortOf(ctx, w, p);
    if (s != all->sort)
      fail(DiagKind::SortMismatch, p, w.name + " has sort " + s.name + ", quantifier ranges over " + all->sort.name,
           w.name);
    return substInd(all->left, all->name, w);
  }

  // Synthesize the principal argument at `p`; when it cannot synthesize, try
  // the candidate formulas accepted by `accept`.
  template <class Accept>
  Formula synthOrGuess(const Context& ctx, const Term& t, const Path& p, const Formula& goal,
                       const char* shape, Accept accept) {
    try {
      Formula f = synth(ctx, t, p);
      if (!accept(f)) fail(DiagKind::Mismatch, p, std::string("expected ") + shape + ", found " + show(f), {}, nullptr, f);
      return f;
    } catch (const Failure& failure) {
      if (failure.diag.kind != DiagKind::NeedsAnnotation || failure.diag.path != p) throw;
      for (const Formula& cand : candidates(ctx, goal))
        if (accept(cand) && tryCheck(ctx, t, cand, p)) return cand;
      throw;
    }
  }

  std::vector<Formula> candidates(const Context& ctx, const Formula& goal) {
    auto instances = [&](const Sort& s) {
      std::vector<Individual> out = ctx.sig->constantsOf(s);
      for (const auto& h : ctx.hyps)
        if (h.kind == Hyp::Kind::Individual && h.sort == s) out.push_back(ivar(h.name));
      return out;
    };
    std::vector<Formula> all;
    subformulas(goal, all, instances);
    for (const auto& h : ctx.hyps)
      if (h.kind == Hyp::Kind::Proof) subformulas(h.formula, all, instances);
    std::vector<Formula> out;
    for (const auto& f : all) {
      bool closed = true;
      for (const auto& v : freeVars(f)) {
        const Hyp* h = ctx.find(v);
        if (!h || h->kind != Hyp::Kind::Individual) closed = false;
      }
      if (closed) out.push_back(f);
    }
    return out;
  }

  bool tryCheck(const Context& ctx, const Term& t, const Formula& goal, const Path& p) {
    try {
      check(ctx, t, goal, p);
      return true;
    } catch (const Failure&) {
      return false;
    }
  }

  // ---- checking --------------------------------------------------------

  void checkIdIntro(const Context& ctx, const Term& t, const Formula& goal, const Path& p) {
    const Individual& lhs = t->inds[0];
    const Individual& rhs = t->inds[1];
    if (!(lhs == goal->args[0]) || !(rhs == goal->args[1]))
      fail(DiagKind::Mismatch, p, "refl(" + lhs.name + ", " + rhs.name + ") does not prove " + show(goal), {}, goal);
    for (const auto& side : {lhs, rhs})
      if (sortOf(ctx, side, p) != goal->sort)
        fail(DiagKind::SortMismatch, p, side.name + " is not of sort " + goal->sort.name, side.name);
    const Evidence& ev = t->evidence;
    if (ev.isVar()) {
      const Hyp* h = ctx.find(*ev.var);
      if (!h) fail(DiagKind::UnboundVariable, p, "unbound evidence variable " + *ev.var, *ev.var);
      if (h->kind != Hyp::Kind::Proof || !h->evidence || !alphaEq(h->formula, goal))
        fail(DiagKind::IllFormedIdEvidence, p, *ev.var + " is not evidence for " + show(goal), *ev.var);
      return;
    }
    if (ev.length() > 0) {
      try {
        replay(*ev.trace);
      } catch (const ReplayMismatch& e) {
        fail(DiagKind::IllFormedIdEvidence, p, std::string("evidence trace does not replay: ") + e.what());
      }
      fail(DiagKind::IllFormedIdEvidence, p,
           "individuals of an uninterpreted sort are joined only by the empty path");
    }
    if (!(lhs == rhs))
      fail(DiagKind::IllFormedIdEvidence, p, "the empty path does not join " + lhs.name + " and " + rhs.name);
  }

  // Choose a name for a binder entering the context.
  static Name binderName(const Context& ctx, const Name& want, const std::set<Name>& alsoAvoid) {
    if (!ctx.find(want)) return want;
    std::set<Name> avoid = ctx.names();
    avoid.insert(alsoAvoid.begin(), alsoAvoid.end());
    return freshName(want, avoid);
  }

  static std::set<Name> allOf(const Term& t) {
    std::set<Name> p, i;
    allNames(t, p, i);
    p.insert(i.begin(), i.end());
    return p;
  }

  // Eigenvariable `x` must not occur free in any hypothesis (nor in `goal`
  // when given).
  static void eigen(const Context& ctx, const Name& x, const Formula& goal, const Path& p) {
    if (goal && freeVars(goal).count(x))
      fail(DiagKind::EigenvariableViolation, p, "eigenvariable " + x + " occurs free in the conclusion " + show(goal), x);
    for (const auto& h : ctx.hyps)
      if (h.kind == Hyp::Kind::Proof && freeVars(h.formula).count(x))
        fail(DiagKind::EigenvariableViolation, p,
             "eigenvariable " + x + " occurs free in hypothesis " + h.name + " : " + show(h.formula), x);
  }

  void check(const Context& ctx, const Term& t, const Formula& goal, const Path& p) {
    ++work;
    auto shapeMismatch = [&](const char* what) {
      fail(DiagKind::Mismatch, p, std::string(what) + " cannot prove " + show(goal), {}, goal);
    };
    switch (t->kind) {
      case TKind::Pair:
        if (goal->kind != FKind::And) shapeMismatch("a pair");
        check(ctx, t->kids[0], goal->left, child(p, 0));
        check(ctx, t->kids[1], goal->right, child(p, 1));
        return;
      case TKind::Inl:
      case TKind::Inr:
        if (goal->kind != FKind::Or) shapeMismatch(t->kind == TKind::Inl ? "inl" : "inr");
        check(ctx, t->kids[0], t->kind == TKind::Inl ? goal->left : goal->right, child(p, 0));
        return;
      case TKind::Lam: {
        if (goal->kind != FKind::Imp) shapeMismatch("a lambda");
        Name x = binderName(ctx, t->name, allOf(t));
        Term body = x == t->name ? t->kids[0] : renameProofVar(t->kids[0], t->name, x);
        check(ctx.withProof(x, goal->left), body, goal->right, child(p, 0));
        return;
      }
      case TKind::TLam: {
        if (goal->kind != FKind::Forall) shapeMismatch("a /\\-abstraction");
        if (t->sort != goal->sort)
          fail(DiagKind::SortMismatch, p, "binder ranges over " + t->sort.name + ", goal over " + goal->sort.name);
        eigen(ctx, t->name, nullptr, p);
        std::set<Name> avoid = allOf(t);
        for (const auto& v : freeVars(goal)) avoid.insert(v);
        Name x = binderName(ctx, t->name, avoid);
        Term body = x == t->name ? t->kids[0] : substInd(t->kids[0], t->name, ivar(x));
        Formula body_goal = substInd(goal->left, goal->name, ivar(x));
        check(ctx.withIndividual(x, t->sort), body, body_goal, child(p, 0));
        return;
      }
      case TKind::ExPair: {
        if (goal->kind != FKind::Exists) shapeMismatch("an eps-pair");
        const Individual& w = t->inds[0];
        Sort s = sortOf(ctx, w, p);
        if (s != goal->sort)
          fail(DiagKind::SortMismatch, p, "witness " + w.name + " has sort " + s.name + ", expected " + goal->sort.name,
               w.name);
        check(ctx, substInd(t->kids[0], t->name, w), substInd(goal->left, goal->name, w), child(p, 0));
        return;
      }
      case TKind::IdIntro:
        if (goal->kind != FKind::Id) shapeMismatch("refl");
        checkIdIntro(ctx, t, goal, p);
        return;
      case TKind::Case: {
        Formula f = synthOrGuess(ctx, t->kids[0], child(p, 0), goal, "a disjunction",
                                 [](const Formula& c) { return c->kind == FKind::Or; });
        Name x = binderName(ctx, t->name, allOf(t));
        check(ctx.withProof(x, f->left), x == t->name ? t->kids[1] : renameProofVar(t->kids[1], t->name, x), goal,
              child(p, 1));
        Name y = binderName(ctx, t->name2, allOf(t));
        check(ctx.withProof(y, f->right), y == t->name2 ? t->kids[2] : renameProofVar(t->kids[2], t->name2, y), goal,
              child(p, 2));
        return;
      }
      case TKind::Inst: {
        Formula f = synthOrGuess(ctx, t->kids[0], child(p, 0), goal, "an existential",
                                 [](const Formula& c) { return c->kind == FKind::Exists; });
        eigen(ctx, t->name2, goal, p);
        std::set<Name> avoid = allOf(t);
        for (const auto& v : freeVars(goal)) avoid.insert(v);
        Name w = binderName(ctx, t->name2, avoid);
        Term d = w == t->name2 ? t->kids[1] : substInd(t->kids[1], t->name2, ivar(w));
        Context inner = ctx.withIndividual(w, f->sort);
        Name h = binderName(inner, t->name, allOf(t));
        if (h != t->name) d = renameProofVar(d, t->name, h);
        check(inner.withProof(h, substInd(f->left, f->name, ivar(w))), d, goal, child(p, 1));
        return;
      }
      case TKind::Rewr: {
        Formula f = synthOrGuess(ctx, t->kids[0], child(p, 0), goal, "an identity",
                                 [](const Formula& c) { return c->kind == FKind::Id; });
        Name v = binderName(ctx, t->name, allOf(t));
        Term d = v == t->name ? t->kids[1] : renameProofVar(t->kids[1], t->name, v);
        check(ctx.withProof(v, f, true), d, goal, child(p, 1));
        return;
      }
      case TKind::Abort:
        synthOrGuess(ctx, t->kids[0], child(p, 0), goal, "absurdity",
                     [](const Formula& c) { return c->kind == FKind::Bottom; });
        return;
      case TKind::Fst:
      case TKind::Snd: {
        bool left = t->kind == TKind::Fst;
        Formula f = synthOrGuess(ctx, t->kids[0], child(p, 0), goal, "a conjunction", [&](const Formula& c) {
          return c->kind == FKind::And && alphaEq(left ? c->left : c->right, goal);
        });
        (void)f;
        return;
      }
      case TKind::App:
        checkApp(ctx, t, goal, p);
        return;
      case TKind::Extr:
        checkExtr(ctx, t, goal, p);
        return;
      case TKind::Var: {
        Formula f = synth(ctx, t, p);
        if (!alphaEq(f, goal))
          fail(DiagKind::Mismatch, p, t->name + " proves " + show(f) + ", not " + show(goal), t->name, goal, f);
        return;
      }
    }
  }

  void checkExtr(const Context& ctx, const Term& t, const Formula& goal, const Path& p) {
    const Individual& w = t->inds[0];
    Path pf = child(p, 0);
    Formula ff;
    try {
      ff = synth(ctx, t->kids[0], pf);
    } catch (const Failure& failure) {
      if (failure.diag.kind != DiagKind::NeedsAnnotation || failure.diag.path != pf) throw;
      for (const Formula& cand : candidates(ctx, goal)) {
        if (cand->kind != FKind::Forall) continue;
        bool fits = false;
        try {
          fits = alphaEq(instantiate(ctx, cand, w, p), goal);
        } catch (const Failure&) {
        }
        if (fits && tryCheck(ctx, t->kids[0], cand, pf)) return;
      }
      throw;
    }
    if (ff->kind != FKind::Forall)
      fail(DiagKind::Mismatch, pf, "expected a universal, found " + show(ff), {}, nullptr, ff);
    Formula got = instantiate(ctx, ff, w, p);
    if (!alphaEq(got, goal)) fail(DiagKind::Mismatch, p, "proves " + show(got) + ", not " + show(goal), {}, goal, got);
  }

  void checkApp(const Context& ctx, const Term& t, const Formula& goal, const Path& p) {
    const Term& fn = t->kids[0];
    const Term& arg = t->kids[1];
    Path pf = child(p, 0), pa = child(p, 1);
    Formula ff;
    try {
      ff = synth(ctx, fn, pf);
    } catch (const Failure& failure) {
      if (failure.diag.kind != DiagKind::NeedsAnnotation || failure.diag.path != pf) throw;
      // The head is an abstraction: take the antecedent from the argument.
      try {
        Formula a = synth(ctx, arg, pa);
        check(ctx, fn, implies(a, goal), pf);
        return;
      } catch (const Failure& inner) {
        if (inner.diag.kind != DiagKind::NeedsAnnotation || inner.diag.path != pa) throw;
      }
      for (const Formula& cand : candidates(ctx, goal))
        if (tryCheck(ctx, arg, cand, pa) && tryCheck(ctx, fn, implies(cand, goal), pf)) return;
      throw;
    }
    if (ff->kind != FKind::Imp)
      fail(DiagKind::Mismatch, pf, "expected an implication, found " + show(ff), {}, nullptr, ff);
    check(ctx, arg, ff->left, pa);
    if (!alphaEq(ff->right, goal))
      fail(DiagKind::Mismatch, p, "application proves " + show(ff->right) + ", not " + show(goal), {}, goal,
           ff->right);
  }
};

}  // namespace detail

/// Well-formedness of a formula over the context's declarations.
inline std::optional<Diagnostic> wellFormed(const Context& ctx, const Formula& f) {
  try {
    detail::Checker::wellFormed(ctx, f, {});
    return std::nullopt;
  } catch (const detail::Failure& e) {
    return e.diag;
  }
}

inline CheckResult check(const Context& ctx, const Term& term, const Formula& goal) {
  detail::Checker c;
  try {
    detail::Checker::validateContext(ctx);
    detail::Checker::wellFormed(ctx, goal, {});
    c.check(ctx, term, goal, {});
    return {std::nullopt, c.work};
  } catch (const detail::Failure& e) {
    return {e.diag, c.work};
  }
}

inline CheckResult check(const Judgement& j) { return check(j.ctx, j.term, j.formula); }

/// Synthesis for variables and destructor-headed terms.
inline SynthResult synth(const Context& ctx, const Term& term) {
  detail::Checker c;
  try {
    detail::Checker::validateContext(ctx);
    Formula f = c.synth(ctx, term, {});
    return {f, std::nullopt, c.work};
  } catch (const detail::Failure& e) {
    return {nullptr, e.diag, c.work};
  }
}

}  // namespace ndk
