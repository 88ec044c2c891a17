#pragma once

// Abstract syntax for sorts, individuals, formulas and proof terms, together
// with free variables, alpha-equivalence and capture-avoiding substitution.
//
// Nodes are immutable and shared: a Formula or Term is a pointer to a const
// node, so copies are cheap and values may be handed across threads freely.

#include <cstddef>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace ndk {

using Name = std::string;

/// Position of a subterm: the child indices walked from the root.
using Path = std::vector<int>;

inline std::string formatPath(const Path& path) {
  if (path.empty()) return "root";
  std::string out;
  for (std::size_t i = 0; i < path.size(); ++i) {
    if (i) out += '.';
    out += std::to_string(path[i]);
  }
  return out;
}

struct Sort {
  Name name;
  friend bool operator==(const Sort&, const Sort&) = default;
  friend auto operator<=>(const Sort&, const Sort&) = default;
};

struct Individual {
  enum class Kind { Var, Const };
  Kind kind = Kind::Var;
  Name name;
  Sort sort;  // meaningful for constants only

  bool isVar() const { return kind == Kind::Var; }
  friend bool operator==(const Individual&, const Individual&) = default;
};

inline Individual ivar(Name name) { return {Individual::Kind::Var, std::move(name), {}}; }
inline Individual iconst(Name name, Sort sort) {
  return {Individual::Kind::Const, std::move(name), std::move(sort)};
}

class SortMismatch : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// ---------------------------------------------------------------------------
// Formulas

enum class FKind { Atom, Bottom, And, Or, Imp, Forall, Exists, Id };

struct FormulaNode;
using Formula = std::shared_ptr<const FormulaNode>;

struct FormulaNode {
  FKind kind;
  Name name;                     // predicate symbol or quantifier binder
  Sort sort;                     // quantifier domain or Id sort
  std::vector<Individual> args;  // atom arguments; Id holds {lhs, rhs}
  Formula left;                  // And/Or/Imp left, quantifier body
  Formula right;
};

inline Formula atom(Name pred, std::vector<Individual> args = {}) {
  return std::make_shared<const FormulaNode>(
      FormulaNode{FKind::Atom, std::move(pred), {}, std::move(args), nullptr, nullptr});
}
inline Formula bottom() {
  return std::make_shared<const FormulaNode>(FormulaNode{FKind::Bottom, {}, {}, {}, nullptr, nullptr});
}
inline Formula conj(Formula l, Formula r) {
  return std::make_shared<const FormulaNode>(
      FormulaNode{FKind::And, {}, {}, {}, std::move(l), std::move(r)});
}
inline Formula disj(Formula l, Formula r) {
  return std::make_shared<const FormulaNode>(
      FormulaNode{FKind::Or, {}, {}, {}, std::move(l), std::move(r)});
}
inline Formula implies(Formula l, Formula r) {
  return std::make_shared<const FormulaNode>(
      FormulaNode{FKind::Imp, {}, {}, {}, std::move(l), std::move(r)});
}
inline Formula forall(Name x, Sort sort, Formula body) {
  return std::make_shared<const FormulaNode>(
      FormulaNode{FKind::Forall, std::move(x), std::move(sort), {}, std::move(body), nullptr});
}
inline Formula exists(Name x, Sort sort, Formula body) {
  return std::make_shared<const FormulaNode>(
      FormulaNode{FKind::Exists, std::move(x), std::move(sort), {}, std::move(body), nullptr});
}
inline Formula idAt(Sort sort, Individual lhs, Individual rhs) {
  return std::make_shared<const FormulaNode>(
      FormulaNode{FKind::Id, {}, std::move(sort), {std::move(lhs), std::move(rhs)}, nullptr, nullptr});
}

inline bool isAtomic(const Formula& f) { return f->kind == FKind::Atom || f->kind == FKind::Bottom; }

// ---------------------------------------------------------------------------
// Proof terms

enum class TKind {
  Var,
  Pair, Fst, Snd,
  Inl, Inr, Case,
  Lam, App,
  TLam, Extr,
  ExPair, Inst,
  IdIntro, Rewr,
  Abort,
};

/// The eight associated rewritings.
enum class Rule { AndFst, AndSnd, OrInl, OrInr, Imp, All, Ex, Id };

inline const char* ruleName(Rule r) {
  switch (r) {
    case Rule::AndFst: return "AndFst";
    case Rule::AndSnd: return "AndSnd";
    case Rule::OrInl: return "OrInl";
    case Rule::OrInr: return "OrInr";
    case Rule::Imp: return "Imp";
    case Rule::All: return "All";
    case Rule::Ex: return "Ex";
    case Rule::Id: return "Id";
  }
  return "?";
}

inline std::optional<Rule> ruleFromName(const std::string& s) {
  for (Rule r : {Rule::AndFst, Rule::AndSnd, Rule::OrInl, Rule::OrInr, Rule::Imp, Rule::All,
                 Rule::Ex, Rule::Id})
    if (s == ruleName(r)) return r;
  return std::nullopt;
}

struct TermNode;
using Term = std::shared_ptr<const TermNode>;

struct RewriteStep {
  Rule rule;
  Path path;
  Term before;  // the redex at `path`
  Term after;   // its contractum
};

struct RewriteTrace {
  Term initial;
  std::vector<RewriteStep> steps;
};

/// Evidence carried by an identity introduction: either a concrete rewrite
/// trace (null means the empty trace) or a variable bound by REWR.
struct Evidence {
  std::optional<Name> var;
  std::shared_ptr<const RewriteTrace> trace;

  bool isVar() const { return var.has_value(); }
  std::size_t length() const { return trace ? trace->steps.size() : 0; }
  static Evidence empty() { return {}; }
  static Evidence variable(Name n) { return {std::move(n), nullptr}; }
};

struct TermNode {
  TKind kind;
  Name name;                // variable; first binder (x, h, tvar)
  Name name2;               // second binder (Case y, Inst t)
  Sort sort;                // TLam domain
  std::vector<Term> kids;
  std::vector<Individual> inds;  // Extr {t}; ExPair {witness}; IdIntro {lhs, rhs}
  Evidence evidence;             // IdIntro
};

namespace detail {
inline Term mk(TermNode n) { return std::make_shared<const TermNode>(std::move(n)); }
}  // namespace detail

inline Term pvar(Name x) { return detail::mk({TKind::Var, std::move(x), {}, {}, {}, {}, {}}); }
inline Term pair(Term a, Term b) { return detail::mk({TKind::Pair, {}, {}, {}, {std::move(a), std::move(b)}, {}, {}}); }
inline Term fst(Term p) { return detail::mk({TKind::Fst, {}, {}, {}, {std::move(p)}, {}, {}}); }
inline Term snd(Term p) { return detail::mk({TKind::Snd, {}, {}, {}, {std::move(p)}, {}, {}}); }
inline Term inl(Term a) { return detail::mk({TKind::Inl, {}, {}, {}, {std::move(a)}, {}, {}}); }
inline Term inr(Term b) { return detail::mk({TKind::Inr, {}, {}, {}, {std::move(b)}, {}, {}}); }
inline Term caseOf(Term scrut, Name x, Term f, Name y, Term g) {
  return detail::mk({TKind::Case, std::move(x), std::move(y), {}, {std::move(scrut), std::move(f), std::move(g)}, {}, {}});
}
inline Term lam(Name x, Term body) { return detail::mk({TKind::Lam, std::move(x), {}, {}, {std::move(body)}, {}, {}}); }
inline Term app(Term f, Term a) { return detail::mk({TKind::App, {}, {}, {}, {std::move(f), std::move(a)}, {}, {}}); }
inline Term tlam(Name x, Sort sort, Term body) {
  return detail::mk({TKind::TLam, std::move(x), {}, std::move(sort), {std::move(body)}, {}, {}});
}
inline Term extr(Term f, Individual t) { return detail::mk({TKind::Extr, {}, {}, {}, {std::move(f)}, {std::move(t)}, {}}); }
inline Term exPair(Name binder, Term body, Individual witness) {
  return detail::mk({TKind::ExPair, std::move(binder), {}, {}, {std::move(body)}, {std::move(witness)}, {}});
}
inline Term inst(Term scrut, Name h, Name t, Term d) {
  return detail::mk({TKind::Inst, std::move(h), std::move(t), {}, {std::move(scrut), std::move(d)}, {}, {}});
}
inline Term idIntro(Evidence ev, Individual lhs, Individual rhs) {
  return detail::mk({TKind::IdIntro, {}, {}, {}, {}, {std::move(lhs), std::move(rhs)}, std::move(ev)});
}
inline Term refl(Individual lhs, Individual rhs) { return idIntro(Evidence::empty(), std::move(lhs), std::move(rhs)); }
inline Term rewr(Term scrut, Name tvar, Term d) {
  return detail::mk({TKind::Rewr, std::move(tvar), {}, {}, {std::move(scrut), std::move(d)}, {}, {}});
}
inline Term abortOf(Term p) { return detail::mk({TKind::Abort, {}, {}, {}, {std::move(p)}, {}, {}}); }

inline bool isConstructor(const Term& t) {
  switch (t->kind) {
    case TKind::Pair: case TKind::Inl: case TKind::Inr: case TKind::Lam:
    case TKind::TLam: case TKind::ExPair: case TKind::IdIntro:
      return true;
    default:
      return false;
  }
}

inline bool isDestructor(const Term& t) {
  switch (t->kind) {
    case TKind::Fst: case TKind::Snd: case TKind::Case: case TKind::App:
    case TKind::Extr: case TKind::Inst: case TKind::Rewr: case TKind::Abort:
      return true;
    default:
      return false;
  }
}

/// Binders scoping over child `kid` of `t`, split by namespace. Proof-level
/// binders include the evidence variable of REWR.
struct KidBinders {
  std::vector<Name> proof;
  std::vector<Name> ind;
};

inline KidBinders bindersOver(const TermNode& t, int kid) {
  switch (t.kind) {
    case TKind::Case:
      if (kid == 1) return {{t.name}, {}};
      if (kid == 2) return {{t.name2}, {}};
      return {};
    case TKind::Lam: return {{t.name}, {}};
    case TKind::TLam: return {{}, {t.name}};
    case TKind::ExPair: return {{}, {t.name}};
    case TKind::Inst:
      if (kid == 1) return {{t.name}, {t.name2}};
      return {};
    case TKind::Rewr:
      if (kid == 1) return {{t.name}, {}};
      return {};
    default:
      return {};
  }
}

inline std::size_t nodeCount(const Term& t) {
  std::size_t n = 1;
  for (const auto& k : t->kids) n += nodeCount(k);
  return n;
}

// ---------------------------------------------------------------------------
// Free variables

struct FreeVars {
  std::set<Name> proof;
  std::set<Name> ind;
};

namespace detail {

inline void collect(const Formula& f, std::set<Name>& bound, std::set<Name>& out) {
  auto addInd = [&](const Individual& i) {
    if (i.isVar() && !bound.count(i.name)) out.insert(i.name);
  };
  switch (f->kind) {
    case FKind::Atom:
    case FKind::Id:
      for (const auto& a : f->args) addInd(a);
      return;
    case FKind::Bottom: return;
    case FKind::And: case FKind::Or: case FKind::Imp:
      collect(f->left, bound, out);
      collect(f->right, bound, out);
      return;
    case FKind::Forall: case FKind::Exists: {
      bool fresh = bound.insert(f->name).second;
      collect(f->left, bound, out);
      if (fresh) bound.erase(f->name);
      return;
    }
  }
}

inline void collect(const Term& t, std::multiset<Name>& bp, std::multiset<Name>& bi, FreeVars& out) {
  if (t->kind == TKind::Var) {
    if (!bp.count(t->name)) out.proof.insert(t->name);
    return;
  }
  if (t->kind == TKind::IdIntro && t->evidence.isVar() && !bp.count(*t->evidence.var))
    out.proof.insert(*t->evidence.var);
  for (const auto& i : t->inds)
    if (i.isVar() && !bi.count(i.name)) out.ind.insert(i.name);
  for (int k = 0; k < static_cast<int>(t->kids.size()); ++k) {
    KidBinders b = bindersOver(*t, k);
    for (const auto& n : b.proof) bp.insert(n);
    for (const auto& n : b.ind) bi.insert(n);
    collect(t->kids[k], bp, bi, out);
    for (const auto& n : b.proof) bp.erase(bp.find(n));
    for (const auto& n : b.ind) bi.erase(bi.find(n));
  }
}

}  // namespace detail

inline std::set<Name> freeVars(const Formula& f) {
  std::set<Name> bound, out;
  detail::collect(f, bound, out);
  return out;
}

inline FreeVars freeVars(const Term& t) {
  std::multiset<Name> bp, bi;
  FreeVars out;
  detail::collect(t, bp, bi, out);
  return out;
}

/// Every name occurring anywhere in `t`, bound or free, per namespace.
inline void allNames(const Term& t, std::set<Name>& proof, std::set<Name>& ind) {
  switch (t->kind) {
    case TKind::Var: proof.insert(t->name); break;
    case TKind::Case: proof.insert(t->name); proof.insert(t->name2); break;
    case TKind::Lam: case TKind::Rewr: proof.insert(t->name); break;
    case TKind::TLam: case TKind::ExPair: ind.insert(t->name); break;
    case TKind::Inst: proof.insert(t->name); ind.insert(t->name2); break;
    case TKind::IdIntro:
      if (t->evidence.isVar()) proof.insert(*t->evidence.var);
      break;
    default: break;
  }
  for (const auto& i : t->inds)
    if (i.isVar()) ind.insert(i.name);
  for (const auto& k : t->kids) allNames(k, proof, ind);
}

/// Deterministic fresh name: `base` followed by as many primes as needed.
inline Name freshName(const Name& base, const std::set<Name>& avoid) {
  Name candidate = base;
  do {
    candidate += '\'';
  } while (avoid.count(candidate));
  return candidate;
}

// ---------------------------------------------------------------------------
// Alpha-equivalence

namespace detail {

// Binder environments pair a name on the left with a name on the right; a
// bound occurrence matches when both sides resolve to the same binder depth.
struct AlphaEnv {
  std::vector<std::pair<Name, Name>> proof;
  std::vector<std::pair<Name, Name>> ind;
};

inline bool sameVar(const std::vector<std::pair<Name, Name>>& env, const Name& a, const Name& b) {
  for (auto it = env.rbegin(); it != env.rend(); ++it) {
    bool hitA = it->first == a, hitB = it->second == b;
    if (hitA || hitB) return hitA && hitB;
  }
  return a == b;
}

inline bool alphaInd(const std::vector<std::pair<Name, Name>>& env, const Individual& a,
                     const Individual& b) {
  if (a.kind != b.kind) return false;
  if (!a.isVar()) return a.name == b.name && a.sort == b.sort;
  return sameVar(env, a.name, b.name);
}

inline bool alphaF(const Formula& a, const Formula& b, std::vector<std::pair<Name, Name>>& env) {
  if (a->kind != b->kind) return false;
  switch (a->kind) {
    case FKind::Bottom: return true;
    case FKind::Atom:
      if (a->name != b->name || a->args.size() != b->args.size()) return false;
      for (std::size_t i = 0; i < a->args.size(); ++i)
        if (!alphaInd(env, a->args[i], b->args[i])) return false;
      return true;
    case FKind::Id:
      return a->sort == b->sort && alphaInd(env, a->args[0], b->args[0]) &&
             alphaInd(env, a->args[1], b->args[1]);
    case FKind::And: case FKind::Or: case FKind::Imp:
      return alphaF(a->left, b->left, env) && alphaF(a->right, b->right, env);
    case FKind::Forall: case FKind::Exists: {
      if (a->sort != b->sort) return false;
      env.emplace_back(a->name, b->name);
      bool ok = alphaF(a->left, b->left, env);
      env.pop_back();
      return ok;
    }
  }
  return false;
}

bool alphaT(const Term& a, const Term& b, AlphaEnv& env);

inline bool alphaTrace(const std::shared_ptr<const RewriteTrace>& a,
                       const std::shared_ptr<const RewriteTrace>& b) {
  std::size_t na = a ? a->steps.size() : 0, nb = b ? b->steps.size() : 0;
  if (na != nb) return false;
  for (std::size_t i = 0; i < na; ++i) {
    const auto& sa = a->steps[i];
    const auto& sb = b->steps[i];
    AlphaEnv e1, e2;
    if (sa.rule != sb.rule || sa.path != sb.path || !alphaT(sa.before, sb.before, e1) ||
        !alphaT(sa.after, sb.after, e2))
      return false;
  }
  return true;
}

inline bool alphaT(const Term& a, const Term& b, AlphaEnv& env) {
  if (a->kind != b->kind) return false;
  if (a->kind == TKind::Var) return sameVar(env.proof, a->name, b->name);
  if (a->kids.size() != b->kids.size() || a->inds.size() != b->inds.size()) return false;
  if (a->kind == TKind::TLam && a->sort != b->sort) return false;
  for (std::size_t i = 0; i < a->inds.size(); ++i)
    if (!alphaInd(env.ind, a->inds[i], b->inds[i])) return false;
  if (a->kind == TKind::IdIntro) {
    if (a->evidence.isVar() != b->evidence.isVar()) return false;
    if (a->evidence.isVar()) return sameVar(env.proof, *a->evidence.var, *b->evidence.var);
    return alphaTrace(a->evidence.trace, b->evidence.trace);
  }
  for (int k = 0; k < static_cast<int>(a->kids.size()); ++k) {
    KidBinders ba = bindersOver(*a, k), bb = bindersOver(*b, k);
    for (std::size_t i = 0; i < ba.proof.size(); ++i) env.proof.emplace_back(ba.proof[i], bb.proof[i]);
    for (std::size_t i = 0; i < ba.ind.size(); ++i) env.ind.emplace_back(ba.ind[i], bb.ind[i]);
    bool ok = alphaT(a->kids[k], b->kids[k], env);
    env.proof.resize(env.proof.size() - ba.proof.size());
    env.ind.resize(env.ind.size() - ba.ind.size());
    if (!ok) return false;
  }
  return true;
}

}  // namespace detail

inline bool alphaEq(const Formula& a, const Formula& b) {
  std::vector<std::pair<Name, Name>> env;
  return detail::alphaF(a, b, env);
}

inline bool alphaEq(const Term& a, const Term& b) {
  detail::AlphaEnv env;
  return detail::alphaT(a, b, env);
}

// ---------------------------------------------------------------------------
// Substitution

/// A simultaneous substitution: proof variables to terms, individual variables
/// to individuals, evidence variables to evidence.
struct Subst {
  std::map<Name, Term> proof;
  std::map<Name, Individual> ind;
  std::map<Name, Evidence> evidence;

  bool empty() const { return proof.empty() && ind.empty() && evidence.empty(); }
};

namespace detail {

inline Individual applyInd(const std::map<Name, Individual>& m, const Individual& i) {
  if (!i.isVar()) return i;
  auto it = m.find(i.name);
  return it == m.end() ? i : it->second;
}

inline std::set<Name> rangeIndVars(const std::map<Name, Individual>& m) {
  std::set<Name> out;
  for (const auto& [k, v] : m)
    if (v.isVar()) out.insert(v.name);
  return out;
}

inline Formula substF(const Formula& f, const std::map<Name, Individual>& m) {
  if (m.empty()) return f;
  switch (f->kind) {
    case FKind::Bottom: return f;
    case FKind::Atom: {
      std::vector<Individual> args;
      for (const auto& a : f->args) args.push_back(applyInd(m, a));
      return atom(f->name, std::move(args));
    }
    case FKind::Id: {
      Individual l = applyInd(m, f->args[0]), r = applyInd(m, f->args[1]);
      for (const auto& [side, orig] : {std::pair{l, f->args[0]}, std::pair{r, f->args[1]}})
        if (!(side == orig) && !side.isVar() && side.sort != f->sort)
          throw SortMismatch("constant " + side.name + " of sort " + side.sort.name +
                             " substituted into Id over " + f->sort.name);
      return idAt(f->sort, l, r);
    }
    case FKind::And: return conj(substF(f->left, m), substF(f->right, m));
    case FKind::Or: return disj(substF(f->left, m), substF(f->right, m));
    case FKind::Imp: return implies(substF(f->left, m), substF(f->right, m));
    case FKind::Forall:
    case FKind::Exists: {
      auto inner = m;
      inner.erase(f->name);
      std::set<Name> bodyFree = freeVars(f->left);
      for (auto it = inner.begin(); it != inner.end();)
        it = bodyFree.count(it->first) ? std::next(it) : inner.erase(it);
      if (inner.empty()) return f;
      Name x = f->name;
      Formula body = f->left;
      std::set<Name> danger = rangeIndVars(inner);
      if (danger.count(x)) {
        std::set<Name> avoid = danger;
        avoid.insert(bodyFree.begin(), bodyFree.end());
        for (const auto& [k, v] : inner) avoid.insert(k);
        Name y = freshName(x, avoid);
        inner[x] = ivar(y);
        x = y;
      }
      body = substF(body, inner);
      return f->kind == FKind::Forall ? forall(x, f->sort, body) : exists(x, f->sort, body);
    }
  }
  return f;
}

// Restrict `s` to the entries whose variable actually occurs free in `t`.
inline Subst restrict(const Subst& s, const FreeVars& fv) {
  Subst out;
  for (const auto& [k, v] : s.proof)
    if (fv.proof.count(k)) out.proof.emplace(k, v);
  for (const auto& [k, v] : s.evidence)
    if (fv.proof.count(k)) out.evidence.emplace(k, v);
  for (const auto& [k, v] : s.ind)
    if (fv.ind.count(k)) out.ind.emplace(k, v);
  return out;
}

inline FreeVars rangeFree(const Subst& s) {
  FreeVars out;
  for (const auto& [k, v] : s.proof) {
    FreeVars f = freeVars(v);
    out.proof.insert(f.proof.begin(), f.proof.end());
    out.ind.insert(f.ind.begin(), f.ind.end());
  }
  for (const auto& [k, v] : s.evidence)
    if (v.isVar()) out.proof.insert(*v.var);
  for (const auto& [k, v] : s.ind)
    if (v.isVar()) out.ind.insert(v.name);
  return out;
}

inline Term substT(const Term& t, const Subst& s);

// Push `s` under the binders scoping child `kid`, renaming binders that would
// capture a free variable of the substitution's range.
inline Term substUnder(const TermNode& node, int kid, const Subst& s, Name* pb0, Name* pb1) {
  // pb0/pb1 point at the (possibly renamed) binder names of this child.
  KidBinders b = bindersOver(node, kid);
  const Term& body = node.kids[kid];
  Subst inner = s;
  for (const auto& n : b.proof) {
    inner.proof.erase(n);
    inner.evidence.erase(n);
  }
  for (const auto& n : b.ind) inner.ind.erase(n);
  FreeVars bodyFree = freeVars(body);
  inner = restrict(inner, bodyFree);
  if (inner.empty()) return body;
  FreeVars danger = rangeFree(inner);

  std::vector<Name*> slots = {pb0, pb1};
  std::size_t slot = 0;
  auto renameIf = [&](const Name& old, bool proofNs) {
    Name* out = slots[slot++];
    const std::set<Name>& d = proofNs ? danger.proof : danger.ind;
    if (!d.count(old)) {
      *out = old;
      return;
    }
    std::set<Name> avoid = d;
    const std::set<Name>& bf = proofNs ? bodyFree.proof : bodyFree.ind;
    avoid.insert(bf.begin(), bf.end());
    if (proofNs) {
      for (const auto& [k, v] : inner.proof) avoid.insert(k);
      for (const auto& [k, v] : inner.evidence) avoid.insert(k);
    } else {
      for (const auto& [k, v] : inner.ind) avoid.insert(k);
    }
    Name fresh = freshName(old, avoid);
    if (proofNs) {
      // The old name may stand for a proof variable or an evidence variable.
      inner.proof[old] = pvar(fresh);
      inner.evidence[old] = Evidence::variable(fresh);
    } else {
      inner.ind[old] = ivar(fresh);
    }
    *out = fresh;
  };
  for (const auto& n : b.proof) renameIf(n, true);
  for (const auto& n : b.ind) renameIf(n, false);
  return substT(body, inner);
}

inline Term substT(const Term& t, const Subst& s) {
  if (s.empty()) return t;
  switch (t->kind) {
    case TKind::Var: {
      auto it = s.proof.find(t->name);
      return it == s.proof.end() ? t : it->second;
    }
    case TKind::IdIntro: {
      Evidence ev = t->evidence;
      if (ev.isVar()) {
        auto it = s.evidence.find(*ev.var);
        if (it != s.evidence.end()) ev = it->second;
      }
      return idIntro(ev, applyInd(s.ind, t->inds[0]), applyInd(s.ind, t->inds[1]));
    }
    default: break;
  }
  TermNode n = *t;
  for (auto& i : n.inds) i = applyInd(s.ind, i);
  for (int k = 0; k < static_cast<int>(n.kids.size()); ++k) {
    KidBinders b = bindersOver(*t, k);
    if (b.proof.empty() && b.ind.empty()) {
      n.kids[k] = substT(t->kids[k], s);
      continue;
    }
    Name b0, b1;
    n.kids[k] = substUnder(*t, k, s, &b0, &b1);
    if (n.kids[k] == t->kids[k]) continue;  // untouched: keep original binders
    // Write back renamed binder names.
    switch (t->kind) {
      case TKind::Case: (k == 1 ? n.name : n.name2) = b0; break;
      case TKind::Inst: n.name = b0; n.name2 = b1; break;
      default: n.name = b0; break;
    }
  }
  return mk(std::move(n));
}

}  // namespace detail

/// Simultaneous capture-avoiding substitution.
inline Term substitute(const Term& t, const Subst& s) { return detail::substT(t, s); }

/// Replace free proof variable `x` by `v`.
inline Term substProof(const Term& t, const Name& x, const Term& v) {
  Subst s;
  s.proof.emplace(x, v);
  return detail::substT(t, s);
}

/// Replace free evidence variable `x` (bound by REWR) by `ev`.
inline Term substEvidence(const Term& t, const Name& x, const Evidence& ev) {
  Subst s;
  s.evidence.emplace(x, ev);
  return detail::substT(t, s);
}

namespace detail {
inline void checkBinderSort(const Individual& v, const std::optional<Sort>& binderSort) {
  if (binderSort && !v.isVar() && v.sort != *binderSort)
    throw SortMismatch("constant " + v.name + " has sort " + v.sort.name + ", binder expects " +
                       binderSort->name);
}
}  // namespace detail

/// Replace free individual variable `x` by `v` in a proof term. Throws
/// SortMismatch when `binderSort` is given and `v` is a constant of another sort.
inline Term substInd(const Term& t, const Name& x, const Individual& v,
                     const std::optional<Sort>& binderSort = std::nullopt) {
  detail::checkBinderSort(v, binderSort);
  Subst s;
  s.ind.emplace(x, v);
  return detail::substT(t, s);
}

inline Formula substInd(const Formula& f, const Name& x, const Individual& v,
                        const std::optional<Sort>& binderSort = std::nullopt) {
  detail::checkBinderSort(v, binderSort);
  return detail::substF(f, {{x, v}});
}

// ---------------------------------------------------------------------------
// Positions

inline Term subtermAt(const Term& t, const Path& path) {
  Term cur = t;
  for (int i : path) {
    if (i < 0 || i >= static_cast<int>(cur->kids.size())) return nullptr;
    cur = cur->kids[i];
  }
  return cur;
}

/// Positional replacement; no renaming is performed.
inline Term replaceAt(const Term& t, const Path& path, const Term& with, std::size_t depth = 0) {
  if (depth == path.size()) return with;
  TermNode n = *t;
  n.kids.at(path[depth]) = replaceAt(t->kids.at(path[depth]), path, with, depth + 1);
  return detail::mk(std::move(n));
}

}  // namespace ndk
