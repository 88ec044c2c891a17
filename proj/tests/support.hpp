#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include <ndk/parse.hpp>
#include <ndk/syntax.hpp>

namespace ndk::testing {

inline std::string corpusPath(const std::string& file) { return std::string(NDK_CORPUS) + "/" + file; }

inline ProblemFile basics() {
  static const ProblemFile pf = loadProblem(corpusPath("basics.nd"));
  return pf;
}

inline std::vector<Judgement> corpus() {
  std::vector<Judgement> out;
  for (const auto& pl : basics().judgements) out.push_back(pl.judgement);
  return out;
}

inline bool closed(const Judgement& j) { return j.ctx.hyps.empty(); }

// ---------------------------------------------------------------------------
// Locally nameless oracle. Bound variables become (kind, index) leaves, free
// variables stay named. Substituting for a free name is then plain leaf
// replacement: no capture is possible and no renaming is needed.

struct LN {
  std::string tag;
  std::vector<LN> kids;

  bool operator==(const LN&) const = default;
};

class Nameless {
 public:
  LN term(const Term& t) {
    LN out{tagOf(t), {}};
    for (const auto& i : t->inds) out.kids.push_back(ind(i));
    if (t->kind == TKind::Var) return proofVar(t->name);
    if (t->kind == TKind::IdIntro) {
      out.kids.push_back(t->evidence.isVar() ? evidenceVar(*t->evidence.var)
                                             : LN{"trace#" + std::to_string(t->evidence.length()), {}});
      return out;
    }
    for (int k = 0; k < static_cast<int>(t->kids.size()); ++k) {
      KidBinders b = bindersOver(*t, k);
      proof_.insert(proof_.end(), b.proof.begin(), b.proof.end());
      ind_.insert(ind_.end(), b.ind.begin(), b.ind.end());
      out.kids.push_back(term(t->kids[k]));
      proof_.resize(proof_.size() - b.proof.size());
      ind_.resize(ind_.size() - b.ind.size());
    }
    return out;
  }

  LN formula(const Formula& f) {
    switch (f->kind) {
      case FKind::Atom: {
        LN out{"atom:" + f->name, {}};
        for (const auto& a : f->args) out.kids.push_back(ind(a));
        return out;
      }
      case FKind::Bottom: return {"bot", {}};
      case FKind::Id: return {"id:" + f->sort.name, {ind(f->args[0]), ind(f->args[1])}};
      case FKind::And: return {"and", {formula(f->left), formula(f->right)}};
      case FKind::Or: return {"or", {formula(f->left), formula(f->right)}};
      case FKind::Imp: return {"imp", {formula(f->left), formula(f->right)}};
      case FKind::Forall:
      case FKind::Exists: {
        ind_.push_back(f->name);
        LN body = formula(f->left);
        ind_.pop_back();
        return {(f->kind == FKind::Forall ? "all:" : "ex:") + f->sort.name, {body}};
      }
    }
    return {};
  }

 private:
  static std::string tagOf(const Term& t) {
    std::string s = std::to_string(static_cast<int>(t->kind));
    if (t->kind == TKind::TLam) s += ":" + t->sort.name;
    return s;
  }
  static std::optional<std::size_t> index(const std::vector<Name>& env, const Name& x) {
    for (std::size_t i = env.size(); i-- > 0;)
      if (env[i] == x) return env.size() - 1 - i;
    return std::nullopt;
  }
  LN proofVar(const Name& x) const {
    if (auto i = index(proof_, x)) return {"bp" + std::to_string(*i), {}};
    return {"fp:" + x, {}};
  }
  // Evidence shares the proof binders but is a distinct kind of occurrence:
  // proof substitution leaves it alone.
  LN evidenceVar(const Name& x) const {
    if (auto i = index(proof_, x)) return {"be" + std::to_string(*i), {}};
    return {"fe:" + x, {}};
  }
  LN ind(const Individual& i) const {
    if (!i.isVar()) return {"c:" + i.name + ":" + i.sort.name, {}};
    if (auto k = index(ind_, i.name)) return {"bi" + std::to_string(*k), {}};
    return {"fi:" + i.name, {}};
  }

  std::vector<Name> proof_;
  std::vector<Name> ind_;
};

inline LN nameless(const Term& t) { return Nameless().term(t); }
inline LN nameless(const Formula& f) { return Nameless().formula(f); }

/// Replace every leaf equal to `leaf` by `with`.
inline LN replaceLeaf(const LN& t, const LN& leaf, const LN& with) {
  if (t == leaf) return with;
  LN out{t.tag, {}};
  for (const auto& k : t.kids) out.kids.push_back(replaceLeaf(k, leaf, with));
  return out;
}

inline LN oracleSubstProof(const Term& t, const Name& x, const Term& v) {
  return replaceLeaf(nameless(t), {"fp:" + x, {}}, nameless(v));
}

inline LN oracleSubstInd(const LN& t, const Name& x, const Individual& v) {
  LN leaf = v.isVar() ? LN{"fi:" + v.name, {}} : LN{"c:" + v.name + ":" + v.sort.name, {}};
  return replaceLeaf(t, {"fi:" + x, {}}, leaf);
}

}  // namespace ndk::testing
