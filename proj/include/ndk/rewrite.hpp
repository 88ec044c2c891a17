#pragma once

// The β-rewritings on proof terms: one contraction per destructor/constructor
// pair, leftmost-outermost stepping, bounded normalization and trace replay.

#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "ndk/syntax.hpp"

namespace ndk {

/// Contract `t` if it is a redex at its root.
///
///   fst(<a,b>)                  ~> a
///   snd(<a,b>)                  ~> b
///   case(inl(a), x.f, y.g)      ~> f[a/x]
///   case(inr(b), x.f, y.g)      ~> g[b/y]
///   app(\x.b, a)                ~> b[a/x]
///   extr(/\x.g, t)              ~> g[t/x]
///   inst(eps(x.g, s), h.t.d)    ~> d[g[s/x]/h, s/t]
///   rewr(r(a,b), t.d)           ~> d[r/t]
///
/// Ill-shaped pairs such as fst(inl(a)) are not redexes.
inline std::optional<std::pair<Rule, Term>> contract(const Term& t) {
  if (t->kids.empty()) return std::nullopt;
  const Term& head = t->kids[0];
  switch (t->kind) {
    case TKind::Fst:
      if (head->kind == TKind::Pair) return std::pair{Rule::AndFst, head->kids[0]};
      break;
    case TKind::Snd:
      if (head->kind == TKind::Pair) return std::pair{Rule::AndSnd, head->kids[1]};
      break;
    case TKind::Case:
      if (head->kind == TKind::Inl)
        return std::pair{Rule::OrInl, substProof(t->kids[1], t->name, head->kids[0])};
      if (head->kind == TKind::Inr)
        return std::pair{Rule::OrInr, substProof(t->kids[2], t->name2, head->kids[0])};
      break;
    case TKind::App:
      if (head->kind == TKind::Lam)
        return std::pair{Rule::Imp, substProof(head->kids[0], head->name, t->kids[1])};
      break;
    case TKind::Extr:
      if (head->kind == TKind::TLam)
        return std::pair{Rule::All, substInd(head->kids[0], head->name, t->inds[0])};
      break;
    case TKind::Inst:
      if (head->kind == TKind::ExPair) {
        const Individual& witness = head->inds[0];
        Term proof = substInd(head->kids[0], head->name, witness);
        Subst s;
        s.proof.emplace(t->name, proof);
        s.ind.emplace(t->name2, witness);
        return std::pair{Rule::Ex, substitute(t->kids[1], s)};
      }
      break;
    case TKind::Rewr:
      if (head->kind == TKind::IdIntro)
        return std::pair{Rule::Id, substEvidence(t->kids[1], t->name, head->evidence)};
      break;
    default:
      break;
  }
  return std::nullopt;
}

inline bool isRedex(const Term& t) { return contract(t).has_value(); }

namespace detail {
inline void collectRedexes(const Term& t, Path& at, std::vector<Path>& out) {
  if (isRedex(t)) out.push_back(at);
  for (int k = 0; k < static_cast<int>(t->kids.size()); ++k) {
    at.push_back(k);
    collectRedexes(t->kids[k], at, out);
    at.pop_back();
  }
}

inline bool firstRedex(const Term& t, Path& at) {
  if (isRedex(t)) return true;
  for (int k = 0; k < static_cast<int>(t->kids.size()); ++k) {
    at.push_back(k);
    if (firstRedex(t->kids[k], at)) return true;
    at.pop_back();
  }
  return false;
}
}  // namespace detail

/// All redex positions in leftmost-outermost (pre-order) order.
inline std::vector<Path> redexPaths(const Term& t) {
  std::vector<Path> out;
  Path at;
  detail::collectRedexes(t, at, out);
  return out;
}

/// Contract the redex at `path`; nullopt if there is none there.
inline std::optional<RewriteStep> stepAt(const Term& t, const Path& path) {
  Term sub = subtermAt(t, path);
  if (!sub) return std::nullopt;
  auto c = contract(sub);
  if (!c) return std::nullopt;
  return RewriteStep{c->first, path, sub, c->second};
}

/// Leftmost-outermost single step; nullopt iff `t` is β-normal.
inline std::optional<RewriteStep> betaStep(const Term& t) {
  Path at;
  if (!detail::firstRedex(t, at)) return std::nullopt;
  return stepAt(t, at);
}

inline Term applyStep(const Term& t, const RewriteStep& s) { return replaceAt(t, s.path, s.after); }

struct Normalized {
  Term term;
  RewriteTrace trace;
  bool timedOut = false;
};

using TraceSink = std::function<void(const RewriteStep&)>;

inline constexpr std::size_t kDefaultReducerSteps = 100000;

/// Leftmost-outermost reduction until normal or `maxSteps` steps were taken.
/// Each step is passed to `sink` as soon as it is taken.
inline Normalized normalizeTerm(const Term& t, std::size_t maxSteps = kDefaultReducerSteps,
                                const TraceSink& sink = nullptr) {
  Normalized out{t, {t, {}}, false};
  while (true) {
    auto s = betaStep(out.term);
    if (!s) return out;
    if (out.trace.steps.size() >= maxSteps) {
      out.timedOut = true;
      return out;
    }
    out.term = applyStep(out.term, *s);
    if (sink) sink(*s);
    out.trace.steps.push_back(std::move(*s));
  }
}

class ReplayMismatch : public std::runtime_error {
 public:
  ReplayMismatch(std::size_t index, const std::string& what)
      : std::runtime_error("replay mismatch at step " + std::to_string(index) + ": " + what),
        index_(index) {}
  std::size_t index() const { return index_; }

 private:
  std::size_t index_;
};

/// Fold the steps over the initial term. Every recorded redex must agree
/// (up to α) with the current term at its position, and every recorded
/// contractum with the contraction the named rule actually produces.
inline Term replay(const RewriteTrace& tr) {
  Term cur = tr.initial;
  for (std::size_t i = 0; i < tr.steps.size(); ++i) {
    const RewriteStep& s = tr.steps[i];
    Term sub = subtermAt(cur, s.path);
    if (!sub) throw ReplayMismatch(i, "no subterm at " + formatPath(s.path));
    if (!alphaEq(sub, s.before)) throw ReplayMismatch(i, "recorded redex differs from term");
    auto c = contract(sub);
    if (!c || c->first != s.rule) throw ReplayMismatch(i, std::string("not a ") + ruleName(s.rule) + " redex");
    if (!alphaEq(c->second, s.after)) throw ReplayMismatch(i, "recorded contractum differs");
    cur = replaceAt(cur, s.path, c->second);
  }
  return cur;
}

}  // namespace ndk
