#include <gtest/gtest.h>

#include <functional>
#include <set>
#include <sstream>

#include <ndk/parse.hpp>
#include <ndk/reducer.hpp>

#include "support.hpp"

using namespace ndk;
namespace oracle = ndk::testing;

namespace {

Term T(const std::string& src) { return parseTerm(src, oracle::basics().sig.get()); }

std::string key(const Term& t) {
  std::ostringstream os;
  std::function<void(const oracle::LN&)> walk = [&](const oracle::LN& l) {
    os << l.tag << '(';
    for (const auto& k : l.kids) walk(k), os << ',';
    os << ')';
  };
  walk(oracle::nameless(t));
  return os.str();
}

// One rule application at the root, checked against the expected reduct.
void golden(Rule rule, const std::string& redex, const std::string& reduct) {
  Term t = T(redex);
  auto c = contract(t);
  ASSERT_TRUE(c) << redex;
  EXPECT_EQ(c->first, rule);
  EXPECT_TRUE(alphaEq(c->second, T(reduct))) << show(c->second) << " expected " << reduct;
  auto s = betaStep(t);
  ASSERT_TRUE(s);
  EXPECT_TRUE(s->path.empty());
}

// All terms reachable in at most `depth` steps, keyed up to α.
std::set<std::string> reach(const Term& t, int depth) {
  std::set<std::string> out{key(t)};
  std::vector<Term> frontier{t};
  for (int d = 0; d < depth && !frontier.empty(); ++d) {
    std::vector<Term> next;
    for (const auto& u : frontier)
      for (const auto& p : redexPaths(u)) {
        Term v = applyStep(u, *stepAt(u, p));
        if (out.insert(key(v)).second) next.push_back(v);
      }
    frontier = std::move(next);
  }
  return out;
}

// Normal forms reached by every reduction order.
std::set<std::string> allNormalForms(const Term& t, std::size_t& paths) {
  std::set<std::string> out;
  std::function<void(const Term&)> go = [&](const Term& u) {
    auto ps = redexPaths(u);
    if (ps.empty()) {
      out.insert(key(u));
      ++paths;
      return;
    }
    for (const auto& p : ps) go(applyStep(u, *stepAt(u, p)));
  };
  go(t);
  return out;
}

}  // namespace

// ---- the eight rewritings --------------------------------------------------

TEST(Golden, AndFst) { golden(Rule::AndFst, "fst(<a, b>)", "a"); }

TEST(Golden, AndSnd) { golden(Rule::AndSnd, "snd(<a, b>)", "b"); }

TEST(Golden, OrInl) { golden(Rule::OrInl, "case(inl(a), x. <x, c>, y. <c, y>)", "<a, c>"); }

TEST(Golden, OrInr) { golden(Rule::OrInr, "case(inr(b), x. <x, c>, y. <c, y>)", "<c, b>"); }

TEST(Golden, Imp) { golden(Rule::Imp, "app(\\x. <x, inl(x)>, a)", "<a, inl(a)>"); }

TEST(Golden, All) {
  golden(Rule::All, "extr(/\\x:D. <extr(p, x), extr(q, x)>, c1)", "<extr(p, c1), extr(q, c1)>");
}

TEST(Golden, Ex) {
  // d(g/h, s/t): h receives the proof component at the witness, t the witness.
  golden(Rule::Ex, "inst(eps(x. extr(g, x), c1), h. t. <h, extr(k, t)>)", "<extr(g, c1), extr(k, c1)>");
}

TEST(Golden, Id) { golden(Rule::Id, "rewr(refl(c1, c1), t. <refl[t](c1, c1), a>)", "<refl(c1, c1), a>"); }

TEST(Golden, IdCarriesEvidenceObject) {
  Individual c1 = iconst("c1", {"D"});
  Term inner = fst(pair(pvar("a"), pvar("b")));
  auto tr = std::make_shared<RewriteTrace>(RewriteTrace{inner, {{Rule::AndFst, {}, inner, pvar("a")}}});
  Term t = rewr(idIntro({std::nullopt, tr}, c1, c1), "t", idIntro(Evidence::variable("t"), c1, c1));
  auto c = contract(t);
  ASSERT_TRUE(c);
  EXPECT_EQ(c->first, Rule::Id);
  EXPECT_EQ(c->second->evidence.trace, tr);
}

TEST(Golden, CaptureAvoidedInContractum) {
  // The free y of the argument must not be captured by the inner binder.
  Term t = T("app(\\x. \\y. <x, y>, y)");
  auto c = contract(t);
  ASSERT_TRUE(c);
  EXPECT_EQ(show(c->second), "\\y'. <y, y'>");
}

TEST(Golden, IllShapedPairsAreStuck) {
  EXPECT_FALSE(betaStep(T("fst(inl(a))")));
  EXPECT_FALSE(betaStep(T("case(<a, b>, x. x, y. y)")));
  EXPECT_FALSE(betaStep(T("app(/\\x:D. a, b)")));
}

// ---- betaStep and normalize ------------------------------------------------

TEST(BetaStep, Examples) {
  auto s = betaStep(T("fst(<p, q>)"));
  ASSERT_TRUE(s);
  EXPECT_EQ(show(applyStep(T("fst(<p, q>)"), *s)), "p");
  EXPECT_FALSE(betaStep(T("\\x. x")));

  Term t = T("snd(<fst(<p, q>), r>)");
  auto root = betaStep(t);
  ASSERT_TRUE(root);
  EXPECT_TRUE(root->path.empty());
  EXPECT_EQ(root->rule, Rule::AndSnd);
  std::size_t paths = 0;
  EXPECT_EQ(allNormalForms(t, paths), (std::set<std::string>{key(T("r"))}));
}

TEST(Normalize, Examples) {
  auto pf = oracle::basics();
  Normalized a = normalizeTerm(T("app(\\x. x, \\y. y)"));
  EXPECT_EQ(show(a.term), "\\y. y");
  EXPECT_EQ(a.trace.steps.size(), 1u);

  Term b = T("fst(<snd(<a, b>), c>)");
  EXPECT_EQ(show(normalizeTerm(b).term), "b");
  std::size_t paths = 0;
  EXPECT_EQ(allNormalForms(b, paths), (std::set<std::string>{key(T("b"))}));
  EXPECT_EQ(paths, 2u);

  Judgement c = parseJudgement("p : A & B |- app(\\q. <snd(q), fst(q)>, p) : B & A", pf.sig);
  Normalized nc = normalize(c);
  EXPECT_EQ(show(nc.term), "<snd(p), fst(p)>");
  ASSERT_EQ(nc.trace.steps.size(), 1u);
  EXPECT_EQ(nc.trace.steps[0].rule, Rule::Imp);
}

TEST(Normalize, TimeoutKeepsStreamedPrefix) {
  Term t = T("fst(<snd(<a, b>), c>)");
  std::vector<RewriteStep> streamed;
  Normalized n = normalizeTerm(t, 1, [&](const RewriteStep& s) { streamed.push_back(s); });
  EXPECT_TRUE(n.timedOut);
  EXPECT_EQ(streamed.size(), 1u);
  EXPECT_EQ(n.trace.steps.size(), 1u);
}

TEST(Normalize, DeterministicAndReplayable) {
  for (const auto& j : oracle::corpus()) {
    Normalized a = normalize(j), b = normalize(j);
    ASSERT_EQ(a.trace.steps.size(), b.trace.steps.size());
    EXPECT_EQ(traceLines(a.trace), traceLines(b.trace));
    EXPECT_TRUE(alphaEq(replay(a.trace), a.term)) << show(j);
  }
}

TEST(Replay, EmptyTraceIsIdentity) {
  Term t = T("fst(<a, b>)");
  EXPECT_EQ(replay({t, {}}), t);
}

TEST(Replay, TamperedTraceRejected) {
  Normalized n = normalizeTerm(T("fst(<snd(<a, b>), c>)"));
  ASSERT_EQ(n.trace.steps.size(), 2u);

  RewriteTrace wrongAfter = n.trace;
  wrongAfter.steps[0].after = T("c");
  EXPECT_THROW(replay(wrongAfter), ReplayMismatch);

  RewriteTrace wrongRule = n.trace;
  wrongRule.steps[1].rule = Rule::AndFst;
  try {
    replay(wrongRule);
    FAIL() << "expected ReplayMismatch";
  } catch (const ReplayMismatch& e) {
    EXPECT_EQ(e.index(), 1u);
  }

  RewriteTrace wrongPath = n.trace;
  wrongPath.steps[0].path = {0, 0};
  EXPECT_THROW(replay(wrongPath), ReplayMismatch);
}

// ---- subject reduction, canonicity, confluence -----------------------------

TEST(SubjectReduction, IdentityApplication) {
  Judgement j = parseJudgement("|- app(\\x. x, \\y. y) : A -> A", oracle::basics().sig);
  Report r = subjectReduction(j);
  ASSERT_EQ(r.entries.size(), 1u);
  EXPECT_TRUE(r.allValid());
}

TEST(SubjectReduction, ExtrStepConcludesInstance) {
  Judgement j = parseJudgement("p : all x:D. P(x) |- extr(/\\y:D. app(\\h. h, extr(p, y)), c1) : P(c1)",
                               oracle::basics().sig);
  Report r = subjectReduction(j);
  ASSERT_FALSE(r.entries.empty());
  EXPECT_EQ(r.entries[0].step.rule, Rule::All);
  EXPECT_EQ(show(r.entries[0].step.after), "app(\\h. h, extr(p, c1))");
  EXPECT_TRUE(r.allValid());
}

TEST(SubjectReduction, EveryStepOfTheCorpusRechecks) {
  std::size_t steps = 0;
  for (const auto& j : oracle::corpus()) {
    Report r = subjectReduction(j);
    EXPECT_FALSE(r.timedOut);
    for (const auto& e : r.entries) {
      ++steps;
      EXPECT_TRUE(e.check.valid()) << show(j) << "\n  after " << ruleName(e.step.rule) << ": " << show(e.reduct)
                                   << "\n  " << (e.check.error ? e.check.error->render() : "");
    }
  }
  EXPECT_GE(steps, 30u);
}

TEST(SubjectReduction, EveryReductionOrderRechecks) {
  // Stronger than the leftmost-outermost report: all reducts of all orders.
  for (const auto& j : oracle::corpus()) {
    std::set<std::string> seen;
    std::vector<Term> todo{j.term};
    while (!todo.empty()) {
      Term u = todo.back();
      todo.pop_back();
      if (!seen.insert(key(u)).second) continue;
      EXPECT_TRUE(check(j.ctx, u, j.formula).valid()) << show(j) << "\n  reduct " << show(u);
      for (const auto& p : redexPaths(u)) todo.push_back(applyStep(u, *stepAt(u, p)));
    }
  }
}

TEST(Canonicity, ClosedCorpusTermsNormalizeToIntroductions) {
  std::size_t closedCount = 0;
  for (const auto& j : oracle::corpus()) {
    if (!oracle::closed(j)) continue;
    ++closedCount;
    Normalized n = normalize(j);
    EXPECT_FALSE(n.timedOut);
    EXPECT_TRUE(isCanonical(n.term)) << show(j) << " ~> " << show(n.term);
  }
  EXPECT_GE(closedCount, 20u);
}

TEST(Confluence, LocalPeaksRejoinWithinFour) {
  std::size_t peaks = 0;
  for (const auto& j : oracle::corpus()) {
    if (nodeCount(j.term) > 15) continue;
    std::set<std::string> seen;
    std::vector<Term> todo{j.term};
    while (!todo.empty()) {
      Term t = todo.back();
      todo.pop_back();
      if (!seen.insert(key(t)).second) continue;
      auto ps = redexPaths(t);
      for (std::size_t a = 0; a < ps.size(); ++a) {
        Term u1 = applyStep(t, *stepAt(t, ps[a]));
        todo.push_back(u1);
        for (std::size_t b = a + 1; b < ps.size(); ++b) {
          Term u2 = applyStep(t, *stepAt(t, ps[b]));
          ++peaks;
          auto r1 = reach(u1, 4), r2 = reach(u2, 4);
          bool joined = false;
          for (const auto& k : r1) joined |= r2.count(k) > 0;
          EXPECT_TRUE(joined) << show(t) << " peaks at " << formatPath(ps[a]) << " / " << formatPath(ps[b]);
        }
      }
    }
  }
  EXPECT_GT(peaks, 5u);
}

TEST(Confluence, UniqueNormalFormsOverAllOrders) {
  std::size_t paths = 0, terms = 0;
  for (const auto& j : oracle::corpus()) {
    if (nodeCount(j.term) > 15) continue;
    ++terms;
    auto nfs = allNormalForms(j.term, paths);
    EXPECT_EQ(nfs.size(), 1u) << show(j);
    EXPECT_EQ(*nfs.begin(), key(normalize(j).term));
  }
  EXPECT_GE(terms, 25u);
  EXPECT_GT(paths, terms);
}

// ---- serialization ---------------------------------------------------------

TEST(Serialization, TraceLine) {
  Normalized n = normalizeTerm(T("fst(<snd(<a, b>), c>)"));
  auto lines = traceLines(n.trace);
  ASSERT_EQ(lines.size(), 2u);
  EXPECT_EQ(lines[0], "step 1: AndFst @ root : fst(<snd(<a, b>), c>) ~> snd(<a, b>)");
  EXPECT_EQ(lines[1], "step 2: AndSnd @ root : snd(<a, b>) ~> b");

  Normalized m = normalizeTerm(T("\\q. <fst(<q, q>), q>"));
  EXPECT_EQ(traceLines(m.trace)[0], "step 1: AndFst @ 0.0 : fst(<q, q>) ~> q");
  EXPECT_EQ(traceLine(1, m.trace.steps[0], Notation::Paper), "step 1: AndFst @ 0.0 : FST(⟨q,q⟩) ~> q");
}

TEST(Serialization, Json) {
  Normalized n = normalizeTerm(T("snd(<a, app(\\x. x, b)>)"));
  nlohmann::json j = traceJson(n.trace, n.term);
  EXPECT_EQ(j["initial"], "snd(<a, app(\\x. x, b)>)");
  EXPECT_EQ(j["final"], "b");
  ASSERT_EQ(j["steps"].size(), 2u);
  EXPECT_EQ(j["steps"][0]["rule"], "AndSnd");
  EXPECT_EQ(j["steps"][0]["path"], nlohmann::json::array());
  EXPECT_EQ(j["steps"][1]["rule"], "Imp");
  EXPECT_EQ(j["steps"][1]["before"], "app(\\x. x, b)");
}

TEST(Serialization, StepBudgetFromEnvironment) {
  ::setenv("NDK_MAX_STEPS", "7", 1);
  EXPECT_EQ(stepBudget(), 7u);
  ::setenv("NDK_MAX_STEPS", "junk", 1);
  EXPECT_EQ(stepBudget(42), 42u);
  ::unsetenv("NDK_MAX_STEPS");
  EXPECT_EQ(stepBudget(), kDefaultReducerSteps);
}
