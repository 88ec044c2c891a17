// Acceptance run: one PASS/FAIL line per criterion; exit status 1 if any fails.

#include <sys/wait.h>

#include <cstdio>
#include <filesystem>
#include <functional>
#include <iostream>
#include <random>
#include <set>
#include <sstream>

#include <ndk/church.hpp>
#include <ndk/dialogue.hpp>
#include <ndk/reducer.hpp>

#include "support.hpp"

using namespace ndk;
namespace oracle = ndk::testing;

namespace {

struct Outcome {
  bool pass = true;
  std::ostringstream detail;

  void require(bool ok, const std::string& what) {
    if (!ok && pass) detail << "first failure: " << what;
    pass = pass && ok;
  }
};

std::string key(const oracle::LN& l) {
  std::string s = l.tag + "(";
  for (const auto& k : l.kids) s += key(k) + ",";
  return s + ")";
}

std::string key(const Term& t) { return key(oracle::nameless(t)); }

// De Bruijn rendering of untyped terms; free variables keep their names.
std::string debruijn(const lambda::UTerm& t, std::vector<Name>& env) {
  switch (t->kind) {
    case lambda::UKind::Var:
      for (std::size_t i = env.size(); i-- > 0;)
        if (env[i] == t->name) return std::to_string(env.size() - 1 - i);
      return t->name;
    case lambda::UKind::Lam: {
      env.push_back(t->name);
      std::string body = debruijn(t->fn, env);
      env.pop_back();
      return "L(" + body + ")";
    }
    case lambda::UKind::App:
      return "A(" + debruijn(t->fn, env) + "," + debruijn(t->arg, env) + ")";
  }
  return {};
}

std::string debruijn(const lambda::UTerm& t) {
  std::vector<Name> env;
  return debruijn(t, env);
}

// Every term reachable from `t` by any reduction order, keyed up to α.
void reachable(const Term& t, const std::function<void(const Term&)>& visit) {
  std::set<std::string> seen;
  std::vector<Term> todo{t};
  while (!todo.empty()) {
    Term u = todo.back();
    todo.pop_back();
    if (!seen.insert(key(u)).second) continue;
    visit(u);
    for (const auto& p : redexPaths(u)) todo.push_back(applyStep(u, *stepAt(u, p)));
  }
}

int run(const std::string& args) {
  std::string cmd = std::string(NDK_BINARY) + " " + args + " >/dev/null 2>&1";
  int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

// ---- criteria --------------------------------------------------------------

Outcome goldenRules() {
  Outcome o;
  auto sig = oracle::basics().sig;
  struct Case {
    Rule rule;
    const char* redex;
    const char* reduct;
  };
  const std::vector<Case> cases{
      {Rule::AndFst, "fst(<a, b>)", "a"},
      {Rule::AndSnd, "snd(<a, b>)", "b"},
      {Rule::OrInl, "case(inl(a), x. <x, c>, y. <c, y>)", "<a, c>"},
      {Rule::OrInr, "case(inr(b), x. <x, c>, y. <c, y>)", "<c, b>"},
      {Rule::Imp, "app(\\x. <x, inl(x)>, a)", "<a, inl(a)>"},
      {Rule::All, "extr(/\\x:D. <extr(p, x), extr(q, x)>, c1)", "<extr(p, c1), extr(q, c1)>"},
      {Rule::Ex, "inst(eps(x. extr(g, x), c1), h. t. <h, extr(k, t)>)", "<extr(g, c1), extr(k, c1)>"},
      {Rule::Id, "rewr(refl(c1, c1), t. <refl[t](c1, c1), a>)", "<refl(c1, c1), a>"},
  };
  for (const auto& c : cases) {
    auto r = contract(parseTerm(c.redex, sig.get()));
    o.require(r && r->first == c.rule && key(r->second) == key(parseTerm(c.reduct, sig.get())), c.redex);
  }
  o.detail << (o.pass ? "8 of 8 rules give the displayed reduct" : "");
  return o;
}

Outcome churchRules() {
  using namespace lambda;
  Outcome o;
  std::mt19937_64 rng(20240601);
  static const char* names[] = {"x", "y", "z"};
  auto pick = [&](int n) { return static_cast<int>(rng() % static_cast<unsigned>(n)); };
  std::function<UTerm(int)> gen = [&](int budget) -> UTerm {
    if (budget <= 1) return var(names[pick(3)]);
    if (budget == 2 || pick(3) == 0) return abs(names[pick(3)], gen(budget - 1));
    int left = 1 + pick(budget - 2);
    return apply(gen(left), gen(budget - 1 - left));
  };
  int checked = 0;
  while (checked < 100) {
    UTerm body = gen(1 + pick(6));
    UTerm arg = gen(1 + pick(4));
    UTerm t = apply(abs(names[pick(3)], body), arg);
    if (pick(2)) t = abs(names[pick(3)], t);
    if (size(t) > 12) continue;
    auto rs = redexes(t);
    const Path& pos = rs[rng() % rs.size()].position;
    auto [reduced, fwd] = step(t, pos, ConvRule::II);
    ConvStep back = mirror(fwd);
    auto [expanded, _] = step(reduced, back.position, ConvRule::III,
                              Expansion{at(t, pos)->fn->fn, at(t, pos)->fn->name, at(t, pos)->arg});
    o.require(back.rule == ConvRule::III && debruijn(back.after) == debruijn(t) && debruijn(expanded) == debruijn(t),
              show(t));
    ++checked;
  }
  auto omega = normalize(parse("(\\x. x x) (\\x. x x)"));
  o.require(omega.timedOut, "omega terminated");
  // Numerals decoded by counting applications of a fresh successor.
  auto decode = [](const UTerm& t) -> long {
    auto r = normalize(apply(apply(t, var("s#")), var("o#")));
    long n = 0;
    UTerm cur = r.term;
    while (cur->kind == UKind::App && cur->fn->kind == UKind::Var && cur->fn->name == "s#") ++n, cur = cur->arg;
    return cur->kind == UKind::Var && cur->name == "o#" ? n : -1;
  };
  o.require(decode(normalize(parse("#2 + #3")).term) == 5, "#2 + #3");
  o.require(decode(normalize(parse("#2 * #3")).term) == 6, "#2 * #3");
  if (o.pass) o.detail << "100 random II/III round trips, omega times out, 2+3=5, 2*3=6";
  return o;
}

Outcome subjectReductionCriterion() {
  Outcome o;
  std::set<FKind> connectives;
  bool nestedInst = false;
  std::function<void(const Formula&)> conn = [&](const Formula& f) {
    connectives.insert(f->kind);
    if (f->left) conn(f->left);
    if (f->right) conn(f->right);
  };
  std::function<bool(const Term&, bool)> nested = [&](const Term& t, bool under) {
    bool inst = t->kind == TKind::Inst;
    if (inst && under) return true;
    for (const auto& k : t->kids)
      if (nested(k, under || inst)) return true;
    return false;
  };
  std::size_t reducts = 0, judgements = 0;
  for (const auto& j : oracle::corpus()) {
    ++judgements;
    conn(j.formula);
    for (const auto& h : j.ctx.hyps)
      if (h.formula) conn(h.formula);
    nestedInst = nestedInst || nested(j.term, false);
    reachable(j.term, [&](const Term& u) {
      ++reducts;
      o.require(check(j.ctx, u, j.formula).valid(), show(j) + " reduct " + show(u));
    });
  }
  o.require(judgements >= 25, "corpus has fewer than 25 judgements");
  for (FKind k : {FKind::And, FKind::Or, FKind::Imp, FKind::Forall, FKind::Exists})
    o.require(connectives.count(k) > 0, "corpus misses a connective");
  o.require(nestedInst, "corpus has no nested inst");
  if (o.pass) o.detail << reducts << " reducts of " << judgements << " judgements re-check";
  return o;
}

Outcome canonicity() {
  Outcome o;
  static const std::set<TKind> intro{TKind::Pair, TKind::Inl, TKind::Inr, TKind::Lam,
                                     TKind::TLam, TKind::ExPair, TKind::IdIntro};
  std::size_t closed = 0;
  for (const auto& j : oracle::corpus()) {
    if (!oracle::closed(j)) continue;
    ++closed;
    Normalized n = normalize(j);
    o.require(!n.timedOut && redexPaths(n.term).empty() && intro.count(n.term->kind), show(j) + " ~> " + show(n.term));
  }
  if (o.pass) o.detail << closed << " closed terms reach introduction-headed normal forms";
  return o;
}

Outcome confluence() {
  Outcome o;
  std::size_t terms = 0, orders = 0;
  for (const auto& j : oracle::corpus()) {
    if (nodeCount(j.term) > 15) continue;
    ++terms;
    std::set<std::string> nfs;
    std::function<void(const Term&)> go = [&](const Term& u) {
      auto ps = redexPaths(u);
      if (ps.empty()) {
        nfs.insert(key(u));
        ++orders;
      }
      for (const auto& p : ps) go(applyStep(u, *stepAt(u, p)));
    };
    go(j.term);
    o.require(nfs.size() == 1, show(j));
  }
  if (o.pass) o.detail << terms << " terms, " << orders << " reduction orders, one normal form each";
  return o;
}

Outcome generality() {
  using namespace dialogue;
  Outcome o;
  std::size_t theses = 0, attacks = 0;
  for (const auto& j : oracle::corpus()) {
    DialogueState s = openGame(j);
    const Assertion& a = s.standing();
    if (a.formula->kind != FKind::Forall || a.residual->kind != TKind::TLam) continue;
    ++theses;
    for (const auto& c : j.ctx.sig->constantsOf(a.formula->sort)) {
      ++attacks;
      DialogueState t = applyMove(s, attackAll(c.name));
      std::vector<RewriteStep> steps;
      for (std::size_t i = s.history.size() + 1; i < t.history.size(); ++i)
        if (t.history[i].actor == Actor::Proponent)
          steps.insert(steps.end(), t.history[i].justification.steps.begin(), t.history[i].justification.steps.end());
      const Move& d = t.history.back();
      oracle::LN want = oracle::oracleSubstInd(oracle::nameless(a.formula->left), a.formula->name, c);
      o.require(steps.size() == 1 && steps[0].rule == Rule::All && d.kind == MoveKind::Defend &&
                    key(oracle::nameless(d.claim)) == key(want) && check(t.ctx, d.term, d.claim).valid(),
                show(j) + " at " + c.name);
    }
  }
  o.require(theses >= 2, "fewer than two universal theses");
  if (o.pass) o.detail << theses << " theses, " << attacks << " constant attacks, one All step each";
  return o;
}

Outcome totality() {
  using namespace dialogue;
  Outcome o;
  std::size_t leaves = 0, responses = 0;
  for (const auto& j : oracle::corpus()) {
    GameTree t;
    try {
      t = playExhaustive(j, 10);
    } catch (const IllegalMove& e) {
      o.require(false, show(j) + ": " + e.what());
      continue;
    }
    LeafCounts n = countLeaves(t);
    leaves += n.leaves;
    o.require(n.stalled == 0 && n.depthExceeded == 0, show(j));
    forEachNode(t, [&](const GameTree& node) {
      if (!node.children.empty()) return;
      for (const auto& m : node.state.history) {
        if (m.actor != Actor::Proponent) continue;
        ++responses;
        const Justification& jf = m.justification;
        o.require(jf.before && key(replay({jf.before, jf.steps})) == key(jf.after), transcriptLine(m));
      }
    });
  }
  if (o.pass) o.detail << leaves << " leaves, 0 stalled, " << responses << " responses replay";
  return o;
}

Outcome choiceDirection() {
  using namespace dialogue;
  Outcome o;
  std::size_t moves = 0;
  for (const auto& j : oracle::corpus()) {
    forEachNode(playExhaustive(j, 10), [&](const GameTree& node) {
      const DialogueState& s = node.state;
      std::set<Name> concessions;
      for (const auto& [n, f] : s.opponentConcessions()) concessions.insert(n);
      for (const auto& m : s.history) {
        ++moves;
        bool chooses = m.side.has_value() || (m.witness && m.kind != MoveKind::AttackAll);
        // Opponent disjuncts and witnesses only ever answer for its own concessions.
        if (m.actor == Actor::Opponent && chooses)
          o.require(m.kind == MoveKind::Concede && concessions.count(m.concession), transcriptLine(m));
        // Universal witnesses against Proponent assertions come from the Opponent.
        if (m.kind == MoveKind::AttackAll)
          o.require(m.actor == Actor::Opponent ? m.assertion >= 0 : concessions.count(m.concession) > 0,
                    transcriptLine(m));
      }
    });
  }
  if (o.pass) o.detail << moves << " moves scanned";
  return o;
}

Outcome parserAndCli() {
  Outcome o;
  std::size_t lines = 0;
  for (const auto& e : std::filesystem::directory_iterator(NDK_CORPUS)) {
    if (e.path().extension() != ".nd") continue;
    ProblemFile pf = loadProblem(e.path().string());
    for (const auto& pl : pf.judgements) {
      ++lines;
      Judgement back = parseJudgement(show(pl.judgement), pf.sig, pl.line);
      o.require(key(back.term) == key(pl.judgement.term) &&
                    key(oracle::nameless(back.formula)) == key(oracle::nameless(pl.judgement.formula)) &&
                    show(back) == show(pl.judgement),
                e.path().string() + ":" + std::to_string(pl.line));
    }
  }
  std::string c = std::string(NDK_CORPUS) + "/";
  struct Expect {
    std::string args;
    int code;
  };
  auto bad = std::filesystem::temp_directory_path() / "ndk_acceptance_bad.nd";
  std::FILE* f = std::fopen(bad.c_str(), "w");
  std::fputs("pred A\n|- <a : A\n", f);
  std::fclose(f);
  for (const auto& x : std::vector<Expect>{
           {"check " + c + "basics.nd", 0},
           {"check " + c + "eigen_leak.nd", 1},
           {"check " + bad.string(), 2},
           {"check /nonexistent.nd", 2},
           {"", 2},
           {"normalize " + c + "redexes.nd", 0},
           {"lambda " + c + "church.lam", 0},
           {"lambda " + c + "omega.lam", 1},
           {"play " + c + "dialogue.nd", 0},
           {"play " + c + "dialogue.nd --policy script --script " + c + "swap.script", 0},
           {"play " + c + "dialogue.nd --policy script --script " + c + "illegal.script", 1},
       }) {
    int got = run(x.args);
    o.require(got == x.code, "ndk " + x.args + " exited " + std::to_string(got));
  }
  std::filesystem::remove(bad);
  if (o.pass) o.detail << lines << " judgements round-trip, 11 exit codes match";
  return o;
}

}  // namespace

int main() {
  struct Criterion {
    const char* name;
    Outcome (*fn)();
  };
  const Criterion criteria[] = {
      {"golden-beta-rules", goldenRules},
      {"church-rules", churchRules},
      {"subject-reduction", subjectReductionCriterion},
      {"canonicity", canonicity},
      {"confluence", confluence},
      {"generality", generality},
      {"dialogue-totality", totality},
      {"choice-direction", choiceDirection},
      {"parser-and-cli", parserAndCli},
  };
  int failed = 0;
  for (const auto& c : criteria) {
    Outcome o;
    try {
      o = c.fn();
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail << "exception: " << e.what();
    }
    std::cout << (o.pass ? "PASS " : "FAIL ") << c.name << ": " << o.detail.str() << std::endl;
    failed += !o.pass;
  }
  return failed == 0 ? 0 : 1;
}
