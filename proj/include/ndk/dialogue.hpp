#pragma once

// Dialogue games over proof terms. The Opponent attacks the Proponent's
// standing assertion with the elimination matching its connective; the
// Proponent answers by applying that destructor to the residual term and
// normalizing. When the residual gets stuck on a concession, the Proponent
// counterattacks the concession and the Opponent must grant its consequence.
//
//   A & B      L? / R?     A / B
//   A | B      ?           A or B, the residual's injection decides
//   A -> B     o : A ?     B
//   all x:D.P  c ?         P(c)
//   some x:D.P ?           s, P(s), the residual's witness
//   Id{D}(a,b) ?           a =_r b

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <random>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "ndk/checker.hpp"
#include "ndk/parse.hpp"
#include "ndk/reducer.hpp"

namespace ndk::dialogue {

enum class Actor { Proponent, Opponent };
enum class MoveKind { AttackAndL, AttackAndR, AttackOr, AttackImp, AttackAll, AttackEx, AttackId, Defend, Concede, Resign };
enum class Side { Left, Right };
enum class Status { Open, ProponentWins, Stalled };

inline const char* actorName(Actor a) { return a == Actor::Proponent ? "Proponent" : "Opponent"; }

inline const char* kindName(MoveKind k) {
  switch (k) {
    case MoveKind::AttackAndL: return "AttackAndL";
    case MoveKind::AttackAndR: return "AttackAndR";
    case MoveKind::AttackOr: return "AttackOr";
    case MoveKind::AttackImp: return "AttackImp";
    case MoveKind::AttackAll: return "AttackAll";
    case MoveKind::AttackEx: return "AttackEx";
    case MoveKind::AttackId: return "AttackId";
    case MoveKind::Defend: return "Defend";
    case MoveKind::Concede: return "Concede";
    case MoveKind::Resign: return "Resign";
  }
  return "?";
}

inline std::optional<MoveKind> kindFromName(const std::string& s) {
  for (int k = 0; k <= static_cast<int>(MoveKind::Resign); ++k)
    if (s == kindName(static_cast<MoveKind>(k))) return static_cast<MoveKind>(k);
  return std::nullopt;
}

inline const char* statusName(Status s) {
  switch (s) {
    case Status::Open: return "Open";
    case Status::ProponentWins: return "ProponentWins";
    case Status::Stalled: return "Stalled";
  }
  return "?";
}

inline bool isAttack(MoveKind k) { return k <= MoveKind::AttackId; }

/// A stretch of normalization: `steps` rewrite `before` into `after`.
struct Justification {
  Term before;
  std::vector<RewriteStep> steps;
  Term after;
};

struct Move {
  Actor actor = Actor::Opponent;
  MoveKind kind = MoveKind::Resign;
  int assertion = -1;    // Proponent assertion attacked or made
  Name concession;       // concession attacked (Proponent) or granted (Opponent, AttackImp)
  Formula claim;         // Defend, Concede; AttackImp's antecedent
  Term term;             // Defend residual; AttackImp argument when given
  std::optional<Individual> witness;  // AttackAll; Concede and Defend for ∃
  bool fresh = false;                 // witness drawn from the reserved pool
  std::optional<Side> side;           // Concede and Defend for ∨
  std::optional<Evidence> evidence;   // Defend for Id
  Justification justification;        // Proponent moves
};

inline Move makeMove(Actor a, MoveKind k) {
  Move m;
  m.actor = a;
  m.kind = k;
  return m;
}

inline Move opponent(MoveKind k) { return makeMove(Actor::Opponent, k); }

inline Move attackAll(const std::string& witness) {
  Move m = opponent(MoveKind::AttackAll);
  if (witness == "fresh") m.fresh = true;
  else m.witness = ivar(witness);
  return m;
}

inline Move concedeSide(Side s) {
  Move m = opponent(MoveKind::Concede);
  m.side = s;
  return m;
}

inline Move concedeWitness(const std::string& witness) {
  Move m = opponent(MoveKind::Concede);
  if (witness == "fresh") m.fresh = true;
  else m.witness = ivar(witness);
  return m;
}

/// Identity of an Opponent choice, independent of names the engine assigns.
inline std::string moveKey(const Move& m) {
  std::string k = kindName(m.kind);
  if (m.fresh) k += " fresh";
  else if (m.witness) k += " " + m.witness->name;
  if (m.side) k += *m.side == Side::Left ? " left" : " right";
  if (m.kind == MoveKind::AttackImp && m.term && m.actor == Actor::Opponent) k += " " + show(m.term);
  return k;
}

inline std::string showEvidence(const Evidence& ev) {
  if (ev.isVar()) return *ev.var;
  return "[" + std::to_string(ev.length()) + " steps]";
}

/// Short attack label as used on the board: `L?`, `R?`, `?`, `o1 : A ?`, `c1 ?`.
inline std::string label(const Move& m) {
  switch (m.kind) {
    case MoveKind::AttackAndL: return "L?";
    case MoveKind::AttackAndR: return "R?";
    case MoveKind::AttackOr: case MoveKind::AttackEx: case MoveKind::AttackId: return "?";
    case MoveKind::AttackImp:
      if (m.actor == Actor::Proponent || (m.term && m.concession.empty())) return show(m.term) + " ?";
      return m.concession + " : " + (m.claim ? show(m.claim) : std::string("_")) + " ?";
    case MoveKind::AttackAll: return (m.witness ? m.witness->name : std::string("fresh")) + " ?";
    case MoveKind::Concede:
      if (m.claim) return m.concession + " : " + show(m.claim);
      if (m.side) return *m.side == Side::Left ? "left" : "right";
      return m.witness ? m.witness->name : std::string("fresh");
    case MoveKind::Resign: return "resign";
    case MoveKind::Defend: {
      std::string c = show(m.claim);
      if (m.witness) c = m.witness->name + ", " + c;
      if (m.evidence && m.claim->kind == FKind::Id)
        c = m.claim->args[0].name + " =_" + showEvidence(*m.evidence) + " " + m.claim->args[1].name;
      return c + " by " + show(m.term);
    }
  }
  return "?";
}

/// One transcript line: `O: <attack>` or `P: <move> [steps: k]`.
inline std::string transcriptLine(const Move& m) {
  if (m.actor == Actor::Opponent) return "O: " + label(m);
  std::string body = label(m);
  if (isAttack(m.kind)) body = m.concession + " " + body;
  return "P: " + body + " [steps: " + std::to_string(m.justification.steps.size()) + "]";
}

class NotValid : public std::runtime_error {
 public:
  explicit NotValid(Diagnostic d) : std::runtime_error("NotValid: " + d.render()), diagnostic(std::move(d)) {}
  Diagnostic diagnostic;
};

class IllegalMove : public std::runtime_error {
 public:
  IllegalMove(const std::string& reason, std::vector<Move> legalMoves)
      : std::runtime_error("IllegalMove: " + reason), reason(reason), legal(std::move(legalMoves)) {}
  std::string reason;
  std::vector<Move> legal;
};

struct Assertion {
  int id = 0;
  Formula formula;
  Term residual;
};

/// What the Proponent is about to defend. The goal of ∨ and ∃ answers is
/// unknown until a stuck residual has been opened by the Opponent.
struct Response {
  std::optional<Move> attack;  // nullopt while asserting the thesis
  Formula goal;
  std::optional<Side> side;
  std::optional<Individual> witness;
  std::optional<Evidence> evidence;
};

/// A counterattack waiting for the Opponent's choice. `path` locates the
/// destructor applied to the attacked concession inside `term`.
struct Pending {
  Term term;
  Path path;
  Response response;
};

struct DialogueState {
  Judgement thesis;
  Context ctx;  // thesis context extended by concessions and pool individuals
  std::vector<Assertion> proponentStore;
  std::vector<Move> history;
  Actor turn = Actor::Opponent;
  Status status = Status::Open;
  std::string reason;
  std::optional<Pending> pending;
  std::set<std::string> attacked;  // "<assertion>/<key>", the repetition rule
  Justification opening;

  const Assertion& standing() const { return proponentStore.back(); }

  std::vector<std::pair<Name, Formula>> opponentConcessions() const {
    std::vector<std::pair<Name, Formula>> out;
    for (const auto& h : ctx.hyps)
      if (h.kind == Hyp::Kind::Proof) out.emplace_back(h.name, h.formula);
    return out;
  }

  std::vector<Individual> individuals(const Sort& s) const {
    std::vector<Individual> out;
    for (const auto& h : ctx.hyps)
      if (h.kind == Hyp::Kind::Individual && h.sort == s) out.push_back(ivar(h.name));
    return out;
  }
};

namespace detail {

inline Name nextName(const Context& ctx, const std::string& prefix) {
  std::set<Name> used = ctx.names();
  for (int k = 1;; ++k)
    if (!used.count(prefix + std::to_string(k))) return prefix + std::to_string(k);
}

inline Name nextConcession(const DialogueState& s) { return nextName(s.ctx, "o"); }

/// Reserved pool names cannot be written in problem files, so they never
/// collide with declared constants or hypotheses.
inline Name nextPool(const DialogueState& s, const Sort& sort) { return nextName(s.ctx, "_" + sort.name); }

inline void win(DialogueState& s, std::string why) {
  s.status = Status::ProponentWins;
  s.reason = std::move(why);
  s.pending.reset();
}

inline void stall(DialogueState& s, std::string why) {
  s.status = Status::Stalled;
  s.reason = std::move(why);
  s.pending.reset();
}

/// Innermost destructor on the head spine of a neutral term, when its
/// principal argument is a variable.
inline std::optional<Path> stuckAt(const Term& t) {
  if (!isDestructor(t)) return std::nullopt;
  Path p;
  Term cur = t;
  for (;;) {
    const Term& head = cur->kids[0];
    if (head->kind == TKind::Var) return p;
    if (!isDestructor(head)) return std::nullopt;
    p.push_back(0);
    cur = head;
  }
}

inline Formula quantifierInstance(const Formula& q, const Individual& w) {
  return substInd(q->left, q->name, w, q->sort);
}

/// Witness options offered to the Opponent for sort `s`: declared constants,
/// individuals in play, and the next pool individual.
inline std::vector<std::pair<Individual, bool>> witnessOptions(const DialogueState& s, const Sort& sort) {
  std::vector<std::pair<Individual, bool>> out;
  for (const auto& c : s.ctx.sig->constantsOf(sort)) out.emplace_back(c, false);
  for (const auto& i : s.individuals(sort)) out.emplace_back(i, false);
  out.emplace_back(ivar(nextPool(s, sort)), true);
  return out;
}

inline Individual introduce(DialogueState& s, const Individual& w, bool fresh, const Sort& sort) {
  if (fresh) s.ctx = s.ctx.withIndividual(w.name, sort);
  return w;
}

inline std::vector<Move> concessionOptions(const DialogueState& s) {
  const Pending& p = *s.pending;
  Term d = subtermAt(p.term, p.path);
  Move base = opponent(MoveKind::Concede);
  if (d->kind == TKind::Case) return {concedeSide(Side::Left), concedeSide(Side::Right)};
  if (d->kind == TKind::Inst) {
    const Formula& f = s.ctx.find(d->kids[0]->name)->formula;
    std::vector<Move> out;
    for (const auto& [w, fresh] : witnessOptions(s, f->sort)) {
      Move m = base;
      m.witness = w;
      m.fresh = fresh;
      out.push_back(m);
    }
    return out;
  }
  return {base};
}

inline Move counterattack(const Term& d, const Hyp& h) {
  Move m = makeMove(Actor::Proponent, MoveKind::Resign);
  m.concession = h.name;
  switch (d->kind) {
    case TKind::Fst: m.kind = MoveKind::AttackAndL; break;
    case TKind::Snd: m.kind = MoveKind::AttackAndR; break;
    case TKind::Case: m.kind = MoveKind::AttackOr; break;
    case TKind::App:
      m.kind = MoveKind::AttackImp;
      m.term = d->kids[1];
      m.claim = h.formula->left;
      break;
    case TKind::Extr:
      m.kind = MoveKind::AttackAll;
      m.witness = d->inds[0];
      break;
    case TKind::Inst: m.kind = MoveKind::AttackEx; break;
    case TKind::Rewr: m.kind = MoveKind::AttackId; break;
    default: break;
  }
  return m;
}

inline void finish(DialogueState& s, const Justification& just, const Response& r) {
  Assertion a{static_cast<int>(s.proponentStore.size()), r.goal, just.after};
  if (r.attack) {
    s.proponentStore.push_back(a);
    Move m = makeMove(Actor::Proponent, MoveKind::Defend);
    m.assertion = a.id;
    m.claim = r.goal;
    m.term = just.after;
    m.side = r.side;
    m.witness = r.witness;
    m.evidence = r.evidence;
    m.justification = just;
    s.history.push_back(std::move(m));
  } else {
    a.id = 0;
    s.proponentStore[0] = a;
    s.opening = just;
  }
  s.pending.reset();
  s.turn = Actor::Opponent;

  CheckResult c = check(s.ctx, a.residual, a.formula);
  if (!c.valid()) return stall(s, "residual does not check: " + c.error->render());
  if (r.attack && r.attack->kind == MoveKind::AttackId) return win(s, "evidence revealed");
  if (!isAtomic(a.formula)) {
    s.status = Status::Open;
    return;
  }
  if (a.residual->kind == TKind::Var) {
    const Hyp* h = s.ctx.find(a.residual->name);
    if (h && h->kind == Hyp::Kind::Proof && !h->evidence && alphaEq(h->formula, a.formula))
      return win(s, show(a.formula) + " was conceded as " + h->name);
  }
  if (freeVars(a.residual).proof.empty()) return win(s, "closed defense of " + show(a.formula));
  stall(s, "atomic " + show(a.formula) + " defended by open " + show(a.residual));
}

/// Grant the Opponent's concession for the pending counterattack and return
/// the term with the stuck destructor replaced.
inline std::pair<Term, Response> concede(DialogueState& s, const Move& choice) {
  Pending p = *s.pending;
  s.pending.reset();
  Term d = subtermAt(p.term, p.path);
  const Name o = d->kids[0]->name;
  const Formula f = s.ctx.find(o)->formula;
  const Name granted = nextConcession(s);
  Move m = choice;
  m.actor = Actor::Opponent;
  m.kind = MoveKind::Concede;
  m.concession = granted;
  Term replacement = pvar(granted);
  bool evidence = false;
  Response& r = p.response;
  switch (d->kind) {
    case TKind::Fst: m.claim = f->left; break;
    case TKind::Snd: m.claim = f->right; break;
    case TKind::App: m.claim = f->right; break;
    case TKind::Extr: m.claim = quantifierInstance(f, d->inds[0]); break;
    case TKind::Case:
      m.claim = *m.side == Side::Left ? f->left : f->right;
      replacement = *m.side == Side::Left ? substProof(d->kids[1], d->name, replacement)
                                          : substProof(d->kids[2], d->name2, replacement);
      if (!r.goal) {
        const Formula& standing = s.standing().formula;
        r.side = m.side;
        r.goal = *m.side == Side::Left ? standing->left : standing->right;
      }
      break;
    case TKind::Inst: {
      Individual w = introduce(s, *m.witness, m.fresh, f->sort);
      m.claim = quantifierInstance(f, w);
      Subst sub;
      sub.proof.emplace(d->name, replacement);
      sub.ind.emplace(d->name2, w);
      replacement = substitute(d->kids[1], sub);
      if (!r.goal) {
        r.witness = w;
        r.goal = quantifierInstance(s.standing().formula, w);
      }
      break;
    }
    case TKind::Rewr:
      m.claim = f;
      evidence = true;
      replacement = substEvidence(d->kids[1], d->name, Evidence::variable(granted));
      if (!r.evidence) r.evidence = Evidence::variable(granted);
      break;
    default: break;
  }
  s.ctx = s.ctx.withProof(granted, m.claim, evidence);
  s.history.push_back(std::move(m));
  return {replaceAt(p.term, p.path, replacement), r};
}

/// Normalize `j` and counterattack until the result is canonical or a
/// variable, then defend it; stops early when the Opponent has a choice.
inline void drive(DialogueState& s, Term j, Response r) {
  for (;;) {
    Normalized n = normalizeTerm(j, stepBudget());
    Justification just{j, n.trace.steps, n.term};
    if (n.timedOut) return stall(s, "step budget exhausted");
    auto path = stuckAt(n.term);
    if (!path) {
      if (isDestructor(n.term)) return stall(s, "residual " + show(n.term) + " is stuck");
      return finish(s, just, r);
    }
    Term d = subtermAt(n.term, *path);
    const Hyp* h = s.ctx.find(d->kids[0]->name);
    if (!h || h->kind != Hyp::Kind::Proof || h->evidence)
      return stall(s, "residual is stuck on " + d->kids[0]->name + ", which is not a concession");
    if (d->kind == TKind::Abort) return win(s, h->name + " concedes absurdity");
    Move counter = counterattack(d, *h);
    counter.justification = just;
    s.history.push_back(std::move(counter));
    s.pending = Pending{n.term, *path, r};
    auto options = concessionOptions(s);
    if (options.size() > 1) {
      s.turn = Actor::Opponent;
      return;
    }
    std::tie(j, r) = concede(s, options[0]);
  }
}

}  // namespace detail

/// Check the thesis, normalize its term, and assert it.
inline DialogueState openGame(const Judgement& j) {
  CheckResult c = check(j);
  if (!c.valid()) throw NotValid(*c.error);
  DialogueState s;
  s.thesis = j;
  s.ctx = j.ctx;
  s.proponentStore.push_back({0, j.formula, j.term});
  Response thesis;
  thesis.goal = j.formula;
  detail::drive(s, j.term, thesis);
  return s;
}

/// Opponent moves available now: attacks on the standing assertion, or the
/// choices of a pending concession. Repeated attacks are excluded.
inline std::vector<Move> legalAttacks(const DialogueState& s) {
  if (s.status != Status::Open || s.turn != Actor::Opponent) return {};
  if (s.pending) return detail::concessionOptions(s);
  const Assertion& a = s.standing();
  const Formula& f = a.formula;
  std::vector<Move> out;
  auto add = [&](Move m) {
    m.assertion = a.id;
    if (!s.attacked.count(std::to_string(a.id) + "/" + moveKey(m))) out.push_back(std::move(m));
  };
  switch (f->kind) {
    case FKind::And:
      add(opponent(MoveKind::AttackAndL));
      add(opponent(MoveKind::AttackAndR));
      break;
    case FKind::Or: add(opponent(MoveKind::AttackOr)); break;
    case FKind::Imp: {
      Move m = opponent(MoveKind::AttackImp);
      m.concession = detail::nextConcession(s);
      m.claim = f->left;
      add(m);
      break;
    }
    case FKind::Forall:
      for (const auto& [w, fresh] : detail::witnessOptions(s, f->sort)) {
        Move m = opponent(MoveKind::AttackAll);
        m.witness = w;
        m.fresh = fresh;
        add(m);
      }
      break;
    case FKind::Exists: add(opponent(MoveKind::AttackEx)); break;
    case FKind::Id: add(opponent(MoveKind::AttackId)); break;
    case FKind::Atom: case FKind::Bottom: break;
  }
  return out;
}

/// Apply an Opponent move and compute the Proponent's reply.
inline DialogueState applyMove(const DialogueState& s0, const Move& m) {
  if (m.actor != Actor::Opponent) throw IllegalMove("only Opponent moves are played from outside", {});
  std::vector<Move> legal = legalAttacks(s0);
  if (s0.status != Status::Open) throw IllegalMove(std::string("game is over: ") + statusName(s0.status), legal);
  DialogueState s = s0;
  if (m.kind == MoveKind::Resign) {
    s.history.push_back(m);
    detail::win(s, "Opponent resigned");
    return s;
  }
  if (!s.pending && m.assertion >= 0 && m.assertion != s.standing().id)
    throw IllegalMove("only the standing assertion #" + std::to_string(s.standing().id) + " may be attacked", legal);
  std::string key = moveKey(m);
  if (!s.pending && s.attacked.count(std::to_string(s.standing().id) + "/" + key))
    throw IllegalMove("repeated attack " + key, legal);

  const Move* match = nullptr;
  for (const auto& l : legal)
    if (moveKey(l) == key || (m.kind == MoveKind::AttackImp && l.kind == MoveKind::AttackImp && m.term)) match = &l;
  if (!match) throw IllegalMove(key + " is not legal here", legal);
  Move played = *match;

  if (s.pending) {
    auto [j, r] = detail::concede(s, played);
    detail::drive(s, j, r);
    return s;
  }

  const Assertion a = s.standing();
  const Formula& f = a.formula;
  const Term& r = a.residual;
  s.attacked.insert(std::to_string(a.id) + "/" + key);
  Response resp;
  Term j;
  switch (played.kind) {
    case MoveKind::AttackAndL: j = fst(r), resp.goal = f->left; break;
    case MoveKind::AttackAndR: j = snd(r), resp.goal = f->right; break;
    case MoveKind::AttackImp:
      if (m.term) {
        CheckResult c = check(s.ctx, m.term, f->left);
        if (!c.valid()) throw IllegalMove(show(m.term) + " does not prove " + show(f->left), legal);
        played.term = m.term;
        played.concession.clear();
        j = app(r, m.term);
      } else {
        s.ctx = s.ctx.withProof(played.concession, f->left);
        j = app(r, pvar(played.concession));
      }
      resp.goal = f->right;
      break;
    case MoveKind::AttackAll: {
      Individual w = detail::introduce(s, *played.witness, played.fresh, f->sort);
      j = extr(r, w);
      resp.goal = detail::quantifierInstance(f, w);
      break;
    }
    case MoveKind::AttackOr:
      j = caseOf(r, "x", pvar("x"), "y", pvar("y"));
      if (r->kind == TKind::Inl) resp.side = Side::Left, resp.goal = f->left;
      if (r->kind == TKind::Inr) resp.side = Side::Right, resp.goal = f->right;
      break;
    case MoveKind::AttackEx:
      j = inst(r, "h", "t", pvar("h"));
      if (r->kind == TKind::ExPair) resp.witness = r->inds[0], resp.goal = detail::quantifierInstance(f, r->inds[0]);
      break;
    case MoveKind::AttackId:
      j = rewr(r, "t", idIntro(Evidence::variable("t"), f->args[0], f->args[1]));
      resp.goal = f;
      if (r->kind == TKind::IdIntro) resp.evidence = r->evidence;
      break;
    default: throw IllegalMove(key + " is not an attack", legal);
  }
  resp.attack = played;
  s.history.push_back(played);
  detail::drive(s, j, resp);
  return s;
}

// ---------------------------------------------------------------------------
// Play-out

enum class Leaf { Inner, ProponentWins, Stalled, DepthExceeded };

inline const char* leafName(Leaf l) {
  switch (l) {
    case Leaf::Inner: return "Inner";
    case Leaf::ProponentWins: return "ProponentWins";
    case Leaf::Stalled: return "Stalled";
    case Leaf::DepthExceeded: return "DepthExceeded";
  }
  return "?";
}

struct GameTree {
  DialogueState state;
  Leaf leaf = Leaf::Inner;
  std::vector<std::pair<Move, GameTree>> children;
};

struct LeafCounts {
  std::size_t leaves = 0, wins = 0, stalled = 0, depthExceeded = 0;
};

inline GameTree explore(const DialogueState& s, int depth) {
  GameTree t;
  t.state = s;
  if (s.status == Status::ProponentWins) t.leaf = Leaf::ProponentWins;
  else if (s.status == Status::Stalled) t.leaf = Leaf::Stalled;
  else if (depth <= 0) t.leaf = Leaf::DepthExceeded;
  else
    for (const auto& m : legalAttacks(s)) t.children.emplace_back(m, explore(applyMove(s, m), depth - 1));
  if (t.leaf == Leaf::Inner && t.children.empty()) t.leaf = Leaf::Stalled;
  return t;
}

/// Full game tree; depth counts Opponent choices.
inline GameTree playExhaustive(const Judgement& j, int depthLimit) { return explore(openGame(j), depthLimit); }

inline void forEachNode(const GameTree& t, const std::function<void(const GameTree&)>& f) {
  f(t);
  for (const auto& [m, sub] : t.children) forEachNode(sub, f);
}

inline LeafCounts countLeaves(const GameTree& t) {
  LeafCounts c;
  forEachNode(t, [&](const GameTree& n) {
    if (n.leaf == Leaf::Inner) return;
    ++c.leaves;
    if (n.leaf == Leaf::ProponentWins) ++c.wins;
    if (n.leaf == Leaf::Stalled) ++c.stalled;
    if (n.leaf == Leaf::DepthExceeded) ++c.depthExceeded;
  });
  return c;
}

/// Uniformly random Opponent until the game ends or `depthLimit` choices.
inline DialogueState playRandom(const Judgement& j, std::uint64_t seed, int depthLimit) {
  std::mt19937_64 rng(seed);
  DialogueState s = openGame(j);
  for (int d = 0; d < depthLimit && s.status == Status::Open; ++d) {
    auto legal = legalAttacks(s);
    if (legal.empty()) break;
    s = applyMove(s, legal[rng() % legal.size()]);
  }
  return s;
}

/// Play the given Opponent moves in order. An IllegalMove propagates with
/// the index of the offending move in `failedAt`.
inline DialogueState playScripted(const Judgement& j, const std::vector<Move>& script, int depthLimit,
                                  std::size_t* failedAt = nullptr) {
  DialogueState s = openGame(j);
  for (std::size_t i = 0; i < script.size() && static_cast<int>(i) < depthLimit; ++i) {
    if (failedAt) *failedAt = i;
    s = applyMove(s, script[i]);
  }
  return s;
}

inline std::vector<std::string> transcript(const DialogueState& s) {
  std::vector<std::string> out;
  for (const auto& m : s.history) out.push_back(transcriptLine(m));
  return out;
}

// ---------------------------------------------------------------------------
// Text and JSON forms of moves and states

/// Script syntax, one move per line: `AttackAndL`, `AttackImp [term]`,
/// `AttackAll c1|fresh`, `Concede left|right|c1|fresh`, `Resign`.
inline Move parseMove(const std::string& line, const Signature* sig) {
  std::istringstream is(line);
  std::string word;
  is >> word;
  auto kind = kindFromName(word);
  if (!kind || *kind == MoveKind::Defend) throw IllegalMove("unknown move '" + word + "'", {});
  std::string rest;
  std::getline(is, rest);
  rest.erase(0, rest.find_first_not_of(" \t"));
  rest.erase(rest.find_last_not_of(" \t\r") + 1);
  Move m = opponent(*kind);
  switch (*kind) {
    case MoveKind::AttackImp:
      if (!rest.empty()) m.term = parseTerm(rest, sig);
      break;
    case MoveKind::AttackAll:
      if (rest.empty()) throw IllegalMove("AttackAll needs a witness", {});
      m = attackAll(rest);
      break;
    case MoveKind::Concede:
      if (rest == "left") m = concedeSide(Side::Left);
      else if (rest == "right") m = concedeSide(Side::Right);
      else if (!rest.empty()) m = concedeWitness(rest);
      break;
    default:
      if (!rest.empty()) throw IllegalMove(word + " takes no argument", {});
  }
  return m;
}

/// Moves of a script file; blank lines and `#` comments are skipped. Each
/// move is paired with its 1-based line number.
inline std::vector<std::pair<std::size_t, Move>> parseScript(const std::string& text, const Signature* sig) {
  std::vector<std::pair<std::size_t, Move>> out;
  std::istringstream is(text);
  std::string line;
  for (std::size_t n = 1; std::getline(is, line); ++n) {
    auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    out.emplace_back(n, parseMove(line, sig));
  }
  return out;
}

inline nlohmann::json justificationJson(const Justification& j) {
  if (!j.before) return nullptr;
  return {{"before", show(j.before)}, {"steps", stepsJson(j.steps)}, {"after", show(j.after)}};
}

inline nlohmann::json moveJson(const Move& m) {
  nlohmann::json j = {{"actor", actorName(m.actor)}, {"kind", kindName(m.kind)}, {"label", label(m)},
                      {"text", transcriptLine(m)}};
  if (m.assertion >= 0) j["assertion"] = m.assertion;
  if (!m.concession.empty()) j["concession"] = m.concession;
  if (m.claim) j["claim"] = show(m.claim);
  if (m.term) j["term"] = show(m.term);
  if (m.witness) j["witness"] = m.witness->name;
  if (m.fresh) j["fresh"] = true;
  if (m.side) j["side"] = *m.side == Side::Left ? "left" : "right";
  if (m.evidence) j["evidence"] = showEvidence(*m.evidence);
  if (m.actor == Actor::Proponent) j["justification"] = justificationJson(m.justification);
  return j;
}

/// Wire form of an Opponent move: `{"kind", "witness"?, "side"?, "term"?}`.
/// A witness of "fresh" or `"fresh": true` selects the pool option.
inline Move moveFromJson(const nlohmann::json& j, const Signature* sig) {
  if (!j.is_object() || !j.contains("kind") || !j["kind"].is_string()) throw IllegalMove("move needs a kind", {});
  std::string line = j["kind"].get<std::string>();
  if (j.value("fresh", false)) line += " fresh";
  else if (j.contains("witness")) line += " " + j["witness"].get<std::string>();
  if (j.contains("side")) line += " " + j["side"].get<std::string>();
  if (j.contains("term")) line += " " + j["term"].get<std::string>();
  Move m = parseMove(line, sig);
  if (j.contains("assertion")) m.assertion = j["assertion"].get<int>();
  return m;
}

inline nlohmann::json stateJson(const DialogueState& s) {
  const Assertion& a = s.standing();
  nlohmann::json concessions = nlohmann::json::array(), individuals = nlohmann::json::array();
  for (const auto& h : s.ctx.hyps) {
    if (h.kind == Hyp::Kind::Proof)
      concessions.push_back({{"name", h.name}, {"formula", show(h.formula)}, {"evidence", h.evidence}});
    else
      individuals.push_back({{"name", h.name}, {"sort", h.sort.name}});
  }
  nlohmann::json history = nlohmann::json::array(), attacks = nlohmann::json::array();
  for (const auto& m : s.history) history.push_back(moveJson(m));
  for (const auto& m : legalAttacks(s)) attacks.push_back(moveJson(m));
  return {{"thesis", show(s.thesis)},
          {"standing", {{"id", a.id}, {"formula", show(a.formula)}, {"residual", show(a.residual)}}},
          {"status", statusName(s.status)},
          {"reason", s.reason},
          {"turn", actorName(s.turn)},
          {"concessions", concessions},
          {"individuals", individuals},
          {"opening", justificationJson(s.opening)},
          {"history", history},
          {"attacks", attacks}};
}

inline nlohmann::json treeJson(const GameTree& t) {
  const Assertion& a = t.state.standing();
  nlohmann::json children = nlohmann::json::array();
  for (const auto& [m, sub] : t.children) children.push_back({{"move", moveJson(m)}, {"subtree", treeJson(sub)}});
  nlohmann::json state = {{"standing", show(a.formula)}, {"residual", show(a.residual)},
                          {"status", statusName(t.state.status)}, {"leaf", leafName(t.leaf)}};
  if (!t.state.reason.empty()) state["reason"] = t.state.reason;
  return {{"state", state}, {"children", children}};
}

}  // namespace ndk::dialogue
