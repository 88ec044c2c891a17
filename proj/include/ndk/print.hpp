#pragma once

// Pretty-printing of formulas and proof terms. The ASCII notation is the
// concrete syntax accepted by the parser; the paper notation uses the
// traditional symbols (FST(⟨a,b⟩), λx.b, ∀x^D.P(x), ...).

#include <sstream>
#include <string>

#include "ndk/syntax.hpp"

namespace ndk {

enum class Notation { Ascii, Paper };

namespace detail {

inline std::string showArgs(const std::vector<Individual>& args) {
  std::string out;
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (i) out += ", ";
    out += args[i].name;
  }
  return out;
}

// Precedence: 0 quantifier body / top, 1 implication, 2 disjunction,
// 3 conjunction, 4 atomic.
inline void showF(std::ostream& os, const Formula& f, int prec, Notation n) {
  const bool paper = n == Notation::Paper;
  switch (f->kind) {
    case FKind::Atom:
      os << f->name;
      if (!f->args.empty()) os << '(' << showArgs(f->args) << ')';
      return;
    case FKind::Bottom:
      os << (paper ? "⊥" : "_|_");
      return;
    case FKind::Id:
      if (paper)
        os << "Id_" << f->sort.name << '(' << showArgs(f->args) << ')';
      else
        os << "Id{" << f->sort.name << "}(" << showArgs(f->args) << ')';
      return;
    case FKind::And:
    case FKind::Or: {
      int mine = f->kind == FKind::And ? 3 : 2;
      if (prec > mine) os << '(';
      showF(os, f->left, mine, n);
      if (f->kind == FKind::And)
        os << (paper ? " ∧ " : " & ");
      else
        os << (paper ? " ∨ " : " | ");
      showF(os, f->right, mine + 1, n);
      if (prec > mine) os << ')';
      return;
    }
    case FKind::Imp:
      if (prec > 1) os << '(';
      showF(os, f->left, 2, n);
      os << (paper ? " → " : " -> ");
      showF(os, f->right, 1, n);
      if (prec > 1) os << ')';
      return;
    case FKind::Forall:
    case FKind::Exists: {
      bool all = f->kind == FKind::Forall;
      if (prec > 0) os << '(';
      if (paper)
        os << (all ? "∀" : "∃") << f->name << '^' << f->sort.name << '.';
      else
        os << (all ? "all " : "some ") << f->name << ':' << f->sort.name << ". ";
      showF(os, f->left, 0, n);
      if (prec > 0) os << ')';
      return;
    }
  }
}

inline void showT(std::ostream& os, const Term& t, Notation n) {
  const bool paper = n == Notation::Paper;
  auto call = [&](const char* ascii, const char* pap) {
    os << (paper ? pap : ascii) << '(';
  };
  switch (t->kind) {
    case TKind::Var:
      os << t->name;
      return;
    case TKind::Pair:
      os << (paper ? "⟨" : "<");
      showT(os, t->kids[0], n);
      os << (paper ? "," : ", ");
      showT(os, t->kids[1], n);
      os << (paper ? "⟩" : ">");
      return;
    case TKind::Fst: case TKind::Snd: case TKind::Inl: case TKind::Inr: case TKind::Abort:
      switch (t->kind) {
        case TKind::Fst: call("fst", "FST"); break;
        case TKind::Snd: call("snd", "SND"); break;
        case TKind::Inl: call("inl", "inl"); break;
        case TKind::Inr: call("inr", "inr"); break;
        default: call("abort", "ABORT"); break;
      }
      showT(os, t->kids[0], n);
      os << ')';
      return;
    case TKind::Case:
      call("case", "CASE");
      showT(os, t->kids[0], n);
      os << (paper ? ",υ" : ", ") << t->name << (paper ? "." : ". ");
      showT(os, t->kids[1], n);
      os << (paper ? ",υ" : ", ") << t->name2 << (paper ? "." : ". ");
      showT(os, t->kids[2], n);
      os << ')';
      return;
    case TKind::Lam:
      os << (paper ? "λ" : "\\") << t->name << (paper ? "." : ". ");
      showT(os, t->kids[0], n);
      return;
    case TKind::App:
      call("app", "APP");
      showT(os, t->kids[0], n);
      os << (paper ? "," : ", ");
      showT(os, t->kids[1], n);
      os << ')';
      return;
    case TKind::TLam:
      if (paper)
        os << "Λ" << t->name << '.';
      else
        os << "/\\" << t->name << ':' << t->sort.name << ". ";
      showT(os, t->kids[0], n);
      return;
    case TKind::Extr:
      call("extr", "EXTR");
      showT(os, t->kids[0], n);
      os << (paper ? "," : ", ") << t->inds[0].name << ')';
      return;
    case TKind::ExPair:
      if (paper) {
        os << "ε" << t->name << ".(";
        showT(os, t->kids[0], n);
        os << ',' << t->inds[0].name << ')';
      } else {
        os << "eps(" << t->name << ". ";
        showT(os, t->kids[0], n);
        os << ", " << t->inds[0].name << ')';
      }
      return;
    case TKind::Inst:
      call("inst", "INST");
      showT(os, t->kids[0], n);
      if (paper)
        os << ",σ" << t->name << ".σ" << t->name2 << '.';
      else
        os << ", " << t->name << '.' << t->name2 << ". ";
      showT(os, t->kids[1], n);
      os << ')';
      return;
    case TKind::IdIntro: {
      const Evidence& ev = t->evidence;
      if (paper) {
        os << (ev.isVar() ? *ev.var : std::string("r"));
      } else {
        os << "refl";
        if (ev.isVar())
          os << '[' << *ev.var << ']';
        else if (ev.length() > 0)
          os << "[#" << ev.length() << ']';
      }
      os << '(' << showArgs(t->inds) << ')';
      return;
    }
    case TKind::Rewr:
      call("rewr", "REWR");
      showT(os, t->kids[0], n);
      os << (paper ? ",σ" : ", ") << t->name << (paper ? "." : ". ");
      showT(os, t->kids[1], n);
      os << ')';
      return;
  }
}

}  // namespace detail

inline std::string show(const Formula& f, Notation n = Notation::Ascii) {
  std::ostringstream os;
  detail::showF(os, f, 0, n);
  return os.str();
}

inline std::string show(const Term& t, Notation n = Notation::Ascii) {
  std::ostringstream os;
  detail::showT(os, t, n);
  return os.str();
}

}  // namespace ndk
