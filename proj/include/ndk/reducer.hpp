#pragma once

// Judgement-level normalization, the subject-reduction report, and the two
// trace serializations (line records and JSON).

#include <cstdlib>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "ndk/checker.hpp"
#include "ndk/print.hpp"
#include "ndk/rewrite.hpp"

namespace ndk {

/// Step budget: `NDK_MAX_STEPS` when set to a positive integer, else `fallback`.
inline std::size_t stepBudget(std::size_t fallback = kDefaultReducerSteps) {
  if (const char* env = std::getenv("NDK_MAX_STEPS")) {
    char* end = nullptr;
    unsigned long long v = std::strtoull(env, &end, 10);
    if (end != env && *end == '\0' && v > 0) return static_cast<std::size_t>(v);
  }
  return fallback;
}

inline Normalized normalize(const Judgement& j, std::size_t maxSteps = kDefaultReducerSteps,
                            const TraceSink& sink = nullptr) {
  return normalizeTerm(j.term, maxSteps, sink);
}

/// Closed normal forms of valid judgements are headed by an introduction.
inline bool isCanonical(const Term& t) { return isConstructor(t); }

struct ReductionVerdict {
  RewriteStep step;
  Term reduct;  // whole term after the step
  CheckResult check;
};

struct Report {
  std::vector<ReductionVerdict> entries;
  bool timedOut = false;

  bool allValid() const {
    for (const auto& e : entries)
      if (!e.check.valid()) return false;
    return !timedOut;
  }
};

/// Normalize `j` leftmost-outermost, re-checking the whole term against the
/// judgement's formula after every step.
inline Report subjectReduction(const Judgement& j, std::size_t maxSteps = kDefaultReducerSteps) {
  Report r;
  Term cur = j.term;
  while (auto s = betaStep(cur)) {
    if (r.entries.size() >= maxSteps) {
      r.timedOut = true;
      break;
    }
    cur = applyStep(cur, *s);
    r.entries.push_back({*s, cur, check(j.ctx, cur, j.formula)});
  }
  return r;
}

// ---------------------------------------------------------------------------
// Serialization

/// `step <n>: <rule> @ <path> : <before> ~> <after>`, n counting from 1.
inline std::string traceLine(std::size_t n, const RewriteStep& s, Notation notation = Notation::Ascii) {
  return "step " + std::to_string(n) + ": " + ruleName(s.rule) + " @ " + formatPath(s.path) + " : " +
         show(s.before, notation) + " ~> " + show(s.after, notation);
}

inline std::vector<std::string> traceLines(const RewriteTrace& tr, Notation notation = Notation::Ascii) {
  std::vector<std::string> out;
  for (std::size_t i = 0; i < tr.steps.size(); ++i) out.push_back(traceLine(i + 1, tr.steps[i], notation));
  return out;
}

inline nlohmann::json pathJson(const Path& p) { return nlohmann::json(p); }

inline nlohmann::json stepJson(const RewriteStep& s, Notation notation = Notation::Ascii) {
  return {{"rule", ruleName(s.rule)},
          {"path", pathJson(s.path)},
          {"before", show(s.before, notation)},
          {"after", show(s.after, notation)}};
}

inline nlohmann::json stepsJson(const std::vector<RewriteStep>& steps, Notation notation = Notation::Ascii) {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& s : steps) arr.push_back(stepJson(s, notation));
  return arr;
}

/// `{initial, steps:[{rule, path, before, after}], final}`.
inline nlohmann::json traceJson(const RewriteTrace& tr, const Term& final, Notation notation = Notation::Ascii) {
  return {{"initial", show(tr.initial, notation)}, {"steps", stepsJson(tr.steps, notation)}, {"final", show(final, notation)}};
}

}  // namespace ndk
