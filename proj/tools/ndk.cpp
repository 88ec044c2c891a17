// ndk: check, normalize and play proof terms; serve dialogue sessions.
//
// Exit codes: 0 success, 1 semantic failure, 2 usage or parse error.

#include <atomic>
#include <chrono>
#include <csignal>
#include <fstream>
#include <future>
#include <iostream>
#include <sstream>
#include <thread>

#include <CLI11.hpp>

#include <ndk/church.hpp>
#include <ndk/dialogue.hpp>
#include <ndk/gateway.hpp>
#include <ndk/parse.hpp>
#include <ndk/reducer.hpp>

namespace {

using namespace ndk;

constexpr int kOk = 0;
constexpr int kFailure = 1;
constexpr int kUsage = 2;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

ProblemFile load(const std::string& path) { return parseProblem(slurp(path)); }

std::size_t budget(long long flag, std::size_t fallback) {
  return flag > 0 ? static_cast<std::size_t>(flag) : stepBudget(fallback);
}

// ---- check -----------------------------------------------------------------

int cmdCheck(const std::string& path) {
  ProblemFile pf = load(path);
  std::vector<std::future<CheckResult>> results;
  for (const auto& pl : pf.judgements)
    results.push_back(std::async(std::launch::async, [&pl] { return check(pl.judgement); }));
  std::size_t valid = 0;
  for (std::size_t i = 0; i < results.size(); ++i) {
    CheckResult r = results[i].get();
    const ProblemLine& pl = pf.judgements[i];
    if (r.valid()) {
      ++valid;
      std::cout << path << ":" << pl.line << ": Valid\n";
    } else {
      std::cout << path << ":" << pl.line << ": " << r.error->render() << "\n";
    }
  }
  std::cout << pf.judgements.size() << " judgements, " << valid << " valid\n";
  return valid == pf.judgements.size() ? kOk : kFailure;
}

// ---- normalize -------------------------------------------------------------

struct NormalizeFlags {
  bool trace = false;
  bool paper = false;
  bool json = false;
  bool lambda = false;
  bool applicative = false;
  long long maxSteps = 0;
};

int cmdLambda(const std::string& path, const NormalizeFlags& f) {
  auto lines = lambda::parseLines(slurp(path));
  std::size_t limit = budget(f.maxSteps, lambda::kDefaultMaxSteps);
  auto strategy = f.applicative ? lambda::Strategy::Applicative : lambda::Strategy::NormalOrder;
  int code = kOk;
  for (const auto& l : lines) {
    auto r = lambda::normalize(l.term, limit, strategy);
    if (r.timedOut) {
      std::cout << path << ":" << l.line << ": timed out after " << r.steps.size() << " steps\n";
      code = kFailure;
    } else {
      std::cout << path << ":" << l.line << ": " << lambda::show(r.term, true) << " [steps: " << r.steps.size()
                << "]\n";
    }
    if (f.trace)
      for (std::size_t i = 0; i < r.steps.size(); ++i) {
        const auto& s = r.steps[i];
        std::cout << "  step " << i + 1 << ": " << lambda::ruleName(s.rule) << " @ " << formatPath(s.position)
                  << " : " << lambda::show(s.before) << " ~> " << lambda::show(s.after) << "\n";
      }
  }
  return code;
}

int cmdNormalize(const std::string& path, const NormalizeFlags& f) {
  if (f.lambda) return cmdLambda(path, f);
  ProblemFile pf = load(path);
  Notation n = f.paper ? Notation::Paper : Notation::Ascii;
  std::size_t limit = budget(f.maxSteps, kDefaultReducerSteps);
  int code = kOk;
  nlohmann::json all = nlohmann::json::array();
  for (const auto& pl : pf.judgements) {
    CheckResult c = check(pl.judgement);
    if (!c.valid()) {
      std::cout << path << ":" << pl.line << ": " << c.error->render() << "\n";
      code = kFailure;
      continue;
    }
    Normalized r = normalize(pl.judgement, limit);
    if (f.json) {
      nlohmann::json j = traceJson(r.trace, r.term, n);
      j["line"] = pl.line;
      j["timedOut"] = r.timedOut;
      all.push_back(j);
    } else if (r.timedOut) {
      std::cout << path << ":" << pl.line << ": timed out after " << r.trace.steps.size() << " steps\n";
    } else {
      std::cout << path << ":" << pl.line << ": " << show(r.term, n) << " [steps: " << r.trace.steps.size() << "]\n";
    }
    if (r.timedOut) code = kFailure;
    if (f.trace && !f.json)
      for (const auto& line : traceLines(r.trace, n)) std::cout << "  " << line << "\n";
  }
  if (f.json) std::cout << all.dump(2) << "\n";
  return code;
}

// ---- play ------------------------------------------------------------------

struct PlayFlags {
  std::string policy = "exhaustive";
  std::uint64_t seed = 0;
  int depth = 10;
  std::string script;
  std::size_t judgement = 0;
  bool json = false;
};

int cmdPlay(const std::string& path, const PlayFlags& f) {
  ProblemFile pf = load(path);
  if (f.judgement >= pf.judgements.size())
    throw UsageError("judgement " + std::to_string(f.judgement) + " out of range (" +
                     std::to_string(pf.judgements.size()) + " judgements)");
  const Judgement& j = pf.judgements[f.judgement].judgement;
  dialogue::DialogueState end;
  if (f.policy == "exhaustive") {
    dialogue::GameTree t = dialogue::playExhaustive(j, f.depth);
    dialogue::LeafCounts c = dialogue::countLeaves(t);
    if (f.json) std::cout << dialogue::treeJson(t).dump(2) << "\n";
    std::cout << "leaves: " << c.leaves << ", ProponentWins: " << c.wins << ", Stalled: " << c.stalled
              << ", DepthExceeded: " << c.depthExceeded << "\n";
    return c.stalled == 0 ? kOk : kFailure;
  }
  if (f.policy == "random") {
    end = dialogue::playRandom(j, f.seed, f.depth);
  } else if (f.policy == "script") {
    if (f.script.empty()) throw UsageError("--policy script needs --script FILE");
    std::vector<std::pair<std::size_t, dialogue::Move>> script;
    try {
      script = dialogue::parseScript(slurp(f.script), pf.sig.get());
    } catch (const dialogue::IllegalMove& e) {
      std::cout << f.script << ": " << e.what() << "\n";
      return kFailure;
    }
    dialogue::DialogueState s = dialogue::openGame(j);
    for (const auto& [line, move] : script) {
      try {
        s = dialogue::applyMove(s, move);
      } catch (const dialogue::IllegalMove& e) {
        for (const auto& l : dialogue::transcript(s)) std::cout << l << "\n";
        std::cout << f.script << ":" << line << ": " << e.what() << "\n";
        return kFailure;
      }
    }
    end = s;
  } else {
    throw UsageError("unknown policy " + f.policy);
  }
  if (f.json) {
    std::cout << dialogue::stateJson(end).dump(2) << "\n";
  } else {
    for (const auto& l : dialogue::transcript(end)) std::cout << l << "\n";
    std::cout << "status: " << dialogue::statusName(end.status);
    if (!end.reason.empty()) std::cout << " (" << end.reason << ")";
    std::cout << "\n";
  }
  return end.status == dialogue::Status::Stalled ? kFailure : kOk;
}

// ---- serve -----------------------------------------------------------------

std::atomic<bool> interrupted{false};

int cmdServe(const std::string& host, int port, const std::string& corpus, const std::string& persist) {
  gateway::Options o;
  if (!corpus.empty()) {
    o.corpusText = slurp(corpus);
    o.corpus = parseProblem(o.corpusText);
  }
  if (!persist.empty()) o.persist = persist;
  gateway::Gateway gw(o);
  if (port == 0) {
    port = gw.bindToAnyPort(host);
    if (port < 0) {
      std::cerr << "PortInUse: cannot bind " << host << "\n";
      return kFailure;
    }
  } else if (!gw.bind(host, port)) {
    std::cerr << "PortInUse: cannot bind " << host << ":" << port << "\n";
    return kFailure;
  }
  std::signal(SIGINT, [](int) { interrupted = true; });
  std::signal(SIGTERM, [](int) { interrupted = true; });
  std::thread watcher([&gw] {
    while (!interrupted) std::this_thread::sleep_for(std::chrono::milliseconds(100));
    gw.stop();
  });
  std::cout << "listening on http://" << host << ":" << port << std::endl;
  gw.listenAfterBind();
  interrupted = true;
  watcher.join();
  std::cout << "served " << gw.service().ids().size() << " sessions" << std::endl;
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Natural deduction kernel: proof terms, reduction and dialogue games"};
  app.require_subcommand(1);

  std::string file;

  auto* check = app.add_subcommand("check", "Check every judgement of a problem file");
  check->add_option("file", file, "Problem file")->required();

  NormalizeFlags nf;
  auto* normalize = app.add_subcommand("normalize", "Normalize every judgement's term");
  normalize->add_option("file", file, "Problem file, or untyped terms with --lambda")->required();
  normalize->add_flag("--trace", nf.trace, "Print every rewrite step");
  normalize->add_option("--max-steps", nf.maxSteps, "Step budget (default NDK_MAX_STEPS or built-in)");
  normalize->add_flag("--paper", nf.paper, "Print in paper notation");
  normalize->add_flag("--json", nf.json, "Print {initial, steps, final} records");
  normalize->add_flag("--lambda", nf.lambda, "Read untyped lambda terms");

  NormalizeFlags lf;
  lf.lambda = true;
  auto* lam = app.add_subcommand("lambda", "Normalize untyped lambda terms, one per line");
  lam->add_option("file", file, "Term file")->required();
  lam->add_flag("--trace", lf.trace, "Print every conversion step");
  lam->add_option("--max-steps", lf.maxSteps, "Step budget (default NDK_MAX_STEPS or built-in)");
  lam->add_flag("--applicative", lf.applicative, "Reduce innermost redexes first");

  PlayFlags pf;
  auto* play = app.add_subcommand("play", "Play a dialogue on one judgement");
  play->add_option("file", file, "Problem file")->required();
  play->add_option("--judgement,-j", pf.judgement, "Judgement index, from 0");
  play->add_option("--policy", pf.policy, "Opponent policy")->check(CLI::IsMember({"exhaustive", "random", "script"}));
  play->add_option("--seed", pf.seed, "Seed for the random policy");
  play->add_option("--depth", pf.depth, "Limit on Opponent choices");
  play->add_option("--script", pf.script, "Opponent moves, one per line");
  play->add_flag("--json", pf.json, "Print the game tree or final state as JSON");

  std::string host = "127.0.0.1", corpus, persist;
  int port = 8080;
  auto* serve = app.add_subcommand("serve", "Serve dialogue sessions over HTTP");
  serve->add_option("--host", host, "Address to bind");
  serve->add_option("--port", port, "Port, 0 for any free port");
  serve->add_option("--corpus", corpus, "Default problem file for new sessions");
  serve->add_option("--persist", persist, "Directory of session logs, replayed on start");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (*check) return cmdCheck(file);
    if (*normalize) return cmdNormalize(file, nf);
    if (*lam) return cmdLambda(file, lf);
    if (*play) return cmdPlay(file, pf);
    if (*serve) return cmdServe(host, port, corpus, persist);
  } catch (const ParseError& e) {
    std::cout << file << ":" << e.line << ":" << e.col << ": ParseError: " << e.what() << "\n";
    return kUsage;
  } catch (const UsageError& e) {
    std::cerr << e.what() << "\n";
    return kUsage;
  } catch (const dialogue::NotValid& e) {
    std::cout << e.what() << "\n";
    return kFailure;
  }
  return kUsage;
}
