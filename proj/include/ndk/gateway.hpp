#pragma once

// HTTP session service for dialogue games. Every response carries
// `X-NDK-Protocol: 1`; field names are listed in docs/protocol.md.
//
//   POST /sessions                  {problem?, judgement}      201 session view
//   GET  /sessions/{id}                                        200 session view
//   GET  /sessions/{id}/attacks                                200 {attacks}
//   POST /sessions/{id}/moves       wire move                  200 {event, state}
//   GET  /sessions/{id}/events?cursor=N[&follow=0]             server-sent events

#include <atomic>
#include <chrono>
#include <condition_variable>
#include <filesystem>
#include <fstream>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <random>
#include <shared_mutex>
#include <sstream>
#include <string>
#include <vector>

#include <httplib.h>
#include <json.hpp>

#include "ndk/dialogue.hpp"
#include "ndk/parse.hpp"

namespace ndk::gateway {

using nlohmann::json;

inline constexpr const char* kProtocolHeader = "X-NDK-Protocol";
inline constexpr const char* kProtocolVersion = "1";

struct Session {
  std::string id;
  std::string problem;
  std::size_t index = 0;
  std::int64_t createdAt = 0;  // unix seconds
  dialogue::DialogueState initial;
  dialogue::DialogueState state;
  std::vector<json> log;     // wire moves, in order applied
  std::vector<json> events;  // one per applied move
  mutable std::mutex mutex;
  std::condition_variable changed;
};

/// Outcome of a service call: HTTP status and JSON body.
struct Reply {
  int status = 200;
  json body;
};

inline json errorBody(const std::string& kind, const std::string& message) {
  return {{"error", kind}, {"message", message}};
}

inline json parseErrorBody(const ParseError& e) {
  json b = errorBody("ParseError", e.what());
  b["line"] = e.line;
  b["col"] = e.col;
  b["expected"] = e.expected;
  b["found"] = e.found;
  return b;
}

inline json diagnosticJson(const Diagnostic& d) {
  return {{"kind", diagName(d.kind)}, {"path", formatPath(d.path)}, {"message", d.message}, {"rendered", d.render()}};
}

inline json illegalBody(const dialogue::IllegalMove& e) {
  json legal = json::array();
  for (const auto& m : e.legal) legal.push_back(dialogue::moveJson(m));
  json b = errorBody("IllegalMove", e.reason);
  b["legal"] = legal;
  return b;
}

/// Fold a session's wire moves over its opening state.
inline dialogue::DialogueState fold(const dialogue::DialogueState& initial, const std::vector<json>& log,
                                    const Signature* sig) {
  dialogue::DialogueState s = initial;
  for (const auto& m : log) s = dialogue::applyMove(s, dialogue::moveFromJson(m, sig));
  return s;
}

struct Options {
  std::optional<std::filesystem::path> persist;  // one jsonl log per session
  std::optional<ProblemFile> corpus;             // default problem for POST /sessions
  std::string corpusText;
  bool verifyFold = false;                       // re-fold the log after every move
};

class Service {
 public:
  explicit Service(Options opts = {}) : opts_(std::move(opts)), rng_(std::random_device{}()) {
    if (opts_.persist) restore();
  }

  Reply create(const json& req) {
    if (!req.is_object()) return {400, errorBody("BadRequest", "expected a JSON object")};
    std::string problem;
    if (req.contains("problem")) {
      if (!req["problem"].is_string()) return {400, errorBody("BadRequest", "problem must be a string")};
      problem = req["problem"].get<std::string>();
    } else if (opts_.corpus) {
      problem = opts_.corpusText;
    } else {
      return {400, errorBody("BadRequest", "no problem given and no corpus loaded")};
    }
    if (!req.contains("judgement") || !req["judgement"].is_number_integer())
      return {400, errorBody("BadRequest", "judgement must be an integer index")};
    long long index = req["judgement"].get<long long>();
    auto session = std::make_shared<Session>();
    session->problem = problem;
    session->createdAt = std::chrono::duration_cast<std::chrono::seconds>(
                             std::chrono::system_clock::now().time_since_epoch()).count();
    if (Reply r = open(*session, index); r.status != 200) return r;
    {
      std::unique_lock lock(sessionsMutex_);
      do session->id = token();
      while (sessions_.count(session->id));
      sessions_[session->id] = session;
    }
    persist(*session, {{"problem", problem}, {"judgement", index}, {"createdAt", session->createdAt}}, true);
    std::lock_guard lock(session->mutex);
    return {201, view(*session)};
  }

  Reply get(const std::string& id) const {
    auto s = find(id);
    if (!s) return unknown(id);
    std::lock_guard lock(s->mutex);
    return {200, view(*s)};
  }

  Reply attacks(const std::string& id) const {
    auto s = find(id);
    if (!s) return unknown(id);
    std::lock_guard lock(s->mutex);
    return {200, {{"id", id}, {"attacks", attackList(s->state)}}};
  }

  Reply move(const std::string& id, const json& wire) {
    auto s = find(id);
    if (!s) return unknown(id);
    std::lock_guard lock(s->mutex);
    const Signature* sig = s->state.thesis.ctx.sig.get();
    dialogue::DialogueState next;
    try {
      next = dialogue::applyMove(s->state, dialogue::moveFromJson(wire, sig));
    } catch (const dialogue::IllegalMove& e) {
      return {409, illegalBody(e)};
    } catch (const ParseError& e) {
      return {400, parseErrorBody(e)};
    } catch (const json::exception& e) {
      return {400, errorBody("BadRequest", e.what())};
    }
    json event = eventJson(s->events.size(), s->state, next);
    s->state = std::move(next);
    s->log.push_back(wire);
    s->events.push_back(event);
    persist(*s, {{"move", wire}}, false);
    if (opts_.verifyFold) {
      json folded = dialogue::stateJson(fold(s->initial, s->log, sig));
      if (folded != dialogue::stateJson(s->state))
        return {500, errorBody("FoldMismatch", "event log does not reproduce the live state")};
    }
    s->changed.notify_all();
    return {200, {{"event", event}, {"state", view(*s)}}};
  }

  std::shared_ptr<Session> find(const std::string& id) const {
    std::shared_lock lock(sessionsMutex_);
    auto it = sessions_.find(id);
    return it == sessions_.end() ? nullptr : it->second;
  }

  std::vector<std::string> ids() const {
    std::shared_lock lock(sessionsMutex_);
    std::vector<std::string> out;
    for (const auto& [id, s] : sessions_) out.push_back(id);
    return out;
  }

  /// Wake every event stream so it can observe `stopping`.
  void shutdown() {
    stopping = true;
    std::shared_lock lock(sessionsMutex_);
    for (const auto& [id, s] : sessions_) {
      std::lock_guard l(s->mutex);
      s->changed.notify_all();
    }
  }

  std::atomic<bool> stopping{false};

  static json view(const Session& s) {
    json v = dialogue::stateJson(s.state);
    v["id"] = s.id;
    v["judgement"] = s.index;
    v["createdAt"] = s.createdAt;
    v["cursor"] = s.events.size();
    return v;
  }

 private:
  static Reply unknown(const std::string& id) { return {404, errorBody("UnknownSession", "no session " + id)}; }

  static json attackList(const dialogue::DialogueState& s) {
    json out = json::array();
    for (const auto& m : dialogue::legalAttacks(s)) out.push_back(dialogue::moveJson(m));
    return out;
  }

  /// Moves appended by one Opponent move: the move itself and every reply.
  static json eventJson(std::size_t seq, const dialogue::DialogueState& before, const dialogue::DialogueState& after) {
    json moves = json::array(), steps = json::array();
    for (std::size_t i = before.history.size(); i < after.history.size(); ++i) {
      const auto& m = after.history[i];
      moves.push_back(dialogue::moveJson(m));
      if (m.actor == dialogue::Actor::Proponent)
        for (const auto& st : m.justification.steps) steps.push_back(stepJson(st));
    }
    const auto& a = after.standing();
    json e = {{"seq", seq},
              {"move", moves.empty() ? json() : moves[0]},
              {"responses", json(moves.begin() + (moves.empty() ? 0 : 1), moves.end())},
              {"steps", steps},
              {"standing", {{"id", a.id}, {"formula", show(a.formula)}, {"residual", show(a.residual)}}},
              {"status", dialogue::statusName(after.status)},
              {"reason", after.reason},
              {"attacks", attackList(after)}};
    return e;
  }

  Reply open(Session& s, long long index) {
    try {
      ProblemFile pf = parseProblem(s.problem);
      if (index < 0 || static_cast<std::size_t>(index) >= pf.judgements.size())
        return {400, errorBody("IndexOutOfRange", "judgement " + std::to_string(index) + " of " +
                                                      std::to_string(pf.judgements.size()))};
      s.index = static_cast<std::size_t>(index);
      s.initial = dialogue::openGame(pf.judgements[s.index].judgement);
      s.state = s.initial;
    } catch (const ParseError& e) {
      return {400, parseErrorBody(e)};
    } catch (const dialogue::NotValid& e) {
      json b = errorBody("NotValid", e.what());
      b["diagnostic"] = diagnosticJson(e.diagnostic);
      return {400, b};
    }
    return {200, {}};
  }

  std::string token() {
    std::ostringstream os;
    os << std::hex << rng_() << rng_();
    return os.str().substr(0, 16);
  }

  void persist(const Session& s, const json& record, bool truncate) const {
    if (!opts_.persist) return;
    std::filesystem::create_directories(*opts_.persist);
    std::ofstream out(*opts_.persist / (s.id + ".jsonl"), truncate ? std::ios::trunc : std::ios::app);
    out << record.dump() << '\n';
  }

  /// Replay every persisted session log.
  void restore() {
    if (!std::filesystem::is_directory(*opts_.persist)) return;
    for (const auto& entry : std::filesystem::directory_iterator(*opts_.persist)) {
      if (entry.path().extension() != ".jsonl") continue;
      std::ifstream in(entry.path());
      std::string line;
      if (!std::getline(in, line)) continue;
      json head = json::parse(line, nullptr, false);
      if (head.is_discarded()) continue;
      auto s = std::make_shared<Session>();
      s->id = entry.path().stem().string();
      s->problem = head.value("problem", "");
      s->createdAt = head.value("createdAt", std::int64_t{0});
      if (open(*s, head.value("judgement", -1LL)).status != 200) continue;
      while (std::getline(in, line)) {
        json rec = json::parse(line, nullptr, false);
        if (rec.is_discarded() || !rec.contains("move")) continue;
        dialogue::DialogueState next;
        try {
          next = dialogue::applyMove(s->state, dialogue::moveFromJson(rec["move"], s->state.thesis.ctx.sig.get()));
        } catch (const std::exception&) {
          break;
        }
        s->events.push_back(eventJson(s->events.size(), s->state, next));
        s->state = std::move(next);
        s->log.push_back(rec["move"]);
      }
      sessions_[s->id] = s;
    }
  }

  Options opts_;
  mutable std::shared_mutex sessionsMutex_;
  std::map<std::string, std::shared_ptr<Session>> sessions_;
  std::mt19937_64 rng_;
};

inline std::string sseFrame(const json& event) {
  return "id: " + std::to_string(event["seq"].get<std::size_t>()) + "\nevent: move\ndata: " + event.dump() + "\n\n";
}

/// Binds the service to an httplib server.
class Gateway {
 public:
  explicit Gateway(Options opts = {}) : service_(std::move(opts)) { routes(); }
  ~Gateway() { stop(); }

  Service& service() { return service_; }
  httplib::Server& http() { return http_; }

  int bindToAnyPort(const std::string& host = "127.0.0.1") { return http_.bind_to_any_port(host); }
  bool bind(const std::string& host, int port) { return http_.bind_to_port(host, port); }
  bool listenAfterBind() { return http_.listen_after_bind(); }

  void stop() {
    service_.shutdown();
    http_.stop();
  }

 private:
  static void send(httplib::Response& res, const Reply& r) {
    res.status = r.status;
    res.set_content(r.body.dump(), "application/json");
  }

  static std::optional<json> body(const httplib::Request& req, httplib::Response& res) {
    json j = json::parse(req.body, nullptr, false);
    if (j.is_discarded()) {
      send(res, {400, errorBody("BadRequest", "body is not JSON")});
      return std::nullopt;
    }
    return j;
  }

  void routes() {
    http_.set_pre_routing_handler([](const httplib::Request& req, httplib::Response& res) {
      res.set_header(kProtocolHeader, kProtocolVersion);
      if (req.has_header(kProtocolHeader) && req.get_header_value(kProtocolHeader) != kProtocolVersion) {
        send(res, {400, errorBody("UnsupportedProtocol", "this server speaks protocol 1")});
        return httplib::Server::HandlerResponse::Handled;
      }
      return httplib::Server::HandlerResponse::Unhandled;
    });
    http_.Post("/sessions", [this](const httplib::Request& req, httplib::Response& res) {
      if (auto j = body(req, res)) send(res, service_.create(*j));
    });
    http_.Get(R"(/sessions/([^/]+))", [this](const httplib::Request& req, httplib::Response& res) {
      send(res, service_.get(req.matches[1]));
    });
    http_.Get(R"(/sessions/([^/]+)/attacks)", [this](const httplib::Request& req, httplib::Response& res) {
      send(res, service_.attacks(req.matches[1]));
    });
    http_.Post(R"(/sessions/([^/]+)/moves)", [this](const httplib::Request& req, httplib::Response& res) {
      if (auto j = body(req, res)) send(res, service_.move(req.matches[1], *j));
    });
    http_.Get(R"(/sessions/([^/]+)/events)", [this](const httplib::Request& req, httplib::Response& res) {
      auto session = service_.find(req.matches[1]);
      if (!session) return send(res, {404, errorBody("UnknownSession", "no session " + std::string(req.matches[1]))});
      std::size_t cursor = 0;
      try {
        if (req.has_param("cursor")) cursor = std::stoul(req.get_param_value("cursor"));
        else if (req.has_header("Last-Event-ID")) cursor = std::stoul(req.get_header_value("Last-Event-ID")) + 1;
      } catch (const std::logic_error&) {
        return send(res, {400, errorBody("BadRequest", "cursor must be a non-negative integer")});
      }
      bool follow = req.get_param_value("follow") != "0";
      res.set_header("Cache-Control", "no-cache");
      auto next = std::make_shared<std::size_t>(cursor);
      res.set_chunked_content_provider("text/event-stream", [this, session, next, follow](std::size_t,
                                                                                          httplib::DataSink& sink) {
        std::unique_lock lock(session->mutex);
        if (follow && *next >= session->events.size())
          session->changed.wait_for(lock, std::chrono::milliseconds(200));
        while (*next < session->events.size()) {
          std::string frame = sseFrame(session->events[(*next)++]);
          if (!sink.write(frame.data(), frame.size())) return false;
        }
        if (!follow || service_.stopping) {
          sink.done();
          return true;
        }
        return sink.is_writable();
      });
    });
  }

  Service service_;
  httplib::Server http_;
};

}  // namespace ndk::gateway
