#include <gtest/gtest.h>

#include <filesystem>
#include <future>
#include <thread>

#include <ndk/gateway.hpp>

using namespace ndk;
using namespace ndk::gateway;

namespace {

const char* kProblem = R"(sort D
const c1 c2 : D
pred A B
pred P : D
a : A, b : B |- <a, b> : A & B
|- eps(x. \h. h, c1) : some x:D. P(x) -> P(x)
|- \p. <snd(p), fst(p)> : A & B -> B & A
a : A |- a : B
|- /\x:D. \h. h : all x:D. P(x) -> P(x)
)";

class Live : public ::testing::Test {
 protected:
  void SetUp() override {
    Options o;
    o.verifyFold = true;
    gw = std::make_unique<Gateway>(o);
    port = gw->bindToAnyPort();
    ASSERT_GT(port, 0);
    server = std::thread([this] { gw->listenAfterBind(); });
    gw->http().wait_until_ready();
  }
  void TearDown() override {
    gw->stop();
    server.join();
  }

  httplib::Client client() const {
    httplib::Client c("127.0.0.1", port);
    c.set_read_timeout(5, 0);
    return c;
  }

  json post(const std::string& path, const json& body, int* status = nullptr) const {
    auto r = client().Post(path, body.dump(), "application/json");
    EXPECT_TRUE(r);
    if (!r) return {};
    if (status) *status = r->status;
    EXPECT_EQ(r->get_header_value("X-NDK-Protocol"), "1");
    return json::parse(r->body);
  }

  json get(const std::string& path, int* status = nullptr) const {
    auto r = client().Get(path);
    EXPECT_TRUE(r);
    if (!r) return {};
    if (status) *status = r->status;
    return json::parse(r->body);
  }

  std::string open(int index) const {
    int status = 0;
    json s = post("/sessions", {{"problem", kProblem}, {"judgement", index}}, &status);
    EXPECT_EQ(status, 201) << s.dump();
    return s.value("id", "");
  }

  // Read `n` events from the stream, or fewer if it closes.
  std::vector<json> events(const std::string& id, std::size_t n, const std::string& query = "") const {
    std::vector<json> out;
    std::string buf;
    client().Get("/sessions/" + id + "/events" + query, [&](const char* data, std::size_t len) {
      buf.append(data, len);
      std::size_t end;
      while ((end = buf.find("\n\n")) != std::string::npos) {
        std::string frame = buf.substr(0, end);
        buf.erase(0, end + 2);
        auto at = frame.find("data: ");
        if (at != std::string::npos) out.push_back(json::parse(frame.substr(at + 6)));
      }
      return out.size() < n;
    });
    return out;
  }

  std::unique_ptr<Gateway> gw;
  std::thread server;
  int port = 0;
};

std::vector<std::string> labels(const json& attacks) {
  std::vector<std::string> out;
  for (const auto& a : attacks) out.push_back(a["label"]);
  return out;
}

}  // namespace

TEST_F(Live, CreateReturnsThesisAndAttacks) {
  int status = 0;
  json s = post("/sessions", {{"problem", kProblem}, {"judgement", 0}}, &status);
  EXPECT_EQ(status, 201);
  EXPECT_EQ(s["thesis"], "a : A, b : B |- <a, b> : A & B");
  EXPECT_EQ(labels(s["attacks"]), (std::vector<std::string>{"L?", "R?"}));
  EXPECT_EQ(s["status"], "Open");
  EXPECT_EQ(get("/sessions/" + s["id"].get<std::string>()), s);
  EXPECT_EQ(labels(get("/sessions/" + s["id"].get<std::string>() + "/attacks")["attacks"]),
            (std::vector<std::string>{"L?", "R?"}));
}

TEST_F(Live, CreateErrors) {
  int status = 0;
  json e = post("/sessions", {{"problem", kProblem}, {"judgement", 3}}, &status);
  EXPECT_EQ(status, 400);
  EXPECT_EQ(e["error"], "NotValid");
  EXPECT_EQ(e["diagnostic"]["kind"], "Mismatch");

  e = post("/sessions", {{"problem", kProblem}, {"judgement", 99}}, &status);
  EXPECT_EQ(status, 400);
  EXPECT_EQ(e["error"], "IndexOutOfRange");

  e = post("/sessions", {{"problem", "sort D\n|- \\x. : A"}, {"judgement", 0}}, &status);
  EXPECT_EQ(status, 400);
  EXPECT_EQ(e["error"], "ParseError");
  EXPECT_EQ(e["line"], 2);

  auto r = client().Post("/sessions", "{not json", "application/json");
  ASSERT_TRUE(r);
  EXPECT_EQ(r->status, 400);
}

TEST_F(Live, MoveOnPairDefendsRightConjunct) {
  std::string id = open(0);
  int status = 0;
  json r = post("/sessions/" + id + "/moves", {{"kind", "AttackAndR"}}, &status);
  EXPECT_EQ(status, 200);
  const json& ev = r["event"];
  EXPECT_EQ(ev["seq"], 0);
  EXPECT_EQ(ev["move"]["label"], "R?");
  ASSERT_EQ(ev["responses"].size(), 1u);
  EXPECT_EQ(ev["responses"][0]["kind"], "Defend");
  EXPECT_EQ(ev["responses"][0]["claim"], "B");
  ASSERT_EQ(ev["steps"].size(), 1u);
  EXPECT_EQ(ev["steps"][0]["rule"], "AndSnd");
  EXPECT_EQ(ev["standing"]["formula"], "B");
  EXPECT_EQ(ev["status"], "ProponentWins");

  json again = post("/sessions/" + id + "/moves", {{"kind", "AttackAndR"}}, &status);
  EXPECT_EQ(status, 409);
  EXPECT_EQ(again["error"], "IllegalMove");
  EXPECT_TRUE(again["legal"].is_array());
}

TEST_F(Live, RepeatedAttackIsAConflict) {
  std::string id = open(0);
  gw->service().find(id)->state.attacked.insert("0/AttackAndL");
  int status = 0;
  json r = post("/sessions/" + id + "/moves", {{"kind", "AttackAndL"}}, &status);
  EXPECT_EQ(status, 409);
  EXPECT_NE(r["message"].get<std::string>().find("repeated"), std::string::npos);
  EXPECT_EQ(labels(r["legal"]), (std::vector<std::string>{"R?"}));
}

TEST_F(Live, ExistentialRevealsWitness) {
  std::string id = open(1);
  json r = post("/sessions/" + id + "/moves", {{"kind", "AttackEx"}});
  EXPECT_EQ(r["event"]["responses"][0]["witness"], "c1");
  EXPECT_EQ(r["event"]["steps"][0]["rule"], "Ex");
}

TEST_F(Live, WitnessChoiceAndFreshPool) {
  std::string id = open(4);
  EXPECT_EQ(labels(get("/sessions/" + id + "/attacks")["attacks"]), (std::vector<std::string>{"c1 ?", "c2 ?", "_D1 ?"}));
  json r = post("/sessions/" + id + "/moves", {{"kind", "AttackAll"}, {"witness", "fresh"}});
  EXPECT_EQ(r["state"]["standing"]["formula"], "P(_D1) -> P(_D1)");
}

TEST_F(Live, UnknownSession) {
  int status = 0;
  get("/sessions/nope", &status);
  EXPECT_EQ(status, 404);
  get("/sessions/nope/attacks", &status);
  EXPECT_EQ(status, 404);
  post("/sessions/nope/moves", {{"kind", "AttackAndL"}}, &status);
  EXPECT_EQ(status, 404);
  auto r = client().Get("/sessions/nope/events?follow=0");
  ASSERT_TRUE(r);
  EXPECT_EQ(r->status, 404);
}

TEST_F(Live, MalformedCursorIsBadRequest) {
  std::string id = open(0);
  auto r = client().Get("/sessions/" + id + "/events?follow=0&cursor=x");
  ASSERT_TRUE(r);
  EXPECT_EQ(r->status, 400);
  EXPECT_EQ(json::parse(r->body)["error"], "BadRequest");
}

TEST_F(Live, ProtocolVersionChecked) {
  auto r = client().Get("/sessions/nope", {{"X-NDK-Protocol", "2"}});
  ASSERT_TRUE(r);
  EXPECT_EQ(r->status, 400);
}

TEST_F(Live, OneMoveOneEvent) {
  std::string id = open(2);
  auto listener = std::async(std::launch::async, [&] { return events(id, 1); });
  std::this_thread::sleep_for(std::chrono::milliseconds(100));
  post("/sessions/" + id + "/moves", {{"kind", "AttackImp"}});
  auto got = listener.get();
  ASSERT_EQ(got.size(), 1u);
  EXPECT_EQ(got[0]["seq"], 0);
  EXPECT_EQ(events(id, 10, "?follow=0").size(), 1u);
}

TEST_F(Live, TwoClientsSeeTheSameEvents) {
  std::string id = open(2);
  auto a = std::async(std::launch::async, [&] { return events(id, 2); });
  auto b = std::async(std::launch::async, [&] { return events(id, 2); });
  std::this_thread::sleep_for(std::chrono::milliseconds(100));
  post("/sessions/" + id + "/moves", {{"kind", "AttackImp"}});
  post("/sessions/" + id + "/moves", {{"kind", "AttackAndL"}});
  int status = 0;
  post("/sessions/" + id + "/moves", {{"kind", "AttackAndR"}}, &status);
  EXPECT_EQ(status, 409);
  auto ea = a.get(), eb = b.get();
  ASSERT_EQ(ea.size(), 2u);
  EXPECT_EQ(ea, eb);
  EXPECT_EQ(ea[1]["responses"][0]["text"], "P: o1 R? [steps: 1]");

  EXPECT_EQ(events(id, 10, "?cursor=0&follow=0"), ea);
  auto tail = events(id, 10, "?cursor=1&follow=0");
  ASSERT_EQ(tail.size(), 1u);
  EXPECT_EQ(tail[0], ea[1]);
}

TEST_F(Live, ConcurrentMovesAreSerialized) {
  std::string id = open(0);
  std::vector<std::future<int>> posts;
  for (int i = 0; i < 6; ++i)
    posts.push_back(std::async(std::launch::async, [&] {
      int status = 0;
      post("/sessions/" + id + "/moves", {{"kind", "AttackAndL"}}, &status);
      return status;
    }));
  int ok = 0, conflict = 0;
  for (auto& p : posts) {
    int s = p.get();
    ok += s == 200;
    conflict += s == 409;
  }
  EXPECT_EQ(ok, 1);
  EXPECT_EQ(conflict, 5);
  EXPECT_EQ(get("/sessions/" + id)["cursor"], 1);
}

TEST_F(Live, SessionsAreIndependent) {
  std::string x = open(0), y = open(0);
  EXPECT_NE(x, y);
  post("/sessions/" + x + "/moves", {{"kind", "AttackAndL"}});
  EXPECT_EQ(get("/sessions/" + x)["status"], "ProponentWins");
  EXPECT_EQ(get("/sessions/" + y)["status"], "Open");
}

TEST(Service, LogFoldsToLiveState) {
  Service svc;
  json s = svc.create({{"problem", kProblem}, {"judgement", 2}}).body;
  std::string id = s["id"];
  EXPECT_EQ(svc.move(id, {{"kind", "AttackImp"}}).status, 200);
  EXPECT_EQ(svc.move(id, {{"kind", "AttackAndR"}}).status, 200);
  auto session = svc.find(id);
  dialogue::DialogueState folded = fold(session->initial, session->log, session->state.thesis.ctx.sig.get());
  EXPECT_EQ(dialogue::stateJson(folded), dialogue::stateJson(session->state));
}

TEST(Service, CorpusSuppliesTheProblem) {
  Options o;
  o.corpus = parseProblem(kProblem);
  o.corpusText = kProblem;
  Service svc(o);
  Reply r = svc.create({{"judgement", 0}});
  EXPECT_EQ(r.status, 201);
  EXPECT_EQ(Service().create({{"judgement", 0}}).status, 400);
}

TEST(Service, PersistedSessionsReplayOnRestart) {
  auto dir = std::filesystem::temp_directory_path() / ("ndk-gateway-" + std::to_string(::getpid()));
  std::filesystem::remove_all(dir);
  Options o;
  o.persist = dir;
  std::string id;
  json live;
  {
    Service svc(o);
    id = svc.create({{"problem", kProblem}, {"judgement", 2}}).body["id"];
    svc.move(id, {{"kind", "AttackImp"}});
    svc.move(id, {{"kind", "AttackAndL"}});
    live = svc.get(id).body;
  }
  Service restarted(o);
  Reply r = restarted.get(id);
  EXPECT_EQ(r.status, 200);
  EXPECT_EQ(r.body, live);
  EXPECT_EQ(restarted.find(id)->events.size(), 2u);
  std::filesystem::remove_all(dir);
}
