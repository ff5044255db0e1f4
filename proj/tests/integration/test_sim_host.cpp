#include <citygen/engine.hpp>
#include <citygen/island.hpp>
#include <citygen/server.hpp>

#include <gtest/gtest.h>

#include <chrono>
#include <future>
#include <thread>

using namespace citygen;
using nlohmann::json;
using namespace std::chrono_literals;

namespace {

Terrain island() { return generate_island(48, 48, 21); }

ServerOptions paused(std::size_t queue_limit = 100000) {
  ServerOptions o;
  o.start_paused = true;
  o.client_queue_limit = queue_limit;
  return o;
}

Command cmd(Command::Kind kind, std::int64_t id) {
  Command c;
  c.kind = kind;
  c.id = id;
  return c;
}

Command step(std::int64_t id, std::uint64_t n) {
  Command c = cmd(Command::Kind::Step, id);
  c.steps = n;
  return c;
}

Command set_params(std::int64_t id, std::optional<Rect> region, json params) {
  Command c = cmd(Command::Kind::SetParams, id);
  c.region = region;
  c.params = std::move(params);
  return c;
}

/// Test-side client: pulls messages off a subscriber and rebuilds the state.
struct Client {
  std::shared_ptr<Subscriber> sub;
  std::optional<Snapshot> state;
  std::vector<json> acks;
  std::vector<std::uint64_t> diff_ticks;
  int fulls = 0;

  explicit Client(std::size_t limit = 100000) : sub(std::make_shared<Subscriber>(limit)) {}

  std::optional<json> next(std::chrono::milliseconds timeout = 5000ms) {
    auto m = sub->wait_pop(timeout);
    if (!m) return std::nullopt;
    json j = json::parse(**m);
    const std::string type = j.at("type");
    if (type == "ack") {
      acks.push_back(j);
    } else {
      apply_state_message(state, j);
      if (type == "full") ++fulls;
      if (type == "diff") diff_ticks.push_back(j.at("tick"));
    }
    return j;
  }

  /// Consumes messages until the reconstructed state reaches `tick`.
  bool until_tick(std::uint64_t tick) {
    while (!state || state->tick < tick) {
      if (!next()) return false;
    }
    return state->tick == tick;
  }

  bool until_ack(std::int64_t id) {
    for (;;) {
      for (const auto& a : acks) {
        if (a.at("id") == id) return true;
      }
      if (!next()) return false;
    }
  }
};

}  // namespace

TEST(SimHost, PausedStepEmitsExactlyThatManyDiffs) {
  SimHost host(island(), SimParams{}, 3, paused());
  host.start();
  Client c;
  host.attach(c.sub);
  ASSERT_TRUE(c.next());
  ASSERT_EQ(c.fulls, 1);
  EXPECT_EQ(c.state->tick, 0u);

  EXPECT_FALSE(c.next(200ms));
  host.submit(c.sub, step(1, 5));
  ASSERT_TRUE(c.until_tick(5));
  ASSERT_TRUE(c.until_ack(1));
  EXPECT_EQ(c.diff_ticks, (std::vector<std::uint64_t>{1, 2, 3, 4, 5}));
  EXPECT_FALSE(c.next(300ms));
  EXPECT_EQ(c.acks.size(), 1u);
  EXPECT_EQ(c.acks[0].at("ok"), true);
  host.stop();
}

TEST(SimHost, DiffsReconstructTheEngineForAThousandTicks) {
  SimHost host(island(), SimParams{}, 9, paused());
  host.start();
  Client c;
  host.attach(c.sub);
  ASSERT_TRUE(c.next());

  WorldState ref(island(), SimParams{}, 9);
  ASSERT_EQ(*c.state, ref.snapshot());
  host.submit(nullptr, step(1, 1000));
  for (std::uint64_t t = 1; t <= 1000; ++t) {
    ref.step();
    ASSERT_TRUE(c.until_tick(t));
    ASSERT_EQ(*c.state, ref.snapshot()) << "tick " << t;
  }
  // Anchor fulls every 256 ticks arrive after the diff of the same tick.
  while (c.next(200ms)) {
  }
  EXPECT_EQ(*c.state, ref.snapshot());
  EXPECT_EQ(c.fulls, 1 + 3);
  EXPECT_EQ(c.sub->resyncs(), 0u);
}

TEST(SimHost, AttachMidRunStartsWithFullThenNextTick) {
  ServerOptions o;
  o.ticks_per_second = 400;
  SimHost host(island(), SimParams{}, 5, o);
  host.start();
  std::this_thread::sleep_for(100ms);
  Client c;
  host.attach(c.sub);
  const auto first = c.next();
  ASSERT_TRUE(first);
  ASSERT_EQ(first->at("type"), "full");
  const std::uint64_t t0 = c.state->tick;
  EXPECT_GT(t0, 0u);
  const auto second = c.next();
  ASSERT_TRUE(second);
  ASSERT_EQ(second->at("type"), "diff");
  EXPECT_EQ(second->at("tick").get<std::uint64_t>(), t0 + 1);
  for (int i = 0; i < 20; ++i) ASSERT_TRUE(c.next());
  host.stop();

  WorldState ref(island(), SimParams{}, 5);
  ref.run(c.state->tick);
  EXPECT_EQ(*c.state, ref.snapshot());
}

TEST(SimHost, ScriptedCommandsMatchDirectEngineCalls) {
  SimHost host(island(), SimParams{}, 13, paused());
  host.start();
  Client c;
  host.attach(c.sub);
  ASSERT_TRUE(c.next());

  WorldState ref(island(), SimParams{}, 13);
  host.submit(c.sub, step(1, 30));
  ASSERT_TRUE(c.until_tick(30));
  ref.run(30);

  host.submit(c.sub, set_params(2, std::nullopt, {{"k_connect", 1.8}, {"n_connectors", 5}}));
  ASSERT_TRUE(c.until_ack(2));
  ref.set_params(std::nullopt, {{"k_connect", 1.8}, {"n_connectors", 5}});

  host.submit(c.sub, step(3, 40));
  ASSERT_TRUE(c.until_tick(70));
  ref.run(40);

  host.submit(c.sub, set_params(4, Rect{10, 10, 20, 20}, {{"w_cluster", 1.2}, {"service_radius", 6}}));
  ASSERT_TRUE(c.until_ack(4));
  ref.set_params(Rect{10, 10, 20, 20}, {{"w_cluster", 1.2}, {"service_radius", 6}});

  // Invalid at apply time: region outside the grid. Acked with an error, world untouched.
  host.submit(c.sub, set_params(5, Rect{40, 40, 20, 20}, {{"w_cluster", 0.1}}));
  ASSERT_TRUE(c.until_ack(5));
  EXPECT_EQ(c.acks.back().at("ok"), false);
  EXPECT_TRUE(c.acks.back().contains("error"));

  host.submit(c.sub, step(6, 50));
  ASSERT_TRUE(c.until_tick(120));
  ref.run(50);
  EXPECT_EQ(*c.state, ref.snapshot());
  EXPECT_EQ(ref.snapshot().agents.size(), 22u + 3u);

  for (const auto& a : c.acks) {
    if (a.at("id") != 5) EXPECT_EQ(a.at("ok"), true) << a.dump();
  }

  std::promise<std::string> got;
  host.request_state([&](Subscriber::Message m) { got.set_value(*m); });
  const json full = json::parse(got.get_future().get());
  EXPECT_EQ(snapshot_from_json(full.at("snapshot")), ref.snapshot());
}

TEST(SimHost, SlowClientIsResynced) {
  SimHost host(island(), SimParams{}, 4, paused(4));
  host.start();
  auto slow = std::make_shared<Subscriber>(4);
  Client fast;
  host.attach(slow);
  host.attach(fast.sub);
  ASSERT_TRUE(fast.next());
  host.submit(fast.sub, step(1, 200));
  ASSERT_TRUE(fast.until_tick(200));
  EXPECT_GT(slow->resyncs(), 0u);
  EXPECT_LE(slow->pending(), 4u);

  Client replay;
  replay.sub = slow;
  const auto first = replay.next();
  ASSERT_TRUE(first);
  EXPECT_EQ(first->at("type"), "full");
  while (replay.next(200ms)) {
  }
  WorldState ref(island(), SimParams{}, 4);
  ref.run(200);
  EXPECT_EQ(*replay.state, ref.snapshot());
  EXPECT_EQ(*fast.state, ref.snapshot());
  EXPECT_EQ(fast.sub->resyncs(), 0u);
}

TEST(SimHost, ResetStartsOverWithNewSeed) {
  SimHost host(island(), SimParams{}, 4, paused());
  host.start();
  Client c;
  host.attach(c.sub);
  ASSERT_TRUE(c.next());
  host.submit(c.sub, step(1, 25));
  ASSERT_TRUE(c.until_tick(25));

  Command reset = cmd(Command::Kind::Reset, 2);
  reset.seed = 77;
  host.submit(c.sub, reset);
  ASSERT_TRUE(c.until_ack(2));
  ASSERT_EQ(c.state->tick, 0u);
  EXPECT_EQ(c.state->rng_seed, 77u);
  EXPECT_EQ(*c.state, WorldState(island(), SimParams{}, 77).snapshot());

  host.submit(c.sub, step(3, 10));
  ASSERT_TRUE(c.until_tick(10));
  WorldState ref(island(), SimParams{}, 77);
  ref.run(10);
  EXPECT_EQ(*c.state, ref.snapshot());

  host.submit(c.sub, cmd(Command::Kind::Reset, 4));
  ASSERT_TRUE(c.until_ack(4));
  EXPECT_EQ(c.state->rng_seed, 4u);
}

TEST(SimHost, ResumeAndPauseControlFreeRunning) {
  ServerOptions o = paused();
  o.ticks_per_second = 500;
  SimHost host(island(), SimParams{}, 8, o);
  host.start();
  Client c;
  host.attach(c.sub);
  ASSERT_TRUE(c.next());
  EXPECT_FALSE(c.next(150ms));
  host.submit(c.sub, cmd(Command::Kind::Resume, 1));
  ASSERT_TRUE(c.until_tick(10));
  host.submit(c.sub, cmd(Command::Kind::Pause, 2));
  ASSERT_TRUE(c.until_ack(2));
  while (c.next(200ms)) {
  }
  const std::uint64_t stopped = c.state->tick;
  EXPECT_FALSE(c.next(200ms));
  EXPECT_EQ(c.state->tick, stopped);

  Command speed = cmd(Command::Kind::SetSpeed, 3);
  speed.tps = 1000;
  host.submit(c.sub, speed);
  ASSERT_TRUE(c.until_ack(3));
  EXPECT_EQ(c.state->tick, stopped);
}
