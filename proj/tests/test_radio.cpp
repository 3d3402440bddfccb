#include <doctest.h>

#include "gtf/radio.hpp"
#include "gtf/rng.hpp"

using namespace gtf;

TEST_CASE("event queue dispatches by time, FIFO among equal stamps") {
  EventQueue q;
  std::vector<int> order;
  q.push(50, [&] { order.push_back(2); });
  q.push(10, [&] { order.push_back(1); });
  q.push(50, [&] { order.push_back(3); });
  q.push(90, [&] { order.push_back(4); });

  std::vector<std::int64_t> times;
  while (!q.empty()) {
    auto [t, fn] = q.pop();
    times.push_back(t);
    fn();
  }
  CHECK(order == std::vector<int>{1, 2, 3, 4});
  CHECK(std::is_sorted(times.begin(), times.end()));
}

TEST_CASE("simulator clock only moves forward") {
  Simulator sim;
  int fired = 0;
  sim.schedule_at(100, [&] { fired++; });
  sim.schedule_at(200, [&] { fired++; });
  sim.run_until(150);
  CHECK(fired == 1);
  CHECK(sim.now() == 150);
  CHECK_THROWS_AS(sim.schedule_at(50, [] {}), Error);
  sim.run_until(400);
  CHECK(fired == 2);
  CHECK(sim.now() == 400);
}

TEST_CASE("transmit arithmetic: 34 bytes at 366 Bps takes 92896 us") {
  ChannelConfig cfg;
  cfg.jitter_us = 0;
  Channel ch(cfg, make_rng(1, "radio"));
  CHECK(ch.transmission_us(34) == 92896);  // round(34e6 / 366)
  CHECK(ch.transmission_us(2) == 5464);
  CHECK(ch.transmission_us(10) == 27322);

  Simulator sim;
  std::int64_t delivered = -1;
  ch.transmit(sim, 34, "a", "b", [&](std::int64_t t) { delivered = t; });
  sim.run_until(1'000'000);
  CHECK(delivered == 92896);
}

TEST_CASE("zero-byte message delivers after jitter only") {
  ChannelConfig cfg;
  cfg.jitter_us = 0;
  Channel ch(cfg, make_rng(2, "radio"));
  Simulator sim;
  std::int64_t delivered = -1;
  ch.transmit(sim, 0, "a", "b", [&](std::int64_t t) { delivered = t; });
  sim.run_until(10);
  CHECK(delivered == 0);  // now + 0 transmission + no jitter
}

TEST_CASE("drop probability one always drops") {
  ChannelConfig cfg;
  cfg.jitter_us = 0;
  cfg.drop_probability = 1.0;
  Channel ch(cfg, make_rng(3, "radio"));
  Simulator sim;
  int delivered = 0;
  for (int i = 0; i < 20; ++i) {
    sim.run_until(sim.now() + 200'000);
    ch.transmit(sim, 34, "a", "b", [&](std::int64_t) { delivered++; });
  }
  sim.run_until(sim.now() + 1'000'000);
  CHECK(delivered == 0);
  int drop_rows = 0;
  for (const auto& e : ch.log()) {
    if (e.kind == "rx" && e.dropped) drop_rows++;
  }
  CHECK(drop_rows == 20);
}

TEST_CASE("transmitting on a busy channel throws; it frees after delivery") {
  ChannelConfig cfg;
  cfg.jitter_us = 0;
  Channel ch(cfg, make_rng(4, "radio"));
  Simulator sim;
  ch.transmit(sim, 34, "a", "b", [](std::int64_t) {});
  CHECK(ch.busy(sim.now()));
  CHECK_THROWS_AS(ch.transmit(sim, 2, "a", "b", [](std::int64_t) {}), ChannelBusyError);
  sim.run_until(92896);
  CHECK_FALSE(ch.busy(sim.now()));
  ch.transmit(sim, 2, "a", "b", [](std::int64_t) {});
}

TEST_CASE("channel event log is deterministic for a fixed seed") {
  auto run_once = [] {
    ChannelConfig cfg;
    cfg.jitter_us = 5000;
    cfg.drop_probability = 0.3;
    Channel ch(cfg, make_rng(99, "radio"));
    Simulator sim;
    for (int i = 0; i < 50; ++i) {
      sim.run_until(i * 200'000);
      ch.transmit(sim, (i % 2) ? 34 : 2, "a", "b", [](std::int64_t) {});
    }
    sim.run_until(100'000'000);
    return ch.log();
  };
  const auto a = run_once();
  const auto b = run_once();
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].t_us == b[i].t_us);
    CHECK(a[i].kind == b[i].kind);
    CHECK(a[i].bytes == b[i].bytes);
    CHECK(a[i].dropped == b[i].dropped);
  }
}
