#include <doctest.h>

#include <cmath>
#include <random>

#include "cellflow/error.hpp"
#include "cellflow/trajectory.hpp"
#include "cellflow/velocity.hpp"
#include "oracles.hpp"

using namespace cellflow;

namespace {

SegmentLedger budgets(const std::vector<bool>& dead, double dt = 2.5) {
  SegmentLedger l;
  for (bool d : dead) {
    Segment s;
    s.disappeared = d;
    s.time_budget = dt;
    l.segments.push_back(s);
  }
  return l;
}

double live_total(const SegmentLedger& l) {
  double t = 0.0;
  for (const auto& s : l.segments) {
    if (!s.disappeared) t += s.time_budget;
  }
  return t;
}

}  // namespace

TEST_SUITE("velocity") {
  TEST_CASE("no dead segments leaves the budgets alone") {
    auto l = budgets({false, false, false});
    redistribute_time(l);
    for (const auto& s : l.segments) CHECK(s.time_budget == 2.5);
  }

  TEST_CASE("live, dead, live splits half each way") {
    auto l = budgets({false, true, false});
    redistribute_time(l);
    CHECK(l[0].time_budget == 3.75);
    CHECK(l[1].time_budget == 0.0);
    CHECK(l[2].time_budget == 3.75);
  }

  TEST_CASE("three dead segments in a row split independently") {
    auto l = budgets({false, true, true, true, false});
    redistribute_time(l);
    CHECK(l[0].time_budget == 2.5 + 3 * 1.25);
    CHECK(l[4].time_budget == 2.5 + 3 * 1.25);
    CHECK(std::abs(live_total(l) - 5 * 2.5) <= 1e-12);
  }

  TEST_CASE("dead first or last segment donates everything to its one neighbour") {
    auto l = budgets({true, true, false, false, true});
    redistribute_time(l);
    CHECK(l[2].time_budget == 7.5);
    CHECK(l[3].time_budget == 5.0);
    auto none = budgets({true, true});
    CHECK_THROWS_AS(redistribute_time(none), Error);
  }

  TEST_CASE("property: interior disappearances conserve the time budget") {
    std::mt19937_64 rng(51);
    std::uniform_real_distribution<double> u(0.5, 5.0);
    for (int trial = 0; trial < 100; ++trial) {
      const std::size_t M = 3 + trial % 30;
      std::vector<bool> dead(M, false);
      for (std::size_t j = 1; j + 1 < M; ++j) dead[j] = u(rng) < 2.0;
      auto l = budgets(dead);
      double total = 0.0;
      for (auto& s : l.segments) total += (s.time_budget = u(rng));
      redistribute_time(l);
      CHECK(std::abs(live_total(l) - total) <= 1e-12 * total);
    }
  }

  TEST_CASE("straight segment with Ld 5 over 2.5 min moves at 2 µm/min") {
    auto r = resample(oracle::make_track({{0, 0}, {3, 4}}), 1.0);
    r.ledger[0].discrete_length = 5.0;
    const auto v = compute_velocities(r.curve, r.ledger, "a");
    REQUIRE(v.samples.size() == r.curve.size());
    for (const auto& s : v.samples) {
      CHECK(s.velocity.x == doctest::Approx(1.2).epsilon(1e-14));
      CHECK(s.velocity.y == doctest::Approx(1.6).epsilon(1e-14));
      CHECK(s.source_id == "a");
    }
  }

  TEST_CASE("curved segment: one speed, directions follow the elements") {
    std::vector<Vec2> pts;
    for (int k = 0; k <= 12; ++k) pts.push_back({std::cos(0.2 * k), std::sin(0.2 * k)});
    DiscreteCurve c{pts, 1.0};
    SegmentLedger l;
    Segment s;
    s.start_idx = 0;
    s.end_idx = 12;
    s.discrete_length = c.length();
    s.time_budget = 2.5;
    l.segments = {s};
    const auto v = compute_velocities(c, l);
    REQUIRE(v.samples.size() == 13);
    for (std::size_t i = 0; i < 13; ++i) {
      const auto& q = v.samples[i];
      CHECK(std::abs(norm(q.velocity) - c.length() / 2.5) <= 1e-12);
      const std::size_t e = i == 0 ? 1 : i;
      CHECK(std::abs(cross(q.velocity, pts[e] - pts[e - 1])) <= 1e-12);
      CHECK(dot(q.velocity, pts[e] - pts[e - 1]) > 0.0);
    }
  }

  TEST_CASE("a dead middle segment slows its neighbours below Ld / dt") {
    auto r = resample(oracle::make_track({{0, 0}, {4, 0}, {4.5, 0.5}, {9, 1}}), 0.5);
    for (auto& s : r.ledger.segments) s.discrete_length = s.length;
    r.ledger[1].disappeared = true;
    redistribute_time(r.ledger);
    const auto v = compute_velocities(r.curve, r.ledger);
    for (const auto& q : v.samples) {
      CHECK(q.segment_id != 1);
      const auto& seg = r.ledger[q.segment_id];
      CHECK(norm(q.velocity) < seg.discrete_length / 2.5);
      CHECK(std::abs(norm(q.velocity) - seg.discrete_length / seg.time_budget) <= 1e-12);
    }
  }

  TEST_CASE("shared points belong to the earlier segment") {
    const auto r = resample(oracle::make_track({{0, 0}, {2, 0}, {2, 2}}), 1.0);
    auto l = r.ledger;
    for (auto& s : l.segments) s.discrete_length = s.length;
    const auto v = compute_velocities(r.curve, l);
    REQUIRE(v.samples.size() == r.curve.size());
    CHECK(v.samples[2].segment_id == 0);
    CHECK(v.samples[3].segment_id == 1);
  }
}
