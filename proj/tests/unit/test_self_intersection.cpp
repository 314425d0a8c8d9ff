#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "cellflow/curve_evolution.hpp"
#include "cellflow/fixtures.hpp"
#include "cellflow/segment_ledger.hpp"
#include "cellflow/self_intersection.hpp"
#include "oracles.hpp"

using namespace cellflow;

namespace {

bool covered(const std::vector<IntersectionSpan>& spans, std::size_t lo, std::size_t hi) {
  for (const auto& s : spans) {
    if (s.first <= lo && hi <= s.last) return true;
  }
  return false;
}

}  // namespace

TEST_SUITE("self_intersection") {
  TEST_CASE("convex arc produces no span") {
    std::vector<Vec2> pts;
    for (int k = 0; k <= 200; ++k) {
      const double a = k * std::numbers::pi / 200.0;
      pts.push_back({20.0 * std::cos(a), 20.0 * std::sin(a)});
    }
    CHECK(detect_self_intersections(pts, 0.5).empty());
    CHECK(find_crossings(pts, 0.5).empty());
  }

  TEST_CASE("figure-eight gives exactly one span around its crossing") {
    const auto t = fixtures::figure_eight();
    const auto c = resample(t, 1.0).curve;
    const auto truth = oracle::crossings(c.points);
    REQUIRE(truth.size() == 1);
    const auto grid = detect_self_intersections(c.points, 1.0);
    REQUIRE(grid.size() == 1);
    const auto spans = detect_intersections(c.points, 1.0);
    REQUIRE(spans.size() == 1);
    CHECK(covered(spans, truth[0].first + 1, truth[0].second));
    CHECK(spans[0].last - spans[0].first > 4);
  }

  TEST_CASE("revisit with index gap 3 is ignored, gap 5 is reported") {
    // Only the first and last points share a cell in either grid.
    const std::vector<Vec2> short_loop{{0.1, 0.1}, {3, 0.1}, {3, 3}, {0.2, 0.2}};
    CHECK(detect_self_intersections(short_loop, 1.0).empty());
    const std::vector<Vec2> long_loop{{0.1, 0.1}, {3, 0.1}, {5, 0.1}, {5, 3}, {3, 3}, {0.2, 0.3}};
    const auto spans = detect_self_intersections(long_loop, 1.0);
    REQUIRE(spans.size() == 1);
    CHECK(spans[0] == IntersectionSpan{0, 5});
  }

  TEST_CASE("overlapping spans merge transitively") {
    const auto m = merge_spans({{30, 40}, {0, 10}, {8, 20}, {20, 25}, {50, 60}});
    REQUIRE(m.size() == 3);
    CHECK(m[0] == IntersectionSpan{0, 25});
    CHECK(m[1] == IntersectionSpan{30, 40});
    CHECK(m[2] == IntersectionSpan{50, 60});
  }

  TEST_CASE("exact element crossing test") {
    CHECK(elements_cross({0, 0}, {2, 2}, {0, 2}, {2, 0}));
    CHECK_FALSE(elements_cross({0, 0}, {1, 0}, {1, 0}, {1, 1}));  // touching only
    CHECK_FALSE(elements_cross({0, 0}, {1, 0}, {0, 1}, {1, 1}));
    const std::vector<Vec2> knot{{0, 0}, {2, 0}, {2, 1}, {1, 1}, {1, -1}};
    const auto spans = find_crossings(knot, 1.0);
    REQUIRE(spans.size() == 1);
    CHECK(spans[0] == IntersectionSpan{0, 4});
  }

  TEST_CASE("property: random polylines, every separated crossing lies in a span") {
    std::mt19937_64 rng(41);
    for (int trial = 0; trial < 60; ++trial) {
      const auto raw = oracle::wiggly_walk(rng, 20 + trial, 3.0, 1.4);
      const auto c = resample(oracle::make_track(raw), 0.5).curve;
      const auto spans = detect_intersections(c.points, 0.5);
      for (const auto& [i, j] : oracle::crossings(c.points)) {
        if (j - i - 1 <= 4) continue;
        CHECK(covered(spans, i + 1, j));
      }
      for (const auto& s : detect_self_intersections(c.points, 0.5)) CHECK(s.last - s.first > 4);
    }
  }

  TEST_CASE("cell visits grow linearly with the point count") {
    const auto run = [](std::size_t n) {
      std::vector<Vec2> pts;
      for (std::size_t i = 0; i < n; ++i) pts.push_back({0.4 * i, std::sin(0.01 * i)});
      DetectionStats st;
      detect_self_intersections(pts, 1.0, &st);
      return st.cell_visits;
    };
    CHECK(run(10000) == 10 * run(1000));
  }

  TEST_CASE("thinning leaves spacing at hbar alone") {
    std::vector<Vec2> pts;
    for (int i = 0; i <= 20; ++i) pts.push_back({1.0 * i, 0.0});
    auto r = resample(oracle::make_track(pts), 1.0);
    const auto before = r.curve.points;
    CHECK_FALSE(thin_points(r.curve, r.ledger, 1.0));
    CHECK(r.curve.points == before);
  }

  TEST_CASE("uniform spacing hbar/4 over 101 points thins to about 51") {
    std::vector<Vec2> pts;
    for (int i = 0; i <= 100; ++i) pts.push_back({0.25 * i, 0.0});
    DiscreteCurve c{pts, 1.0};
    SegmentLedger l;
    Segment s;
    s.start_idx = 0;
    s.end_idx = 100;
    l.segments = {s};
    CHECK(thin_points(c, l, 1.0));
    CHECK(c.size() == 51);
    CHECK(c.length() / (c.size() - 1) == doctest::Approx(0.5));
    CHECK(c.points.front() == pts.front());
    CHECK(c.points.back() == pts.back());
    CHECK(l[0].end_idx == 50);
  }

  TEST_CASE("segment endpoints survive thinning") {
    std::mt19937_64 rng(43);
    for (int trial = 0; trial < 30; ++trial) {
      const auto raw = oracle::wiggly_walk(rng, 15, 1.0, 0.7);
      auto r = resample(oracle::make_track(raw), 0.1);
      CHECK(thin_points(r.curve, r.ledger, 1.0));
      for (std::size_t j = 0; j < r.ledger.size(); ++j) {
        CHECK(r.curve.points[r.ledger[j].start_idx] == raw[j]);
        CHECK(r.curve.points[r.ledger[j].end_idx] == raw[j + 1]);
      }
    }
  }

  TEST_CASE("no spans gives zero parameters") {
    const auto p = adaptive_params({}, 30, 0.01, 20.0);
    for (std::size_t i = 0; i < 30; ++i) {
      CHECK(p.delta[i] == 0.0);
      CHECK(p.lambda[i] == 0.0);
    }
  }

  TEST_CASE("span 10..20 gets full weight and six-step ramps") {
    const std::vector<IntersectionSpan> spans{{10, 20}};
    const auto p = adaptive_params(spans, 40, 0.6, 12.0);
    for (std::size_t i = 10; i <= 20; ++i) {
      CHECK(p.delta[i] == 0.6);
      CHECK(p.lambda[i] == 12.0);
    }
    for (int k = 0; k <= 4; ++k) {
      CHECK(p.delta[5 + k] == doctest::Approx((1 + k) * 0.6 / 6).epsilon(1e-15));
      CHECK(p.delta[25 - k] == doctest::Approx((1 + k) * 0.6 / 6).epsilon(1e-15));
      CHECK(p.lambda[5 + k] == doctest::Approx((1 + k) * 12.0 / 6).epsilon(1e-15));
    }
    for (std::size_t i = 0; i < 5; ++i) CHECK(p.delta[i] == 0.0);
    for (std::size_t i = 26; i < 40; ++i) CHECK(p.delta[i] == 0.0);
  }

  TEST_CASE("overlapping ramps take the pointwise maximum") {
    const std::vector<IntersectionSpan> a{{10, 20}}, b{{28, 35}}, both{{10, 20}, {28, 35}};
    const auto pa = adaptive_params(a, 50, 1.0, 1.0);
    const auto pb = adaptive_params(b, 50, 1.0, 1.0);
    const auto pab = adaptive_params(both, 50, 1.0, 1.0);
    for (std::size_t i = 0; i < 50; ++i) CHECK(pab.delta[i] == std::max(pa.delta[i], pb.delta[i]));
  }

  TEST_CASE("ramps are clipped at the curve ends") {
    const std::vector<IntersectionSpan> spans{{1, 8}};
    const auto p = adaptive_params(spans, 10, 1.0, 1.0);
    REQUIRE(p.delta.size() == 10);
    CHECK(p.delta[0] == doctest::Approx(5.0 / 6.0));
    CHECK(p.delta[9] == doctest::Approx(5.0 / 6.0));
  }
}
