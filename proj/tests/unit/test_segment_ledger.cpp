#include <doctest.h>

#include <cmath>
#include <numeric>
#include <random>

#include "cellflow/curve_evolution.hpp"
#include "cellflow/error.hpp"
#include "cellflow/segment_ledger.hpp"
#include "oracles.hpp"

using namespace cellflow;

namespace {

SegmentLedger ledger_with_lengths(std::initializer_list<double> lengths) {
  SegmentLedger l;
  for (double v : lengths) {
    Segment s;
    s.length = v;
    s.disappeared = v == 0.0;
    l.segments.push_back(s);
  }
  return l;
}

}  // namespace

TEST_SUITE("segment_ledger") {
  TEST_CASE("straight part of the curve keeps its segment length") {
    const auto r = resample(oracle::make_track({{0, 0}, {4, 0}, {8, 0}, {9, 3}}), 0.5);
    DiscreteCurve c = r.curve;
    SegmentLedger l = r.ledger;
    const auto params = constant_params(c.size(), 0.01, 0.0);
    const std::vector<double> w(c.size(), 0.0);
    const auto st = compute_step_state(c, params, w, 0.0);
    evolve_segment_lengths(l, st.element_lengths, st.curvature, st.normal_velocity, 1e-3);
    CHECK(l[0].length == 4.0);  // all its element curvatures are exactly zero
    CHECK(l[2].length < r.ledger[2].length);
  }

  TEST_CASE("with beta = -delta k every live length shrinks") {
    std::mt19937_64 rng(21);
    for (int trial = 0; trial < 50; ++trial) {
      const auto r = resample(oracle::make_track(oracle::wiggly_walk(rng, 12, 2.0, 0.8)), 0.3);
      SegmentLedger l = r.ledger;
      const auto params = constant_params(r.curve.size(), 0.01, 0.0);
      const std::vector<double> w(r.curve.size(), 0.0);
      const auto st = compute_step_state(r.curve, params, w, 50.0);
      evolve_segment_lengths(l, st.element_lengths, st.curvature, st.normal_velocity, 1e-4);
      for (std::size_t j = 0; j < l.size(); ++j) CHECK(l[j].length <= r.ledger[j].length);
    }
  }

  TEST_CASE("short hairpin segment disappears and stays gone") {
    const auto r = resample(oracle::make_track({{0, 0}, {5, 0}, {5, 0.3}, {0, 0.3}}), 0.1);
    SegmentLedger l = r.ledger;
    const auto params = constant_params(r.curve.size(), 0.01, 0.0);
    const std::vector<double> w(r.curve.size(), 0.0);
    const auto st = compute_step_state(r.curve, params, w, 0.0);
    int steps = 0;
    while (!l[1].disappeared && steps < 100000) {
      evolve_segment_lengths(l, st.element_lengths, st.curvature, st.normal_velocity, 1e-2);
      ++steps;
    }
    REQUIRE(l[1].disappeared);
    CHECK(l[1].length == 0.0);
    const std::vector<double> growth(st.normal_velocity.size(), 1.0);
    for (int k = 0; k < 10; ++k) {
      evolve_segment_lengths(l, st.element_lengths, st.curvature, growth, 1.0);
      CHECK(l[1].disappeared);
      CHECK(l[1].length == 0.0);
    }
  }

  TEST_CASE("normalization: single segment, proportional split, exact sum") {
    auto one = ledger_with_lengths({2.0});
    normalize_discrete_lengths(one, 7.5);
    CHECK(one[0].discrete_length == 7.5);

    auto two = ledger_with_lengths({3.0, 1.0});
    normalize_discrete_lengths(two, 8.0);
    CHECK(two[0].discrete_length == 6.0);
    CHECK(two[1].discrete_length == 2.0);
    CHECK(two[0].ratio == 0.75);

    std::mt19937_64 rng(2);
    std::uniform_real_distribution<double> u(0.0, 10.0);
    for (int trial = 0; trial < 200; ++trial) {
      SegmentLedger l;
      for (int j = 0; j < 1 + trial % 40; ++j) {
        Segment s;
        s.length = (j % 5 == 3) ? 0.0 : u(rng);
        s.disappeared = s.length == 0.0;
        l.segments.push_back(s);
      }
      l[0].length = 1.0;
      l[0].disappeared = false;
      const double total = u(rng) * 100.0 + 1.0;
      normalize_discrete_lengths(l, total);
      double sum = 0.0;
      for (const auto& s : l.segments) sum += s.discrete_length;
      CHECK(std::abs(sum - total) <= 1e-12 * total);
    }

    auto dead = ledger_with_lengths({0.0, 0.0});
    CHECK_THROWS_AS(normalize_discrete_lengths(dead, 1.0), Error);
  }

  TEST_CASE("relocation onto an existing grid point moves nothing") {
    auto r = resample(oracle::make_track({{0, 0}, {3, 0}, {3, 3}}), 1.0);
    normalize_discrete_lengths(r.ledger, r.curve.length());
    const auto before = r.curve.points;
    relocate_endpoints(r.ledger, r.curve);
    CHECK(r.curve.points == before);
    CHECK(r.ledger[0].end_idx == 3);
    CHECK(r.ledger[1].start_idx == 3);
  }

  TEST_CASE("relocation mid-element displaces exactly one grid point onto the target") {
    std::mt19937_64 rng(17);
    std::uniform_real_distribution<double> u(0.2, 0.8);
    for (int trial = 0; trial < 100; ++trial) {
      auto r = resample(oracle::make_track(oracle::wiggly_walk(rng, 4, 3.0, 0.6)), 0.5);
      // Shift the middle boundary by a fraction of an element.
      const double shift = (u(rng) - 0.5) * 0.4;
      r.ledger[0].length += shift;
      r.ledger[1].length -= shift;
      normalize_discrete_lengths(r.ledger, r.curve.length());
      const auto before = r.curve;
      relocate_endpoints(r.ledger, r.curve);
      REQUIRE(r.curve.size() == before.size());
      int moved = 0;
      for (std::size_t i = 0; i < before.size(); ++i) moved += r.curve.points[i] == before.points[i] ? 0 : 1;
      CHECK(moved <= 1);
      // The new end point sits where arclength Ld_0 fell on the old curve.
      double left = r.ledger[0].discrete_length;
      Vec2 target = before.points.back();
      for (std::size_t i = 1; i < before.size(); ++i) {
        const double h = distance(before.points[i - 1], before.points[i]);
        if (left <= h) {
          target = lerp(before.points[i - 1], before.points[i], left / h);
          break;
        }
        left -= h;
      }
      CHECK(distance(r.curve.points[r.ledger[0].end_idx], target) <= 1e-12);
      CHECK(std::abs(r.curve.length() - before.length()) <= 0.5 + 1e-12);
    }
  }

  TEST_CASE("disappeared middle segment collapses onto one index") {
    auto r = resample(oracle::make_track({{0, 0}, {3, 0}, {3.5, 0.2}, {6, 0}}), 0.5);
    r.ledger[1].length = 0.0;
    r.ledger[1].disappeared = true;
    normalize_discrete_lengths(r.ledger, r.curve.length());
    relocate_endpoints(r.ledger, r.curve);
    CHECK(r.ledger[1].start_idx == r.ledger[1].end_idx);
    CHECK(r.ledger[0].end_idx == r.ledger[1].start_idx);
    CHECK(r.ledger[2].start_idx == r.ledger[1].end_idx);
    CHECK(r.ledger[2].end_idx == r.curve.size() - 1);
    CHECK(r.ledger[0].start_idx <= r.ledger[0].end_idx);
  }

  TEST_CASE("attracting field vanishes at step 0") {
    std::mt19937_64 rng(23);
    const auto r = resample(oracle::make_track(oracle::wiggly_walk(rng, 10, 2.0, 0.9)), 0.4);
    const auto f = build_attracting_field(r.ledger, r.curve);
    for (double w : f.w) CHECK(std::abs(w) < 1e-12);
  }

  TEST_CASE("tangential displacement gives w = 0") {
    auto r = resample(oracle::make_track({{0, 0}, {4, 0}}), 1.0);
    r.curve.points[2].x += 0.3;  // slides along the segment
    const auto f = build_attracting_field(r.ledger, r.curve);
    CHECK(f.vectors[2].x == doctest::Approx(-0.3));
    CHECK(f.w[2] == doctest::Approx(0.0));
  }

  TEST_CASE("collapsed unit segment pulls its merged point to the midpoint") {
    DiscreteCurve c{{{-1, 0}, {0.5, 0.3}, {2, 0}}, 1.0};
    SegmentLedger l;
    Segment a, dead, b;
    a.origin_start = {-1, 0};
    a.origin_end = {0, 0};
    a.start_idx = 0;
    a.end_idx = 1;
    dead.origin_start = {0, 0};
    dead.origin_end = {1, 0};
    dead.start_idx = dead.end_idx = 1;
    dead.disappeared = true;
    b.origin_start = {1, 0};
    b.origin_end = {2, 0};
    b.start_idx = 1;
    b.end_idx = 2;
    l.segments = {a, dead, b};
    const auto f = build_attracting_field(l, c);
    CHECK(f.targets[1].x == doctest::Approx(0.5));
    CHECK(f.targets[1].y == doctest::Approx(0.0));
    CHECK(f.vectors[1].x == doctest::Approx(0.0));
    CHECK(f.vectors[1].y == doctest::Approx(-0.3));
  }

  TEST_CASE("property: index map stays monotone and every end is a grid point through smoothing") {
    std::mt19937_64 rng(31);
    for (int trial = 0; trial < 10; ++trial) {
      const auto t = oracle::make_track(oracle::wiggly_walk(rng, 20, 2.0, 1.5));
      const auto r = smooth_trajectory(t, EvolutionParams{}, 1.0);
      for (std::size_t j = 0; j < r.ledger.size(); ++j) {
        CHECK(r.ledger[j].start_idx <= r.ledger[j].end_idx);
        if (j > 0) CHECK(r.ledger[j - 1].end_idx == r.ledger[j].start_idx);
        CHECK((r.ledger[j].disappeared == (r.ledger[j].start_idx == r.ledger[j].end_idx)));
      }
      // Ld is normalized before the last relocation and respacing, which may
      // each shorten the polygon by at most one element per segment end.
      double sum = 0.0;
      for (const auto& s : r.ledger.segments) sum += s.discrete_length;
      CHECK(sum >= r.curve.length() - 1e-9);
      CHECK(sum - r.curve.length() <= 2.0 * r.curve.hbar * static_cast<double>(r.ledger.size()));
    }
  }

  TEST_CASE("stronger attraction keeps directional parts closer to the recording") {
    std::vector<Vec2> pts;
    for (int i = 0; i < 25; ++i) pts.push_back({2.0 * i, 1.5 * std::sin(0.7 * i)});
    const auto t = oracle::make_track(pts);
    auto mean_gap = [&](double lambda) {
      EvolutionParams p;
      p.adaptive = false;
      p.lambda_max = lambda;
      p.extra_steps = 400;
      const auto r = smooth_trajectory(t, p, 1.0);
      double sum = 0.0;
      for (const auto& q : r.curve.points) {
        double best = 1e300;
        for (std::size_t i = 1; i < pts.size(); ++i) {
          const Vec2 d = pts[i] - pts[i - 1];
          const double s = std::clamp(dot(q - pts[i - 1], d) / dot(d, d), 0.0, 1.0);
          best = std::min(best, distance(q, pts[i - 1] + d * s));
        }
        sum += best;
      }
      return sum / r.curve.size();
    };
    CHECK(mean_gap(20.0) < mean_gap(1e-9));
  }
}
