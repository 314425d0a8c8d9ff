#include "cellflow/fixtures.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "cellflow/error.hpp"

namespace cellflow::fixtures {

namespace {

constexpr double kPi = std::numbers::pi;

RandomSubTrajectory walker(std::size_t id, double frame_interval) {
  RandomSubTrajectory sub;
  sub.source_id = "walker-" + std::to_string(id);
  sub.method = ExtractionMethod::WholeTrajectory;
  sub.frame_interval = frame_interval;
  return sub;
}

void append_line(std::vector<Vec2>& dense, Vec2 a, Vec2 b, std::size_t samples) {
  for (std::size_t k = dense.empty() ? 0 : 1; k <= samples; ++k) dense.push_back(lerp(a, b, double(k) / double(samples)));
}

}  // namespace

Trajectory sample_path(const std::vector<Vec2>& dense, double step, const std::string& id, double frame_interval) {
  if (dense.size() < 2 || !(step > 0.0)) throw Error(ErrorCode::InvalidInput, "sample_path needs a path and a positive step");
  Trajectory t;
  t.id = id;
  t.frame_interval = frame_interval;
  t.points.push_back(dense.front());
  double carried = 0.0;
  for (std::size_t i = 1; i < dense.size(); ++i) {
    carried += distance(dense[i - 1], dense[i]);
    if (carried >= step) {
      t.points.push_back(dense[i]);
      carried = 0.0;
    }
  }
  if (carried > 0.25 * step) {
    t.points.push_back(dense.back());
  } else {
    t.points.back() = dense.back();
  }
  for (std::size_t k = 0; k < t.points.size(); ++k) t.times.push_back(static_cast<double>(k) * frame_interval);
  return t;
}

Trajectory figure_eight(double radius, double step) {
  // Lemniscate of Gerono opened up at its left tip: the two lobes cross once at the origin.
  const double eps = 0.35;
  const Vec2 start{radius * std::sin(-kPi / 2 + eps), radius * std::sin(-kPi / 2 + eps) * std::cos(-kPi / 2 + eps)};
  const Vec2 end{radius * std::sin(3 * kPi / 2 - eps), radius * std::sin(3 * kPi / 2 - eps) * std::cos(3 * kPi / 2 - eps)};
  std::vector<Vec2> dense;
  append_line(dense, start + Vec2{-12.0, -5.0}, start, 400);
  const std::size_t samples = 4000;
  for (std::size_t k = 1; k <= samples; ++k) {
    const double th = -kPi / 2 + eps + (2 * kPi - 2 * eps) * double(k) / double(samples);
    dense.push_back({radius * std::sin(th), radius * std::sin(th) * std::cos(th)});
  }
  append_line(dense, end, end + Vec2{-12.0, 5.0}, 400);
  return sample_path(dense, step, "figure-eight");
}

Trajectory loop_track(int loops, double radius, double step, const std::string& id) {
  std::vector<Vec2> dense;
  double x = 0.0;
  append_line(dense, {x, 0.0}, {x + 10.0, 0.0}, 200);
  x += 10.0;
  const double drift = 0.6 * radius;  // forward drift per loop
  for (int l = 0; l < loops; ++l) {
    const std::size_t samples = 2000;
    for (std::size_t k = 1; k <= samples; ++k) {
      const double th = 2 * kPi * double(k) / double(samples);
      dense.push_back({x + radius * std::sin(th) + drift * th / (2 * kPi), radius - radius * std::cos(th)});
    }
    x += drift;
    append_line(dense, dense.back(), {x + 4.0, 0.0}, 100);
    x += 4.0;
  }
  append_line(dense, dense.back(), {x + 10.0, 0.0}, 200);
  return sample_path(dense, step, id);
}

std::vector<RandomSubTrajectory> brownian_ensemble(std::size_t walkers, std::size_t steps, double diffusion,
                                                   double frame_interval, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, std::sqrt(2.0 * diffusion * frame_interval));
  std::vector<RandomSubTrajectory> out;
  for (std::size_t w = 0; w < walkers; ++w) {
    auto sub = walker(w, frame_interval);
    Vec2 p{};
    for (std::size_t k = 0; k <= steps; ++k) {
      if (k > 0) p += Vec2{gauss(rng), gauss(rng)};
      sub.points.push_back(p);
      sub.times.push_back(static_cast<double>(k) * frame_interval);
    }
    out.push_back(std::move(sub));
  }
  return out;
}

std::vector<RandomSubTrajectory> ballistic_ensemble(std::size_t walkers, std::size_t steps, double speed,
                                                    double frame_interval, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> angle(0.0, 2 * kPi);
  std::vector<RandomSubTrajectory> out;
  for (std::size_t w = 0; w < walkers; ++w) {
    auto sub = walker(w, frame_interval);
    const double a = angle(rng);
    const Vec2 v{speed * std::cos(a), speed * std::sin(a)};
    for (std::size_t k = 0; k <= steps; ++k) {
      const double t = static_cast<double>(k) * frame_interval;
      sub.points.push_back(v * t);
      sub.times.push_back(t);
    }
    out.push_back(std::move(sub));
  }
  return out;
}

std::vector<RandomSubTrajectory> confined_ensemble(std::size_t walkers, std::size_t steps, double diffusion,
                                                   double frame_interval, double box, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, std::sqrt(2.0 * diffusion * frame_interval));
  std::uniform_real_distribution<double> where(0.0, box);
  auto reflect = [box](double c) {
    // Fold onto [0, box] (mirror images of the walls).
    c = std::fmod(c, 2 * box);
    if (c < 0) c += 2 * box;
    return c > box ? 2 * box - c : c;
  };
  std::vector<RandomSubTrajectory> out;
  for (std::size_t w = 0; w < walkers; ++w) {
    auto sub = walker(w, frame_interval);
    Vec2 p{where(rng), where(rng)};
    for (std::size_t k = 0; k <= steps; ++k) {
      if (k > 0) p = {reflect(p.x + gauss(rng)), reflect(p.y + gauss(rng))};
      sub.points.push_back(p);
      sub.times.push_back(static_cast<double>(k) * frame_interval);
    }
    out.push_back(std::move(sub));
  }
  return out;
}

SyntheticDataset synthetic_dataset(std::uint64_t seed, double pixel_size) {
  const std::size_t width = 480;
  const std::size_t height = 320;
  SyntheticDataset data;
  data.mask = DomainMask(width, height, pixel_size, false);
  // Elliptic body with the wound side cut off.
  const double cx = 240.0, cy = 160.0, ax = 230.0, ay = 150.0, cut = 450.0;
  auto inside_px = [&](double x, double y) {
    const double u = (x - cx) / ax, v = (y - cy) / ay;
    return u * u + v * v <= 1.0 && x < cut;
  };
  for (std::size_t j = 0; j < height; ++j) {
    for (std::size_t i = 0; i < width; ++i) data.mask.set(i, j, inside_px(i + 0.5, j + 0.5));
  }
  // Tracks keep well clear of the boundary so their sample squares do too.
  auto safe_px = [&](Vec2 p) {
    const double u = (p.x - cx) / (ax - 40.0), v = (p.y - cy) / (ay - 40.0);
    return u * u + v * v <= 1.0 && p.x < cut - 40.0;
  };

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::normal_distribution<double> jitter(0.0, 0.6);
  const Vec2 wound{400.0, 160.0};
  const std::size_t track_count = 12;
  const std::size_t frames = 36;
  const double frame_step_px = 6.0;
  const double loop_radius_px = 10.0;

  while (data.tracks.size() < track_count) {
    const Vec2 start{60.0 + 160.0 * unit(rng), 70.0 + 180.0 * unit(rng)};
    if (!safe_px(start)) continue;
    std::vector<Vec2> px;
    Vec2 p = start;
    // One or two random episodes, each a small loop followed by back-and-forth jitter.
    std::vector<std::size_t> episodes;
    episodes.push_back(4 + static_cast<std::size_t>(unit(rng) * 8));
    if (unit(rng) < 0.6) episodes.push_back(episodes.front() + 14 + static_cast<std::size_t>(unit(rng) * 4));
    std::size_t next_episode = 0;
    bool ok = true;
    while (px.size() < frames) {
      px.push_back(p);
      if (next_episode < episodes.size() && px.size() == episodes[next_episode]) {
        ++next_episode;
        const Vec2 heading = (wound - p) / norm(wound - p);
        const Vec2 side = perp(heading) * (unit(rng) < 0.5 ? 1.0 : -1.0);
        const Vec2 centre = p + side * loop_radius_px;
        const std::size_t loop_frames = 9;
        for (std::size_t k = 1; k <= loop_frames && px.size() < frames; ++k) {
          const double th = 2 * kPi * double(k) / double(loop_frames);
          const Vec2 radial = (p - centre);
          const Vec2 rotated{radial.x * std::cos(th) - radial.y * std::sin(th), radial.x * std::sin(th) + radial.y * std::cos(th)};
          px.push_back(centre + rotated + heading * (1.2 * k) + Vec2{jitter(rng), jitter(rng)});
        }
        p = px.back();
        if (px.size() >= frames) break;
      }
      const Vec2 to_wound = wound - p;
      const double dist = norm(to_wound);
      if (dist < 2 * frame_step_px) break;
      const Vec2 heading = to_wound / dist;
      p = p + heading * frame_step_px + Vec2{jitter(rng), jitter(rng)};
    }
    for (auto& q : px) {
      q = {std::round(q.x * 100.0) / 100.0, std::round(q.y * 100.0) / 100.0};
      if (!safe_px(q)) ok = false;
    }
    if (!ok || px.size() < 10) continue;
    Trajectory t;
    t.id = "cell" + std::to_string(data.tracks.size() + 1);
    for (std::size_t k = 0; k < px.size(); ++k) {
      t.points.push_back(px[k] * pixel_size);
      t.times.push_back(static_cast<double>(k) * kDefaultFrameInterval);
    }
    data.tracks.push_back(std::move(t));
  }
  return data;
}

}  // namespace cellflow::fixtures
