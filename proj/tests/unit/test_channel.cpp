#include <stdexcept>
#include <cmath>
#include <complex>
#include <limits>

#include "doctest.h"
#include "gen.hpp"
#include "uavmec/channel.hpp"

using namespace uavmec;

TEST_CASE("distance examples") {
  CHECK(distance({0, 0}, {0, 0}, 100) == doctest::Approx(100.0));
  CHECK(distance({30, 40}, {0, 0}, 100) == doctest::Approx(std::sqrt(12500.0)));
  CHECK(distance({0, 0}, {300, 400}, 100) == doctest::Approx(509.9020).epsilon(1e-7));
}

TEST_CASE("distance is symmetric and never below the altitude") {
  testgen::Gen g(11);
  for (int i = 0; i < 1000; ++i) {
    const Position2D a{g.uniform(0, 500), g.uniform(0, 500)};
    const Position2D b{g.uniform(0, 500), g.uniform(0, 500)};
    const double h = g.uniform(1, 300);
    CHECK(distance(a, b, h) == distance(b, a, h));
    CHECK(distance(a, b, h) >= h);
  }
}

TEST_CASE("large-scale gain examples") {
  ChannelParams p;
  CHECK(large_scale_gain(1.0, p) == doctest::Approx(1e-4));
  CHECK(large_scale_gain(100.0, p) == doctest::Approx(1e-8));
  CHECK(large_scale_gain(509.9020, p) == doctest::Approx(3.8462e-10).epsilon(1e-4));
}

TEST_CASE("large-scale gain strictly decreases with distance") {
  testgen::Gen g(12);
  ChannelParams p;
  for (int i = 0; i < 1000; ++i) {
    p.theta = g.uniform(0.5, 4.0);
    const double d1 = g.uniform(1, 1000);
    const double d2 = d1 + g.uniform(1e-3, 100);
    CHECK(large_scale_gain(d1, p) > large_scale_gain(d2, p));
  }
}

TEST_CASE("channel params validation") {
  ChannelParams p;
  CHECK_NOTHROW(p.validate());
  p.eta0 = 0;
  CHECK_THROWS_AS(p.validate(), std::invalid_argument);
  p = {};
  p.theta = -1;
  CHECK_THROWS_AS(p.validate(), std::invalid_argument);
  p = {};
  p.rice_k = -0.5;
  CHECK_THROWS_AS(p.validate(), std::invalid_argument);
  p = {};
  p.altitude = 0;
  CHECK_THROWS_AS(p.validate(), std::invalid_argument);
}

TEST_CASE("pure line of sight has unit magnitude") {
  Rng rng = make_stream(1, StreamTag::channel);
  const double inf = std::numeric_limits<double>::infinity();
  for (int i = 0; i < 100; ++i) CHECK(std::abs(rician_sample(rng, inf)) == 1.0);
  ChannelParams p;
  p.rice_k = inf;
  CHECK(channel_gain(100.0, p, rng).power_gain == doctest::Approx(1e-8).epsilon(1e-15));
}

TEST_CASE("mean Rician power is one for every K within 3 sigma") {
  constexpr int n = 100000;
  for (double k : {0.0, 0.5, 1.0, 10.0, 100.0}) {
    Rng rng = make_stream(3, StreamTag::channel, static_cast<std::uint64_t>(k * 10));
    double sum = 0, sum2 = 0;
    for (int i = 0; i < n; ++i) {
      const double p = std::norm(rician_sample(rng, k));
      sum += p;
      sum2 += p * p;
    }
    const double mean = sum / n;
    const double sd = std::sqrt(sum2 / n - mean * mean);
    CAPTURE(k);
    CHECK(std::abs(mean - 1.0) <= 3.0 * sd / std::sqrt(double(n)));
  }
}

TEST_CASE("mean channel power at 100 m") {
  ChannelParams p;
  Rng rng = make_stream(4, StreamTag::channel);
  double sum = 0;
  for (int i = 0; i < 100000; ++i) sum += channel_gain(100.0, p, rng).power_gain;
  const double mean = sum / 100000;
  CHECK(mean >= 0.99e-8);
  CHECK(mean <= 1.01e-8);
}

TEST_CASE("power gain matches the complex gain") {
  testgen::Gen g(13);
  Rng rng = make_stream(5, StreamTag::channel);
  ChannelParams p;
  for (int i = 0; i < 1000; ++i) {
    p.rice_k = g.uniform(0, 50);
    const auto r = channel_gain(g.uniform(100, 800), p, rng);
    CHECK(testgen::rel_diff(r.power_gain, std::norm(r.gain)) <= 1e-12);
  }
}

TEST_CASE("reseeding reproduces realizations") {
  ChannelParams p;
  Rng a = make_stream(9, StreamTag::channel);
  Rng b = make_stream(9, StreamTag::channel);
  for (int i = 0; i < 100; ++i) {
    const auto x = channel_gain(150.0, p, a);
    const auto y = channel_gain(150.0, p, b);
    CHECK(x.gain == y.gain);
  }
}
