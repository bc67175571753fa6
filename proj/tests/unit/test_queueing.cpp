#include <stdexcept>
#include <vector>

#include "doctest.h"
#include "gen.hpp"
#include "uavmec/queueing.hpp"

using namespace uavmec;

TEST_CASE("split examples") {
  const auto s = compute_splits({1000, 0, 0}, 0.6, 0, 0.3, 0, 0);
  CHECK(s.d_uav == doctest::Approx(600));
  CHECK(s.b_local == doctest::Approx(120));

  const auto zero = compute_splits({1000, 500, 200}, 0, 0, 0, 0, 0);
  CHECK(zero == SplitAmounts{});

  const auto all_up = compute_splits({1000, 0, 0}, 1.0, 0, 0.9, 0, 0);
  CHECK(all_up.b_local == 0.0);
  CHECK(all_up.d_uav == 1000.0);
}

TEST_CASE("worked example across the three queues") {
  const QueueTriple q{1000, 500, 200};
  const auto s = compute_splits(q, 0.6, 0.3, 0.3, 0.6, 0.6);
  CHECK(s.d_uav == doctest::Approx(600));
  CHECK(s.b_local == doctest::Approx(120));
  CHECK(s.d_cloud == doctest::Approx(150));
  CHECK(s.b_uav == doctest::Approx(210));
  CHECK(s.b_cloud == doctest::Approx(120));
  const auto next = update_queues(q, s, 50);
  CHECK(next.local == doctest::Approx(330));
  CHECK(next.uav == doctest::Approx(740));
  CHECK(next.cloud == doctest::Approx(230));
}

TEST_CASE("fractions outside [0, 1] are rejected") {
  CHECK_THROWS_AS(compute_splits({1, 1, 1}, 1.1, 0, 0, 0, 0), std::invalid_argument);
  CHECK_THROWS_AS(compute_splits({1, 1, 1}, 0, -0.1, 0, 0, 0), std::invalid_argument);
  CHECK_THROWS_AS(compute_splits({1, 1, 1}, 0, 0, 2, 0, 0), std::invalid_argument);
  CHECK_THROWS_AS(compute_splits({1, 1, 1}, 0, 0, 0, std::nan(""), 0), std::invalid_argument);
  CHECK_THROWS_AS(compute_splits({1, 1, 1}, 0, 0, 0, 0, 1.5), std::invalid_argument);
}

TEST_CASE("update edge cases") {
  CHECK(update_local(0, {}, 0) == 0.0);
  SplitAmounts over;
  over.d_uav = 600;
  over.b_local = 600;
  CHECK(update_local(1000, over, 0) == 0.0);

  CHECK(update_uav(0, {}) == 0.0);
  SplitAmounts drain;
  drain.d_cloud = 300;
  drain.b_uav = 200;
  drain.d_uav = 77;
  CHECK(update_uav(500, drain) == 77.0);

  CHECK(update_cloud(0, {}) == 0.0);
  SplitAmounts full;
  full.b_cloud = 200;
  full.d_cloud = 42;
  CHECK(update_cloud(200, full) == 42.0);
}

TEST_CASE("split amounts never exceed the backlog they come from") {
  testgen::Gen g(41);
  for (int i = 0; i < 5000; ++i) {
    const auto q = g.queues();
    const auto s = compute_splits(q, g.unit(), g.unit(), g.unit(), g.unit(), g.unit());
    CHECK(s.d_uav + s.b_local <= q.local * (1 + 1e-15));
    CHECK(s.d_cloud + s.b_uav <= q.uav * (1 + 1e-15));
    CHECK(s.b_cloud <= q.cloud);
  }
}

TEST_CASE("identical seeds give identical queue trajectories") {
  auto run = [](std::uint64_t seed) {
    Rng arrivals = make_stream(seed, StreamTag::arrival);
    testgen::Gen g(seed);
    std::vector<QueueTriple> path;
    QueueTriple q;
    for (int n = 0; n < 200; ++n) {
      const auto s = compute_splits(q, g.unit(), g.unit(), 0.3, g.unit(), g.unit());
      q = update_queues(q, s, draw_arrival(arrivals, {2.5e5}));
      path.push_back(q);
    }
    return path;
  };
  CHECK(run(5) == run(5));
  CHECK(run(5) != run(6));
}

TEST_CASE("arrivals are uniform on [0, max]") {
  Rng rng = make_stream(1, StreamTag::arrival);
  CHECK(draw_arrival(rng, {0.0}) == 0.0);
  double sum = 0;
  bool in_range = true;
  for (int i = 0; i < 100000; ++i) {
    const double a = draw_arrival(rng, {2.5e5});
    in_range = in_range && a >= 0 && a <= 2.5e5;
    sum += a;
  }
  CHECK(in_range);
  CHECK(sum / 1e5 >= 1.24e5);
  CHECK(sum / 1e5 <= 1.26e5);
}

TEST_CASE("running mean backlog") {
  const std::vector<QueueTriple> constant(7, {100, 100, 100});
  CHECK(running_mean_backlog(constant) == QueueTriple{100, 100, 100});
  const std::vector<QueueTriple> two{{0, 0, 0}, {100, 100, 100}};
  CHECK(running_mean_backlog(two).local == 50.0);
  CHECK_THROWS_AS(running_mean_backlog(std::vector<QueueTriple>{}), std::invalid_argument);

  // i.i.d. uniform[0, 1000] history: mean within 3 sigma of 500
  testgen::Gen g(42);
  std::vector<QueueTriple> iid;
  for (int i = 0; i < 10000; ++i) iid.push_back({g.uniform(0, 1000), g.uniform(0, 1000), g.uniform(0, 1000)});
  const double sigma = 1000 / std::sqrt(12.0) / std::sqrt(10000.0);
  const auto m = running_mean_backlog(iid);
  CHECK(std::abs(m.local - 500) <= 3 * sigma);
  CHECK(std::abs(m.uav - 500) <= 3 * sigma);
  CHECK(std::abs(m.cloud - 500) <= 3 * sigma);
}
