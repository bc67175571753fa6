#include <stdexcept>
#include <limits>

#include "doctest.h"
#include "gen.hpp"
#include "uavmec/computation.hpp"

using namespace uavmec;

TEST_CASE("computation delay examples") {
  CHECK(comp_delay(0, 5e6, 1024) == 0.0);
  CHECK(comp_delay(0, 0, 1024) == 0.0);
  CHECK(comp_delay(5000, 5.12e6, 1024) == doctest::Approx(1.0));
  CHECK(comp_delay(100, 0, 1024) == std::numeric_limits<double>::infinity());
}

TEST_CASE("computation delay is linear in bits and inverse in cpu") {
  testgen::Gen g(31);
  for (int i = 0; i < 500; ++i) {
    const double bits = g.uniform(1, 1e6), cpu = g.uniform(1e5, 1e8), s = g.uniform(0.1, 10);
    CHECK(comp_delay(s * bits, cpu, 1024) == doctest::Approx(s * comp_delay(bits, cpu, 1024)));
    CHECK(comp_delay(bits, s * cpu, 1024) == doctest::Approx(comp_delay(bits, cpu, 1024) / s));
  }
}

TEST_CASE("total task delay examples") {
  CHECK(total_task_delay({}) == 0.0);
  CHECK(total_task_delay({0.3, 0.2, 0.1, 0.25, 0.05, 0}) == doctest::Approx(0.6));
  CHECK(total_task_delay({0.2, 0.9, 0.0, 0.0, 0.0, 0}) == doctest::Approx(0.9));
}

TEST_CASE("total task delay is monotone and dominates each field") {
  testgen::Gen g(32);
  for (int i = 0; i < 1000; ++i) {
    DelayBreakdown b{g.uniform(0, 2), g.uniform(0, 2), g.uniform(0, 2), g.uniform(0, 2),
                     g.uniform(0, 2), 0};
    const double t = total_task_delay(b);
    for (double f : {b.t_local_comp, b.t_uplink_comm, b.t_uav_comp, b.t_cloud_comm, b.t_cloud_comp})
      CHECK(t >= f);
    DelayBreakdown up = b;
    double* fields[] = {&up.t_local_comp, &up.t_uplink_comm, &up.t_uav_comp, &up.t_cloud_comm,
                        &up.t_cloud_comp};
    *fields[g.index(5)] += g.uniform(0, 1);
    CHECK(total_task_delay(up) >= t);
  }
}

TEST_CASE("compute params validation") {
  ComputeParams p;
  CHECK_NOTHROW(p.validate());
  p.cycles_per_bit = 0;
  CHECK_THROWS(p.validate());
  p = {};
  p.uav_cpu_total = -1;
  CHECK_THROWS(p.validate());
}
