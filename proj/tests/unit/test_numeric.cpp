#include <doctest.h>

#include <atomic>
#include <stdexcept>
#include <vector>

#include "vbw/numeric.hpp"

using namespace vbw;

TEST_CASE("compensated sums recover cancelled terms") {
  CompensatedSum s;
  s.add(1e16);
  s.add(1.0);
  s.add(-1e16);
  CHECK(s.value() == 1.0);

  CompensatedMatrixSum m(2, 2);
  m.add(Eigen::MatrixXd::Constant(2, 2, 1e16));
  m.add(Eigen::MatrixXd::Constant(2, 2, 1.0));
  m.add(Eigen::MatrixXd::Constant(2, 2, -1e16));
  CHECK(m.value().isApproxToConstant(1.0));
}

TEST_CASE("power in dB with a floor") {
  CHECK(power_db(1e-3) == doctest::Approx(-30.0));
  CHECK(power_db(0.0) == kDbFloor);
  CHECK(power_db(-1.0) == kDbFloor);
  CHECK(power_db(1e-300) == kDbFloor);
}

TEST_CASE("parallel_for covers every index once and propagates failures") {
  setenv("VBW_THREADS", "4", 1);
  CHECK(worker_count() == 4);
  std::vector<std::atomic<int>> hits(1000);
  parallel_for(hits.size(), [&](std::size_t i) { hits[i]++; });
  for (auto& h : hits) CHECK(h.load() == 1);
  CHECK_THROWS_AS(parallel_for(10, [](std::size_t i) {
                    if (i == 7) throw std::runtime_error("boom");
                  }),
                  std::runtime_error);
  unsetenv("VBW_THREADS");
}
