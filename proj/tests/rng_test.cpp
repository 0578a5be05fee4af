#include <doctest.h>

#include <vector>

#include "qpos/rng.hpp"

using qpos::RunRng;

TEST_CASE("identical seed and stream reproduce the sequence") {
  RunRng a(42, 7), b(42, 7);
  for (int i = 0; i < 200; ++i) CHECK(a.next_u64() == b.next_u64());
}

TEST_CASE("streams with different indices are distinct") {
  RunRng a(42, 0), b(42, 1);
  int same = 0;
  for (int i = 0; i < 64; ++i)
    if (a.next_u64() == b.next_u64()) ++same;
  CHECK(same == 0);
}

TEST_CASE("uniform stays in [0,1) with the right mean") {
  RunRng rng(1, 0);
  double sum = 0.0;
  const int n = 100000;
  for (int i = 0; i < n; ++i) {
    const double u = rng.uniform();
    REQUIRE(u >= 0.0);
    REQUIRE(u < 1.0);
    sum += u;
  }
  CHECK(std::abs(sum / n - 0.5) < 0.005);
}

TEST_CASE("gaussian moments") {
  RunRng rng(3, 5);
  const int n = 200000;
  double sum = 0.0, sq = 0.0;
  for (int i = 0; i < n; ++i) {
    const double z = rng.gaussian();
    sum += z;
    sq += z * z;
  }
  const double mean = sum / n;
  const double var = sq / n - mean * mean;
  CHECK(std::abs(mean) < 0.01);
  CHECK(std::abs(var - 1.0) < 0.02);
}

TEST_CASE("poisson mean and variance") {
  for (double lambda : {0.3, 5.0, 40.0}) {
    RunRng rng(11, 13);
    const int n = 50000;
    double sum = 0.0, sq = 0.0;
    for (int i = 0; i < n; ++i) {
      const double k = double(rng.poisson(lambda));
      sum += k;
      sq += k * k;
    }
    const double mean = sum / n;
    const double var = sq / n - mean * mean;
    const double se = std::sqrt(lambda / n);
    CHECK(std::abs(mean - lambda) < 5 * se);
    CHECK(std::abs(var - lambda) < 0.05 * lambda + 5 * se);
  }
}

TEST_CASE("below produces only values in range") {
  RunRng rng(9, 2);
  std::vector<int> seen(7, 0);
  for (int i = 0; i < 7000; ++i) ++seen.at(rng.below(7));
  for (int count : seen) CHECK(count > 700);
}
