#include <doctest.h>

#include <random>

#include "fibervm/batch.hpp"
#include "helpers.hpp"
#include "oracles.hpp"

using namespace th;

TEST_CASE("parallel batches give the serial results in order") {
  std::mt19937_64 rng(21);
  std::vector<BatchJob> jobs;
  for (int i = 0; i < 120; ++i) {
    RunOptions o;
    o.runtime.mode = i % 2 ? runtime::Mode::MultiShot : runtime::Mode::OneShot;
    o.opt_exn = i % 3 != 0;
    jobs.push_back({program_from_text(oracle::random_program(rng)).entry, o});
  }
  const auto serial = run_batch_serial(jobs);
  const auto parallel = run_batch_parallel(jobs);
  REQUIRE(serial.size() == jobs.size());
  REQUIRE(parallel.size() == jobs.size());
  for (std::size_t i = 0; i < jobs.size(); ++i) {
    CHECK(serial[i].observably_equal(parallel[i]));
    CHECK(serial[i].metrics.steps_total == parallel[i].metrics.steps_total);
  }
}

TEST_CASE("an empty batch") {
  CHECK(run_batch_serial({}).empty());
  CHECK(run_batch_parallel({}).empty());
}
