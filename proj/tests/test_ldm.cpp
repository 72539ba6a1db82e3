#include <doctest.h>

#include <cmath>
#include <memory>
#include <vector>

#include "caplab/capacity.hpp"
#include "caplab/ldm.hpp"
#include "caplab/seeding.hpp"

using namespace caplab;
using doctest::Approx;

namespace {

const InstanceSpace kSpace22{2, 2};

std::shared_ptr<const HypothesisSpace> mixed22() {
  return std::make_shared<HypothesisSpace>(
      HypothesisSpace::lookup_tables_with_mixed(kSpace22));
}

DatasetDistribution anchor_dist() {
  std::vector<Dataset> support;
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 2; ++b)
      support.emplace_back(kSpace22, std::vector<Example>{{0, a}, {1, b}});
  return DatasetDistribution::empirical(std::move(support));
}

}  // namespace

TEST_SUITE("ldm") {

TEST_CASE("rows are seeded deterministically and thread-invariantly") {
  const LearnerProfile learner = memorizer(kSpace22, mixed22());
  const DatasetDistribution dist = anchor_dist();
  const Ldm a = build_ldm(learner, dist, 64, 123, Mode::Final);
  const Ldm b = build_ldm(learner, dist, 64, 123, Mode::Final, 4);
  REQUIRE(a.rows.size() == 64);
  REQUIRE(a.seeds.size() == 64);
  for (std::size_t k = 0; k < 64; ++k) {
    CHECK(a.seeds[k] == derive_seed(123, "ldm", k));
    CHECK(b.seeds[k] == a.seeds[k]);
    for (std::size_t g = 0; g < a.rows[k].dim(); ++g)
      CHECK(a.rows[k][g] == b.rows[k][g]);
  }
  const Ldm c = build_ldm(learner, dist, 64, 124, Mode::Final);
  bool any_diff = false;
  for (std::size_t k = 0; k < 64 && !any_diff; ++k)
    for (std::size_t g = 0; g < a.rows[k].dim(); ++g)
      if (a.rows[k][g] != c.rows[k][g]) {
        any_diff = true;
        break;
      }
  CHECK(any_diff);
}

TEST_CASE("estimator identity on hand-built rows") {
  // Two point-mass rows: H(mean) = 1, mean row entropy = 0 -> 1 bit.
  Ldm ldm;
  ldm.rows = {SimplexVector::point_mass(2, 0), SimplexVector::point_mass(2, 1)};
  ldm.seeds = {0, 1};
  const LdmEstimate est = estimate_capacity(ldm);
  CHECK(est.capacity_hat == Approx(1.0).epsilon(1e-12));
  CHECK(est.h_mean_row == Approx(1.0).epsilon(1e-12));
  CHECK(est.mean_h_rows == Approx(0.0).scale(1.0).epsilon(1e-12));

  // Identical stochastic rows estimate zero (up to clipping).
  Ldm flat;
  flat.rows = {SimplexVector::uniform(4), SimplexVector::uniform(4)};
  flat.seeds = {0, 1};
  CHECK(estimate_capacity(flat).capacity_hat == 0.0);
}

TEST_CASE("uniform guesser: zero estimate with a zero-width interval") {
  const LearnerProfile learner = uniform_guesser(mixed22());
  const Ldm ldm = build_ldm(learner, anchor_dist(), 50, 7, Mode::Final);
  CHECK(estimate_capacity(ldm).capacity_hat == 0.0);
  const BootstrapCi ci = bootstrap_ci(ldm, 200, derive_seed(7, "bs", 0));
  CHECK(ci.low == 0.0);
  CHECK(ci.high == 0.0);
}

TEST_CASE("memorizer anchor: estimate approaches 2 bits with a sane interval") {
  const LearnerProfile learner = memorizer(kSpace22, mixed22());
  const Ldm ldm = build_ldm(learner, anchor_dist(), 4000, 99, Mode::Final);
  const LdmEstimate est = estimate_capacity(ldm);
  // Plug-in bias at K = 4000 is about (|support|-1)/(2K ln 2) ~ 5e-4 bits.
  CHECK(est.capacity_hat == Approx(2.0).epsilon(0.05));
  CHECK(est.capacity_hat <= 2.0 + 1e-12);  // bounded by log2 |support classes|

  const BootstrapCi ci = bootstrap_ci(ldm, 500, derive_seed(99, "bs", 1));
  CHECK(ci.low <= ci.high);
  CHECK(ci.low >= 0.0);
  CHECK(ci.high <= std::log2(9.0) + 1e-12);
  // The reflected interval can cover the boundary value 2.0.
  CHECK(ci.low <= 2.0 + 1e-9);
  CHECK(ci.high >= 2.0 - 0.05);
}

TEST_CASE("bootstrap is deterministic in its seed") {
  const LearnerProfile learner = memorizer(kSpace22, mixed22());
  const Ldm ldm = build_ldm(learner, anchor_dist(), 256, 5, Mode::Final);
  const BootstrapCi a = bootstrap_ci(ldm, 300, 42);
  const BootstrapCi b = bootstrap_ci(ldm, 300, 42);
  CHECK(a.low == b.low);
  CHECK(a.high == b.high);
  const BootstrapCi c = bootstrap_ci(ldm, 300, 43);
  CHECK((a.low != c.low || a.high != c.high));
}

TEST_CASE("convergence trace reuses one row set across the schedule") {
  const LearnerProfile learner = memorizer(kSpace22, mixed22());
  const DatasetDistribution dist = anchor_dist();
  const std::vector<std::size_t> schedule = {16, 64, 256};
  const std::vector<TracePoint> trace =
      convergence_trace(learner, dist, schedule, 31, 200, Mode::Final);
  REQUIRE(trace.size() == 3);
  for (std::size_t i = 0; i < 3; ++i) {
    CHECK(trace[i].k == schedule[i]);
    CHECK(trace[i].ci_low <= trace[i].capacity_hat + 0.25);
    CHECK(trace[i].ci_low <= trace[i].ci_high);
  }

  // The k-th prefix estimate equals an LDM built directly with k rows
  // (same master seed -> same per-row seeds).
  const Ldm direct = build_ldm(learner, dist, 64, 31, Mode::Final);
  CHECK(trace[1].capacity_hat ==
        Approx(estimate_capacity(direct).capacity_hat).epsilon(1e-12));

  CHECK_THROWS_AS(convergence_trace(learner, dist, {16, 16}, 31, 10),
                  ValidationError);
}

TEST_CASE("averaged mode rows are iteration means") {
  const LearnerProfile learner = iterative_memorizer(kSpace22, mixed22(), 2);
  const Ldm ldm = build_ldm(learner, anchor_dist(), 8, 77, Mode::Averaged);
  for (std::size_t k = 0; k < ldm.rows.size(); ++k) {
    const Dataset d = sample_dataset(anchor_dist(), ldm.seeds[k]);
    const SimplexVector want = learner.row_for(d, Mode::Averaged);
    for (std::size_t g = 0; g < want.dim(); ++g)
      CHECK(ldm.rows[k][g] == Approx(want[g]).scale(1.0).epsilon(1e-15));
  }
}

}  // TEST_SUITE
