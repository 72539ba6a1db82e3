#include <doctest.h>

#include <cmath>
#include <memory>
#include <vector>

#include "caplab/capacity.hpp"
#include "caplab/seeding.hpp"

using namespace caplab;
using doctest::Approx;

namespace {

const InstanceSpace kSpace22{2, 2};

std::shared_ptr<const HypothesisSpace> mixed22() {
  return std::make_shared<HypothesisSpace>(
      HypothesisSpace::lookup_tables_with_mixed(kSpace22));
}

// Uniform distribution over the four datasets {(0,a),(1,b)}: both features
// trained once, labels free. The memorizer maps these to four distinct
// tables, so its exact capacity is 2 bits.
DatasetDistribution anchor_dist() {
  std::vector<Dataset> support;
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 2; ++b)
      support.emplace_back(kSpace22, std::vector<Example>{{0, a}, {1, b}});
  return DatasetDistribution::empirical(std::move(support));
}

std::vector<SimplexVector> bsc_rows(double q) {
  return {SimplexVector(std::vector<double>{1 - q, q}),
          SimplexVector(std::vector<double>{q, 1 - q})};
}

}  // namespace

TEST_SUITE("capacity") {

TEST_CASE("distributional capacity equals mutual information") {
  const Channel ch = Channel::from_rows(
      {SimplexVector(std::vector<double>{0.8, 0.2}),
       SimplexVector(std::vector<double>{0.2, 0.8})},
      SimplexVector::uniform(2));
  CHECK(distributional_capacity(ch) ==
        Approx(mutual_information(ch.joint())).epsilon(1e-15));
}

TEST_CASE("binary symmetric channel: sup capacity is 1 - H2(q)") {
  // Frozen independently: 1 - H2(0.11).
  const CapacityResult res = sup_capacity(bsc_rows(0.11));
  CHECK(res.converged);
  CHECK(res.bracket_high - res.bracket_low <= 1e-9);
  CHECK(res.value == Approx(0.500084041835472).epsilon(1e-8));
  CHECK(res.value >= res.bracket_low - 1e-15);
  CHECK(res.value <= res.bracket_high + 1e-15);
  REQUIRE(res.achieving_input.has_value());
  CHECK((*res.achieving_input)[0] == Approx(0.5).epsilon(1e-4));
}

TEST_CASE("noiseless k-ary channel: sup capacity is log2 k") {
  for (std::size_t k : {2u, 3u, 5u, 8u}) {
    std::vector<SimplexVector> rows;
    for (std::size_t i = 0; i < k; ++i)
      rows.push_back(SimplexVector::point_mass(k, i));
    const CapacityResult res = sup_capacity(rows);
    CHECK(res.converged);
    CHECK(res.value ==
          Approx(std::log2(static_cast<double>(k))).epsilon(1e-9));
  }
}

TEST_CASE("Z-channel sup capacity matches the frozen golden-search value") {
  const CapacityResult res =
      sup_capacity({SimplexVector::point_mass(2, 0),
                    SimplexVector(std::vector<double>{0.5, 0.5})});
  CHECK(res.converged);
  CHECK(res.value == Approx(0.32192809488736224).epsilon(1e-8));
}

TEST_CASE("useless channel has zero sup capacity") {
  const CapacityResult res = sup_capacity(
      {SimplexVector::uniform(3), SimplexVector::uniform(3)});
  CHECK(res.converged);
  CHECK(res.value == Approx(0.0).scale(1.0).epsilon(1e-12));
}

TEST_CASE("sup dominates the fixed-input value on random channels") {
  Rng rng(derive_seed(99, "unit_capacity", 0));
  for (int trial = 0; trial < 25; ++trial) {
    const std::size_t n_in = 2 + rng.next_below(4);
    const std::size_t n_out = 2 + rng.next_below(4);
    std::vector<SimplexVector> rows;
    std::vector<double> probs(n_in);
    for (std::size_t i = 0; i < n_in; ++i) {
      std::vector<double> w(n_out);
      for (double& x : w) x = -std::log(1.0 - rng.next_double());
      double sum = 0.0;
      for (double x : w) sum += x;
      for (double& x : w) x /= sum;
      rows.emplace_back(std::move(w));
      probs[i] = -std::log(1.0 - rng.next_double());
    }
    double psum = 0.0;
    for (double x : probs) psum += x;
    for (double& x : probs) x /= psum;

    const Channel ch = Channel::from_rows(rows, SimplexVector(probs));
    const double fixed = distributional_capacity(ch);
    const CapacityResult sup = sup_capacity(rows);
    CHECK(sup.converged);
    CHECK(sup.bracket_high - sup.bracket_low <= 1e-9);
    CHECK(fixed <= sup.bracket_high + 1e-9);
  }
}

TEST_CASE("memorizer anchor: 2 bits at the anchor distribution") {
  const LearnerProfile learner = memorizer(kSpace22, mixed22());
  const Channel ch = build_channel(learner, anchor_dist(), Mode::Final);
  CHECK(distributional_capacity(ch) == Approx(2.0).epsilon(1e-12));
  // The sup over the 4-element support cannot exceed log2 4 and reaches it.
  const CapacityResult sup = sup_capacity(ch);
  CHECK(sup.value == Approx(2.0).epsilon(1e-9));
}

TEST_CASE("iterative memorizer: time-indexed capacities grow by label bits") {
  const LearnerProfile learner = iterative_memorizer(kSpace22, mixed22(), 2);
  const DatasetDistribution dist = anchor_dist();
  CHECK(time_indexed_capacity(learner, dist, 1) == Approx(1.0).epsilon(1e-12));
  CHECK(time_indexed_capacity(learner, dist, 2) == Approx(2.0).epsilon(1e-12));
  CHECK_THROWS_AS(time_indexed_capacity(learner, dist, 3), ValidationError);
  CHECK_THROWS_AS(time_indexed_capacity(learner, dist, 0), ValidationError);

  // The sup variant searches all length-2 dataset distributions; memorizing
  // one example of a 2x2 space can transfer at most log2 4 = 2 bits, and the
  // first iteration reaches exactly the anchor value 1 bit ... the sup is
  // attained by concentrating on distinct-label datasets: it is >= fixed.
  const CapacityResult sup = time_indexed_sup_capacity(learner, kSpace22, 2, 1);
  CHECK(sup.converged);
  CHECK(sup.value >= 1.0 - 1e-9);
  CHECK(sup.value <= 2.0 + 1e-9);
}

TEST_CASE("iid sup search finds the symmetric optimum") {
  const InstanceSpace s12{1, 2};
  auto g12 = std::make_shared<HypothesisSpace>(
      HypothesisSpace::lookup_tables_with_mixed(s12));
  const LearnerProfile learner = memorizer(s12, g12);
  IidSearchConfig cfg;
  cfg.seed = derive_seed(5, "unit_iid", 0);
  const IidCapacityResult res =
      iid_sup_capacity(learner, s12, 1, Mode::Final, cfg);
  // One feature, two labels, one example: the memorizer is a noiseless
  // binary channel of the label, so the i.i.d. sup is 1 bit at base (.5,.5).
  CHECK(res.value == Approx(1.0).epsilon(1e-6));
  CHECK(res.base[0] == Approx(0.5).epsilon(1e-3));

  // Never exceeds the unconstrained sup over the same support.
  const Channel full =
      build_channel(learner, DatasetDistribution::iid_uniform(s12, 1),
                    Mode::Final);
  const CapacityResult sup = sup_capacity(full);
  CHECK(res.value <= sup.bracket_high + 1e-9);
}

TEST_CASE("pointwise transfer and deterministic surprisal coincide for the memorizer") {
  const LearnerProfile learner = memorizer(kSpace22, mixed22());
  const Channel ch = build_channel(learner, anchor_dist(), Mode::Final);
  // Each memorized table has marginal mass 1/4: transfer = 2 bits everywhere
  // the cell probability is 1.
  for (std::size_t d = 0; d < ch.n_inputs(); ++d) {
    std::size_t g = 0;
    while (ch.rows[d][g] < 0.5) ++g;
    CHECK(pointwise_transfer(ch, g, d) == Approx(2.0).epsilon(1e-12));
    CHECK(deterministic_surprisal(ch, g) == Approx(2.0).epsilon(1e-12));
  }
  // A hypothesis no dataset reaches has an empty preimage (+infinity), and
  // its zero marginal makes the pointwise query ill-posed.
  const auto unreached = mixed22()->find(Hypothesis::uniform(kSpace22));
  REQUIRE(unreached.has_value());
  CHECK(deterministic_surprisal(ch, *unreached) == kInfiniteBits);
  CHECK_THROWS_AS(pointwise_transfer(ch, *unreached, 0), DomainError);

  // A reached hypothesis queried against the wrong dataset: zero cell with a
  // positive marginal reports the -infinity sentinel.
  std::size_t g0 = 0;
  while (ch.rows[0][g0] < 0.5) ++g0;
  CHECK(pointwise_transfer(ch, g0, 1) == kNegativeInfiniteBits);

  // Stochastic channels reject the surprisal query.
  const Channel soft = Channel::from_rows(
      {SimplexVector(std::vector<double>{0.7, 0.3}),
       SimplexVector(std::vector<double>{0.3, 0.7})},
      SimplexVector::uniform(2));
  CHECK_THROWS_AS(deterministic_surprisal(soft, 0), ValidationError);
}

TEST_CASE("iteration_rows validates the iteration index") {
  const LearnerProfile learner = iterative_memorizer(kSpace22, mixed22(), 2);
  const DatasetDistribution dist = anchor_dist();
  CHECK(iteration_rows(learner, dist, 1).size() == 4);
  CHECK_THROWS_AS(iteration_rows(learner, dist, 3), ValidationError);
}

}  // TEST_SUITE
