#include <doctest.h>

#include <cmath>
#include <memory>
#include <vector>

#include "caplab/search.hpp"
#include "caplab/seeding.hpp"

using namespace caplab;
using doctest::Approx;

namespace {

const InstanceSpace kSpace22{2, 2};

std::shared_ptr<const HypothesisSpace> tables22() {
  return std::make_shared<HypothesisSpace>(
      HypothesisSpace::all_lookup_tables(kSpace22));
}

std::shared_ptr<const HypothesisSpace> mixed22() {
  return std::make_shared<HypothesisSpace>(
      HypothesisSpace::lookup_tables_with_mixed(kSpace22));
}

TargetVector bits(std::vector<std::uint8_t> b) {
  TargetVector t;
  t.bits = std::move(b);
  return t;
}

Orientation orient(std::vector<double> v) {
  Orientation o;
  o.vec = SimplexVector(std::move(v));
  return o;
}

}  // namespace

TEST_SUITE("search") {

TEST_CASE("target_from_risk keeps strictly-sub-epsilon hypotheses") {
  const LossFunction loss = LossFunction::zero_one();
  // Marginal concentrated on instances (0,1) and (1,0).
  const DatasetDistribution dist = DatasetDistribution::empirical(
      {Dataset(kSpace22, {{0, 1}, {1, 0}})});
  const TargetVector t =
      target_from_risk(*tables22(), dist.instance_marginal(), loss, 0.25);
  // Risks over tables: {0.5, 1.0, 0.0, 0.5}; only table (1,0) beats 0.25.
  CHECK(t.bits == std::vector<std::uint8_t>{0, 0, 1, 0});
  CHECK(t.ones() == 1);
  CHECK_FALSE(t.degenerate());

  // The comparison is strict: epsilon equal to a risk excludes it.
  const TargetVector t2 =
      target_from_risk(*tables22(), dist.instance_marginal(), loss, 0.5);
  CHECK(t2.bits == std::vector<std::uint8_t>{0, 0, 1, 0});
  const TargetVector t3 =
      target_from_risk(*tables22(), dist.instance_marginal(), loss, 0.5001);
  CHECK(t3.ones() == 3);

  CHECK_THROWS_AS(
      target_from_risk(*tables22(), dist.instance_marginal(), loss, 0.0),
      ValidationError);
}

TEST_CASE("degenerate targets are flagged") {
  CHECK(bits({0, 0, 0}).degenerate());
  CHECK(bits({1, 1, 1}).degenerate());
  CHECK_FALSE(bits({1, 0, 1}).degenerate());
}

TEST_CASE("bias and per-query success oracles") {
  const TargetVector t = bits({1, 1, 0, 0});
  // Uniform orientation: zero bias by construction.
  CHECK(bias(orient({0.25, 0.25, 0.25, 0.25}), t) ==
        Approx(0.0).scale(1.0).epsilon(1e-15));
  CHECK(per_query_success(orient({0.25, 0.25, 0.25, 0.25}), t) ==
        Approx(0.5).epsilon(1e-15));

  // Point mass inside the target: success 1, bias 1 - |t|/|G|.
  CHECK(bias(orient({1, 0, 0, 0}), t) == Approx(0.5).epsilon(1e-15));
  // Point mass outside: success 0, bias -|t|/|G|.
  CHECK(bias(orient({0, 0, 0, 1}), t) == Approx(-0.5).epsilon(1e-15));
}

TEST_CASE("entropic expressivity equals log2|G| minus KL to uniform") {
  const Orientation o = orient({0.5, 0.25, 0.125, 0.125});
  const double h = entropic_expressivity(o);
  CHECK(h == Approx(entropy(o.vec)).epsilon(1e-15));
  CHECK(h == Approx(2.0 - kl_divergence(o.vec, SimplexVector::uniform(4)))
                 .epsilon(1e-12));
}

TEST_CASE("trade-off inequalities hold on hand cases") {
  // Point mass on a singleton target: maximal bias, zero entropy.
  const TargetVector t = bits({1, 0, 0, 0});
  const TradeoffReport r = tradeoff_check(orient({1, 0, 0, 0}), t);
  CHECK(r.holds);
  CHECK(r.bias_value == Approx(0.75).epsilon(1e-15));
  CHECK(r.expressivity == Approx(0.0).scale(1.0).epsilon(1e-12));
  CHECK(r.slack_entropy == Approx(2.0 - 2 * 0.75 * 0.75).epsilon(1e-12));
  CHECK_FALSE(r.target_degenerate);

  // Uniform orientation: zero bias, maximal entropy, both slacks ~0.
  const TradeoffReport ru = tradeoff_check(orient({0.25, 0.25, 0.25, 0.25}), t);
  CHECK(ru.holds);
  CHECK(ru.slack_entropy == Approx(0.0).scale(1.0).epsilon(1e-12));
  CHECK(ru.slack_bias == Approx(0.0).scale(1.0).epsilon(1e-12));

  const TradeoffReport rd = tradeoff_check(orient({1, 0, 0, 0}), bits({1, 1, 1, 1}));
  CHECK(rd.target_degenerate);
}

TEST_CASE("trade-off holds on 1000 random orientation/target pairs") {
  Rng rng(derive_seed(17, "unit_tradeoff", 0));
  for (int trial = 0; trial < 1000; ++trial) {
    const std::size_t dim = 2 + rng.next_below(7);
    std::vector<double> w(dim);
    for (double& x : w) x = -std::log(1.0 - rng.next_double());
    double sum = 0.0;
    for (double x : w) sum += x;
    for (double& x : w) x /= sum;
    TargetVector t;
    t.bits.resize(dim);
    for (auto& b : t.bits) b = rng.next_below(2) ? 1 : 0;
    const TradeoffReport r = tradeoff_check(orient(std::move(w)), t);
    REQUIRE(r.holds);
    REQUIRE(r.slack_entropy >= -kBoundTol);
    REQUIRE(r.slack_bias >= -kBoundTol);
  }
}

TEST_CASE("orientation collapses iterations per mode and averages the support") {
  const LearnerProfile learner = iterative_memorizer(kSpace22, mixed22(), 2);
  const Dataset d(kSpace22, {{0, 1}, {1, 0}});

  const Orientation fin = orientation_given_f(learner, d, Mode::Final);
  CHECK(entropy(fin.vec) == Approx(0.0).scale(1.0).epsilon(1e-12));
  const Orientation avg = orientation_given_f(learner, d, Mode::Averaged);
  CHECK(entropy(avg.vec) == Approx(1.0).epsilon(1e-12));  // two half cells

  // Support-averaged orientation of the memorizer over the anchor: uniform
  // over the four memorized tables -> the first four coordinates at 1/4.
  std::vector<Dataset> support;
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 2; ++b)
      support.emplace_back(kSpace22, std::vector<Example>{{0, a}, {1, b}});
  const DatasetDistribution dist = DatasetDistribution::empirical(support);
  const LearnerProfile mem = memorizer(kSpace22, mixed22());
  const Orientation o = orientation(mem, dist, Mode::Final);
  CHECK(o.provenance == Provenance::Exact);
  for (std::size_t g = 0; g < 4; ++g) CHECK(o.vec[g] == Approx(0.25).epsilon(1e-12));
  for (std::size_t g = 4; g < 9; ++g) CHECK(o.vec[g] == 0.0);

  // Same thing through an explicit channel.
  const Channel ch = build_channel(mem, dist, Mode::Final);
  const Orientation oc = orientation_of_channel(ch);
  for (std::size_t g = 0; g < 9; ++g)
    CHECK(oc.vec[g] == Approx(o.vec[g]).scale(1.0).epsilon(1e-12));
  CHECK(expected_row_entropy(ch) == Approx(0.0).scale(1.0).epsilon(1e-12));
}

TEST_CASE("capacity identity: I = H(orientation) - expected row entropy") {
  // Gibbs learner at moderate beta over the full iid support: stochastic
  // rows exercise both terms.
  const LossFunction loss = LossFunction::zero_one();
  const LearnerProfile learner = gibbs_erm(tables22(), loss, 1.5);
  const DatasetDistribution dist = DatasetDistribution::iid_uniform(kSpace22, 2);
  const Channel ch = build_channel(learner, dist, Mode::Final);
  const double lhs = distributional_capacity(ch);
  const double rhs =
      entropic_expressivity(orientation_of_channel(ch)) - expected_row_entropy(ch);
  CHECK(lhs == Approx(rhs).epsilon(1e-10));
}

}  // TEST_SUITE
