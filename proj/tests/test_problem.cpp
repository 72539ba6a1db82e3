#include <doctest.h>

#include <cmath>
#include <cstdint>
#include <vector>

#include "caplab/problem.hpp"
#include "caplab/seeding.hpp"

using namespace caplab;
using doctest::Approx;

namespace {

const InstanceSpace kSpace22{2, 2};

Dataset ds(const InstanceSpace& space, std::vector<Example> ex) {
  return Dataset(space, std::move(ex));
}

}  // namespace

TEST_SUITE("problem") {

TEST_CASE("instance indexing is a lexicographic bijection") {
  const InstanceSpace s{3, 4};
  int expected = 0;
  for (int x = 0; x < 3; ++x)
    for (int y = 0; y < 4; ++y) {
      const int z = s.instance_index(x, y);
      CHECK(z == expected++);
      CHECK(s.feature_of(z) == x);
      CHECK(s.label_of(z) == y);
    }
  CHECK(s.n_instances() == 12);
  CHECK_THROWS_AS((InstanceSpace{0, 2}.validate()), ValidationError);
}

TEST_CASE("dataset validates examples") {
  CHECK_NOTHROW(ds(kSpace22, {{0, 1}, {1, 0}}));
  CHECK_THROWS_AS(ds(kSpace22, {{2, 0}}), ValidationError);
  CHECK_THROWS_AS(ds(kSpace22, {{0, 2}}), ValidationError);
  CHECK_THROWS_AS(ds(kSpace22, {{-1, 0}}), ValidationError);
  CHECK_THROWS_AS(ds(kSpace22, {}), ValidationError);
  const Dataset d = ds(kSpace22, {{0, 1}, {1, 0}});
  CHECK(d.instance_indices() == std::vector<int>{1, 2});
}

TEST_CASE("hypothesis from labels and hard labels") {
  const Hypothesis h = Hypothesis::from_labels(kSpace22, {1, 0});
  CHECK(h.deterministic());
  CHECK(h.hard_label(0) == 1);
  CHECK(h.hard_label(1) == 0);
  const Hypothesis u = Hypothesis::uniform(kSpace22);
  CHECK_FALSE(u.deterministic());
  CHECK_THROWS_AS(u.hard_label(0), DomainError);
}

TEST_CASE("all_lookup_tables order: feature 0 is the most significant digit") {
  const HypothesisSpace g = HypothesisSpace::all_lookup_tables(kSpace22);
  REQUIRE(g.size() == 4);
  CHECK(g.at(0).hard_label(0) == 0);
  CHECK(g.at(0).hard_label(1) == 0);
  CHECK(g.at(1).hard_label(0) == 0);
  CHECK(g.at(1).hard_label(1) == 1);
  CHECK(g.at(2).hard_label(0) == 1);
  CHECK(g.at(2).hard_label(1) == 0);
  CHECK(g.at(3).hard_label(0) == 1);
  CHECK(g.at(3).hard_label(1) == 1);

  const HypothesisSpace g32 = HypothesisSpace::all_lookup_tables({3, 2});
  CHECK(g32.size() == 8);
  const HypothesisSpace g23 = HypothesisSpace::all_lookup_tables({2, 3});
  CHECK(g23.size() == 9);
}

TEST_CASE("lookup_tables_with_mixed covers memorizer outputs") {
  const HypothesisSpace g = HypothesisSpace::lookup_tables_with_mixed(kSpace22);
  CHECK(g.size() == 9);  // (|Y|+1)^|X|
  // The deterministic tables come first, in all_lookup_tables order.
  const HypothesisSpace det = HypothesisSpace::all_lookup_tables(kSpace22);
  for (std::size_t i = 0; i < det.size(); ++i)
    CHECK(approx_equal(g.at(i), det.at(i), 1e-12));
  // The fully-uniform hypothesis and half-trained patterns are present.
  CHECK(g.find(Hypothesis::uniform(kSpace22)).has_value());
  const Hypothesis half(
      {SimplexVector::point_mass(2, 1), SimplexVector::uniform(2)});
  CHECK(g.find(half).has_value());
  // find() returns no index for a hypothesis outside the space.
  const Hypothesis skew(
      {SimplexVector(std::vector<double>{0.9, 0.1}), SimplexVector::uniform(2)});
  CHECK_FALSE(g.find(skew).has_value());
}

TEST_CASE("zero-one loss and stochastic instance loss") {
  const LossFunction loss = LossFunction::zero_one();
  CHECK(loss.point_loss(1, 0, 1) == 0.0);
  CHECK(loss.point_loss(0, 0, 1) == 1.0);
  CHECK(loss.bounded_above().has_value());
  CHECK(*loss.bounded_above() == 1.0);
  // Uniform prediction over two labels loses half the time in expectation.
  const Hypothesis u = Hypothesis::uniform(kSpace22);
  CHECK(loss.instance_loss(u, 0, 1) == Approx(0.5).epsilon(1e-12));
}

TEST_CASE("iid uniform distribution: probabilities, marginal, support") {
  const DatasetDistribution dist = DatasetDistribution::iid_uniform(kSpace22, 2);
  CHECK(dist.length() == 2);
  CHECK(dist.support_size().has_value());
  CHECK(*dist.support_size() == 16);
  const Dataset d = ds(kSpace22, {{0, 1}, {1, 0}});
  CHECK(dist.dataset_probability(d) == Approx(1.0 / 16).epsilon(1e-12));
  const SimplexVector marg = dist.instance_marginal();
  for (std::size_t z = 0; z < 4; ++z) CHECK(marg[z] == Approx(0.25).epsilon(1e-15));

  const auto support = dist.enumerate_support();
  REQUIRE(support.datasets.size() == 16);
  double total = 0.0;
  for (std::size_t i = 0; i < 16; ++i) total += support.probs[i];
  CHECK(total == Approx(1.0).epsilon(1e-12));
  // Lexicographic: first dataset is (z0, z0), second (z0, z1).
  CHECK(support.datasets[0].instance_indices() == std::vector<int>{0, 0});
  CHECK(support.datasets[1].instance_indices() == std::vector<int>{0, 1});
  CHECK(support.datasets[15].instance_indices() == std::vector<int>{3, 3});
}

TEST_CASE("iid with a skewed base") {
  const SimplexVector base(std::vector<double>{0.5, 0.25, 0.125, 0.125});
  const DatasetDistribution dist = DatasetDistribution::iid(kSpace22, 2, base);
  const Dataset d = ds(kSpace22, {{0, 0}, {0, 1}});  // z = 0 then 1
  CHECK(dist.dataset_probability(d) == Approx(0.5 * 0.25).epsilon(1e-12));
  CHECK(dist.instance_marginal()[0] == Approx(0.5).epsilon(1e-15));
}

TEST_CASE("explicit and empirical supports") {
  const Dataset d0 = ds(kSpace22, {{0, 0}});
  const Dataset d1 = ds(kSpace22, {{1, 1}});
  const DatasetDistribution ex = DatasetDistribution::explicit_support(
      {d0, d1}, SimplexVector(std::vector<double>{0.75, 0.25}));
  CHECK(ex.length() == 1);
  CHECK(ex.dataset_probability(d0) == Approx(0.75).epsilon(1e-12));
  CHECK(ex.dataset_probability(ds(kSpace22, {{0, 1}})) == 0.0);
  // Position-averaged instance marginal.
  CHECK(ex.instance_marginal()[0] == Approx(0.75).epsilon(1e-12));
  CHECK(ex.instance_marginal()[3] == Approx(0.25).epsilon(1e-12));

  const DatasetDistribution em = DatasetDistribution::empirical({d0, d1});
  CHECK(em.dataset_probability(d0) == Approx(0.5).epsilon(1e-12));

  // Mixed lengths are rejected.
  CHECK_THROWS_AS(
      DatasetDistribution::empirical({d0, ds(kSpace22, {{0, 0}, {1, 1}})}),
      ValidationError);
}

TEST_CASE("enumerate_datasets caps cleanly") {
  const std::vector<Dataset> all = enumerate_datasets(kSpace22, 2);
  CHECK(all.size() == 16);
  CHECK_THROWS_AS(enumerate_datasets(kSpace22, 12, 1000), CapacityLimitError);
  const InstanceSpace big{64, 64};  // 4096^4 overflows any practical cap
  CHECK_THROWS_AS(enumerate_datasets(big, 4, kDefaultEnumerationCap),
                  CapacityLimitError);
}

TEST_CASE("empirical and population risk oracles") {
  const LossFunction loss = LossFunction::zero_one();
  const Hypothesis h = Hypothesis::from_labels(kSpace22, {1, 0});
  const Dataset d = ds(kSpace22, {{0, 1}, {1, 0}, {1, 1}});
  CHECK(empirical_risk(h, d, loss) == Approx(1.0 / 3).epsilon(1e-12));

  // Uniform instance marginal: h is right on 2 of the 4 instances.
  const DatasetDistribution dist = DatasetDistribution::iid_uniform(kSpace22, 3);
  CHECK(population_risk(h, dist, loss) == Approx(0.5).epsilon(1e-12));
  CHECK(population_risk(h, dist.instance_marginal(), loss) ==
        Approx(0.5).epsilon(1e-12));
}

TEST_CASE("sample_dataset is deterministic and follows the distribution") {
  const DatasetDistribution dist = DatasetDistribution::iid_uniform(kSpace22, 1);
  const std::uint64_t seed = derive_seed(7, "unit", 0);
  CHECK(sample_dataset(dist, seed) == sample_dataset(dist, seed));

  std::vector<int> counts(4, 0);
  constexpr int kDraws = 8000;
  for (int k = 0; k < kDraws; ++k) {
    const Dataset d = sample_dataset(dist, derive_seed(7, "unit_freq", k));
    counts[static_cast<std::size_t>(d.instance_indices()[0])]++;
  }
  for (int c : counts) {
    const double mean = kDraws * 0.25;
    const double sigma = std::sqrt(kDraws * 0.25 * 0.75);
    CHECK(std::abs(c - mean) < 4 * sigma);
  }

  // Explicit supports sample by their probabilities.
  const Dataset d0 = ds(kSpace22, {{0, 0}});
  const Dataset d1 = ds(kSpace22, {{1, 1}});
  const DatasetDistribution ex = DatasetDistribution::explicit_support(
      {d0, d1}, SimplexVector(std::vector<double>{0.9, 0.1}));
  int hits = 0;
  for (int k = 0; k < 2000; ++k)
    hits += sample_dataset(ex, derive_seed(9, "unit_ex", k)) == d0 ? 1 : 0;
  CHECK(hits > 1700);
  CHECK(hits < 1960);
}

}  // TEST_SUITE
