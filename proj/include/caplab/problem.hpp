#pragma once
// Finite learning problems: instance spaces, datasets, (stochastic)
// hypotheses, hypothesis spaces, loss functions and dataset distributions.
//
// Instances are (feature, label) pairs indexed lexicographically with the
// feature as the major digit: z = x * n_labels + y. Datasets are ordered
// sequences of instances (duplicates allowed, no implicit canonicalization).

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "caplab/common.hpp"
#include "caplab/simplex.hpp"

namespace caplab {

struct InstanceSpace {
  int n_features = 1;
  int n_labels = 1;

  void validate() const {
    if (n_features < 1 || n_labels < 1)
      throw ValidationError("InstanceSpace: sizes must be >= 1");
  }
  int n_instances() const { return n_features * n_labels; }
  int instance_index(int x, int y) const { return x * n_labels + y; }
  int feature_of(int z) const { return z / n_labels; }
  int label_of(int z) const { return z % n_labels; }
  bool operator==(const InstanceSpace&) const = default;
};

struct Example {
  int feature = 0;
  int label = 0;
  bool operator==(const Example&) const = default;
};

/// An ordered sequence of examples over an owning instance space.
class Dataset {
 public:
  Dataset(InstanceSpace space, std::vector<Example> examples);

  const InstanceSpace& space() const { return space_; }
  std::size_t size() const { return examples_.size(); }
  const std::vector<Example>& examples() const { return examples_; }
  const Example& at(std::size_t i) const { return examples_[i]; }
  std::vector<int> instance_indices() const;

  bool operator==(const Dataset&) const = default;

 private:
  InstanceSpace space_;
  std::vector<Example> examples_;
};

/// A stochastic hypothesis: one prediction simplex over labels per feature.
class Hypothesis {
 public:
  explicit Hypothesis(std::vector<SimplexVector> rows);
  static Hypothesis from_labels(const InstanceSpace& space,
                                const std::vector<int>& labels);
  static Hypothesis uniform(const InstanceSpace& space);

  int n_features() const { return static_cast<int>(rows_.size()); }
  int n_labels() const { return static_cast<int>(rows_.front().dim()); }
  const SimplexVector& row(int x) const { return rows_[static_cast<std::size_t>(x)]; }

  bool deterministic(double tol = kSimplexTol) const;
  /// Predicted label of a deterministic row (DomainError otherwise).
  int hard_label(int x, double tol = kSimplexTol) const;

  bool operator==(const Hypothesis&) const = default;

 private:
  std::vector<SimplexVector> rows_;
};

bool approx_equal(const Hypothesis& a, const Hypothesis& b, double tol);

/// An ordered, finite hypothesis space. Order is meaningful: tie-breaks in
/// the learners pick the lowest index.
class HypothesisSpace {
 public:
  HypothesisSpace(InstanceSpace space, std::vector<Hypothesis> hypotheses);

  /// All |Y|^|X| deterministic lookup tables, ordered lexicographically with
  /// feature 0 as the most significant digit.
  static HypothesisSpace all_lookup_tables(const InstanceSpace& space);

  /// The deterministic tables above followed by every hypothesis whose rows
  /// are label point masses or uniform rows with at least one uniform row
  /// (the outputs reachable by the memorizing learners), in lexicographic
  /// order of the per-feature codes (code y = point mass on y, code |Y| =
  /// uniform). Total size (|Y|+1)^|X|.
  static HypothesisSpace lookup_tables_with_mixed(const InstanceSpace& space);

  const InstanceSpace& space() const { return space_; }
  std::size_t size() const { return hyps_.size(); }
  const Hypothesis& at(std::size_t i) const { return hyps_[i]; }
  const std::vector<Hypothesis>& hypotheses() const { return hyps_; }
  std::optional<std::size_t> find(const Hypothesis& h,
                                  double tol = kSimplexTol) const;

 private:
  InstanceSpace space_;
  std::vector<Hypothesis> hyps_;
};

/// Loss of predicting a label for a true instance; extended to stochastic
/// hypotheses by expectation over the prediction row. Values must be
/// non-negative. `bounded_above` declares a finite sup when one exists so
/// "maximally wrong" predictions are well defined.
class LossFunction {
 public:
  using Table = std::function<double(int predicted, int feature, int true_label)>;

  LossFunction(std::string name, Table table, std::optional<double> bounded_above);

  static LossFunction zero_one();

  double point_loss(int predicted, int feature, int true_label) const;
  double instance_loss(const Hypothesis& h, int feature, int true_label) const;

  const std::string& name() const { return name_; }
  const std::optional<double>& bounded_above() const { return bound_; }

 private:
  std::string name_;
  Table table_;
  std::optional<double> bound_;
};

/// Distribution over datasets of a fixed length n. Three kinds:
///   Iid       - n i.i.d. draws from a base simplex over instances;
///   Explicit  - finite support with explicit probabilities;
///   Empirical - finite support, uniform weights.
class DatasetDistribution {
 public:
  enum class Kind { Iid, Explicit, Empirical };

  static DatasetDistribution iid(InstanceSpace space, std::size_t n,
                                 SimplexVector base);
  static DatasetDistribution iid_uniform(InstanceSpace space, std::size_t n);
  static DatasetDistribution explicit_support(std::vector<Dataset> support,
                                              SimplexVector probs);
  static DatasetDistribution empirical(std::vector<Dataset> support);

  Kind kind() const { return kind_; }
  const InstanceSpace& space() const { return space_; }
  std::size_t length() const { return n_; }
  const SimplexVector& iid_base() const;

  /// Number of support elements exact enumeration would produce, or nullopt
  /// if it overflows.
  std::optional<std::size_t> support_size() const;
  bool enumerable(std::size_t cap = kDefaultEnumerationCap) const;

  struct Support {
    std::vector<Dataset> datasets;
    SimplexVector probs;
  };
  /// CapacityLimitError when the support exceeds `cap`.
  Support enumerate_support(std::size_t cap = kDefaultEnumerationCap) const;

  /// Marginal distribution of a single instance position (the i.i.d. base,
  /// or the position-averaged support marginal for explicit kinds).
  SimplexVector instance_marginal() const;

  /// Exact probability of drawing `d` (product for Iid, summed matching mass
  /// for the explicit kinds).
  double dataset_probability(const Dataset& d) const;

  Dataset sample(std::uint64_t seed) const;

 private:
  DatasetDistribution() = default;
  Kind kind_ = Kind::Iid;
  InstanceSpace space_;
  std::size_t n_ = 1;
  std::optional<SimplexVector> base_;      // Iid
  std::vector<Dataset> support_;           // Explicit / Empirical
  std::optional<SimplexVector> probs_;     // Explicit / Empirical
};

/// All |Z|^n datasets in lexicographic order of their instance-index digit
/// strings (position 0 most significant). CapacityLimitError above `cap`.
std::vector<Dataset> enumerate_datasets(const InstanceSpace& space,
                                        std::size_t n,
                                        std::size_t cap = kDefaultEnumerationCap);

double empirical_risk(const Hypothesis& h, const Dataset& d,
                      const LossFunction& loss);
double population_risk(const Hypothesis& h, const SimplexVector& instance_marginal,
                       const LossFunction& loss);
double population_risk(const Hypothesis& h, const DatasetDistribution& dist,
                       const LossFunction& loss);

/// Deterministic sample: same (dist, seed) always yields the same dataset.
Dataset sample_dataset(const DatasetDistribution& dist, std::uint64_t seed);

}  // namespace caplab
