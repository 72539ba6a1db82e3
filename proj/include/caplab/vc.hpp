#pragma once
// Classifier classes, restriction index, growth function, VC dimension, and
// the growth-function capacity bound for pattern-determined learners.
//
// The bound asserted here is the literally-provable one: when a learner's
// output row is a function of how the classifier class restricts to (and
// agrees with) the dataset, the channel has at most m^S(n) distinct rows, so
// I(G; D) <= log2 m^S(n). The report carries log2(VC dimension) separately
// as an unverified headline quantity.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "caplab/capacity.hpp"
#include "caplab/common.hpp"
#include "caplab/learners.hpp"
#include "caplab/problem.hpp"

namespace caplab {

/// A finite set of deterministic classifiers over an instance space, stored
/// as label assignment vectors (one label per feature). Duplicate functions
/// are removed keeping the first occurrence, so indices stay aligned with
/// tie-break order.
class ClassifierClass {
 public:
  ClassifierClass(InstanceSpace space, std::vector<std::vector<int>> assignments);

  /// From deterministic hypotheses (ValidationError when any row is not a
  /// point mass).
  static ClassifierClass from_hypotheses(const HypothesisSpace& gspace,
                                         double tol = kSimplexTol);

  /// Binary threshold functions on the ordered feature line: c_k(x) = 1 iff
  /// x >= k for k = 0..|X| (all-ones down to all-zeros; |X|+1 classifiers).
  static ClassifierClass thresholds_on_line(const InstanceSpace& space);

  /// All |Y|^|X| lookup tables as classifiers.
  static ClassifierClass full_tables(const InstanceSpace& space);

  const InstanceSpace& space() const { return space_; }
  std::size_t size() const { return assignments_.size(); }
  const std::vector<int>& at(std::size_t i) const { return assignments_[i]; }
  bool binary() const { return space_.n_labels == 2; }

  /// Point-mass hypothesis space over the same instance space (same order).
  HypothesisSpace to_hypothesis_space() const;

 private:
  InstanceSpace space_;
  std::vector<std::vector<int>> assignments_;
};

/// Number of distinct label tuples the class induces on a feature sample
/// (repeats allowed in the sample).
std::size_t restriction_index(const ClassifierClass& cls,
                              const std::vector<int>& feature_sample);

/// Growth function m^S(r): max restriction index over all feature multisets
/// of size r. CapacityLimitError when the multiset count exceeds `cap`.
std::size_t growth_function(const ClassifierClass& cls, std::size_t r,
                            std::size_t cap = kDefaultEnumerationCap);

/// Largest r <= |X| with m^S(r) = 2^r; 0 when no single point is shattered.
/// Binary classes only (ValidationError otherwise).
std::size_t vc_dimension(const ClassifierClass& cls,
                         std::size_t cap = kDefaultEnumerationCap);

enum class VcCheckMode { FixedDist, Sup };

struct VcBoundReport {
  double capacity_bits = 0.0;
  double bound_bits = 0.0;        // log2 m^S(n)
  std::size_t growth_value = 0;   // m^S(n)
  std::size_t distinct_rows = 0;  // distinct channel rows over the support
  bool applicable = false;        // pattern-determined preconditions held
  bool holds = false;             // capacity <= bound + kBoundTol (when applicable)
  std::string note;               // explanation when not applicable
  std::size_t vc_dim = 0;
  double log2_vc_dim = 0.0;       // reported, not asserted (-inf when vc_dim = 0)
};

/// Checks capacity <= log2 m^S(n) for `learner` over `dist` (FixedDist uses
/// exact I at dist; Sup runs the alternating maximization over the support
/// rows). Applicability requires (a) identical agreement patterns lead to
/// identical output rows, and (b) the number of distinct rows is at most
/// m^S(n). Violations are reported as not-applicable, never as failures.
VcBoundReport vc_capacity_bound_check(const LearnerProfile& learner,
                                      const ClassifierClass& cls,
                                      const DatasetDistribution& dist,
                                      VcCheckMode mode = VcCheckMode::FixedDist,
                                      std::size_t cap = kDefaultEnumerationCap,
                                      unsigned threads = 1);

}  // namespace caplab
