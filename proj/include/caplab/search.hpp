#pragma once
// Search-framework view of learning: binary target sets over the hypothesis
// space, inductive orientation vectors, entropic expressivity, bias relative
// to uniform sampling, and the expressivity/bias trade-off check.

#include <cstdint>
#include <optional>
#include <vector>

#include "caplab/capacity.hpp"
#include "caplab/common.hpp"
#include "caplab/learners.hpp"
#include "caplab/simplex.hpp"

namespace caplab {

/// A binary membership vector over the hypothesis space. Degenerate targets
/// (empty or full) are allowed but flagged so bound reports can mark the
/// corresponding inequalities as vacuous.
struct TargetVector {
  std::vector<std::uint8_t> bits;
  std::optional<double> epsilon;  // set when derived from a risk threshold

  std::size_t dim() const { return bits.size(); }
  std::size_t ones() const;
  bool degenerate() const;  // all zeros or all ones
};

/// t_g = 1 iff population_risk(g) < epsilon (strict). epsilon must be > 0.
TargetVector target_from_risk(const HypothesisSpace& gspace,
                              const SimplexVector& instance_marginal,
                              const LossFunction& loss, double epsilon);

/// Where an orientation vector came from: exact enumeration or the sampled
/// estimator.
enum class Provenance { Exact, LdmEstimate };

struct Orientation {
  SimplexVector vec{std::vector<double>{1.0}};
  Mode mode = Mode::Averaged;
  Provenance provenance = Provenance::Exact;
  std::size_t sample_size = 0;  // K when provenance == LdmEstimate
};

/// Per-dataset orientation: the learner's iteration outputs on `d` collapsed
/// under `mode` (AVERAGED = mean over iterations, FINAL = last iteration).
Orientation orientation_given_f(const LearnerProfile& learner, const Dataset& d,
                                Mode mode);

/// Support-weighted average orientation over the enumerated support of `dist`.
Orientation orientation(const LearnerProfile& learner,
                        const DatasetDistribution& dist, Mode mode,
                        std::size_t cap = kDefaultEnumerationCap,
                        unsigned threads = 1);

/// Mixture of the channel's rows under its input distribution.
Orientation orientation_of_channel(const Channel& ch);

/// Expected per-dataset orientation entropy sum_d p(d) H(row_d), in bits.
double expected_row_entropy(const Channel& ch);

/// H(orientation), in bits. Equals log2 |G| - KL(orientation || uniform).
double entropic_expressivity(const Orientation& o);

/// t' (o - u) = t' o - ||t||^2 / |G| where u is uniform.
double bias(const Orientation& o, const TargetVector& t);

/// t' o: probability that a draw from the orientation lands in the target.
double per_query_success(const Orientation& o, const TargetVector& t);

/// Slacks of the two trade-off inequalities (both must be >= 0 up to
/// numerical tolerance for any orientation/target pair):
///   slack_entropy = [log2 |G| - 2 bias^2]   - H(o)
///   slack_bias    = sqrt(KL(o || u) / 2)    - bias
struct TradeoffReport {
  double expressivity = 0.0;
  double bias_value = 0.0;
  double slack_entropy = 0.0;
  double slack_bias = 0.0;
  bool holds = false;  // both slacks >= -kBoundTol
  bool target_degenerate = false;
};

TradeoffReport tradeoff_check(const Orientation& o, const TargetVector& t);

}  // namespace caplab
