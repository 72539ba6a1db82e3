#pragma once
// Overfitting / underfitting verdicts and the bound-verification suite.
//
// Decision semantics (all strict comparisons, all bits):
//   observational_overfit  YES iff population_risk > empirical_risk
//   capacity_overfit       YES iff capacity > expected_complexity + slack,
//                          degree = capacity - expected_complexity
//   underfit_at            YES iff iteration capacity < expected_complexity
//   model_overfit          YES  iff transfer > raw encoding bits (certificate);
//                          NO   when transfer <= proxy c_d (NO-UNDER-PROXY);
//                          UNKNOWN in between (the proxy is an upper bound,
//                          not the true dataset complexity).

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "caplab/capacity.hpp"
#include "caplab/common.hpp"
#include "caplab/complexity.hpp"
#include "caplab/learners.hpp"
#include "caplab/search.hpp"

namespace caplab {

enum class Decision { Yes, No, Unknown };

const char* to_string(Decision d);

struct Verdict {
  std::string kind;            // OBSERVATIONAL_OVERFIT, CAPACITY_OVERFIT, ...
  Decision decision = Decision::Unknown;
  double lhs = 0.0;
  double rhs = 0.0;
  std::optional<double> degree;  // CAPACITY_OVERFIT only
  std::string detail;            // e.g. NO-UNDER-PROXY, quantifier variant
};

/// Def-level observational check for a fixed hypothesis and dataset.
Verdict observational_overfit(const Hypothesis& g, const Dataset& d,
                              const DatasetDistribution& dist,
                              const LossFunction& loss);

/// capacity and expected_complexity are precomputed bits. slack >= 0 shifts
/// the YES threshold; the degree is always capacity - expected_complexity.
Verdict capacity_overfit(double capacity_bits, double expected_complexity_bits,
                         double slack = 0.0);

/// Iteration-i capacity against expected dataset complexity. FixedDist uses
/// exact I(G_i; D) at `dist`; Sup maximizes over input distributions on the
/// full |Z|^n support.
enum class UnderfitMode { FixedDist, Sup };

Verdict underfit_at(const LearnerProfile& learner,
                    const DatasetDistribution& dist, std::size_t i,
                    double expected_complexity_bits,
                    UnderfitMode mode = UnderfitMode::FixedDist,
                    std::size_t cap = kDefaultEnumerationCap,
                    unsigned threads = 1);

/// Pointwise-transfer test of one realized (hypothesis, dataset) cell of a
/// channel with an attached dataset support.
Verdict model_overfit(const Channel& ch, std::size_t g, std::size_t d);

/// One verified inequality: holds iff slack = rhs - lhs >= -kBoundTol.
struct BoundReport {
  std::string name;
  double lhs = 0.0;
  double rhs = 0.0;
  double slack = 0.0;
  bool holds = false;
  bool vacuous = false;        // degenerate target or non-matching regime
  std::string inputs_digest;   // hex digest of the inputs for audit trails
  Provenance provenance = Provenance::Exact;
};

/// Bound suite over an exact channel and a target vector:
///   capacity_identity      I(G;D) = H(orientation) - E_D[H(row)]
///   expressivity_tradeoff  H(orientation) <= log2|G| - 2 bias^2
///   capacity_vs_bias       I(G;D) <= log2|G| - 2 bias^2 - E_D[H(row)]
///   regime rows (emitted when the per-query success probability matches):
///     regime_min_bias  t'o = 0    ->  I <= log2(|G| - ||t||^2) - E_D[H(row)]
///     regime_no_bias   t'o = p    ->  I <= log2 |G| - E_D[H(row)]
///     regime_max_bias  t'o = 1    ->  I <= log2 ||t||^2 - E_D[H(row)]
///   kl_radius              I(G;D) <= max_d KL(row_d || output marginal)
std::vector<BoundReport> bound_suite(const Channel& ch, const TargetVector& t);

/// Convenience wrapper: build the channel for (learner, dist, mode) first.
std::vector<BoundReport> bound_suite(const LearnerProfile& learner,
                                     const DatasetDistribution& dist,
                                     const TargetVector& t, Mode mode,
                                     std::size_t cap = kDefaultEnumerationCap,
                                     unsigned threads = 1);

}  // namespace caplab
