#pragma once
// Learning algorithms modeled as stochastic channels from datasets to
// hypotheses. A learner emits one simplex over the hypothesis space per
// internal iteration; a Channel collapses those iterations (FINAL keeps the
// last one, AVERAGED takes their mean) across an enumerated dataset support.

#include <cstdint>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "caplab/common.hpp"
#include "caplab/problem.hpp"
#include "caplab/simplex.hpp"

namespace caplab {

enum class Mode { Final, Averaged };

const char* to_string(Mode mode);

/// A learning algorithm: name, number of internal iterations and a function
/// producing the per-iteration output distributions over the hypothesis
/// space for a dataset. Deterministic by construction (all stochasticity
/// lives in the emitted simplexes).
struct LearnerProfile {
  std::string name;
  std::size_t iterations = 1;
  std::shared_ptr<const HypothesisSpace> space;
  std::function<std::vector<SimplexVector>(const Dataset&)> per_iteration;

  /// Collapse the iteration outputs for one dataset under `mode`.
  SimplexVector row_for(const Dataset& d, Mode mode) const;
};

/// A finite channel: an enumerated dataset support with probabilities and
/// one conditional simplex over hypotheses per support element.
struct Channel {
  std::vector<Dataset> input_support;  // may be empty for synthetic channels
  SimplexVector input_probs{std::vector<double>{1.0}};
  std::vector<SimplexVector> rows;
  Mode mode = Mode::Final;

  std::size_t n_inputs() const { return rows.size(); }
  std::size_t n_hypotheses() const { return rows.empty() ? 0 : rows.front().dim(); }

  /// Synthetic channel from raw rows (no dataset support attached).
  static Channel from_rows(std::vector<SimplexVector> rows, SimplexVector probs,
                           Mode mode = Mode::Final);

  JointDistribution joint() const {
    return JointDistribution::from_channel(rows, input_probs);
  }
};

/// Channel of `learner` over the enumerated support of `dist`.
Channel build_channel(const LearnerProfile& learner,
                      const DatasetDistribution& dist, Mode mode,
                      std::size_t cap = kDefaultEnumerationCap,
                      unsigned threads = 1);

// ---- learner builders ------------------------------------------------------
//
// All builders return single-iteration learners except iterative_memorizer.
// Tie-breaks are deterministic: finite_erm picks the lowest hypothesis index
// among empirical-risk minimizers, the anti-learner picks the lowest label
// index among per-example loss maximizers, and the memorizers resolve
// repeated features by the last occurrence in the dataset.

/// Point mass on the hypothesis that predicts each trained feature's
/// last-seen label and a uniform row elsewhere. ConstructionError if the
/// space lacks a required hypothesis (checked eagerly for small spaces).
LearnerProfile memorizer(const InstanceSpace& space,
                         std::shared_ptr<const HypothesisSpace> gspace);

/// Point mass on the maximally-wrong counterpart: each trained feature gets
/// the loss-maximizing label point mass, untrained features a uniform row.
/// Requires a bounded loss.
LearnerProfile anti_learner(const InstanceSpace& space,
                            std::shared_ptr<const HypothesisSpace> gspace,
                            const LossFunction& loss);

/// Uniform distribution over the hypothesis space for every dataset.
LearnerProfile uniform_guesser(std::shared_ptr<const HypothesisSpace> gspace);

/// Point mass on the empirical-risk minimizer (lowest index on ties).
LearnerProfile finite_erm(std::shared_ptr<const HypothesisSpace> gspace,
                          const LossFunction& loss);

/// Gibbs posterior P(g | d) proportional to exp(-beta * empirical_risk).
/// beta = 0 is the uniform guesser; beta -> infinity approaches ERM.
LearnerProfile gibbs_erm(std::shared_ptr<const HypothesisSpace> gspace,
                         const LossFunction& loss, double beta);

/// n-iteration learner whose i-th iteration memorizes the first min(i, n)
/// examples of the dataset (uniform rows elsewhere).
LearnerProfile iterative_memorizer(const InstanceSpace& space,
                                   std::shared_ptr<const HypothesisSpace> gspace,
                                   std::size_t n);

}  // namespace caplab
