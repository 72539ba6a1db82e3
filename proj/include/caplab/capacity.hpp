#pragma once
// Capacity quantities for finite learning channels (all in bits):
//
//   distributional_capacity  - exact mutual information I(G; D) at a fixed
//                              dataset distribution;
//   sup_capacity             - supremum of I(G; D) over *all* input
//                              distributions on the enumerated support,
//                              via alternating maximization with certified
//                              upper/lower bounds;
//   iid_sup_capacity         - best-found supremum restricted to i.i.d.
//                              dataset distributions (lower bound only);
//   time_indexed_capacity    - I(G_i; D) for a learner's i-th iteration;
//   pointwise_transfer       - log2 [ p(g|d) / p(g) ] for one (g, d) cell;
//   deterministic_surprisal  - -log2 P(preimage of g) for deterministic
//                              channels.

#include <cstdint>
#include <optional>
#include <vector>

#include "caplab/common.hpp"
#include "caplab/learners.hpp"
#include "caplab/simplex.hpp"

namespace caplab {

struct CapacityResult {
  double value = 0.0;        // certified lower end of the bracket
  double bracket_low = 0.0;  // value <= capacity <= bracket_high
  double bracket_high = 0.0;
  std::size_t iterations_used = 0;
  bool converged = false;
  Mode mode = Mode::Final;
  std::optional<SimplexVector> achieving_input;
};

/// Exact I(G; D) of the channel at its own input distribution.
double distributional_capacity(const Channel& ch);

/// Supremum of I over all input distributions on the given rows. Alternating
/// maximization: q = output marginal at the current input, per-row relative
/// entropies D_d = KL(row_d || q) give the lower bound sum(p_d D_d) and upper
/// bound max_d D_d; converged when the gap is <= tol.
CapacityResult sup_capacity(const std::vector<SimplexVector>& rows,
                            double tol = 1e-9, std::size_t max_iter = 100000);
CapacityResult sup_capacity(const Channel& ch, double tol = 1e-9,
                            std::size_t max_iter = 100000);

struct IidSearchConfig {
  int n_starts = 8;        // 1 uniform start + (n_starts-1) random simplexes
  int max_passes = 60;     // coordinate-pair sweeps per start
  double tol = 1e-10;      // minimum accepted improvement per sweep
  std::uint64_t seed = 0;  // master seed for the random starts
  std::size_t cap = kDefaultEnumerationCap;
};

struct IidCapacityResult {
  double value = 0.0;  // best found; a certified lower bound on the i.i.d. sup
  SimplexVector base{std::vector<double>{1.0}};  // achieving instance simplex
};

/// Multi-start projected coordinate ascent over the i.i.d. base simplex.
/// Deterministic for a fixed config. Returns the best value found (lower
/// bound on the restricted supremum; no global certificate).
IidCapacityResult iid_sup_capacity(const LearnerProfile& learner,
                                   const InstanceSpace& space, std::size_t n,
                                   Mode mode, const IidSearchConfig& cfg = {});

/// Per-iteration channel rows P_i(. | d) of a learner across the enumerated
/// support of `dist`. `i` is 1-based and must be <= learner.iterations.
std::vector<SimplexVector> iteration_rows(const LearnerProfile& learner,
                                          const DatasetDistribution& dist,
                                          std::size_t i,
                                          std::size_t cap = kDefaultEnumerationCap,
                                          unsigned threads = 1);

/// Exact I(G_i; D) at the fixed dataset distribution.
double time_indexed_capacity(const LearnerProfile& learner,
                             const DatasetDistribution& dist, std::size_t i,
                             std::size_t cap = kDefaultEnumerationCap,
                             unsigned threads = 1);

/// Supremum of I(G_i; D) over all distributions on the full |Z|^n support.
CapacityResult time_indexed_sup_capacity(const LearnerProfile& learner,
                                         const InstanceSpace& space,
                                         std::size_t n, std::size_t i,
                                         double tol = 1e-9,
                                         std::size_t max_iter = 100000,
                                         std::size_t cap = kDefaultEnumerationCap,
                                         unsigned threads = 1);

/// Pointwise information transfer log2[p(g|d)/p(g)] of one channel cell.
/// -infinity when p(g|d) = 0; DomainError on zero marginals.
double pointwise_transfer(const Channel& ch, std::size_t g, std::size_t d);

/// For channels whose rows are all point masses: -log2 of the input mass of
/// {d : p(g|d) = 1}. +infinity when the preimage is empty; ValidationError
/// when the channel is not deterministic.
double deterministic_surprisal(const Channel& ch, std::size_t g);

}  // namespace caplab
