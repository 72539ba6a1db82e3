#pragma once
// Labeled-distribution-matrix estimation: sample K datasets, record the
// learner's orientation vector for each, and estimate distributional
// capacity as H(column mean) - mean(row entropies). Uncertainty comes from a
// deterministic bootstrap over rows.
//
// The bootstrap interval is the basic (reverse-percentile) interval
// [2 theta_hat - Q(1-a/2), 2 theta_hat - Q(a/2)] over resampled estimates,
// clipped into [0, log2 |G|]. The plug-in estimator is bounded above by
// log2 |G|, so the plain percentile interval can never cover an extreme true
// value; reflecting the quantiles corrects the first-order bias.

#include <cstdint>
#include <vector>

#include "caplab/common.hpp"
#include "caplab/learners.hpp"
#include "caplab/problem.hpp"
#include "caplab/simplex.hpp"

namespace caplab {

/// K orientation rows (one per sampled dataset) plus the seeds that produced
/// them. Rows are simplex vectors over the hypothesis space.
struct Ldm {
  std::vector<SimplexVector> rows;
  std::vector<std::uint64_t> seeds;
  Mode mode = Mode::Averaged;
};

/// Row k is the learner's orientation on sample_dataset(dist, seed_k) with
/// seed_k = derive_seed(master_seed, "ldm", k).
Ldm build_ldm(const LearnerProfile& learner, const DatasetDistribution& dist,
              std::size_t k_rows, std::uint64_t master_seed,
              Mode mode = Mode::Averaged, unsigned threads = 1);

struct LdmEstimate {
  double capacity_hat = 0.0;
  double h_mean_row = 0.0;    // entropy of the column mean
  double mean_h_rows = 0.0;   // mean row entropy
  bool clipped = false;       // true if a tiny negative difference was clipped
};

/// capacity_hat = H(mean of rows) - mean(H(row_k)), clipped at 0.
LdmEstimate estimate_capacity(const Ldm& ldm);

struct BootstrapCi {
  double low = 0.0;
  double high = 0.0;
};

/// Deterministic bootstrap of estimate_capacity over the LDM's rows.
/// `level` is the two-sided confidence level (default 95%).
BootstrapCi bootstrap_ci(const Ldm& ldm, std::size_t n_resamples,
                         std::uint64_t seed, double level = 0.95);

struct TracePoint {
  std::size_t k = 0;
  double capacity_hat = 0.0;
  double ci_low = 0.0;
  double ci_high = 0.0;
};

/// Estimates over nested prefixes of one LDM (rows are built once for the
/// largest K and reused). `schedule` must be strictly increasing.
std::vector<TracePoint> convergence_trace(const LearnerProfile& learner,
                                          const DatasetDistribution& dist,
                                          const std::vector<std::size_t>& schedule,
                                          std::uint64_t master_seed,
                                          std::size_t n_resamples = 1000,
                                          Mode mode = Mode::Averaged,
                                          unsigned threads = 1);

}  // namespace caplab
