#include "caplab/ldm.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <map>

#include "caplab/parallel.hpp"
#include "caplab/seeding.hpp"

namespace caplab {
namespace {

// Distinct-row view of an LDM prefix: learners emit bit-identical rows for
// identical outputs, so grouping by exact bytes collapses K rows to at most
// a handful of classes and makes the bootstrap O(K) per resample regardless
// of |G|.
struct RowClasses {
  std::vector<const SimplexVector*> rows;  // class representatives
  std::vector<std::size_t> counts;
  std::vector<double> entropies;
  std::size_t total = 0;
};

RowClasses group_rows(const std::vector<SimplexVector>& rows, std::size_t k) {
  RowClasses rc;
  rc.total = k;
  std::map<std::vector<double>, std::size_t> seen;  // bytes -> class id
  for (std::size_t i = 0; i < k; ++i) {
    const auto [it, inserted] = seen.emplace(rows[i].probs(), rc.rows.size());
    if (inserted) {
      rc.rows.push_back(&rows[i]);
      rc.counts.push_back(0);
      rc.entropies.push_back(entropy(rows[i]));
    }
    rc.counts[it->second] += 1;
  }
  return rc;
}

LdmEstimate estimate_from_counts(const RowClasses& rc,
                                 const std::vector<std::size_t>& counts) {
  const std::size_t dim = rc.rows.front()->dim();

  // One distinct row carries exactly zero information; skip the float
  // round-trip so the estimate (and its bootstrap) is 0 to the last bit.
  std::size_t active = 0, last = 0;
  for (std::size_t c = 0; c < rc.rows.size(); ++c)
    if (counts[c] > 0) {
      ++active;
      last = c;
    }
  if (active == 1) {
    LdmEstimate e;
    e.h_mean_row = rc.entropies[last];
    e.mean_h_rows = rc.entropies[last];
    e.capacity_hat = 0.0;
    return e;
  }

  std::vector<double> mean(dim, 0.0);
  double mean_h = 0.0;
  for (std::size_t c = 0; c < rc.rows.size(); ++c) {
    if (counts[c] == 0) continue;
    const double w = static_cast<double>(counts[c]) / static_cast<double>(rc.total);
    const SimplexVector& row = *rc.rows[c];
    for (std::size_t g = 0; g < dim; ++g) mean[g] += w * row[g];
    mean_h += w * rc.entropies[c];
  }
  LdmEstimate e;
  e.h_mean_row = entropy(SimplexVector(std::move(mean)));
  e.mean_h_rows = mean_h;
  const double diff = e.h_mean_row - e.mean_h_rows;
  e.clipped = diff < 0.0;
  e.capacity_hat = e.clipped ? 0.0 : diff;
  return e;
}

double quantile_sorted(const std::vector<double>& sorted, double q) {
  if (sorted.empty()) return 0.0;
  const double pos = q * static_cast<double>(sorted.size() - 1);
  const std::size_t lo = static_cast<std::size_t>(pos);
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return sorted[lo] * (1.0 - frac) + sorted[hi] * frac;
}

}  // namespace

Ldm build_ldm(const LearnerProfile& learner, const DatasetDistribution& dist,
              std::size_t k_rows, std::uint64_t master_seed, Mode mode,
              unsigned threads) {
  if (k_rows == 0) throw ValidationError("build_ldm: K must be >= 1");
  Ldm ldm;
  ldm.mode = mode;
  ldm.seeds.resize(k_rows);
  for (std::size_t k = 0; k < k_rows; ++k)
    ldm.seeds[k] = derive_seed(master_seed, "ldm", k);
  ldm.rows.assign(k_rows, SimplexVector(std::vector<double>{1.0}));
  parallel_for(k_rows, threads, [&](std::size_t k) {
    const Dataset d = sample_dataset(dist, ldm.seeds[k]);
    ldm.rows[k] = learner.row_for(d, mode);
  });
  for (const auto& r : ldm.rows)
    if (r.dim() != ldm.rows.front().dim())
      throw ValidationError("build_ldm: ragged rows");
  return ldm;
}

LdmEstimate estimate_capacity(const Ldm& ldm) {
  if (ldm.rows.empty()) throw ValidationError("estimate_capacity: empty LDM");
  const RowClasses rc = group_rows(ldm.rows, ldm.rows.size());
  return estimate_from_counts(rc, rc.counts);
}

namespace {

BootstrapCi bootstrap_from_classes_impl(const RowClasses& rc,
                                        std::size_t n_resamples,
                                        std::uint64_t seed, double level,
                                        double theta_hat, double log_g) {
  if (!(level > 0.0 && level < 1.0))
    throw ValidationError("bootstrap_ci: level must be in (0, 1)");
  if (n_resamples == 0)
    throw ValidationError("bootstrap_ci: need at least one resample");

  const std::size_t n_classes = rc.rows.size();
  std::vector<double> cum(n_classes);
  double acc = 0.0;
  for (std::size_t c = 0; c < n_classes; ++c) {
    acc += static_cast<double>(rc.counts[c]) / static_cast<double>(rc.total);
    cum[c] = acc;
  }

  Rng rng(seed);
  std::vector<double> stats(n_resamples);
  std::vector<std::size_t> counts(n_classes);
  for (std::size_t b = 0; b < n_resamples; ++b) {
    std::fill(counts.begin(), counts.end(), 0);
    for (std::size_t i = 0; i < rc.total; ++i) {
      const double u = rng.next_double();
      const std::size_t c = static_cast<std::size_t>(
          std::lower_bound(cum.begin(), cum.end(), u) - cum.begin());
      counts[std::min(c, n_classes - 1)] += 1;
    }
    stats[b] = estimate_from_counts(rc, counts).capacity_hat;
  }
  std::sort(stats.begin(), stats.end());
  const double alpha = 1.0 - level;
  const double q_lo = quantile_sorted(stats, alpha / 2.0);
  const double q_hi = quantile_sorted(stats, 1.0 - alpha / 2.0);
  BootstrapCi ci;
  ci.low = std::clamp(2.0 * theta_hat - q_hi, 0.0, log_g);
  ci.high = std::clamp(2.0 * theta_hat - q_lo, 0.0, log_g);
  if (ci.low > ci.high) std::swap(ci.low, ci.high);
  return ci;
}

}  // namespace

BootstrapCi bootstrap_ci(const Ldm& ldm, std::size_t n_resamples,
                         std::uint64_t seed, double level) {
  if (ldm.rows.empty()) throw ValidationError("bootstrap_ci: empty LDM");
  const RowClasses rc = group_rows(ldm.rows, ldm.rows.size());
  const double theta_hat = estimate_from_counts(rc, rc.counts).capacity_hat;
  const double log_g = std::log2(static_cast<double>(ldm.rows.front().dim()));
  return bootstrap_from_classes_impl(rc, n_resamples, seed, level, theta_hat,
                                     log_g);
}

std::vector<TracePoint> convergence_trace(const LearnerProfile& learner,
                                          const DatasetDistribution& dist,
                                          const std::vector<std::size_t>& schedule,
                                          std::uint64_t master_seed,
                                          std::size_t n_resamples, Mode mode,
                                          unsigned threads) {
  if (schedule.empty())
    throw ValidationError("convergence_trace: empty schedule");
  for (std::size_t i = 0; i + 1 < schedule.size(); ++i)
    if (schedule[i] >= schedule[i + 1])
      throw ValidationError("convergence_trace: schedule must be increasing");
  if (schedule.front() == 0)
    throw ValidationError("convergence_trace: schedule entries must be >= 1");

  const Ldm ldm = build_ldm(learner, dist, schedule.back(), master_seed, mode,
                            threads);
  const double log_g = std::log2(static_cast<double>(ldm.rows.front().dim()));

  std::vector<TracePoint> trace;
  trace.reserve(schedule.size());
  for (std::size_t si = 0; si < schedule.size(); ++si) {
    const std::size_t k = schedule[si];
    const RowClasses rc = group_rows(ldm.rows, k);
    const double theta_hat = estimate_from_counts(rc, rc.counts).capacity_hat;
    const BootstrapCi ci = bootstrap_from_classes_impl(
        rc, n_resamples, derive_seed(master_seed, "ldm_bootstrap", si),
        0.95, theta_hat, log_g);
    trace.push_back({k, theta_hat, ci.low, ci.high});
  }
  return trace;
}

}  // namespace caplab
