#include "caplab/capacity.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "caplab/parallel.hpp"
#include "caplab/seeding.hpp"

namespace caplab {
namespace {

// Guard against denormal-underflow zeros in log ratios; any row kept at
// positive input probability keeps its output letters at q > 0, so this only
// triggers for inputs whose probability itself underflowed (harmless: such
// rows are far from optimal by then).
constexpr double kQFloor = 1e-300;

double relative_entropy_bits(const SimplexVector& row,
                             const std::vector<double>& q) {
  double d = 0.0;
  for (std::size_t g = 0; g < row.dim(); ++g) {
    const double w = row[g];
    if (w > 0.0) d += w * std::log2(w / std::max(q[g], kQFloor));
  }
  return d;
}

}  // namespace

double distributional_capacity(const Channel& ch) {
  return mutual_information(ch.joint());
}

CapacityResult sup_capacity(const std::vector<SimplexVector>& rows, double tol,
                            std::size_t max_iter) {
  if (rows.empty()) throw ValidationError("sup_capacity: no rows");
  const std::size_t n_in = rows.size();
  const std::size_t n_out = rows.front().dim();
  for (const auto& r : rows)
    if (r.dim() != n_out) throw ValidationError("sup_capacity: ragged rows");
  if (!(tol > 0.0)) throw ValidationError("sup_capacity: tol must be > 0");
  if (max_iter == 0) throw ValidationError("sup_capacity: max_iter must be > 0");

  std::vector<double> p(n_in, 1.0 / static_cast<double>(n_in));
  std::vector<double> q(n_out, 0.0);
  std::vector<double> d_bits(n_in, 0.0);

  CapacityResult res;
  for (std::size_t iter = 1; iter <= max_iter; ++iter) {
    std::fill(q.begin(), q.end(), 0.0);
    for (std::size_t d = 0; d < n_in; ++d) {
      if (p[d] <= 0.0) continue;
      for (std::size_t g = 0; g < n_out; ++g) q[g] += p[d] * rows[d][g];
    }
    double lower = 0.0, upper = 0.0;
    for (std::size_t d = 0; d < n_in; ++d) {
      d_bits[d] = relative_entropy_bits(rows[d], q);
      lower += p[d] * d_bits[d];
      upper = std::max(upper, d_bits[d]);
    }
    res.iterations_used = iter;
    res.bracket_low = std::max(lower, 0.0);
    res.bracket_high = upper;
    if (upper - lower <= tol) {
      res.converged = true;
      break;
    }
    // Multiplicative update p_d <- p_d * 2^{D_d}, renormalized.
    double total = 0.0;
    for (std::size_t d = 0; d < n_in; ++d) {
      p[d] *= std::exp2(d_bits[d]);
      total += p[d];
    }
    if (!(total > 0.0))
      throw ValidationError("sup_capacity: input distribution collapsed");
    for (double& v : p) v /= total;
  }
  res.value = res.bracket_low;
  res.achieving_input = SimplexVector(std::move(p));
  return res;
}

CapacityResult sup_capacity(const Channel& ch, double tol, std::size_t max_iter) {
  CapacityResult res = sup_capacity(ch.rows, tol, max_iter);
  res.mode = ch.mode;
  return res;
}

namespace {

// Exact I(G; D) for the cached rows under i.i.d. weights built from `base`.
double iid_objective(const std::vector<SimplexVector>& rows,
                     const std::vector<std::vector<int>>& digits,
                     const std::vector<double>& base) {
  std::vector<double> probs(rows.size());
  for (std::size_t k = 0; k < rows.size(); ++k) {
    double p = 1.0;
    for (int z : digits[k]) p *= base[static_cast<std::size_t>(z)];
    probs[k] = p;
  }
  // Inline mutual information (weights need not be renormalized: they sum to
  // (sum base)^n = 1 up to rounding, and we divide by the actual total).
  double total = 0.0;
  for (double v : probs) total += v;
  if (!(total > 0.0)) return 0.0;
  const std::size_t n_out = rows.front().dim();
  std::vector<double> q(n_out, 0.0);
  for (std::size_t k = 0; k < rows.size(); ++k) {
    if (probs[k] <= 0.0) continue;
    for (std::size_t g = 0; g < n_out; ++g) q[g] += probs[k] / total * rows[k][g];
  }
  double info = 0.0;
  for (std::size_t k = 0; k < rows.size(); ++k) {
    const double pk = probs[k] / total;
    if (pk <= 0.0) continue;
    for (std::size_t g = 0; g < n_out; ++g) {
      const double w = rows[k][g];
      if (w > 0.0 && q[g] > 0.0) info += pk * w * std::log2(w / q[g]);
    }
  }
  return info < 0.0 ? 0.0 : info;
}

}  // namespace

IidCapacityResult iid_sup_capacity(const LearnerProfile& learner,
                                   const InstanceSpace& space, std::size_t n,
                                   Mode mode, const IidSearchConfig& cfg) {
  space.validate();
  if (cfg.n_starts < 1)
    throw ValidationError("iid_sup_capacity: need at least one start");
  const std::size_t nz = static_cast<std::size_t>(space.n_instances());

  // Cache the channel rows once; only the input weights move during search.
  const std::vector<Dataset> datasets = enumerate_datasets(space, n, cfg.cap);
  std::vector<SimplexVector> rows;
  rows.reserve(datasets.size());
  for (const Dataset& d : datasets) rows.push_back(learner.row_for(d, mode));
  std::vector<std::vector<int>> digits;
  digits.reserve(datasets.size());
  for (const Dataset& d : datasets) digits.push_back(d.instance_indices());

  const auto objective = [&](const std::vector<double>& base) {
    return iid_objective(rows, digits, base);
  };

  std::vector<double> best_base(nz, 1.0 / static_cast<double>(nz));
  double best_value = objective(best_base);

  for (int s = 0; s < cfg.n_starts; ++s) {
    std::vector<double> base(nz, 1.0 / static_cast<double>(nz));
    if (s > 0) {  // random simplex start (normalized exponentials)
      Rng rng(derive_seed(cfg.seed, "iid_sup_start", static_cast<std::uint64_t>(s)));
      double total = 0.0;
      for (double& v : base) {
        v = -std::log(1.0 - rng.next_double());
        total += v;
      }
      for (double& v : base) v /= total;
    }
    double value = objective(base);

    // Coordinate-pair mass transfers with golden-section line search.
    constexpr double kGolden = 0.6180339887498949;
    for (int pass = 0; pass < cfg.max_passes; ++pass) {
      double pass_gain = 0.0;
      for (std::size_t i = 0; i < nz; ++i) {
        for (std::size_t j = i + 1; j < nz; ++j) {
          const double budget = base[i] + base[j];
          if (budget <= 0.0) continue;
          const auto eval = [&](double t) {  // t = share of budget on i
            std::vector<double> trial = base;
            trial[i] = t * budget;
            trial[j] = (1.0 - t) * budget;
            return objective(trial);
          };
          double lo = 0.0, hi = 1.0;
          double m1 = hi - kGolden * (hi - lo), m2 = lo + kGolden * (hi - lo);
          double f1 = eval(m1), f2 = eval(m2);
          for (int it = 0; it < 40; ++it) {
            if (f1 < f2) {
              lo = m1; m1 = m2; f1 = f2;
              m2 = lo + kGolden * (hi - lo); f2 = eval(m2);
            } else {
              hi = m2; m2 = m1; f2 = f1;
              m1 = hi - kGolden * (hi - lo); f1 = eval(m1);
            }
          }
          const double t_best = f1 > f2 ? m1 : m2;
          const double f_best = std::max(f1, f2);
          if (f_best > value + cfg.tol) {
            pass_gain += f_best - value;
            base[i] = t_best * budget;
            base[j] = (1.0 - t_best) * budget;
            value = f_best;
          }
        }
      }
      if (pass_gain <= cfg.tol) break;
    }
    if (value > best_value) {
      best_value = value;
      best_base = base;
    }
  }

  IidCapacityResult out;
  out.value = best_value;
  // Renormalize exactly before handing the base back.
  double total = 0.0;
  for (double v : best_base) total += v;
  for (double& v : best_base) v /= total;
  out.base = SimplexVector(std::move(best_base));
  return out;
}

std::vector<SimplexVector> iteration_rows(const LearnerProfile& learner,
                                          const DatasetDistribution& dist,
                                          std::size_t i, std::size_t cap,
                                          unsigned threads) {
  if (i < 1 || i > learner.iterations)
    throw ValidationError("iteration index out of range: " + std::to_string(i));
  const auto support = dist.enumerate_support(cap);
  std::vector<SimplexVector> rows(support.datasets.size(),
                                  SimplexVector(std::vector<double>{1.0}));
  parallel_for(support.datasets.size(), threads, [&](std::size_t k) {
    std::vector<SimplexVector> outs = learner.per_iteration(support.datasets[k]);
    if (outs.size() != learner.iterations)
      throw ValidationError("iteration_rows: learner emitted wrong count");
    rows[k] = outs[i - 1];
  });
  return rows;
}

double time_indexed_capacity(const LearnerProfile& learner,
                             const DatasetDistribution& dist, std::size_t i,
                             std::size_t cap, unsigned threads) {
  const auto support = dist.enumerate_support(cap);
  std::vector<SimplexVector> rows = iteration_rows(learner, dist, i, cap, threads);
  return mutual_information(JointDistribution::from_channel(rows, support.probs));
}

CapacityResult time_indexed_sup_capacity(const LearnerProfile& learner,
                                         const InstanceSpace& space,
                                         std::size_t n, std::size_t i,
                                         double tol, std::size_t max_iter,
                                         std::size_t cap, unsigned threads) {
  const DatasetDistribution full = DatasetDistribution::iid_uniform(space, n);
  std::vector<SimplexVector> rows = iteration_rows(learner, full, i, cap, threads);
  return sup_capacity(rows, tol, max_iter);
}

double pointwise_transfer(const Channel& ch, std::size_t g, std::size_t d) {
  if (d >= ch.n_inputs() || g >= ch.n_hypotheses())
    throw ValidationError("pointwise_transfer: index out of range");
  return pointwise_mi(ch.joint(), d, g);
}

double deterministic_surprisal(const Channel& ch, std::size_t g) {
  if (g >= ch.n_hypotheses())
    throw ValidationError("deterministic_surprisal: index out of range");
  double preimage_mass = 0.0;
  for (std::size_t d = 0; d < ch.n_inputs(); ++d) {
    const SimplexVector& row = ch.rows[d];
    double mx = 0.0;
    for (std::size_t j = 0; j < row.dim(); ++j) mx = std::max(mx, row[j]);
    if (mx < 1.0 - kSimplexTol)
      throw ValidationError(
          "deterministic_surprisal: channel row " + std::to_string(d) +
          " is not a point mass");
    if (row[g] >= 1.0 - kSimplexTol) preimage_mass += ch.input_probs[d];
  }
  if (preimage_mass <= 0.0) return kInfiniteBits;
  return -std::log2(preimage_mass);
}

}  // namespace caplab
