#include "caplab/diagnostics.hpp"

#include <cmath>
#include <cstdio>

#include "caplab/seeding.hpp"

namespace caplab {
namespace {

std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(v));
  return std::string(buf);
}

// Digest of the bound inputs: channel rows, input probabilities and target
// bits, chained through FNV-1a.
std::string digest_inputs(const Channel& ch, const TargetVector& t) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  const auto mix_bytes = [&h](const void* data, std::size_t len) {
    const unsigned char* p = static_cast<const unsigned char*>(data);
    for (std::size_t i = 0; i < len; ++i) {
      h ^= p[i];
      h *= 0x100000001b3ULL;
    }
  };
  for (const auto& row : ch.rows)
    mix_bytes(row.probs().data(), row.probs().size() * sizeof(double));
  mix_bytes(ch.input_probs.probs().data(),
            ch.input_probs.probs().size() * sizeof(double));
  if (!t.bits.empty()) mix_bytes(t.bits.data(), t.bits.size());
  return hex64(h);
}

BoundReport make_report(std::string name, double lhs, double rhs,
                        const std::string& digest, bool vacuous = false) {
  BoundReport r;
  r.name = std::move(name);
  r.lhs = lhs;
  r.rhs = rhs;
  r.slack = rhs - lhs;
  r.holds = vacuous || r.slack >= -kBoundTol;
  r.vacuous = vacuous;
  r.inputs_digest = digest;
  return r;
}

}  // namespace

const char* to_string(Decision d) {
  switch (d) {
    case Decision::Yes: return "YES";
    case Decision::No: return "NO";
    case Decision::Unknown: return "UNKNOWN";
  }
  return "UNKNOWN";
}

Verdict observational_overfit(const Hypothesis& g, const Dataset& d,
                              const DatasetDistribution& dist,
                              const LossFunction& loss) {
  Verdict v;
  v.kind = "OBSERVATIONAL_OVERFIT";
  v.lhs = population_risk(g, dist, loss);
  v.rhs = empirical_risk(g, d, loss);
  v.decision = v.lhs > v.rhs ? Decision::Yes : Decision::No;
  return v;
}

Verdict capacity_overfit(double capacity_bits, double expected_complexity_bits,
                         double slack) {
  if (slack < 0.0)
    throw ValidationError("capacity_overfit: slack must be >= 0");
  Verdict v;
  v.kind = "CAPACITY_OVERFIT";
  v.lhs = capacity_bits;
  v.rhs = expected_complexity_bits + slack;
  v.degree = capacity_bits - expected_complexity_bits;
  v.decision = v.lhs > v.rhs ? Decision::Yes : Decision::No;
  return v;
}

Verdict underfit_at(const LearnerProfile& learner,
                    const DatasetDistribution& dist, std::size_t i,
                    double expected_complexity_bits, UnderfitMode mode,
                    std::size_t cap, unsigned threads) {
  Verdict v;
  v.kind = "UNDERFIT_AT_ITERATION";
  if (mode == UnderfitMode::FixedDist) {
    v.lhs = time_indexed_capacity(learner, dist, i, cap, threads);
    v.detail = "capacity at the given dataset distribution, iteration " +
               std::to_string(i);
  } else {
    const CapacityResult sup = time_indexed_sup_capacity(
        learner, dist.space(), dist.length(), i, 1e-9, 100000, cap, threads);
    v.lhs = sup.value;
    v.detail = "sup capacity over the full support, iteration " +
               std::to_string(i);
  }
  v.rhs = expected_complexity_bits;
  v.decision = v.lhs < v.rhs ? Decision::Yes : Decision::No;
  return v;
}

Verdict model_overfit(const Channel& ch, std::size_t g, std::size_t d) {
  if (ch.input_support.empty())
    throw ValidationError("model_overfit: channel has no dataset support");
  if (d >= ch.input_support.size())
    throw ValidationError("model_overfit: dataset index out of range");

  const double transfer = pointwise_transfer(ch, g, d);
  const ComplexityReport cx = dataset_complexity(ch.input_support[d]);

  Verdict v;
  v.kind = "MODEL_OVERFIT";
  v.lhs = transfer;
  if (transfer > cx.raw_bits) {
    // Certified: the transfer exceeds the raw encoding bound, which upper
    // bounds the true dataset complexity.
    v.rhs = cx.raw_bits;
    v.decision = Decision::Yes;
    v.detail = "transfer exceeds the raw encoding certificate";
  } else if (transfer <= cx.c_d) {
    v.rhs = cx.c_d;
    v.decision = Decision::No;
    v.detail = "NO-UNDER-PROXY";
  } else {
    v.rhs = cx.c_d;
    v.decision = Decision::Unknown;
    v.detail =
        "transfer is between the proxy c_d and the raw certificate; the true "
        "complexity is undecided";
  }
  return v;
}

std::vector<BoundReport> bound_suite(const Channel& ch, const TargetVector& t) {
  if (t.dim() != ch.n_hypotheses())
    throw ValidationError("bound_suite: target dimension mismatch");

  const std::string digest = digest_inputs(ch, t);
  const Orientation o = orientation_of_channel(ch);
  const double h_mix = entropic_expressivity(o);
  const double e_row_h = expected_row_entropy(ch);
  const double capacity = distributional_capacity(ch);
  const double log_g = std::log2(static_cast<double>(ch.n_hypotheses()));
  const double b = bias(o, t);
  const double p_success = per_query_success(o, t);
  const double norm_t = static_cast<double>(t.ones());
  const bool vacuous_target = t.degenerate();

  std::vector<BoundReport> out;

  // Identity rather than inequality: check both directions.
  {
    BoundReport r = make_report("capacity_identity", capacity,
                                h_mix - e_row_h, digest);
    r.holds = std::abs(r.slack) <= kBoundTol;
    out.push_back(std::move(r));
  }

  out.push_back(make_report("expressivity_tradeoff", h_mix,
                            log_g - 2.0 * b * b, digest, vacuous_target));
  out.push_back(make_report("capacity_vs_bias", capacity,
                            log_g - 2.0 * b * b - e_row_h, digest,
                            vacuous_target));

  // Regime rows apply when the per-query success probability hits the
  // distinguished values 0, ||t||^2/|G| (zero bias) and 1.
  const double p_uniform = norm_t / static_cast<double>(ch.n_hypotheses());
  if (std::abs(p_success) <= kBoundTol) {
    const double remaining = static_cast<double>(ch.n_hypotheses()) - norm_t;
    const double rhs = remaining > 0.0 ? std::log2(remaining) - e_row_h
                                       : kNegativeInfiniteBits;
    out.push_back(make_report("regime_min_bias", capacity, rhs, digest,
                              vacuous_target));
  }
  if (std::abs(p_success - p_uniform) <= kBoundTol) {
    out.push_back(make_report("regime_no_bias", capacity, log_g - e_row_h,
                              digest, vacuous_target));
  }
  if (std::abs(p_success - 1.0) <= kBoundTol) {
    const double rhs = norm_t > 0.0 ? std::log2(norm_t) - e_row_h
                                    : kNegativeInfiniteBits;
    out.push_back(make_report("regime_max_bias", capacity, rhs, digest,
                              vacuous_target));
  }

  // Capacity never exceeds the largest per-row relative entropy radius.
  {
    double radius = 0.0;
    for (std::size_t k = 0; k < ch.n_inputs(); ++k)
      radius = std::max(radius, kl_divergence(ch.rows[k], o.vec));
    out.push_back(make_report("kl_radius", capacity, radius, digest));
  }

  return out;
}

std::vector<BoundReport> bound_suite(const LearnerProfile& learner,
                                     const DatasetDistribution& dist,
                                     const TargetVector& t, Mode mode,
                                     std::size_t cap, unsigned threads) {
  return bound_suite(build_channel(learner, dist, mode, cap, threads), t);
}

}  // namespace caplab
