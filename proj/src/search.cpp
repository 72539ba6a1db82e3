#include "caplab/search.hpp"

#include <cmath>

#include "caplab/parallel.hpp"

namespace caplab {

std::size_t TargetVector::ones() const {
  std::size_t c = 0;
  for (std::uint8_t b : bits) c += b ? 1 : 0;
  return c;
}

bool TargetVector::degenerate() const {
  const std::size_t c = ones();
  return c == 0 || c == bits.size();
}

TargetVector target_from_risk(const HypothesisSpace& gspace,
                              const SimplexVector& instance_marginal,
                              const LossFunction& loss, double epsilon) {
  if (!(epsilon > 0.0))
    throw ValidationError("target_from_risk: epsilon must be > 0");
  TargetVector t;
  t.epsilon = epsilon;
  t.bits.resize(gspace.size());
  for (std::size_t i = 0; i < gspace.size(); ++i) {
    const double risk = population_risk(gspace.at(i), instance_marginal, loss);
    t.bits[i] = risk < epsilon ? 1 : 0;
  }
  return t;
}

Orientation orientation_given_f(const LearnerProfile& learner, const Dataset& d,
                                Mode mode) {
  Orientation o;
  o.vec = learner.row_for(d, mode);
  o.mode = mode;
  o.provenance = Provenance::Exact;
  return o;
}

Orientation orientation(const LearnerProfile& learner,
                        const DatasetDistribution& dist, Mode mode,
                        std::size_t cap, unsigned threads) {
  const Channel ch = build_channel(learner, dist, mode, cap, threads);
  return orientation_of_channel(ch);
}

Orientation orientation_of_channel(const Channel& ch) {
  std::vector<double> mix(ch.n_hypotheses(), 0.0);
  for (std::size_t d = 0; d < ch.n_inputs(); ++d) {
    const double pd = ch.input_probs[d];
    if (pd <= 0.0) continue;
    for (std::size_t g = 0; g < mix.size(); ++g) mix[g] += pd * ch.rows[d][g];
  }
  Orientation o;
  o.vec = SimplexVector(std::move(mix));
  o.mode = ch.mode;
  o.provenance = Provenance::Exact;
  return o;
}

double expected_row_entropy(const Channel& ch) {
  double acc = 0.0;
  for (std::size_t d = 0; d < ch.n_inputs(); ++d) {
    const double pd = ch.input_probs[d];
    if (pd > 0.0) acc += pd * entropy(ch.rows[d]);
  }
  return acc;
}

double entropic_expressivity(const Orientation& o) { return entropy(o.vec); }

namespace {

void check_dims(const Orientation& o, const TargetVector& t, const char* who) {
  if (o.vec.dim() != t.dim())
    throw ValidationError(std::string(who) + ": dimension mismatch");
}

}  // namespace

double bias(const Orientation& o, const TargetVector& t) {
  check_dims(o, t, "bias");
  const double k = static_cast<double>(t.ones());
  return per_query_success(o, t) - k / static_cast<double>(o.vec.dim());
}

double per_query_success(const Orientation& o, const TargetVector& t) {
  check_dims(o, t, "per_query_success");
  double acc = 0.0;
  for (std::size_t g = 0; g < t.dim(); ++g)
    if (t.bits[g]) acc += o.vec[g];
  return acc;
}

TradeoffReport tradeoff_check(const Orientation& o, const TargetVector& t) {
  check_dims(o, t, "tradeoff_check");
  TradeoffReport r;
  r.target_degenerate = t.degenerate();
  r.expressivity = entropic_expressivity(o);
  r.bias_value = bias(o, t);
  const double log_g = std::log2(static_cast<double>(o.vec.dim()));
  const double kl_from_uniform = kl_divergence(o.vec, SimplexVector::uniform(o.vec.dim()));
  r.slack_entropy = (log_g - 2.0 * r.bias_value * r.bias_value) - r.expressivity;
  r.slack_bias = std::sqrt(0.5 * kl_from_uniform) - r.bias_value;
  r.holds = r.slack_entropy >= -kBoundTol && r.slack_bias >= -kBoundTol;
  return r;
}

}  // namespace caplab
