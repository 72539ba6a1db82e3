#include "caplab/learners.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <unordered_map>

#include "caplab/parallel.hpp"

namespace caplab {
namespace {

// Patterns with at most this many members are verified exhaustively when a
// memorizing learner is constructed; larger spaces are checked lazily at
// emission time.
constexpr std::size_t kEagerPatternCheckCap = 1u << 16;

// Classifies a prediction row as a label point mass (code = label), a
// uniform row (code = n_labels) or neither (nullopt).
std::optional<int> classify_row(const SimplexVector& row, int n_labels,
                                double tol) {
  for (int y = 0; y < n_labels; ++y)
    if (row[static_cast<std::size_t>(y)] >= 1.0 - tol) return y;
  const double u = 1.0 / static_cast<double>(n_labels);
  for (std::size_t j = 0; j < row.dim(); ++j)
    if (std::abs(row[j] - u) > tol) return std::nullopt;
  return n_labels;
}

// Index of (point-mass | uniform)-row hypotheses within a space, keyed by the
// per-feature codes. First occurrence wins so learner tie-breaks stay stable.
class PatternIndex {
 public:
  PatternIndex(const HypothesisSpace& gspace, double tol) {
    const int ny = gspace.space().n_labels;
    const int nx = gspace.space().n_features;
    for (std::size_t i = 0; i < gspace.size(); ++i) {
      const Hypothesis& h = gspace.at(i);
      std::string key;
      key.reserve(static_cast<std::size_t>(nx));
      bool codable = true;
      for (int x = 0; x < nx && codable; ++x) {
        const auto code = classify_row(h.row(x), ny, tol);
        if (!code) codable = false;
        else key.push_back(static_cast<char>(*code + 1));
      }
      if (codable) by_code_.emplace(std::move(key), i);
    }
  }

  std::optional<std::size_t> find(const std::vector<int>& codes) const {
    std::string key;
    key.reserve(codes.size());
    for (int c : codes) key.push_back(static_cast<char>(c + 1));
    const auto it = by_code_.find(key);
    if (it == by_code_.end()) return std::nullopt;
    return it->second;
  }

 private:
  std::unordered_map<std::string, std::size_t> by_code_;
};

// Verifies that every pattern with at least one trained (deterministic) row
// exists in the space. Only called when (|Y|+1)^|X| is small enough.
void verify_patterns_eagerly(const PatternIndex& index, const InstanceSpace& space) {
  const int nx = space.n_features, ny = space.n_labels;
  std::size_t count = 1;
  for (int x = 0; x < nx; ++x) count *= static_cast<std::size_t>(ny + 1);
  std::vector<int> codes(static_cast<std::size_t>(nx), 0);
  for (std::size_t k = 0; k < count; ++k) {
    std::size_t rem = k;
    bool any_trained = false;
    for (int x = nx - 1; x >= 0; --x) {
      codes[static_cast<std::size_t>(x)] = static_cast<int>(rem % (ny + 1));
      rem /= static_cast<std::size_t>(ny + 1);
      any_trained |= codes[static_cast<std::size_t>(x)] < ny;
    }
    if (!any_trained) continue;
    if (!index.find(codes))
      throw ConstructionError(
          "memorizer: hypothesis space is missing a lookup-table pattern");
  }
}

std::size_t pattern_space_size(const InstanceSpace& space) {
  std::size_t count = 1;
  for (int x = 0; x < space.n_features; ++x) {
    if (count > kEagerPatternCheckCap) return count;
    count *= static_cast<std::size_t>(space.n_labels + 1);
  }
  return count;
}

// Last-occurrence label per trained feature over a dataset prefix.
std::vector<int> trained_labels(const Dataset& d, std::size_t prefix,
                                const InstanceSpace& space) {
  std::vector<int> last(static_cast<std::size_t>(space.n_features), -1);
  const std::size_t m = std::min(prefix, d.size());
  for (std::size_t i = 0; i < m; ++i)
    last[static_cast<std::size_t>(d.at(i).feature)] = d.at(i).label;
  return last;
}

SimplexVector point_mass_on(std::size_t dim, std::size_t index) {
  return SimplexVector::point_mass(dim, index);
}

std::vector<double> empirical_risks(const HypothesisSpace& gspace,
                                    const Dataset& d, const LossFunction& loss) {
  std::vector<double> risks(gspace.size());
  for (std::size_t i = 0; i < gspace.size(); ++i)
    risks[i] = empirical_risk(gspace.at(i), d, loss);
  return risks;
}

void check_dataset_space(const Dataset& d, const InstanceSpace& space,
                         const char* who) {
  if (!(d.space() == space))
    throw ValidationError(std::string(who) + ": dataset space mismatch");
}

}  // namespace

const char* to_string(Mode mode) {
  return mode == Mode::Final ? "FINAL" : "AVERAGED";
}

SimplexVector LearnerProfile::row_for(const Dataset& d, Mode mode) const {
  std::vector<SimplexVector> outs = per_iteration(d);
  if (outs.empty())
    throw ValidationError("LearnerProfile: no iteration outputs");
  if (mode == Mode::Final) return outs.back();
  std::vector<double> mean(outs.front().dim(), 0.0);
  for (const SimplexVector& o : outs) {
    if (o.dim() != mean.size())
      throw ValidationError("LearnerProfile: ragged iteration outputs");
    for (std::size_t j = 0; j < mean.size(); ++j) mean[j] += o[j];
  }
  for (double& v : mean) v /= static_cast<double>(outs.size());
  return SimplexVector(std::move(mean));
}

Channel Channel::from_rows(std::vector<SimplexVector> rows, SimplexVector probs,
                           Mode mode) {
  if (rows.empty()) throw ValidationError("Channel: no rows");
  if (probs.dim() != rows.size())
    throw ValidationError("Channel: input_probs dimension mismatch");
  for (const auto& r : rows)
    if (r.dim() != rows.front().dim())
      throw ValidationError("Channel: ragged rows");
  Channel ch;
  ch.input_probs = std::move(probs);
  ch.rows = std::move(rows);
  ch.mode = mode;
  return ch;
}

Channel build_channel(const LearnerProfile& learner,
                      const DatasetDistribution& dist, Mode mode,
                      std::size_t cap, unsigned threads) {
  auto support = dist.enumerate_support(cap);
  std::vector<SimplexVector> rows(support.datasets.size(),
                                  SimplexVector(std::vector<double>{1.0}));
  parallel_for(support.datasets.size(), threads, [&](std::size_t i) {
    rows[i] = learner.row_for(support.datasets[i], mode);
  });
  for (const auto& r : rows)
    if (r.dim() != rows.front().dim())
      throw ValidationError("build_channel: ragged learner outputs");
  Channel ch;
  ch.input_support = std::move(support.datasets);
  ch.input_probs = std::move(support.probs);
  ch.rows = std::move(rows);
  ch.mode = mode;
  return ch;
}

LearnerProfile memorizer(const InstanceSpace& space,
                         std::shared_ptr<const HypothesisSpace> gspace) {
  space.validate();
  if (!gspace) throw ConstructionError("memorizer: null hypothesis space");
  if (!(gspace->space() == space))
    throw ConstructionError("memorizer: hypothesis space over a different problem");
  auto index = std::make_shared<PatternIndex>(*gspace, kSimplexTol);
  if (pattern_space_size(space) <= kEagerPatternCheckCap)
    verify_patterns_eagerly(*index, space);

  LearnerProfile p;
  p.name = "memorizer";
  p.iterations = 1;
  p.space = gspace;
  const std::size_t gsize = gspace->size();
  p.per_iteration = [space, index, gsize](const Dataset& d) {
    check_dataset_space(d, space, "memorizer");
    const std::vector<int> last = trained_labels(d, d.size(), space);
    std::vector<int> codes(last.size());
    for (std::size_t x = 0; x < last.size(); ++x)
      codes[x] = last[x] < 0 ? space.n_labels : last[x];
    const auto hit = index->find(codes);
    if (!hit)
      throw ConstructionError(
          "memorizer: hypothesis space is missing the required pattern");
    return std::vector<SimplexVector>{point_mass_on(gsize, *hit)};
  };
  return p;
}

LearnerProfile anti_learner(const InstanceSpace& space,
                            std::shared_ptr<const HypothesisSpace> gspace,
                            const LossFunction& loss) {
  space.validate();
  if (!gspace) throw ConstructionError("anti_learner: null hypothesis space");
  if (!(gspace->space() == space))
    throw ConstructionError("anti_learner: hypothesis space over a different problem");
  if (!loss.bounded_above())
    throw ConstructionError(
        "anti_learner: loss must declare a finite upper bound");
  auto index = std::make_shared<PatternIndex>(*gspace, kSimplexTol);
  if (pattern_space_size(space) <= kEagerPatternCheckCap)
    verify_patterns_eagerly(*index, space);

  LearnerProfile p;
  p.name = "anti_learner";
  p.iterations = 1;
  p.space = gspace;
  const std::size_t gsize = gspace->size();
  p.per_iteration = [space, index, gsize, loss](const Dataset& d) {
    check_dataset_space(d, space, "anti_learner");
    const std::vector<int> last = trained_labels(d, d.size(), space);
    std::vector<int> codes(last.size());
    for (std::size_t x = 0; x < last.size(); ++x) {
      if (last[x] < 0) {
        codes[x] = space.n_labels;  // untrained -> uniform row
        continue;
      }
      // Loss-maximizing prediction against the trained label; lowest label
      // index wins ties.
      int best = 0;
      double best_loss = -1.0;
      for (int yhat = 0; yhat < space.n_labels; ++yhat) {
        const double l = loss.point_loss(yhat, static_cast<int>(x), last[x]);
        if (l > best_loss + 1e-12) {
          best_loss = l;
          best = yhat;
        }
      }
      codes[x] = best;
    }
    const auto hit = index->find(codes);
    if (!hit)
      throw ConstructionError(
          "anti_learner: hypothesis space is missing the required pattern");
    return std::vector<SimplexVector>{point_mass_on(gsize, *hit)};
  };
  return p;
}

LearnerProfile uniform_guesser(std::shared_ptr<const HypothesisSpace> gspace) {
  if (!gspace) throw ConstructionError("uniform_guesser: null hypothesis space");
  LearnerProfile p;
  p.name = "uniform_guesser";
  p.iterations = 1;
  p.space = gspace;
  const std::size_t gsize = gspace->size();
  const InstanceSpace space = gspace->space();
  p.per_iteration = [gsize, space](const Dataset& d) {
    check_dataset_space(d, space, "uniform_guesser");
    return std::vector<SimplexVector>{SimplexVector::uniform(gsize)};
  };
  return p;
}

LearnerProfile finite_erm(std::shared_ptr<const HypothesisSpace> gspace,
                          const LossFunction& loss) {
  if (!gspace) throw ConstructionError("finite_erm: null hypothesis space");
  LearnerProfile p;
  p.name = "finite_erm";
  p.iterations = 1;
  p.space = gspace;
  p.per_iteration = [gspace, loss](const Dataset& d) {
    check_dataset_space(d, gspace->space(), "finite_erm");
    const std::vector<double> risks = empirical_risks(*gspace, d, loss);
    std::size_t best = 0;
    for (std::size_t i = 1; i < risks.size(); ++i)
      if (risks[i] < risks[best]) best = i;  // strict: lowest index on ties
    return std::vector<SimplexVector>{point_mass_on(risks.size(), best)};
  };
  return p;
}

LearnerProfile gibbs_erm(std::shared_ptr<const HypothesisSpace> gspace,
                         const LossFunction& loss, double beta) {
  if (!gspace) throw ConstructionError("gibbs_erm: null hypothesis space");
  if (!(beta >= 0.0) || !std::isfinite(beta))
    throw ValidationError("gibbs_erm: beta must be finite and >= 0");
  LearnerProfile p;
  p.name = "gibbs_erm";
  p.iterations = 1;
  p.space = gspace;
  p.per_iteration = [gspace, loss, beta](const Dataset& d) {
    check_dataset_space(d, gspace->space(), "gibbs_erm");
    const std::vector<double> risks = empirical_risks(*gspace, d, loss);
    const double rmin = *std::min_element(risks.begin(), risks.end());
    std::vector<double> w(risks.size());
    for (std::size_t i = 0; i < risks.size(); ++i)
      w[i] = std::exp(-beta * (risks[i] - rmin));
    const double total = std::accumulate(w.begin(), w.end(), 0.0);
    for (double& v : w) v /= total;
    return std::vector<SimplexVector>{SimplexVector(std::move(w))};
  };
  return p;
}

LearnerProfile iterative_memorizer(const InstanceSpace& space,
                                   std::shared_ptr<const HypothesisSpace> gspace,
                                   std::size_t n) {
  space.validate();
  if (n == 0) throw ValidationError("iterative_memorizer: n must be >= 1");
  if (!gspace) throw ConstructionError("iterative_memorizer: null hypothesis space");
  if (!(gspace->space() == space))
    throw ConstructionError(
        "iterative_memorizer: hypothesis space over a different problem");
  auto index = std::make_shared<PatternIndex>(*gspace, kSimplexTol);
  if (pattern_space_size(space) <= kEagerPatternCheckCap)
    verify_patterns_eagerly(*index, space);

  LearnerProfile p;
  p.name = "iterative_memorizer";
  p.iterations = n;
  p.space = gspace;
  const std::size_t gsize = gspace->size();
  p.per_iteration = [space, index, gsize, n](const Dataset& d) {
    check_dataset_space(d, space, "iterative_memorizer");
    std::vector<SimplexVector> outs;
    outs.reserve(n);
    for (std::size_t i = 1; i <= n; ++i) {
      const std::vector<int> last = trained_labels(d, i, space);
      std::vector<int> codes(last.size());
      for (std::size_t x = 0; x < last.size(); ++x)
        codes[x] = last[x] < 0 ? space.n_labels : last[x];
      const auto hit = index->find(codes);
      if (!hit)
        throw ConstructionError(
            "iterative_memorizer: hypothesis space is missing the required pattern");
      outs.push_back(point_mass_on(gsize, *hit));
    }
    return outs;
  };
  return p;
}

}  // namespace caplab
