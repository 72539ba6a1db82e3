#include "caplab/vc.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <unordered_map>
#include <unordered_set>

namespace caplab {

ClassifierClass::ClassifierClass(InstanceSpace space,
                                 std::vector<std::vector<int>> assignments)
    : space_(space) {
  space_.validate();
  if (assignments.empty())
    throw ValidationError("ClassifierClass: empty class");
  std::set<std::vector<int>> seen;
  for (auto& a : assignments) {
    if (a.size() != static_cast<std::size_t>(space_.n_features))
      throw ValidationError("ClassifierClass: assignment length mismatch");
    for (int y : a)
      if (y < 0 || y >= space_.n_labels)
        throw ValidationError("ClassifierClass: label out of range");
    if (seen.insert(a).second) assignments_.push_back(std::move(a));
  }
}

ClassifierClass ClassifierClass::from_hypotheses(const HypothesisSpace& gspace,
                                                 double tol) {
  std::vector<std::vector<int>> assignments;
  assignments.reserve(gspace.size());
  for (const Hypothesis& h : gspace.hypotheses()) {
    if (!h.deterministic(tol))
      throw ValidationError(
          "ClassifierClass: hypothesis space contains stochastic rows");
    std::vector<int> a(static_cast<std::size_t>(h.n_features()));
    for (int x = 0; x < h.n_features(); ++x)
      a[static_cast<std::size_t>(x)] = h.hard_label(x, tol);
    assignments.push_back(std::move(a));
  }
  return ClassifierClass(gspace.space(), std::move(assignments));
}

ClassifierClass ClassifierClass::thresholds_on_line(const InstanceSpace& space) {
  space.validate();
  if (space.n_labels != 2)
    throw ValidationError("thresholds_on_line: binary labels required");
  std::vector<std::vector<int>> assignments;
  for (int k = 0; k <= space.n_features; ++k) {
    std::vector<int> a(static_cast<std::size_t>(space.n_features));
    for (int x = 0; x < space.n_features; ++x)
      a[static_cast<std::size_t>(x)] = x >= k ? 1 : 0;
    assignments.push_back(std::move(a));
  }
  return ClassifierClass(space, std::move(assignments));
}

ClassifierClass ClassifierClass::full_tables(const InstanceSpace& space) {
  const HypothesisSpace tables = HypothesisSpace::all_lookup_tables(space);
  return from_hypotheses(tables);
}

HypothesisSpace ClassifierClass::to_hypothesis_space() const {
  std::vector<Hypothesis> hyps;
  hyps.reserve(assignments_.size());
  for (const auto& a : assignments_)
    hyps.push_back(Hypothesis::from_labels(space_, a));
  return HypothesisSpace(space_, std::move(hyps));
}

std::size_t restriction_index(const ClassifierClass& cls,
                              const std::vector<int>& feature_sample) {
  if (feature_sample.empty())
    throw ValidationError("restriction_index: empty sample");
  for (int x : feature_sample)
    if (x < 0 || x >= cls.space().n_features)
      throw ValidationError("restriction_index: feature out of range");
  std::set<std::vector<int>> patterns;
  std::vector<int> tuple(feature_sample.size());
  for (std::size_t c = 0; c < cls.size(); ++c) {
    const std::vector<int>& a = cls.at(c);
    for (std::size_t i = 0; i < feature_sample.size(); ++i)
      tuple[i] = a[static_cast<std::size_t>(feature_sample[i])];
    patterns.insert(tuple);
  }
  return patterns.size();
}

namespace {

// Visit all non-decreasing feature multisets of size r; returns false if the
// visitor aborts early (unused for now but keeps the walk testable).
void walk_multisets(int n_features, std::size_t r,
                    const std::function<void(const std::vector<int>&)>& visit) {
  std::vector<int> sample(r, 0);
  while (true) {
    visit(sample);
    // next non-decreasing sequence
    std::size_t i = r;
    while (i > 0) {
      --i;
      if (sample[i] + 1 < n_features) {
        const int v = sample[i] + 1;
        for (std::size_t j = i; j < r; ++j) sample[j] = v;
        break;
      }
      if (i == 0) return;
    }
  }
}

std::size_t multiset_count(int n_features, std::size_t r, std::size_t cap) {
  // C(n_features + r - 1, r), capped.
  long double count = 1.0L;
  for (std::size_t i = 1; i <= r; ++i) {
    count *= static_cast<long double>(n_features - 1 + i);
    count /= static_cast<long double>(i);
    if (count > static_cast<long double>(cap) * 2.0L) break;
  }
  return count > static_cast<long double>(cap)
             ? cap + 1
             : static_cast<std::size_t>(count + 0.5L);
}

}  // namespace

std::size_t growth_function(const ClassifierClass& cls, std::size_t r,
                            std::size_t cap) {
  if (r == 0) throw ValidationError("growth_function: r must be >= 1");
  if (multiset_count(cls.space().n_features, r, cap) > cap)
    throw CapacityLimitError("growth_function: sample enumeration exceeds cap");
  std::size_t best = 0;
  walk_multisets(cls.space().n_features, r, [&](const std::vector<int>& sample) {
    best = std::max(best, restriction_index(cls, sample));
  });
  return best;
}

std::size_t vc_dimension(const ClassifierClass& cls, std::size_t cap) {
  if (!cls.binary())
    throw ValidationError("vc_dimension: binary classes only");
  const std::size_t max_r = static_cast<std::size_t>(cls.space().n_features);
  std::size_t dim = 0;
  for (std::size_t r = 1; r <= max_r; ++r) {
    const std::size_t m = growth_function(cls, r, cap);
    const std::size_t full = std::size_t{1} << r;
    if (m == full)
      dim = r;
    else
      break;  // growth is monotone in the shattering sense; stop at first gap
  }
  return dim;
}

namespace {

// Agreement pattern of the class on a dataset: for every classifier, whether
// it matches each example's label. Two datasets with equal patterns present
// exactly the same evidence to any classifier-mediated learner.
std::string agreement_key(const ClassifierClass& cls, const Dataset& d) {
  std::string key;
  key.reserve(cls.size() * d.size());
  for (std::size_t c = 0; c < cls.size(); ++c) {
    const std::vector<int>& a = cls.at(c);
    for (const Example& e : d.examples())
      key.push_back(a[static_cast<std::size_t>(e.feature)] == e.label ? '1' : '0');
  }
  return key;
}

std::string row_key(const SimplexVector& row) {
  return std::string(reinterpret_cast<const char*>(row.probs().data()),
                     row.probs().size() * sizeof(double));
}

}  // namespace

VcBoundReport vc_capacity_bound_check(const LearnerProfile& learner,
                                      const ClassifierClass& cls,
                                      const DatasetDistribution& dist,
                                      VcCheckMode mode, std::size_t cap,
                                      unsigned threads) {
  if (!(dist.space() == cls.space()))
    throw ValidationError("vc_capacity_bound_check: space mismatch");
  const Channel ch = build_channel(learner, dist, Mode::Final, cap, threads);

  VcBoundReport rep;
  rep.growth_value = growth_function(cls, dist.length(), cap);
  rep.bound_bits = std::log2(static_cast<double>(rep.growth_value));
  if (cls.binary()) {
    rep.vc_dim = vc_dimension(cls, cap);
    rep.log2_vc_dim = rep.vc_dim == 0
                          ? kNegativeInfiniteBits
                          : std::log2(static_cast<double>(rep.vc_dim));
  }

  rep.capacity_bits = mode == VcCheckMode::FixedDist
                          ? distributional_capacity(ch)
                          : sup_capacity(ch).value;

  // (a) identical agreement patterns must map to identical rows;
  std::unordered_map<std::string, std::size_t> pattern_to_row;
  std::unordered_set<std::string> distinct_rows;
  bool pattern_determined = true;
  for (std::size_t k = 0; k < ch.n_inputs() && pattern_determined; ++k) {
    const std::string rk = row_key(ch.rows[k]);
    distinct_rows.insert(rk);
    const std::string ak = agreement_key(cls, ch.input_support[k]);
    const auto [it, inserted] = pattern_to_row.emplace(ak, k);
    if (!inserted && row_key(ch.rows[it->second]) != rk) {
      pattern_determined = false;
      rep.note = "two datasets with identical restriction patterns produced "
                 "different output rows";
    }
  }
  for (std::size_t k = 0; k < ch.n_inputs(); ++k)
    distinct_rows.insert(row_key(ch.rows[k]));
  rep.distinct_rows = distinct_rows.size();

  // (b) the channel must not distinguish more than the growth function allows.
  if (pattern_determined && rep.distinct_rows > rep.growth_value) {
    pattern_determined = false;
    rep.note = "channel has more distinct rows than the growth function value";
  }

  rep.applicable = pattern_determined;
  if (rep.applicable) {
    rep.holds = rep.capacity_bits <= rep.bound_bits + kBoundTol;
  } else {
    rep.holds = false;
    if (rep.note.empty()) rep.note = "not applicable";
  }
  return rep;
}

}  // namespace caplab
