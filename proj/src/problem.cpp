#include "caplab/problem.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "caplab/seeding.hpp"

namespace caplab {

Dataset::Dataset(InstanceSpace space, std::vector<Example> examples)
    : space_(space), examples_(std::move(examples)) {
  space_.validate();
  if (examples_.empty()) throw ValidationError("Dataset: empty example list");
  for (const Example& e : examples_) {
    if (e.feature < 0 || e.feature >= space_.n_features || e.label < 0 ||
        e.label >= space_.n_labels)
      throw ValidationError("Dataset: example out of range");
  }
}

std::vector<int> Dataset::instance_indices() const {
  std::vector<int> z(examples_.size());
  for (std::size_t i = 0; i < examples_.size(); ++i)
    z[i] = space_.instance_index(examples_[i].feature, examples_[i].label);
  return z;
}

Hypothesis::Hypothesis(std::vector<SimplexVector> rows) : rows_(std::move(rows)) {
  if (rows_.empty()) throw ValidationError("Hypothesis: no rows");
  for (const auto& r : rows_)
    if (r.dim() != rows_.front().dim())
      throw ValidationError("Hypothesis: ragged prediction rows");
}

Hypothesis Hypothesis::from_labels(const InstanceSpace& space,
                                   const std::vector<int>& labels) {
  space.validate();
  if (labels.size() != static_cast<std::size_t>(space.n_features))
    throw ValidationError("Hypothesis::from_labels: need one label per feature");
  std::vector<SimplexVector> rows;
  rows.reserve(labels.size());
  for (int y : labels) {
    if (y < 0 || y >= space.n_labels)
      throw ValidationError("Hypothesis::from_labels: label out of range");
    rows.push_back(SimplexVector::point_mass(
        static_cast<std::size_t>(space.n_labels), static_cast<std::size_t>(y)));
  }
  return Hypothesis(std::move(rows));
}

Hypothesis Hypothesis::uniform(const InstanceSpace& space) {
  space.validate();
  std::vector<SimplexVector> rows(
      static_cast<std::size_t>(space.n_features),
      SimplexVector::uniform(static_cast<std::size_t>(space.n_labels)));
  return Hypothesis(std::move(rows));
}

bool Hypothesis::deterministic(double tol) const {
  for (const auto& r : rows_) {
    double mx = 0.0;
    for (std::size_t j = 0; j < r.dim(); ++j) mx = std::max(mx, r[j]);
    if (mx < 1.0 - tol) return false;
  }
  return true;
}

int Hypothesis::hard_label(int x, double tol) const {
  const SimplexVector& r = row(x);
  for (std::size_t j = 0; j < r.dim(); ++j)
    if (r[j] >= 1.0 - tol) return static_cast<int>(j);
  throw DomainError("Hypothesis::hard_label: row is not deterministic");
}

bool approx_equal(const Hypothesis& a, const Hypothesis& b, double tol) {
  if (a.n_features() != b.n_features() || a.n_labels() != b.n_labels())
    return false;
  for (int x = 0; x < a.n_features(); ++x)
    if (!approx_equal(a.row(x), b.row(x), tol)) return false;
  return true;
}

HypothesisSpace::HypothesisSpace(InstanceSpace space,
                                 std::vector<Hypothesis> hypotheses)
    : space_(space), hyps_(std::move(hypotheses)) {
  space_.validate();
  if (hyps_.empty()) throw ValidationError("HypothesisSpace: empty");
  for (const auto& h : hyps_) {
    if (h.n_features() != space_.n_features || h.n_labels() != space_.n_labels)
      throw ValidationError("HypothesisSpace: hypothesis shape mismatch");
  }
}

HypothesisSpace HypothesisSpace::all_lookup_tables(const InstanceSpace& space) {
  space.validate();
  const int nx = space.n_features, ny = space.n_labels;
  std::size_t count = 1;
  for (int x = 0; x < nx; ++x) {
    count *= static_cast<std::size_t>(ny);
    if (count > kDefaultEnumerationCap)
      throw CapacityLimitError("all_lookup_tables: |Y|^|X| exceeds cap");
  }
  std::vector<Hypothesis> hyps;
  hyps.reserve(count);
  std::vector<int> labels(static_cast<std::size_t>(nx), 0);
  for (std::size_t k = 0; k < count; ++k) {
    std::size_t rem = k;
    for (int x = nx - 1; x >= 0; --x) {
      labels[static_cast<std::size_t>(x)] = static_cast<int>(rem % ny);
      rem /= static_cast<std::size_t>(ny);
    }
    hyps.push_back(Hypothesis::from_labels(space, labels));
  }
  return HypothesisSpace(space, std::move(hyps));
}

HypothesisSpace HypothesisSpace::lookup_tables_with_mixed(
    const InstanceSpace& space) {
  space.validate();
  const int nx = space.n_features, ny = space.n_labels;
  std::size_t count = 1;
  for (int x = 0; x < nx; ++x) {
    count *= static_cast<std::size_t>(ny + 1);
    if (count > kDefaultEnumerationCap)
      throw CapacityLimitError("lookup_tables_with_mixed: (|Y|+1)^|X| exceeds cap");
  }
  HypothesisSpace det = all_lookup_tables(space);
  std::vector<Hypothesis> hyps = det.hypotheses();
  hyps.reserve(count);
  const SimplexVector uniform_row =
      SimplexVector::uniform(static_cast<std::size_t>(ny));
  // Codes 0..ny-1 are label point masses, code ny is the uniform row; skip
  // the all-deterministic combinations already emitted above.
  std::vector<int> codes(static_cast<std::size_t>(nx), 0);
  for (std::size_t k = 0; k < count; ++k) {
    std::size_t rem = k;
    bool any_uniform = false;
    for (int x = nx - 1; x >= 0; --x) {
      codes[static_cast<std::size_t>(x)] = static_cast<int>(rem % (ny + 1));
      rem /= static_cast<std::size_t>(ny + 1);
      any_uniform |= codes[static_cast<std::size_t>(x)] == ny;
    }
    if (!any_uniform) continue;
    std::vector<SimplexVector> rows;
    rows.reserve(static_cast<std::size_t>(nx));
    for (int x = 0; x < nx; ++x) {
      const int c = codes[static_cast<std::size_t>(x)];
      rows.push_back(c == ny ? uniform_row
                             : SimplexVector::point_mass(
                                   static_cast<std::size_t>(ny),
                                   static_cast<std::size_t>(c)));
    }
    hyps.push_back(Hypothesis(std::move(rows)));
  }
  return HypothesisSpace(space, std::move(hyps));
}

std::optional<std::size_t> HypothesisSpace::find(const Hypothesis& h,
                                                 double tol) const {
  for (std::size_t i = 0; i < hyps_.size(); ++i)
    if (approx_equal(hyps_[i], h, tol)) return i;
  return std::nullopt;
}

LossFunction::LossFunction(std::string name, Table table,
                           std::optional<double> bounded_above)
    : name_(std::move(name)), table_(std::move(table)), bound_(bounded_above) {
  if (!table_) throw ValidationError("LossFunction: empty table");
  if (bound_ && *bound_ < 0.0)
    throw ValidationError("LossFunction: negative upper bound");
}

LossFunction LossFunction::zero_one() {
  return LossFunction(
      "zero_one",
      [](int predicted, int /*feature*/, int true_label) {
        return predicted == true_label ? 0.0 : 1.0;
      },
      1.0);
}

double LossFunction::point_loss(int predicted, int feature, int true_label) const {
  const double v = table_(predicted, feature, true_label);
  if (!(v >= 0.0))
    throw ValidationError("LossFunction: loss value must be non-negative");
  return v;
}

double LossFunction::instance_loss(const Hypothesis& h, int feature,
                                   int true_label) const {
  const SimplexVector& row = h.row(feature);
  double acc = 0.0;
  for (std::size_t yhat = 0; yhat < row.dim(); ++yhat) {
    if (row[yhat] > 0.0)
      acc += row[yhat] * point_loss(static_cast<int>(yhat), feature, true_label);
  }
  return acc;
}

DatasetDistribution DatasetDistribution::iid(InstanceSpace space, std::size_t n,
                                             SimplexVector base) {
  space.validate();
  if (n == 0) throw ValidationError("DatasetDistribution::iid: n must be >= 1");
  if (base.dim() != static_cast<std::size_t>(space.n_instances()))
    throw ValidationError("DatasetDistribution::iid: base dimension mismatch");
  DatasetDistribution d;
  d.kind_ = Kind::Iid;
  d.space_ = space;
  d.n_ = n;
  d.base_ = std::move(base);
  return d;
}

DatasetDistribution DatasetDistribution::iid_uniform(InstanceSpace space,
                                                     std::size_t n) {
  space.validate();
  return iid(space, n,
             SimplexVector::uniform(static_cast<std::size_t>(space.n_instances())));
}

DatasetDistribution DatasetDistribution::explicit_support(
    std::vector<Dataset> support, SimplexVector probs) {
  if (support.empty())
    throw ValidationError("DatasetDistribution: empty support");
  if (probs.dim() != support.size())
    throw ValidationError("DatasetDistribution: probs dimension mismatch");
  const InstanceSpace space = support.front().space();
  const std::size_t n = support.front().size();
  for (const Dataset& d : support)
    if (!(d.space() == space) || d.size() != n)
      throw ValidationError(
          "DatasetDistribution: support datasets must share space and length");
  DatasetDistribution d;
  d.kind_ = Kind::Explicit;
  d.space_ = space;
  d.n_ = n;
  d.support_ = std::move(support);
  d.probs_ = std::move(probs);
  return d;
}

DatasetDistribution DatasetDistribution::empirical(std::vector<Dataset> support) {
  if (support.empty())
    throw ValidationError("DatasetDistribution: empty support");
  const std::size_t m = support.size();
  DatasetDistribution d =
      explicit_support(std::move(support), SimplexVector::uniform(m));
  d.kind_ = Kind::Empirical;
  return d;
}

const SimplexVector& DatasetDistribution::iid_base() const {
  if (kind_ != Kind::Iid)
    throw DomainError("DatasetDistribution: not an i.i.d. distribution");
  return *base_;
}

std::optional<std::size_t> DatasetDistribution::support_size() const {
  if (kind_ != Kind::Iid) return support_.size();
  const std::size_t nz = static_cast<std::size_t>(space_.n_instances());
  std::size_t count = 1;
  for (std::size_t i = 0; i < n_; ++i) {
    if (count > std::numeric_limits<std::size_t>::max() / nz)
      return std::nullopt;  // |Z|^n overflows size_t
    count *= nz;
  }
  return count;
}

bool DatasetDistribution::enumerable(std::size_t cap) const {
  const auto sz = support_size();
  return sz.has_value() && *sz <= cap;
}

DatasetDistribution::Support DatasetDistribution::enumerate_support(
    std::size_t cap) const {
  if (kind_ != Kind::Iid) return {support_, *probs_};
  if (!enumerable(cap))
    throw CapacityLimitError(
        "DatasetDistribution: |Z|^n exceeds the enumeration cap");
  std::vector<Dataset> datasets = enumerate_datasets(space_, n_, cap);
  const SimplexVector& base = *base_;
  std::vector<double> probs;
  probs.reserve(datasets.size());
  for (const Dataset& d : datasets) {
    double p = 1.0;
    for (int z : d.instance_indices()) p *= base[static_cast<std::size_t>(z)];
    probs.push_back(p);
  }
  return {std::move(datasets), SimplexVector(std::move(probs))};
}

SimplexVector DatasetDistribution::instance_marginal() const {
  if (kind_ == Kind::Iid) return *base_;
  std::vector<double> m(static_cast<std::size_t>(space_.n_instances()), 0.0);
  const SimplexVector& probs = *probs_;
  for (std::size_t k = 0; k < support_.size(); ++k) {
    const double w = probs[k] / static_cast<double>(n_);
    for (int z : support_[k].instance_indices())
      m[static_cast<std::size_t>(z)] += w;
  }
  return SimplexVector(std::move(m));
}

double DatasetDistribution::dataset_probability(const Dataset& d) const {
  if (kind_ == Kind::Iid) {
    double p = 1.0;
    for (int z : d.instance_indices()) p *= (*base_)[static_cast<std::size_t>(z)];
    return p;
  }
  double p = 0.0;
  for (std::size_t k = 0; k < support_.size(); ++k)
    if (support_[k] == d) p += (*probs_)[k];
  return p;
}

Dataset DatasetDistribution::sample(std::uint64_t seed) const {
  Rng rng(seed);
  if (kind_ == Kind::Iid) {
    std::vector<Example> ex;
    ex.reserve(n_);
    for (std::size_t i = 0; i < n_; ++i) {
      const int z = static_cast<int>(sample_index(base_->probs(), rng));
      ex.push_back({space_.feature_of(z), space_.label_of(z)});
    }
    return Dataset(space_, std::move(ex));
  }
  return support_[sample_index(probs_->probs(), rng)];
}

std::vector<Dataset> enumerate_datasets(const InstanceSpace& space, std::size_t n,
                                        std::size_t cap) {
  space.validate();
  if (n == 0) throw ValidationError("enumerate_datasets: n must be >= 1");
  const std::size_t nz = static_cast<std::size_t>(space.n_instances());
  std::size_t count = 1;
  for (std::size_t i = 0; i < n; ++i) {
    if (count > cap / nz)  // count * nz would exceed cap (and maybe overflow)
      throw CapacityLimitError("enumerate_datasets: |Z|^n exceeds cap");
    count *= nz;
  }

  std::vector<Dataset> out;
  out.reserve(count);
  std::vector<Example> ex(n);
  for (std::size_t k = 0; k < count; ++k) {
    std::size_t rem = k;
    for (std::size_t pos = n; pos-- > 0;) {
      const int z = static_cast<int>(rem % nz);
      rem /= nz;
      ex[pos] = {space.feature_of(z), space.label_of(z)};
    }
    out.push_back(Dataset(space, ex));
  }
  return out;
}

double empirical_risk(const Hypothesis& h, const Dataset& d,
                      const LossFunction& loss) {
  double acc = 0.0;
  for (const Example& e : d.examples())
    acc += loss.instance_loss(h, e.feature, e.label);
  return acc / static_cast<double>(d.size());
}

double population_risk(const Hypothesis& h, const SimplexVector& instance_marginal,
                       const LossFunction& loss) {
  const int ny = h.n_labels();
  if (instance_marginal.dim() !=
      static_cast<std::size_t>(h.n_features()) * static_cast<std::size_t>(ny))
    throw ValidationError("population_risk: marginal dimension mismatch");
  double acc = 0.0;
  for (std::size_t z = 0; z < instance_marginal.dim(); ++z) {
    const double pz = instance_marginal[z];
    if (pz <= 0.0) continue;
    const int x = static_cast<int>(z) / ny;
    const int y = static_cast<int>(z) % ny;
    acc += pz * loss.instance_loss(h, x, y);
  }
  return acc;
}

double population_risk(const Hypothesis& h, const DatasetDistribution& dist,
                       const LossFunction& loss) {
  return population_risk(h, dist.instance_marginal(), loss);
}

Dataset sample_dataset(const DatasetDistribution& dist, std::uint64_t seed) {
  return dist.sample(seed);
}

}  // namespace caplab
