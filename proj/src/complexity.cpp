#include "caplab/complexity.hpp"

#include <algorithm>
#include <cmath>

#include "caplab/parallel.hpp"
#include "caplab/seeding.hpp"

namespace caplab {
namespace {

double ceil_log2(int n) {
  if (n <= 1) return 0.0;
  int bits = 0;
  int v = n - 1;
  while (v > 0) {
    v >>= 1;
    ++bits;
  }
  return static_cast<double>(bits);
}

// The dataset as a (partial) function feature -> label; nullopt when two
// examples disagree on a feature.
std::optional<std::map<int, int>> as_function(const Dataset& d) {
  std::map<int, int> f;
  for (const Example& e : d.examples()) {
    const auto it = f.find(e.feature);
    if (it == f.end()) {
      f.emplace(e.feature, e.label);
    } else if (it->second != e.label) {
      return std::nullopt;
    }
  }
  return f;
}

}  // namespace

const char* to_string(ProgramKind kind) {
  switch (kind) {
    case ProgramKind::Constant: return "CONSTANT";
    case ProgramKind::MajorityExceptions: return "MAJORITY-EXCEPTIONS";
    case ProgramKind::FullTable: return "FULL-TABLE";
    case ProgramKind::None: return "NONE";
  }
  return "NONE";
}

int ProgramDescription::run(int feature) const {
  switch (kind) {
    case ProgramKind::Constant:
      return default_label;
    case ProgramKind::MajorityExceptions: {
      const auto it = exceptions.find(feature);
      return it == exceptions.end() ? default_label : it->second;
    }
    case ProgramKind::FullTable: {
      const auto it = table.find(feature);
      if (it == table.end())
        throw DomainError("ProgramDescription: feature missing from table");
      return it->second;
    }
    case ProgramKind::None:
      throw DomainError("ProgramDescription: no program");
  }
  throw DomainError("ProgramDescription: bad kind");
}

bool ProgramDescription::reproduces(const Dataset& d) const {
  for (const Example& e : d.examples()) {
    try {
      if (run(e.feature) != e.label) return false;
    } catch (const DomainError&) {
      return false;
    }
  }
  return true;
}

double raw_encoding_bits(const Dataset& d) {
  const double per_example =
      ceil_log2(d.space().n_features) + ceil_log2(d.space().n_labels);
  return static_cast<double>(d.size()) * per_example;
}

ComplexityReport program_complexity_proxy(const Dataset& d) {
  ComplexityReport rep;
  rep.raw_bits = raw_encoding_bits(d);

  const double feature_bits = ceil_log2(d.space().n_features);
  const double label_bits = ceil_log2(d.space().n_labels);

  const auto fn = as_function(d);
  if (!fn) {
    rep.program_bits = kInfiniteBits;
    rep.winning_program = ProgramKind::None;
    return rep;
  }

  double best_cost = kInfiniteBits;
  ProgramDescription best;

  // CONSTANT: eligible when every example carries the same label.
  {
    bool constant = true;
    const int label0 = d.at(0).label;
    for (const Example& e : d.examples()) constant &= e.label == label0;
    if (constant) {
      best_cost = kProgramTagBits + label_bits;
      best.kind = ProgramKind::Constant;
      best.default_label = label0;
    }
  }

  // MAJORITY-EXCEPTIONS: majority over the distinct-feature assignments
  // (smallest label wins count ties), exceptions for the rest.
  {
    std::vector<std::size_t> label_counts(
        static_cast<std::size_t>(d.space().n_labels), 0);
    for (const auto& [x, y] : *fn) label_counts[static_cast<std::size_t>(y)]++;
    int majority = 0;
    for (int y = 1; y < d.space().n_labels; ++y)
      if (label_counts[static_cast<std::size_t>(y)] >
          label_counts[static_cast<std::size_t>(majority)])
        majority = y;
    std::map<int, int> exceptions;
    for (const auto& [x, y] : *fn)
      if (y != majority) exceptions.emplace(x, y);
    const double cost = kProgramTagBits + label_bits +
                        static_cast<double>(exceptions.size()) *
                            (feature_bits + label_bits);
    if (cost < best_cost) {
      best_cost = cost;
      best = ProgramDescription{};
      best.kind = ProgramKind::MajorityExceptions;
      best.default_label = majority;
      best.exceptions = std::move(exceptions);
    }
  }

  // FULL-TABLE: one entry per distinct feature.
  {
    const double cost = kProgramTagBits + static_cast<double>(fn->size()) *
                                              (feature_bits + label_bits);
    if (cost < best_cost) {
      best_cost = cost;
      best = ProgramDescription{};
      best.kind = ProgramKind::FullTable;
      best.table = *fn;
    }
  }

  rep.program_bits = best_cost;
  rep.winning_program = best.kind;
  rep.program = std::move(best);
  return rep;
}

ComplexityReport dataset_complexity(const Dataset& d) {
  ComplexityReport rep = program_complexity_proxy(d);
  rep.c_d = std::min(rep.raw_bits, rep.program_bits);
  return rep;
}

ExpectedComplexity expected_dataset_complexity(const DatasetDistribution& dist,
                                               std::size_t cap,
                                               std::size_t mc_samples,
                                               std::uint64_t seed,
                                               unsigned threads) {
  ExpectedComplexity out;
  if (dist.enumerable(cap)) {
    const auto support = dist.enumerate_support(cap);
    double acc = 0.0;
    std::vector<double> values(support.datasets.size(), 0.0);
    parallel_for(support.datasets.size(), threads, [&](std::size_t i) {
      values[i] = dataset_complexity(support.datasets[i]).c_d;
    });
    for (std::size_t i = 0; i < values.size(); ++i)
      acc += support.probs[i] * values[i];
    out.value = acc;
    out.exact = true;
    return out;
  }
  if (mc_samples == 0)
    throw ValidationError(
        "expected_dataset_complexity: support too large for exact evaluation "
        "and mc_samples is 0");
  std::vector<double> values(mc_samples, 0.0);
  parallel_for(mc_samples, threads, [&](std::size_t k) {
    const Dataset d = sample_dataset(dist, derive_seed(seed, "complexity", k));
    values[k] = dataset_complexity(d).c_d;
  });
  double mean = 0.0;
  for (double v : values) mean += v;
  mean /= static_cast<double>(mc_samples);
  double var = 0.0;
  for (double v : values) var += (v - mean) * (v - mean);
  var /= static_cast<double>(mc_samples) *
         std::max<double>(1.0, static_cast<double>(mc_samples - 1));
  out.value = mean;
  out.std_error = std::sqrt(var);
  out.exact = false;
  out.samples = mc_samples;
  return out;
}

}  // namespace caplab
