#pragma once
// Dataset complexity: a raw positional encoding bound and a small reference
// program family, combined as c_d = min(program_bits, raw_bits).
//
// Reference machine: a program reproduces a dataset when it maps every
// feature occurring in the dataset to that feature's label (so datasets that
// are not functions - same feature, conflicting labels - have no reproducing
// program and program_bits is +infinity). Program family, cheapest first:
//   CONSTANT            tag + label_bits
//   MAJORITY-EXCEPTIONS tag + label_bits + n_exceptions * (feature_bits + label_bits)
//   FULL-TABLE          tag + n_distinct_features * (feature_bits + label_bits)
// with tag = 2 bits, feature_bits = ceil(log2 |X|), label_bits = ceil(log2 |Y|).

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "caplab/common.hpp"
#include "caplab/problem.hpp"

namespace caplab {

inline constexpr double kProgramTagBits = 2.0;

enum class ProgramKind { Constant, MajorityExceptions, FullTable, None };

const char* to_string(ProgramKind kind);

/// The winning reference program in executable form (for reproduction checks).
struct ProgramDescription {
  ProgramKind kind = ProgramKind::None;
  int default_label = 0;                 // Constant / MajorityExceptions
  std::map<int, int> exceptions;         // feature -> label
  std::map<int, int> table;              // FullTable entries

  /// Label the program outputs for a feature.
  int run(int feature) const;
  /// True when the program reproduces every example of `d`.
  bool reproduces(const Dataset& d) const;
};

struct ComplexityReport {
  double raw_bits = 0.0;
  double program_bits = kInfiniteBits;  // +infinity when no program reproduces d
  double c_d = 0.0;                     // min(raw_bits, program_bits)
  ProgramKind winning_program = ProgramKind::None;
  std::optional<ProgramDescription> program;
};

/// n * (ceil(log2 |X|) + ceil(log2 |Y|)).
double raw_encoding_bits(const Dataset& d);

/// Cheapest reproducing program cost over the family above; ties resolve to
/// the earlier family member. +infinity when the dataset is not a function.
ComplexityReport program_complexity_proxy(const Dataset& d);

/// Full report with c_d = min(raw, program).
ComplexityReport dataset_complexity(const Dataset& d);

struct ExpectedComplexity {
  double value = 0.0;
  double std_error = 0.0;  // 0 for exact evaluation
  bool exact = false;
  std::size_t samples = 0;  // 0 for exact evaluation
};

/// E_D[c_d]: exact support-weighted sum when the support enumerates under
/// `cap`, otherwise a Monte Carlo mean over `mc_samples` draws with
/// seed_k = derive_seed(seed, "complexity", k).
ExpectedComplexity expected_dataset_complexity(
    const DatasetDistribution& dist, std::size_t cap = kDefaultEnumerationCap,
    std::size_t mc_samples = 10000, std::uint64_t seed = 0,
    unsigned threads = 1);

}  // namespace caplab
