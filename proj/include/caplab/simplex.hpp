#pragma once
// Exact discrete probability primitives: simplex vectors, joint
// distributions, entropy, KL divergence and (pointwise) mutual information.
//
// Conventions:
//   * every quantity is in bits (log base 2);
//   * 0 * log 0 contributes 0 by continuity;
//   * KL returns +infinity when absolute continuity fails (q_i = 0 < p_i);
//   * pointwise mutual information returns -infinity for zero joint cells.

#include <cstddef>
#include <optional>
#include <vector>

#include "caplab/common.hpp"

namespace caplab {

/// A probability vector over a finite alphabet. Entries are validated
/// non-negative and renormalized exactly when the sum is within kSimplexTol
/// of 1; anything further off is rejected.
class SimplexVector {
 public:
  explicit SimplexVector(std::vector<double> probs);

  static SimplexVector uniform(std::size_t dim);
  static SimplexVector point_mass(std::size_t dim, std::size_t index);

  std::size_t dim() const { return p_.size(); }
  double operator[](std::size_t i) const { return p_[i]; }
  const std::vector<double>& probs() const { return p_; }

  bool operator==(const SimplexVector& other) const { return p_ == other.p_; }

 private:
  std::vector<double> p_;
};

bool approx_equal(const SimplexVector& a, const SimplexVector& b, double tol);

/// A joint distribution over (row alphabet) x (column alphabet), stored as a
/// dense row-major mass matrix with its two marginals. Throughout the
/// library rows index datasets and columns index hypotheses.
class JointDistribution {
 public:
  /// Validates mass >= 0 and total within kSimplexTol of 1, renormalizes
  /// exactly, then computes the marginals by summation.
  JointDistribution(std::size_t n_rows, std::size_t n_cols,
                    std::vector<double> mass);

  /// Same, but also checks the supplied marginals against the computed ones
  /// (entrywise within kSimplexTol).
  JointDistribution(std::size_t n_rows, std::size_t n_cols,
                    std::vector<double> mass, const SimplexVector& row_marginal,
                    const SimplexVector& col_marginal);

  /// Joint induced by an input distribution and a conditional row per input:
  /// mass(d, g) = input_probs[d] * rows[d][g].
  static JointDistribution from_channel(const std::vector<SimplexVector>& rows,
                                        const SimplexVector& input_probs);

  std::size_t n_rows() const { return n_rows_; }
  std::size_t n_cols() const { return n_cols_; }
  double mass(std::size_t r, std::size_t c) const {
    return mass_[r * n_cols_ + c];
  }
  const SimplexVector& row_marginal() const { return row_marginal_; }
  const SimplexVector& col_marginal() const { return col_marginal_; }

  /// Conditional distribution over columns given row r. DomainError when the
  /// row marginal is zero.
  SimplexVector conditional_row(std::size_t r) const;

 private:
  JointDistribution() = default;
  std::size_t n_rows_ = 0, n_cols_ = 0;
  std::vector<double> mass_;
  SimplexVector row_marginal_{std::vector<double>{1.0}};
  SimplexVector col_marginal_{std::vector<double>{1.0}};
};

/// Shannon entropy in bits; 0 <= H(p) <= log2(dim).
double entropy(const SimplexVector& p);

/// KL divergence in bits; +infinity when q has a zero where p has mass.
/// DimensionError-style mismatches raise ValidationError.
double kl_divergence(const SimplexVector& p, const SimplexVector& q);

/// Mutual information of a joint, in bits.
double mutual_information(const JointDistribution& joint);

/// log2 [ p(r, c) / (p(r) p(c)) ]. -infinity when the cell mass is zero;
/// DomainError when either marginal is zero.
double pointwise_mi(const JointDistribution& joint, std::size_t r,
                    std::size_t c);

}  // namespace caplab
