#include "caplab/simplex.hpp"

#include <cmath>
#include <cstdlib>
#include <numeric>
#include <string>

namespace caplab {
namespace {

// Entries this slightly negative are treated as floating-point noise.
constexpr double kNegNoise = -1e-12;

void normalize_or_throw(std::vector<double>& v, double expected_total,
                        const char* what) {
  double sum = 0.0;
  for (double& x : v) {
    if (x < 0.0) {
      if (x < kNegNoise) {
        throw ValidationError(std::string(what) + ": negative entry " +
                              std::to_string(x));
      }
      x = 0.0;
    }
    sum += x;
  }
  if (std::abs(sum - expected_total) > kSimplexTol) {
    throw ValidationError(std::string(what) + ": mass sums to " +
                          std::to_string(sum));
  }
  for (double& x : v) x /= sum;
}

}  // namespace

SimplexVector::SimplexVector(std::vector<double> probs) : p_(std::move(probs)) {
  if (p_.empty()) throw ValidationError("SimplexVector: empty vector");
  normalize_or_throw(p_, 1.0, "SimplexVector");
}

SimplexVector SimplexVector::uniform(std::size_t dim) {
  if (dim == 0) throw ValidationError("SimplexVector::uniform: dim 0");
  return SimplexVector(std::vector<double>(dim, 1.0 / static_cast<double>(dim)));
}

SimplexVector SimplexVector::point_mass(std::size_t dim, std::size_t index) {
  if (dim == 0 || index >= dim)
    throw ValidationError("SimplexVector::point_mass: index out of range");
  std::vector<double> v(dim, 0.0);
  v[index] = 1.0;
  return SimplexVector(std::move(v));
}

bool approx_equal(const SimplexVector& a, const SimplexVector& b, double tol) {
  if (a.dim() != b.dim()) return false;
  for (std::size_t i = 0; i < a.dim(); ++i)
    if (std::abs(a[i] - b[i]) > tol) return false;
  return true;
}

JointDistribution::JointDistribution(std::size_t n_rows, std::size_t n_cols,
                                     std::vector<double> mass)
    : n_rows_(n_rows), n_cols_(n_cols), mass_(std::move(mass)) {
  if (n_rows_ == 0 || n_cols_ == 0)
    throw ValidationError("JointDistribution: empty shape");
  if (mass_.size() != n_rows_ * n_cols_)
    throw ValidationError("JointDistribution: mass size does not match shape");
  normalize_or_throw(mass_, 1.0, "JointDistribution");

  std::vector<double> rm(n_rows_, 0.0), cm(n_cols_, 0.0);
  for (std::size_t r = 0; r < n_rows_; ++r)
    for (std::size_t c = 0; c < n_cols_; ++c) {
      const double m = mass_[r * n_cols_ + c];
      rm[r] += m;
      cm[c] += m;
    }
  row_marginal_ = SimplexVector(std::move(rm));
  col_marginal_ = SimplexVector(std::move(cm));
}

JointDistribution::JointDistribution(std::size_t n_rows, std::size_t n_cols,
                                     std::vector<double> mass,
                                     const SimplexVector& row_marginal,
                                     const SimplexVector& col_marginal)
    : JointDistribution(n_rows, n_cols, std::move(mass)) {
  if (row_marginal.dim() != n_rows_ || col_marginal.dim() != n_cols_)
    throw ValidationError("JointDistribution: marginal dimension mismatch");
  if (!approx_equal(row_marginal_, row_marginal, kSimplexTol) ||
      !approx_equal(col_marginal_, col_marginal, kSimplexTol))
    throw ValidationError(
        "JointDistribution: supplied marginals do not match the mass matrix");
}

JointDistribution JointDistribution::from_channel(
    const std::vector<SimplexVector>& rows, const SimplexVector& input_probs) {
  if (rows.empty()) throw ValidationError("from_channel: no rows");
  if (input_probs.dim() != rows.size())
    throw ValidationError("from_channel: input_probs dimension mismatch");
  const std::size_t n_cols = rows.front().dim();
  std::vector<double> mass(rows.size() * n_cols, 0.0);
  for (std::size_t r = 0; r < rows.size(); ++r) {
    if (rows[r].dim() != n_cols)
      throw ValidationError("from_channel: ragged rows");
    for (std::size_t c = 0; c < n_cols; ++c)
      mass[r * n_cols + c] = input_probs[r] * rows[r][c];
  }
  return JointDistribution(rows.size(), n_cols, std::move(mass));
}

SimplexVector JointDistribution::conditional_row(std::size_t r) const {
  const double pr = row_marginal_[r];
  if (pr <= 0.0)
    throw DomainError("conditional_row: zero-probability row " +
                      std::to_string(r));
  std::vector<double> v(n_cols_);
  for (std::size_t c = 0; c < n_cols_; ++c) v[c] = mass(r, c) / pr;
  return SimplexVector(std::move(v));
}

double entropy(const SimplexVector& p) {
  double h = 0.0;
  for (std::size_t i = 0; i < p.dim(); ++i) {
    const double x = p[i];
    if (x > 0.0) h -= x * std::log2(x);
  }
  return h < 0.0 ? 0.0 : h;  // -0.0 guard; each term is >= 0 analytically
}

double kl_divergence(const SimplexVector& p, const SimplexVector& q) {
  if (p.dim() != q.dim())
    throw ValidationError("kl_divergence: dimension mismatch");
  double d = 0.0;
  for (std::size_t i = 0; i < p.dim(); ++i) {
    const double pi = p[i];
    if (pi <= 0.0) continue;
    if (q[i] <= 0.0) return kInfiniteBits;
    d += pi * std::log2(pi / q[i]);
  }
  return d;
}

double mutual_information(const JointDistribution& joint) {
  const SimplexVector& rm = joint.row_marginal();
  const SimplexVector& cm = joint.col_marginal();
  double info = 0.0;
  for (std::size_t r = 0; r < joint.n_rows(); ++r) {
    if (rm[r] <= 0.0) continue;
    for (std::size_t c = 0; c < joint.n_cols(); ++c) {
      const double m = joint.mass(r, c);
      if (m > 0.0) info += m * std::log2(m / (rm[r] * cm[c]));
    }
  }
  // Mutual information is non-negative; clamp accumulated rounding noise.
  return info < 0.0 ? 0.0 : info;
}

double pointwise_mi(const JointDistribution& joint, std::size_t r,
                    std::size_t c) {
  const double pr = joint.row_marginal()[r];
  const double pc = joint.col_marginal()[c];
  if (pr <= 0.0 || pc <= 0.0)
    throw DomainError("pointwise_mi: zero marginal");
  const double m = joint.mass(r, c);
  if (m <= 0.0) return kNegativeInfiniteBits;
  return std::log2(m / (pr * pc));
}

}  // namespace caplab
