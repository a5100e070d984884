#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstring>
#include <limits>
#include <vector>

#include <Eigen/Sparse>
#include <Eigen/SparseLU>

#include "chemochip/errors.hpp"
#include "chemochip/relation.hpp"

namespace chemochip {

using SparseMatrix = Eigen::SparseMatrix<double, Eigen::ColMajor, int>;

namespace detail {
inline bool same_pattern(const SparseMatrix& a, const SparseMatrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols() || a.nonZeros() != b.nonZeros()) return false;
  return std::equal(a.outerIndexPtr(), a.outerIndexPtr() + a.outerSize() + 1, b.outerIndexPtr()) &&
         std::equal(a.innerIndexPtr(), a.innerIndexPtr() + a.nonZeros(), b.innerIndexPtr());
}
inline bool same_values(const SparseMatrix& a, const SparseMatrix& b) {
  return std::equal(a.valuePtr(), a.valuePtr() + a.nonZeros(), b.valuePtr());
}
inline double max_abs(const Eigen::VectorXd& v) {
  return v.size() == 0 ? 0.0 : v.lpNorm<Eigen::Infinity>();
}
inline bool is_identity(const SparseMatrix& a) {
  if (a.nonZeros() != a.rows()) return false;
  for (int c = 0; c < a.outerSize(); ++c)
    for (SparseMatrix::InnerIterator it(a, c); it; ++it)
      if (it.row() != c || it.value() != 1.0) return false;
  return true;
}
}  // namespace detail

/// Sparse LU that keeps its factorization between calls. A matrix identical to the
/// factored one reuses it outright; a matrix with the same pattern and nearby values
/// is solved by defect correction preconditioned with the old factors, and
/// refactored only when that stops contracting.
class CachedSparseSolver {
 public:
  Eigen::VectorXd solve(const SparseMatrix& A, const Eigen::VectorXd& b) {
    if (detail::is_identity(A)) return b;
    if (!ready_ || !detail::same_pattern(A, factored_)) {
      factor(A, true);
      return lu_.solve(b);
    }
    if (detail::same_values(A, factored_)) return lu_.solve(b);

    Eigen::VectorXd x = lu_.solve(b);
    double prev = std::numeric_limits<double>::infinity();
    for (int k = 0; k < max_corrections; ++k) {
      Eigen::VectorXd r = b - A * x;
      Eigen::VectorXd dx = lu_.solve(r);
      x += dx;
      const double step = detail::max_abs(dx);
      const double scale = std::max(detail::max_abs(x), std::numeric_limits<double>::min());
      if (step <= 4.0 * std::numeric_limits<double>::epsilon() * scale) return x;
      if (step > 0.25 * prev) break;
      prev = step;
    }
    factor(A, false);
    return lu_.solve(b);
  }

  std::size_t factorizations() const { return factorizations_; }

  static constexpr int max_corrections = 8;

 private:
  void factor(const SparseMatrix& A, bool new_pattern) {
    if (new_pattern) lu_.analyzePattern(A);
    lu_.factorize(A);
    if (lu_.info() != Eigen::Success) throw SolverError("sparse factorization failed", {});
    factored_ = A;
    ready_ = true;
    ++factorizations_;
  }

  Eigen::SparseLU<SparseMatrix, Eigen::COLAMDOrdering<int>> lu_;
  SparseMatrix factored_;
  bool ready_ = false;
  std::size_t factorizations_ = 0;
};

/// Assembles and solves a relation set over n unknowns in one go.
template <class Emit>
inline std::vector<double> solve_relations(std::size_t n, Emit&& emit) {
  MatrixSink s(n);
  emit(s);
  std::vector<Eigen::Triplet<double, int>> t;
  for (const Entry& e : s.entries())
    t.emplace_back(static_cast<int>(e.row), static_cast<int>(e.col), e.value);
  SparseMatrix A(static_cast<int>(n), static_cast<int>(n));
  A.setFromTriplets(t.begin(), t.end());
  A.makeCompressed();
  Eigen::SparseLU<SparseMatrix, Eigen::COLAMDOrdering<int>> lu;
  lu.compute(A);
  if (lu.info() != Eigen::Success) throw SolverError("sparse factorization failed", {});
  Eigen::Map<const Eigen::VectorXd> b(s.rhs().data(), static_cast<Eigen::Index>(n));
  Eigen::VectorXd x = lu.solve(b);
  return {x.data(), x.data() + x.size()};
}

}  // namespace chemochip
