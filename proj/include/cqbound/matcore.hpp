#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <numeric>
#include <string>
#include <vector>

#include "cqbound/errors.hpp"
#include "cqbound/tolerances.hpp"

namespace cqbound {

using Complex = std::complex<double>;

/// Hard cap on matrix dimension produced by tensor products and embeddings.
inline constexpr std::size_t kDimensionCap = 4096;

/// Dense row-major complex matrix. Dimensions stay small by design (see
/// kDimensionCap), so there is no sparsity and no blocking.
class ComplexMatrix {
 public:
  ComplexMatrix() = default;
  ComplexMatrix(std::size_t rows, std::size_t cols)
      : rows_(rows), cols_(cols), data_(rows * cols) {}

  static ComplexMatrix identity(std::size_t d) {
    ComplexMatrix m(d, d);
    for (std::size_t i = 0; i < d; ++i) m(i, i) = 1.0;
    return m;
  }

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  bool square() const { return rows_ == cols_; }

  Complex& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  const Complex& operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

  const std::vector<Complex>& data() const { return data_; }
  std::vector<Complex>& data() { return data_; }

  Complex trace() const {
    Complex t = 0.0;
    for (std::size_t i = 0; i < std::min(rows_, cols_); ++i) t += (*this)(i, i);
    return t;
  }

  ComplexMatrix adjoint() const {
    ComplexMatrix out(cols_, rows_);
    for (std::size_t i = 0; i < rows_; ++i)
      for (std::size_t j = 0; j < cols_; ++j) out(j, i) = std::conj((*this)(i, j));
    return out;
  }

  double frobenius_norm() const {
    double s = 0.0;
    for (const Complex& z : data_) s += std::norm(z);
    return std::sqrt(s);
  }

  double max_abs() const {
    double m = 0.0;
    for (const Complex& z : data_) m = std::max(m, std::abs(z));
    return m;
  }

  bool all_finite() const {
    for (const Complex& z : data_)
      if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) return false;
    return true;
  }

  ComplexMatrix& operator+=(const ComplexMatrix& o) {
    for (std::size_t k = 0; k < data_.size(); ++k) data_[k] += o.data_[k];
    return *this;
  }
  ComplexMatrix& operator-=(const ComplexMatrix& o) {
    for (std::size_t k = 0; k < data_.size(); ++k) data_[k] -= o.data_[k];
    return *this;
  }
  ComplexMatrix& operator*=(Complex a) {
    for (Complex& z : data_) z *= a;
    return *this;
  }

  friend ComplexMatrix operator+(ComplexMatrix a, const ComplexMatrix& b) { return a += b; }
  friend ComplexMatrix operator-(ComplexMatrix a, const ComplexMatrix& b) { return a -= b; }
  friend ComplexMatrix operator*(Complex a, ComplexMatrix m) { return m *= a; }

  friend ComplexMatrix operator*(const ComplexMatrix& a, const ComplexMatrix& b) {
    ComplexMatrix out(a.rows_, b.cols_);
    for (std::size_t i = 0; i < a.rows_; ++i)
      for (std::size_t k = 0; k < a.cols_; ++k) {
        const Complex aik = a(i, k);
        if (aik == 0.0) continue;
        for (std::size_t j = 0; j < b.cols_; ++j) out(i, j) += aik * b(k, j);
      }
    return out;
  }

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<Complex> data_;
};

/// Max entrywise deviation from Hermitian symmetry. Non-square counts as
/// infinitely far.
inline double hermiticity_defect(const ComplexMatrix& m) {
  if (!m.square()) return std::numeric_limits<double>::infinity();
  double dev = 0.0;
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = i; j < m.cols(); ++j)
      dev = std::max(dev, std::abs(m(i, j) - std::conj(m(j, i))));
  return dev;
}

/// Kronecker product. Entry ((i,j),(k,l)) = A(i,k) * B(j,l).
inline ComplexMatrix tensor_product(const ComplexMatrix& a, const ComplexMatrix& b,
                                    std::size_t dimension_cap = kDimensionCap) {
  const std::size_t rows = a.rows() * b.rows();
  const std::size_t cols = a.cols() * b.cols();
  if (rows > dimension_cap || cols > dimension_cap)
    throw DimensionOverflow("tensor_product: product dimension " + std::to_string(rows) + "x" +
                            std::to_string(cols) + " exceeds cap " + std::to_string(dimension_cap));
  ComplexMatrix out(rows, cols);
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t k = 0; k < a.cols(); ++k) {
      const Complex aik = a(i, k);
      if (aik == 0.0) continue;
      for (std::size_t j = 0; j < b.rows(); ++j)
        for (std::size_t l = 0; l < b.cols(); ++l)
          out(i * b.rows() + j, k * b.cols() + l) = aik * b(j, l);
    }
  return out;
}

enum class Subsystem { First, Second };

/// Partial trace of a square matrix on a bipartite space of dimension
/// dim_first * dim_second, keeping the requested subsystem.
inline ComplexMatrix partial_trace(const ComplexMatrix& m, std::size_t dim_first,
                                   std::size_t dim_second, Subsystem keep) {
  if (!m.square() || m.rows() != dim_first * dim_second)
    throw DimensionMismatch("partial_trace: matrix dim " + std::to_string(m.rows()) + "x" +
                            std::to_string(m.cols()) + " does not factor as " +
                            std::to_string(dim_first) + "*" + std::to_string(dim_second));
  if (keep == Subsystem::First) {
    ComplexMatrix out(dim_first, dim_first);
    for (std::size_t i = 0; i < dim_first; ++i)
      for (std::size_t k = 0; k < dim_first; ++k) {
        Complex s = 0.0;
        for (std::size_t j = 0; j < dim_second; ++j)
          s += m(i * dim_second + j, k * dim_second + j);
        out(i, k) = s;
      }
    return out;
  }
  ComplexMatrix out(dim_second, dim_second);
  for (std::size_t j = 0; j < dim_second; ++j)
    for (std::size_t l = 0; l < dim_second; ++l) {
      Complex s = 0.0;
      for (std::size_t i = 0; i < dim_first; ++i)
        s += m(i * dim_second + j, i * dim_second + l);
      out(j, l) = s;
    }
  return out;
}

/// Reorders tensor factors: input on H1 (x) H2, output the same operator on
/// H2 (x) H1.
inline ComplexMatrix swap_subsystems(const ComplexMatrix& m, std::size_t dim_first,
                                     std::size_t dim_second) {
  if (!m.square() || m.rows() != dim_first * dim_second)
    throw DimensionMismatch("swap_subsystems: dimension does not factor");
  ComplexMatrix out(m.rows(), m.cols());
  for (std::size_t i = 0; i < dim_first; ++i)
    for (std::size_t j = 0; j < dim_second; ++j)
      for (std::size_t k = 0; k < dim_first; ++k)
        for (std::size_t l = 0; l < dim_second; ++l)
          out(j * dim_first + i, l * dim_first + k) = m(i * dim_second + j, k * dim_second + l);
  return out;
}

/// Spectral decomposition of a Hermitian matrix. Eigenvalues sorted
/// descending; eigenvectors are unit vectors in matching order. Within a
/// degenerate cluster the vectors are an arbitrary orthonormal basis of the
/// eigenspace; consumers must only rely on spectral projectors.
struct HermitianEigensystem {
  std::vector<double> eigenvalues;
  std::vector<std::vector<Complex>> eigenvectors;
};

/// Cyclic Jacobi diagonalization for Hermitian matrices. Unconditionally
/// stable at the dimensions this library works at; capped at 100 sweeps.
inline HermitianEigensystem hermitian_eig(const ComplexMatrix& m,
                                          const Tolerances& tol = default_tolerances()) {
  if (!m.square())
    throw NotHermitian("hermitian_eig: matrix is not square (" + std::to_string(m.rows()) + "x" +
                       std::to_string(m.cols()) + ")");
  if (!m.all_finite()) throw NotHermitian("hermitian_eig: matrix has non-finite entries");
  const double defect = hermiticity_defect(m);
  if (defect > tol.hermitian)
    throw NotHermitian("hermitian_eig: |M - M^dagger| = " + std::to_string(defect) +
                       " exceeds tolerance " + std::to_string(tol.hermitian));

  const std::size_t n = m.rows();
  // Work on the exactly Hermitian part so representation dust cannot feed
  // the iteration.
  ComplexMatrix a(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    a(i, i) = 0.5 * (m(i, i) + std::conj(m(i, i)));
    for (std::size_t j = i + 1; j < n; ++j) {
      a(i, j) = 0.5 * (m(i, j) + std::conj(m(j, i)));
      a(j, i) = std::conj(a(i, j));
    }
  }
  ComplexMatrix v = ComplexMatrix::identity(n);

  const double scale = std::max(a.frobenius_norm(), 1e-300);
  const double off_target = scale * 1e-15;
  constexpr int kMaxSweeps = 100;

  bool converged = false;
  for (int sweep = 0; sweep < kMaxSweeps; ++sweep) {
    double off = 0.0;
    for (std::size_t p = 0; p < n; ++p)
      for (std::size_t q = p + 1; q < n; ++q) off += std::norm(a(p, q));
    off = std::sqrt(off);
    if (off <= off_target) {
      converged = true;
      break;
    }
    for (std::size_t p = 0; p < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        const Complex apq = a(p, q);
        const double mag = std::abs(apq);
        if (mag < 1e-300) continue;
        const Complex phase = apq / mag;  // e^{i phi}
        const double app = a(p, p).real();
        const double aqq = a(q, q).real();
        // Rotation angle zeroing the pivot of the phase-reduced real 2x2
        // block [[app, mag], [mag, aqq]].
        const double tau = (aqq - app) / (2.0 * mag);
        const double t = (tau >= 0.0 ? 1.0 : -1.0) / (std::abs(tau) + std::sqrt(tau * tau + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        // Combined unitary U = diag(1, e^{-i phi}) * [[c, s], [-s, c]] acting
        // on the (p, q) plane.
        const Complex u_pp = c;
        const Complex u_pq = s;
        const Complex u_qp = -s * std::conj(phase);
        const Complex u_qq = c * std::conj(phase);
        // A := A * U on columns p, q.
        for (std::size_t i = 0; i < n; ++i) {
          const Complex ap = a(i, p), aq = a(i, q);
          a(i, p) = ap * u_pp + aq * u_qp;
          a(i, q) = ap * u_pq + aq * u_qq;
        }
        // A := U^dagger * A on rows p, q.
        for (std::size_t j = 0; j < n; ++j) {
          const Complex ap = a(p, j), aq = a(q, j);
          a(p, j) = std::conj(u_pp) * ap + std::conj(u_qp) * aq;
          a(q, j) = std::conj(u_pq) * ap + std::conj(u_qq) * aq;
        }
        a(p, q) = 0.0;
        a(q, p) = 0.0;
        a(p, p) = a(p, p).real();
        a(q, q) = a(q, q).real();
        // V := V * U accumulates eigenvectors as columns.
        for (std::size_t i = 0; i < n; ++i) {
          const Complex vp = v(i, p), vq = v(i, q);
          v(i, p) = vp * u_pp + vq * u_qp;
          v(i, q) = vp * u_pq + vq * u_qq;
        }
      }
    }
  }
  if (!converged)
    throw NoConvergence("hermitian_eig: Jacobi iteration did not converge in 100 sweeps");

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t i, std::size_t j) { return a(i, i).real() > a(j, j).real(); });

  HermitianEigensystem sys;
  sys.eigenvalues.reserve(n);
  sys.eigenvectors.reserve(n);
  for (std::size_t r = 0; r < n; ++r) {
    const std::size_t k = order[r];
    sys.eigenvalues.push_back(a(k, k).real());
    std::vector<Complex> vec(n);
    for (std::size_t i = 0; i < n; ++i) vec[i] = v(i, k);
    sys.eigenvectors.push_back(std::move(vec));
  }
  return sys;
}

/// Rebuilds sum_i lambda_i |v_i><v_i| from an eigensystem.
inline ComplexMatrix reconstruct(const HermitianEigensystem& sys) {
  const std::size_t n = sys.eigenvectors.empty() ? 0 : sys.eigenvectors.front().size();
  ComplexMatrix out(n, n);
  for (std::size_t k = 0; k < sys.eigenvalues.size(); ++k) {
    const double lam = sys.eigenvalues[k];
    const auto& vec = sys.eigenvectors[k];
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) out(i, j) += lam * vec[i] * std::conj(vec[j]);
  }
  return out;
}

}  // namespace cqbound
