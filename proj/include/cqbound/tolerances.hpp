#pragma once

namespace cqbound {

/// Numerical tolerances shared across the library. Every validation gate and
/// certifier reads from one of these records, so a caller can tighten or
/// loosen the whole pipeline in one place.
struct Tolerances {
  /// Max entrywise |M - M^dagger| for a matrix to count as Hermitian.
  double hermitian = 1e-9;
  /// Pairwise orthonormality of eigenvector / channel bases.
  double orthonormal = 1e-10;
  /// Frobenius error allowed when rebuilding a matrix from its eigensystem.
  double reconstruction = 1e-9;
  /// Eigenvalue dust below zero that still counts as positive semidefinite.
  /// Values in [-psd, 0) are clamped to 0 by consumers; anything more
  /// negative is an error.
  double psd = 1e-9;
  /// |Tr - 1| allowed for density operators.
  double unit_trace = 1e-9;
  /// |sum(w) - 1| allowed for probability vectors.
  double distribution_sum = 1e-10;
  /// Off-block mass allowed when reading a block-diagonal operator back
  /// into classical-quantum form.
  double off_block = 1e-9;
  /// Squared overlap below which an eigenvector pair is treated as
  /// orthogonal when deciding support inclusion in relative entropy.
  double support_overlap = 1e-12;
  /// Slack before a continuity bound counts as violated.
  double bound_margin = 1e-8;
  /// Frobenius error allowed when rebuilding a state from a pure-state
  /// decomposition witness.
  double decomposition = 1e-8;
  /// |achieved - requested| trace distance in pair construction.
  double distance_target = 1e-8;
};

inline const Tolerances& default_tolerances() {
  static const Tolerances tol{};
  return tol;
}

}  // namespace cqbound
