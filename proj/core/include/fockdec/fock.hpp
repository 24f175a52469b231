#pragma once

#include <complex>
#include <cstdint>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "fockdec/errors.hpp"

namespace fockdec {

using Complex = std::complex<double>;

/// A set of d single-fermion modes. The Fock space built on it has dimension
/// 2^d and is indexed by occupation bitmasks: bit k set means mode k occupied.
class ModeSpace {
 public:
  static constexpr int kMaxModes = 16;

  explicit ModeSpace(int modes);

  int modes() const noexcept { return modes_; }
  int dim() const noexcept { return 1 << modes_; }
  std::uint32_t mask_limit() const noexcept { return static_cast<std::uint32_t>(dim()); }

  friend bool operator==(const ModeSpace&, const ModeSpace&) = default;

 private:
  int modes_;
};

/// A vector in fermionic Fock space, stored as a dense table of 2^d complex
/// amplitudes in plain bitmask order.
///
/// The same data doubles as the creator of the state: the operator that
/// produces the state from the vacuum under the graded product. Basis
/// convention: |f_i> is the product of the occupied single-mode states taken
/// in descending mode index, e.g. for d = 4, f_5 = e_2 * e_0.
class FockVector {
 public:
  explicit FockVector(ModeSpace modes)
      : modes_(modes), amp_(Eigen::VectorXcd::Zero(modes.dim())) {}

  FockVector(ModeSpace modes, Eigen::VectorXcd amplitudes);

  /// The multiplicative identity of the creator algebra: amplitude 1 on the
  /// vacuum, 0 elsewhere.
  static FockVector vacuum_unit(ModeSpace modes);

  /// Basis state |f_mask>.
  static FockVector basis_state(ModeSpace modes, std::uint32_t mask);

  /// Single occupied mode |e_k>.
  static FockVector single_mode(ModeSpace modes, int k);

  ModeSpace modes() const noexcept { return modes_; }
  int dim() const noexcept { return modes_.dim(); }

  const Eigen::VectorXcd& amplitudes() const noexcept { return amp_; }
  Eigen::VectorXcd& amplitudes() noexcept { return amp_; }

  Complex operator[](std::uint32_t mask) const { return amp_[mask]; }
  Complex& operator[](std::uint32_t mask) { return amp_[mask]; }

  Complex vacuum_amplitude() const { return amp_[0]; }

  double squared_norm() const { return amp_.squaredNorm(); }
  double norm() const { return amp_.norm(); }

  /// Largest amplitude magnitude; the reference scale for relative tolerances.
  double max_abs() const { return amp_.size() ? amp_.cwiseAbs().maxCoeff() : 0.0; }

  FockVector normalized() const;

  FockVector& operator+=(const FockVector& other);
  FockVector& operator-=(const FockVector& other);
  FockVector& operator*=(Complex scale);

  friend FockVector operator+(FockVector a, const FockVector& b) { return a += b; }
  friend FockVector operator-(FockVector a, const FockVector& b) { return a -= b; }
  friend FockVector operator*(Complex scale, FockVector a) { return a *= scale; }
  friend FockVector operator*(FockVector a, Complex scale) { return a *= scale; }
  friend FockVector operator-(FockVector a) { return a *= Complex(-1.0); }

 private:
  ModeSpace modes_;
  Eigen::VectorXcd amp_;
};

/// Relative vacuum-amplitude threshold below which a creator is treated as
/// non-invertible. Relative to the largest amplitude, so rescaling a creator
/// never changes its invertibility.
inline constexpr double kInvertibilityTolerance = 1e-12;

/// Sign picked up when the descending-ordered mode lists of two disjoint
/// occupation masks are merged into one descending list. Equals the parity of
/// the number of cross pairs (a in left, b in right) with a < b; each such
/// pair costs one fermionic transposition.
int merge_sign(std::uint32_t left, std::uint32_t right) noexcept;

/// Graded product of two Fock vectors (the algebra of their creators):
/// out[i|j] accumulates merge_sign(i,j) * a_i * b_j over disjoint mask pairs.
/// Bilinear, associative, and graded-commutative: for pure p- and q-particle
/// inputs, a*b = (-1)^{pq} b*a.
FockVector psi_product(const FockVector& a, const FockVector& b);

/// Splits a vector into its even- and odd-particle-number parts.
std::pair<FockVector, FockVector> even_odd_split(const FockVector& a);
FockVector even_part(const FockVector& a);
FockVector odd_part(const FockVector& a);

/// {a, b} = (ab + ba) / 2 in the creator algebra.
FockVector symmetrized_product(const FockVector& a, const FockVector& b);

/// [a, b] = ab - ba; equals 2 * odd(a) * odd(b), so it vanishes whenever
/// either factor is even.
FockVector creator_commutator(const FockVector& a, const FockVector& b);

/// exp(X) evaluated with graded-product powers. The series terminates after
/// ceil(d/2) powers of the vacuum-free part, which is nilpotent, so the
/// result is exact.
FockVector creator_exp(const FockVector& x);

/// ln(U) for an invertible creator; principal branch for the scalar part.
/// Trajectories that wind the vacuum phase can jump by 2*pi*i in the scalar
/// part; compare exponentials, not logarithms, when that matters.
/// Throws NonInvertibleError when the vacuum amplitude is relatively tiny.
FockVector creator_log(const FockVector& u);

/// U^-1 via the terminating geometric series in Z = U/c0 - 1.
/// Throws NonInvertibleError when the vacuum amplitude is relatively tiny.
FockVector creator_inverse(const FockVector& u);

bool is_invertible(const FockVector& u) noexcept;

/// Conjugate-linear in the first argument, sum over the Fock basis.
Complex inner_product(const FockVector& a, const FockVector& b);

/// Occupation masks sorted by particle number, then by value. Creator
/// matrices are lower triangular in this ordering.
std::vector<std::uint32_t> graded_order(ModeSpace modes);

/// Matrix of a creator in the graded-ordered Fock basis. Lower triangular
/// with every diagonal entry equal to the vacuum amplitude.
struct CreatorMatrix {
  Eigen::MatrixXcd entries;               // graded-ordered, lower triangular
  std::vector<std::uint32_t> basis;       // basis[row] = occupation mask
};

CreatorMatrix creator_matrix(const FockVector& u);

/// Amplitudes of the state sitting in column 0 of a graded-ordered matrix.
FockVector state_from_graded_column(ModeSpace modes, const Eigen::MatrixXcd& m,
                                    const std::vector<std::uint32_t>& basis);

namespace detail {
/// Number of terms after which powers of a vacuum-free creator vanish.
inline int nilpotency_order(ModeSpace modes) { return (modes.modes() + 1) / 2; }
void require_same_modes(const FockVector& a, const FockVector& b);
}  // namespace detail

}  // namespace fockdec
