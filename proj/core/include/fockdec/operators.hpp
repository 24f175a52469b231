#pragma once

#include <Eigen/Dense>

#include "fockdec/fock.hpp"

namespace fockdec {

/// Dense many-body operator on the 2^d Fock space, bitmask basis ordering.
class ManyBodyOperator {
 public:
  ManyBodyOperator(ModeSpace modes, Eigen::MatrixXcd matrix, bool hermitian = false);

  static ManyBodyOperator zero(ModeSpace modes);
  static ManyBodyOperator identity(ModeSpace modes);

  ModeSpace modes() const noexcept { return modes_; }
  const Eigen::MatrixXcd& matrix() const noexcept { return mat_; }
  bool hermitian() const noexcept { return hermitian_; }

  ManyBodyOperator adjoint() const;
  double frobenius_norm() const { return mat_.norm(); }

  ManyBodyOperator& operator+=(const ManyBodyOperator& other);
  ManyBodyOperator& operator-=(const ManyBodyOperator& other);
  ManyBodyOperator& operator*=(Complex scale);

  friend ManyBodyOperator operator+(ManyBodyOperator a, const ManyBodyOperator& b) { return a += b; }
  friend ManyBodyOperator operator-(ManyBodyOperator a, const ManyBodyOperator& b) { return a -= b; }
  friend ManyBodyOperator operator*(Complex scale, ManyBodyOperator a) { return a *= scale; }
  friend ManyBodyOperator operator*(const ManyBodyOperator& a, const ManyBodyOperator& b);

  FockVector operator*(const FockVector& v) const;

 private:
  ModeSpace modes_;
  Eigen::MatrixXcd mat_;
  bool hermitian_;
};

/// a^dag_i a_j with the fermionic string sign that matches the descending
/// mode ordering of the Fock basis. hopping_op(i, i) is the number operator.
ManyBodyOperator hopping_op(ModeSpace modes, int i, int j);
ManyBodyOperator number_op(ModeSpace modes, int i);

/// P_ij = N_i N_j - delta_ij N_i; diagonal in the Fock basis.
ManyBodyOperator pair_distribution(ModeSpace modes, int i, int j);

/// Total particle number, diagonal with popcount entries.
ManyBodyOperator total_number(ModeSpace modes);

/// Particle number modulo 2, diagonal with entries in {0, 1}.
ManyBodyOperator univalence(ModeSpace modes);

enum class Boundary { Open, Periodic };

/// One-dimensional extended Hubbard chain. Spinless: d = sites, hopping t and
/// nearest-neighbor V. Spinful: d = 2 * sites with mode 2s spin-up and mode
/// 2s+1 spin-down on site s; adds on-site U.
struct HubbardParams {
  int sites = 2;
  bool spinful = false;
  double t = 1.0;
  double u = 0.0;  // on-site, spinful only
  double v = 0.0;  // nearest neighbor
  Boundary boundary = Boundary::Open;

  int mode_count() const { return spinful ? 2 * sites : sites; }
};

ManyBodyOperator build_hubbard(const HubbardParams& params);

/// <u|A|u> / <u|u>. Throws on a zero-norm state.
Complex expectation(const ManyBodyOperator& a, const FockVector& u);

/// Real part of the expectation; intended for hermitian observables.
double expectation_real(const ManyBodyOperator& a, const FockVector& u);

/// Eigendecomposition of a hermitian operator, for exact propagation.
struct SpectralCache {
  Eigen::VectorXd eigenvalues;
  Eigen::MatrixXcd eigenvectors;

  static SpectralCache build(const ManyBodyOperator& h);

  /// Largest |eigenvalue|; the natural scale for degeneracy guards.
  double spectral_radius() const;
};

/// exp(-i H t) |psi> through the spectral decomposition. Unitary to roundoff.
FockVector propagate_exact(const FockVector& psi, const SpectralCache& h, double t);

}  // namespace fockdec
