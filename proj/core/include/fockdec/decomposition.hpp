#pragma once

#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "fockdec/fock.hpp"
#include "fockdec/operators.hpp"

namespace fockdec {

/// An m-subsystem product decomposition of a Fock-space state.
///
/// Subsystem 0 is the one subsystem that need not be invertible; it is solved
/// from the total state rather than varied. Subsystems 1..m-1 are stored as
/// exponents X_k with creators U_k = exp(X_k), which keeps them invertible no
/// matter how the exponents move. The product order is an explicit
/// permutation: the total creator is the product of the subsystem creators at
/// positions 0..m-1 of `order`.
class Decomposition {
 public:
  Decomposition(ModeSpace modes, int subsystem_count);

  ModeSpace modes() const noexcept { return modes_; }
  int subsystem_count() const noexcept { return m_; }

  /// order[p] = subsystem sitting at product position p; subsystem 0 is the
  /// solved one. Default is the identity with subsystem 0 first.
  const std::vector<int>& order() const noexcept { return order_; }
  void set_order(std::vector<int> order);

  /// Product position of the solved subsystem.
  int solved_position() const;

  /// Exponent X_k, k in 1..m-1.
  const FockVector& exponent(int k) const;
  void set_exponent(int k, FockVector x);

  /// Creator of subsystem k: exp(X_k) for k >= 1, the solved factor for k = 0.
  const FockVector& creator(int k) const;

  bool has_v() const noexcept { return v_.has_value(); }
  const FockVector& v() const;
  void set_v(FockVector v);

  /// Product of all subsystem creators in permutation order.
  FockVector compose() const;

  /// Relative distance between compose() and psi.
  double compose_residual(const FockVector& psi) const;

 private:
  ModeSpace modes_;
  int m_;
  std::vector<FockVector> exponents_;  // index k-1 holds X_k
  std::vector<FockVector> creators_;   // index k-1 holds exp(X_k)
  std::vector<int> order_;
  std::optional<FockVector> v_;
};

/// Solves the non-invertible factor from the total state: inverse prefix
/// creators, then psi, then inverse suffix creators, multiplied in order.
FockVector solve_v(const FockVector& psi, const Decomposition& dec);

/// The solve_v product with the total-state slot replaced by x; linear in x.
FockVector v_functional_psi(const Decomposition& dec, const FockVector& x);

/// The solve_v product with the U_k^-1 slot replaced by y (k >= 1); linear
/// in y. v_functional(dec, k, inverse of U_k) recovers solve_v.
FockVector v_functional(const Decomposition& dec, int k, const FockVector& y);

/// First-order response frame of a decomposition.
///
/// The exponent basis {e_ki} is the set of non-vacuum Fock basis states
/// (the vacuum component of an exponent only rescales the subsystem, and
/// excluding it keeps the metric below positive definite). Column i-1 of
/// f[k-1] holds f_ki = {e_i, U_k}; column i-1 of g[k-1] holds
/// g_ki = -Vtilde_k[{e_i, U_k^-1}], the first-order response of the solved
/// subsystem to a change of exponent k along e_i.
struct TangentFrame {
  explicit TangentFrame(ModeSpace mode_space) : modes(mode_space) {}

  ModeSpace modes;
  int m = 0;
  std::vector<Eigen::MatrixXcd> f;
  std::vector<Eigen::MatrixXcd> g;
  std::vector<double> weights;  // 1 / <u_k|u_k> for k = 0..m-1

  int basis_size() const { return modes.dim() - 1; }
  int coefficient_count() const { return (m - 1) * basis_size(); }
  int index(int k, std::uint32_t mask) const {
    return (k - 1) * basis_size() + static_cast<int>(mask) - 1;
  }
};

TangentFrame tangent_frame(const Decomposition& dec);

/// Subsystem change generated by given exponent coefficients: sum of
/// delta_x[(k,i)] * f_ki for one k.
FockVector frame_delta_u(const TangentFrame& frame, int k, const Eigen::VectorXcd& delta_x);

/// First-order change of the solved subsystem under a total-state change and
/// exponent coefficient changes: v_functional_psi(dec, delta_psi) plus the
/// g-weighted coefficient sum.
FockVector delta_v(const Decomposition& dec, const TangentFrame& frame,
                   const FockVector& delta_psi, const Eigen::VectorXcd& delta_x);

/// Expectation table: rows = subsystems 0..m-1, columns = observables.
Eigen::MatrixXd beables(const Decomposition& dec,
                        const std::vector<ManyBodyOperator>& observables);

/// Multiplies every amplitude of every subsystem (including the solved one)
/// by exp(i * particle_number * phi). The total state picks up the same
/// transformation; all beables are unchanged.
Decomposition apply_phase(const Decomposition& dec, double phi);

/// exp(i * N * phi) applied to a single state.
FockVector apply_number_phase(const FockVector& u, double phi);

}  // namespace fockdec
