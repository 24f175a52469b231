#include "fockdec/operators.hpp"

#include <bit>
#include <cmath>

namespace fockdec {

namespace {

constexpr double kHermitianCheckTol = 1e-12;

void require_mode(ModeSpace modes, int k, const char* who) {
  if (k < 0 || k >= modes.modes()) {
    throw Error(std::string(who) + ": mode index out of range");
  }
}

// Parity of the occupied modes of `mask` strictly above position `k`.
int string_sign(std::uint32_t mask, int k) {
  const std::uint32_t above = mask >> (k + 1);
  return (std::popcount(above) & 1) ? -1 : 1;
}

}  // namespace

ManyBodyOperator::ManyBodyOperator(ModeSpace modes, Eigen::MatrixXcd matrix, bool hermitian)
    : modes_(modes), mat_(std::move(matrix)), hermitian_(hermitian) {
  if (mat_.rows() != modes_.dim() || mat_.cols() != modes_.dim()) {
    throw Error("ManyBodyOperator: matrix has wrong shape");
  }
  if (hermitian_ && (mat_ - mat_.adjoint()).norm() > kHermitianCheckTol * (1.0 + mat_.norm())) {
    throw Error("ManyBodyOperator: flagged hermitian but is not");
  }
}

ManyBodyOperator ManyBodyOperator::zero(ModeSpace modes) {
  return {modes, Eigen::MatrixXcd::Zero(modes.dim(), modes.dim()), true};
}

ManyBodyOperator ManyBodyOperator::identity(ModeSpace modes) {
  return {modes, Eigen::MatrixXcd::Identity(modes.dim(), modes.dim()), true};
}

ManyBodyOperator ManyBodyOperator::adjoint() const {
  return {modes_, mat_.adjoint(), hermitian_};
}

ManyBodyOperator& ManyBodyOperator::operator+=(const ManyBodyOperator& other) {
  if (!(modes_ == other.modes_)) throw ModeMismatchError("operator sum: mode mismatch");
  mat_ += other.mat_;
  hermitian_ = hermitian_ && other.hermitian_;
  return *this;
}

ManyBodyOperator& ManyBodyOperator::operator-=(const ManyBodyOperator& other) {
  if (!(modes_ == other.modes_)) throw ModeMismatchError("operator difference: mode mismatch");
  mat_ -= other.mat_;
  hermitian_ = hermitian_ && other.hermitian_;
  return *this;
}

ManyBodyOperator& ManyBodyOperator::operator*=(Complex scale) {
  mat_ *= scale;
  hermitian_ = hermitian_ && scale.imag() == 0.0;
  return *this;
}

ManyBodyOperator operator*(const ManyBodyOperator& a, const ManyBodyOperator& b) {
  if (!(a.modes_ == b.modes_)) throw ModeMismatchError("operator product: mode mismatch");
  return {a.modes_, a.mat_ * b.mat_, false};
}

FockVector ManyBodyOperator::operator*(const FockVector& v) const {
  if (!(modes_ == v.modes())) throw ModeMismatchError("operator apply: mode mismatch");
  return {modes_, mat_ * v.amplitudes()};
}

ManyBodyOperator hopping_op(ModeSpace modes, int i, int j) {
  require_mode(modes, i, "hopping_op");
  require_mode(modes, j, "hopping_op");
  const std::uint32_t dim = modes.mask_limit();
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(dim, dim);
  const std::uint32_t bi = 1u << i;
  const std::uint32_t bj = 1u << j;
  for (std::uint32_t mask = 0; mask < dim; ++mask) {
    if (!(mask & bj)) continue;
    const std::uint32_t removed = mask & ~bj;
    if (removed & bi) continue;
    const int sign = string_sign(mask, j) * string_sign(removed, i);
    m(removed | bi, mask) = static_cast<double>(sign);
  }
  return {modes, std::move(m), i == j};
}

ManyBodyOperator number_op(ModeSpace modes, int i) { return hopping_op(modes, i, i); }

ManyBodyOperator pair_distribution(ModeSpace modes, int i, int j) {
  require_mode(modes, i, "pair_distribution");
  require_mode(modes, j, "pair_distribution");
  const std::uint32_t dim = modes.mask_limit();
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(dim, dim);
  if (i != j) {
    const std::uint32_t both = (1u << i) | (1u << j);
    for (std::uint32_t mask = 0; mask < dim; ++mask) {
      if ((mask & both) == both) m(mask, mask) = 1.0;
    }
  }
  return {modes, std::move(m), true};
}

ManyBodyOperator total_number(ModeSpace modes) {
  const std::uint32_t dim = modes.mask_limit();
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(dim, dim);
  for (std::uint32_t mask = 0; mask < dim; ++mask) {
    m(mask, mask) = static_cast<double>(std::popcount(mask));
  }
  return {modes, std::move(m), true};
}

ManyBodyOperator univalence(ModeSpace modes) {
  const std::uint32_t dim = modes.mask_limit();
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(dim, dim);
  for (std::uint32_t mask = 0; mask < dim; ++mask) {
    m(mask, mask) = static_cast<double>(std::popcount(mask) & 1);
  }
  return {modes, std::move(m), true};
}

namespace {

// Adds amp * a+_i a_j directly into a dense matrix.
void add_hopping_entries(Eigen::MatrixXcd& h, std::uint32_t dim, int i, int j, double amp) {
  const std::uint32_t bi = 1u << i;
  const std::uint32_t bj = 1u << j;
  for (std::uint32_t mask = 0; mask < dim; ++mask) {
    if (!(mask & bj)) continue;
    const std::uint32_t removed = mask & ~bj;
    if (removed & bi) continue;
    const int sign = string_sign(mask, j) * string_sign(removed, i);
    h(removed | bi, mask) += amp * sign;
  }
}

}  // namespace

ManyBodyOperator build_hubbard(const HubbardParams& params) {
  if (params.sites < 1) throw Error("build_hubbard: need at least one site");
  if (params.boundary == Boundary::Periodic && params.sites < 3) {
    throw Error("build_hubbard: periodic boundary needs at least three sites");
  }
  const ModeSpace modes(params.mode_count());
  const std::uint32_t dim = modes.mask_limit();
  Eigen::MatrixXcd h = Eigen::MatrixXcd::Zero(dim, dim);

  const int bonds = params.boundary == Boundary::Periodic ? params.sites : params.sites - 1;
  auto occupation = [&](std::uint32_t mask, int s) {
    return params.spinful
               ? ((mask >> (2 * s)) & 1u) + ((mask >> (2 * s + 1)) & 1u)
               : ((mask >> s) & 1u);
  };

  for (int b = 0; b < bonds; ++b) {
    const int s = b;
    const int sp = (b + 1) % params.sites;
    if (params.spinful) {
      for (int spin = 0; spin < 2; ++spin) {
        add_hopping_entries(h, dim, 2 * s + spin, 2 * sp + spin, -params.t);
        add_hopping_entries(h, dim, 2 * sp + spin, 2 * s + spin, -params.t);
      }
    } else {
      add_hopping_entries(h, dim, s, sp, -params.t);
      add_hopping_entries(h, dim, sp, s, -params.t);
    }
  }

  // Interactions are diagonal occupation products.
  for (std::uint32_t mask = 0; mask < dim; ++mask) {
    double diag = 0.0;
    if (params.v != 0.0) {
      for (int b = 0; b < bonds; ++b) {
        diag += params.v * occupation(mask, b) * occupation(mask, (b + 1) % params.sites);
      }
    }
    if (params.spinful && params.u != 0.0) {
      for (int s = 0; s < params.sites; ++s) {
        diag += params.u * ((mask >> (2 * s)) & 1u) * ((mask >> (2 * s + 1)) & 1u);
      }
    }
    h(mask, mask) += diag;
  }

  return {modes, std::move(h), true};
}

Complex expectation(const ManyBodyOperator& a, const FockVector& u) {
  const double n2 = u.squared_norm();
  if (n2 == 0.0) throw Error("expectation: zero-norm state");
  return u.amplitudes().dot(a.matrix() * u.amplitudes()) / n2;
}

double expectation_real(const ManyBodyOperator& a, const FockVector& u) {
  return expectation(a, u).real();
}

SpectralCache SpectralCache::build(const ManyBodyOperator& h) {
  if (!h.hermitian()) throw Error("SpectralCache: operator must be hermitian");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(h.matrix());
  if (solver.info() != Eigen::Success) throw Error("SpectralCache: eigensolver failed");
  return {solver.eigenvalues(), solver.eigenvectors()};
}

double SpectralCache::spectral_radius() const {
  return eigenvalues.size() ? eigenvalues.cwiseAbs().maxCoeff() : 0.0;
}

FockVector propagate_exact(const FockVector& psi, const SpectralCache& h, double t) {
  Eigen::VectorXcd modal = h.eigenvectors.adjoint() * psi.amplitudes();
  for (int k = 0; k < modal.size(); ++k) {
    modal[k] *= std::exp(Complex(0.0, -h.eigenvalues[k] * t));
  }
  return {psi.modes(), h.eigenvectors * modal};
}

}  // namespace fockdec
