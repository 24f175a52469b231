#include "fockdec/fock.hpp"

#include <algorithm>
#include <bit>
#include <cmath>

namespace fockdec {

ModeSpace::ModeSpace(int modes) : modes_(modes) {
  if (modes < 1 || modes > kMaxModes) {
    throw Error("ModeSpace: mode count must be between 1 and 16, got " +
                std::to_string(modes));
  }
}

FockVector::FockVector(ModeSpace modes, Eigen::VectorXcd amplitudes)
    : modes_(modes), amp_(std::move(amplitudes)) {
  if (amp_.size() != modes_.dim()) {
    throw Error("FockVector: amplitude table has wrong size");
  }
}

FockVector FockVector::vacuum_unit(ModeSpace modes) {
  FockVector v(modes);
  v.amp_[0] = 1.0;
  return v;
}

FockVector FockVector::basis_state(ModeSpace modes, std::uint32_t mask) {
  if (mask >= modes.mask_limit()) throw Error("basis_state: mask out of range");
  FockVector v(modes);
  v.amp_[mask] = 1.0;
  return v;
}

FockVector FockVector::single_mode(ModeSpace modes, int k) {
  if (k < 0 || k >= modes.modes()) throw Error("single_mode: mode out of range");
  return basis_state(modes, 1u << k);
}

FockVector FockVector::normalized() const {
  const double n = norm();
  if (n == 0.0) throw Error("normalize: zero vector");
  FockVector out = *this;
  out.amp_ /= n;
  return out;
}

FockVector& FockVector::operator+=(const FockVector& other) {
  detail::require_same_modes(*this, other);
  amp_ += other.amp_;
  return *this;
}

FockVector& FockVector::operator-=(const FockVector& other) {
  detail::require_same_modes(*this, other);
  amp_ -= other.amp_;
  return *this;
}

FockVector& FockVector::operator*=(Complex scale) {
  amp_ *= scale;
  return *this;
}

void detail::require_same_modes(const FockVector& a, const FockVector& b) {
  if (!(a.modes() == b.modes())) {
    throw ModeMismatchError("operands live on different mode spaces");
  }
}

int merge_sign(std::uint32_t left, std::uint32_t right) noexcept {
  // Count pairs (a in left, b in right) with a < b.
  int crossings = 0;
  std::uint32_t rest = right;
  while (rest != 0) {
    const std::uint32_t low = rest & (~rest + 1u);
    crossings += std::popcount(left & (low - 1u));
    rest &= rest - 1u;
  }
  return (crossings & 1) ? -1 : 1;
}

FockVector psi_product(const FockVector& a, const FockVector& b) {
  detail::require_same_modes(a, b);
  const std::uint32_t dim = a.modes().mask_limit();
  FockVector out(a.modes());
  const Complex* pa = a.amplitudes().data();
  const Complex* pb = b.amplitudes().data();
  Complex* po = out.amplitudes().data();
  for (std::uint32_t s = 0; s < dim; ++s) {
    Complex acc(0.0, 0.0);
    // All splittings of s into a disjoint (left, right) pair of submasks.
    std::uint32_t left = s;
    while (true) {
      const std::uint32_t right = s ^ left;
      const Complex av = pa[left];
      if (av != Complex(0.0, 0.0)) {
        const Complex bv = pb[right];
        if (bv != Complex(0.0, 0.0)) {
          acc += static_cast<double>(merge_sign(left, right)) * av * bv;
        }
      }
      if (left == 0) break;
      left = (left - 1u) & s;
    }
    po[s] = acc;
  }
  return out;
}

std::pair<FockVector, FockVector> even_odd_split(const FockVector& a) {
  FockVector even(a.modes());
  FockVector odd(a.modes());
  const std::uint32_t dim = a.modes().mask_limit();
  for (std::uint32_t i = 0; i < dim; ++i) {
    if (std::popcount(i) & 1) {
      odd[i] = a[i];
    } else {
      even[i] = a[i];
    }
  }
  return {std::move(even), std::move(odd)};
}

FockVector even_part(const FockVector& a) { return even_odd_split(a).first; }
FockVector odd_part(const FockVector& a) { return even_odd_split(a).second; }

FockVector symmetrized_product(const FockVector& a, const FockVector& b) {
  FockVector out = psi_product(a, b);
  out += psi_product(b, a);
  out *= Complex(0.5);
  return out;
}

FockVector creator_commutator(const FockVector& a, const FockVector& b) {
  FockVector out = psi_product(a, b);
  out -= psi_product(b, a);
  return out;
}

FockVector creator_exp(const FockVector& x) {
  const Complex x0 = x.vacuum_amplitude();
  FockVector nil = x;
  nil[0] = 0.0;

  FockVector acc = FockVector::vacuum_unit(x.modes());
  FockVector term = acc;
  const int order = detail::nilpotency_order(x.modes());
  for (int n = 1; n <= order; ++n) {
    term = psi_product(nil, term);
    term *= Complex(1.0 / n);
    acc += term;
  }
  acc *= std::exp(x0);
  return acc;
}

namespace {

// Z = U / c0 with the vacuum entry removed; the nilpotent part of U / c0 - 1.
FockVector nilpotent_ratio(const FockVector& u, const char* who) {
  const Complex c0 = u.vacuum_amplitude();
  if (std::abs(c0) <= kInvertibilityTolerance * u.max_abs()) {
    throw NonInvertibleError(std::string(who) +
                             ": vacuum amplitude vanishes relative to the "
                             "largest amplitude");
  }
  FockVector z = u;
  z *= Complex(1.0) / c0;
  z[0] = 0.0;
  return z;
}

}  // namespace

FockVector creator_log(const FockVector& u) {
  const FockVector z = nilpotent_ratio(u, "creator_log");
  FockVector acc(u.modes());
  acc[0] = std::log(u.vacuum_amplitude());

  FockVector zpow = z;
  const int order = detail::nilpotency_order(u.modes());
  for (int n = 1; n <= order; ++n) {
    const double coeff = ((n % 2) ? 1.0 : -1.0) / n;
    acc += Complex(coeff) * zpow;
    if (n < order) zpow = psi_product(z, zpow);
  }
  return acc;
}

FockVector creator_inverse(const FockVector& u) {
  const FockVector z = nilpotent_ratio(u, "creator_inverse");
  FockVector acc = FockVector::vacuum_unit(u.modes());
  FockVector zpow = FockVector::vacuum_unit(u.modes());
  const int order = detail::nilpotency_order(u.modes());
  for (int n = 1; n <= order; ++n) {
    zpow = psi_product(z, zpow);
    acc += Complex((n % 2) ? -1.0 : 1.0) * zpow;
  }
  acc *= Complex(1.0) / u.vacuum_amplitude();
  return acc;
}

bool is_invertible(const FockVector& u) noexcept {
  return std::abs(u.vacuum_amplitude()) > kInvertibilityTolerance * u.max_abs();
}

Complex inner_product(const FockVector& a, const FockVector& b) {
  detail::require_same_modes(a, b);
  return a.amplitudes().dot(b.amplitudes());
}

std::vector<std::uint32_t> graded_order(ModeSpace modes) {
  std::vector<std::uint32_t> order(modes.dim());
  for (std::uint32_t i = 0; i < modes.mask_limit(); ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(),
                   [](std::uint32_t a, std::uint32_t b) {
                     const int pa = std::popcount(a), pb = std::popcount(b);
                     return pa != pb ? pa < pb : a < b;
                   });
  return order;
}

CreatorMatrix creator_matrix(const FockVector& u) {
  const ModeSpace ms = u.modes();
  const std::uint32_t dim = ms.mask_limit();
  CreatorMatrix out;
  out.basis = graded_order(ms);
  std::vector<std::uint32_t> position(dim);
  for (std::uint32_t r = 0; r < dim; ++r) position[out.basis[r]] = r;

  out.entries = Eigen::MatrixXcd::Zero(dim, dim);
  for (std::uint32_t col_mask = 0; col_mask < dim; ++col_mask) {
    const std::uint32_t col = position[col_mask];
    // Column = u * f_col: left factors run over masks disjoint from col_mask.
    const std::uint32_t comp = ~col_mask & (dim - 1u);
    std::uint32_t left = comp;
    while (true) {
      const Complex av = u[left];
      if (av != Complex(0.0, 0.0)) {
        out.entries(position[left | col_mask], col) =
            static_cast<double>(merge_sign(left, col_mask)) * av;
      }
      if (left == 0) break;
      left = (left - 1u) & comp;
    }
  }
  return out;
}

FockVector state_from_graded_column(ModeSpace modes, const Eigen::MatrixXcd& m,
                                    const std::vector<std::uint32_t>& basis) {
  if (m.rows() != modes.dim() || basis.size() != static_cast<std::size_t>(modes.dim())) {
    throw Error("state_from_graded_column: dimension mismatch");
  }
  FockVector out(modes);
  for (int r = 0; r < m.rows(); ++r) out[basis[r]] = m(r, 0);
  return out;
}

}  // namespace fockdec
