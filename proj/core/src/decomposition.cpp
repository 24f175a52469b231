#include "fockdec/decomposition.hpp"

#include <algorithm>
#include <bit>
#include <cmath>

namespace fockdec {

namespace {

// Factor list of the solved-subsystem product. The slot for the total state
// carries index -1; the slot for the inverse of subsystem k carries index k.
struct Chain {
  std::vector<int> slots;
};

Chain solve_chain(const Decomposition& dec) {
  const auto& order = dec.order();
  const int m = dec.subsystem_count();
  const int kv = dec.solved_position();
  Chain chain;
  chain.slots.reserve(m);
  for (int p = kv - 1; p >= 0; --p) chain.slots.push_back(order[p]);
  chain.slots.push_back(-1);
  for (int p = m - 1; p > kv; --p) chain.slots.push_back(order[p]);
  return chain;
}

// Multiplies the chain left to right, substituting `replacement` at the slot
// whose index equals `slot_id`. Slots with nonnegative ids take the inverse
// of the matching subsystem creator; the -1 slot takes psi.
FockVector fold_chain(const Decomposition& dec, const Chain& chain, int slot_id,
                      const FockVector& replacement, const FockVector* psi) {
  FockVector acc = FockVector::vacuum_unit(dec.modes());
  bool first = true;
  for (int id : chain.slots) {
    const FockVector* factor = nullptr;
    FockVector tmp(dec.modes());
    if (id == slot_id) {
      factor = &replacement;
    } else if (id == -1) {
      if (psi == nullptr) throw Error("solved-subsystem product: total state required");
      factor = psi;
    } else {
      tmp = creator_inverse(dec.creator(id));
      factor = &tmp;
    }
    if (first) {
      acc = *factor;
      first = false;
    } else {
      acc = psi_product(acc, *factor);
    }
  }
  return acc;
}

}  // namespace

Decomposition::Decomposition(ModeSpace modes, int subsystem_count)
    : modes_(modes), m_(subsystem_count) {
  if (m_ < 2) throw Error("Decomposition: need at least two subsystems");
  exponents_.assign(m_ - 1, FockVector(modes_));
  creators_.assign(m_ - 1, FockVector::vacuum_unit(modes_));
  order_.resize(m_);
  for (int k = 0; k < m_; ++k) order_[k] = k;
}

void Decomposition::set_order(std::vector<int> order) {
  if (static_cast<int>(order.size()) != m_) {
    throw Error("set_order: permutation has wrong length");
  }
  std::vector<bool> seen(m_, false);
  for (int k : order) {
    if (k < 0 || k >= m_ || seen[k]) throw Error("set_order: not a permutation");
    seen[k] = true;
  }
  order_ = std::move(order);
}

int Decomposition::solved_position() const {
  for (int p = 0; p < m_; ++p) {
    if (order_[p] == 0) return p;
  }
  throw Error("Decomposition: permutation lost the solved subsystem");
}

const FockVector& Decomposition::exponent(int k) const {
  if (k < 1 || k >= m_) throw Error("exponent: index out of range");
  return exponents_[k - 1];
}

void Decomposition::set_exponent(int k, FockVector x) {
  if (k < 1 || k >= m_) throw Error("set_exponent: index out of range");
  if (!(x.modes() == modes_)) throw ModeMismatchError("set_exponent: mode mismatch");
  creators_[k - 1] = creator_exp(x);
  exponents_[k - 1] = std::move(x);
}

const FockVector& Decomposition::creator(int k) const {
  if (k == 0) return v();
  if (k < 1 || k >= m_) throw Error("creator: index out of range");
  return creators_[k - 1];
}

const FockVector& Decomposition::v() const {
  if (!v_) throw Error("Decomposition: solved subsystem not set");
  return *v_;
}

void Decomposition::set_v(FockVector v) {
  if (!(v.modes() == modes_)) throw ModeMismatchError("set_v: mode mismatch");
  v_ = std::move(v);
}

FockVector Decomposition::compose() const {
  FockVector acc = creator(order_[0]);
  for (int p = 1; p < m_; ++p) acc = psi_product(acc, creator(order_[p]));
  return acc;
}

double Decomposition::compose_residual(const FockVector& psi) const {
  const double scale = psi.norm();
  if (scale == 0.0) return compose().norm();
  return (compose() - psi).norm() / scale;
}

FockVector solve_v(const FockVector& psi, const Decomposition& dec) {
  if (!(psi.modes() == dec.modes())) throw ModeMismatchError("solve_v: mode mismatch");
  const Chain chain = solve_chain(dec);
  return fold_chain(dec, chain, /*slot_id=*/-2, FockVector(dec.modes()), &psi);
}

FockVector v_functional_psi(const Decomposition& dec, const FockVector& x) {
  const Chain chain = solve_chain(dec);
  return fold_chain(dec, chain, /*slot_id=*/-1, x, nullptr);
}

FockVector v_functional(const Decomposition& dec, int k, const FockVector& y) {
  if (k < 1 || k >= dec.subsystem_count()) {
    throw Error("v_functional: subsystem index out of range");
  }
  if (!dec.has_v()) throw Error("v_functional: total state unknown, solve first");
  const FockVector psi = dec.compose();
  const Chain chain = solve_chain(dec);
  return fold_chain(dec, chain, k, y, &psi);
}

TangentFrame tangent_frame(const Decomposition& dec) {
  const ModeSpace modes = dec.modes();
  const int m = dec.subsystem_count();
  const int dim = modes.dim();
  const FockVector psi = dec.compose();
  const Chain chain = solve_chain(dec);

  TangentFrame frame(modes);
  frame.m = m;
  frame.f.reserve(m - 1);
  frame.g.reserve(m - 1);

  frame.weights.resize(m);
  for (int k = 0; k < m; ++k) {
    const double n2 = dec.creator(k).squared_norm();
    if (n2 == 0.0) throw Error("tangent_frame: zero-norm subsystem");
    frame.weights[k] = 1.0 / n2;
  }

  for (int k = 1; k < m; ++k) {
    const FockVector& u = dec.creator(k);
    const FockVector u_inv = creator_inverse(u);

    // Position of this subsystem's inverse in the factor list, and the fixed
    // products before and after it.
    int slot = -1;
    for (std::size_t s = 0; s < chain.slots.size(); ++s) {
      if (chain.slots[s] == k) slot = static_cast<int>(s);
    }
    if (slot < 0) throw Error("tangent_frame: inconsistent permutation");

    FockVector prefix = FockVector::vacuum_unit(modes);
    for (int s = 0; s < slot; ++s) {
      const int id = chain.slots[s];
      prefix = psi_product(prefix, id == -1 ? psi : creator_inverse(dec.creator(id)));
    }
    FockVector suffix = FockVector::vacuum_unit(modes);
    for (std::size_t s = slot + 1; s < chain.slots.size(); ++s) {
      const int id = chain.slots[s];
      suffix = psi_product(suffix, id == -1 ? psi : creator_inverse(dec.creator(id)));
    }

    Eigen::MatrixXcd fk(dim, dim - 1);
    Eigen::MatrixXcd gk(dim, dim - 1);
    for (std::uint32_t mask = 1; mask < static_cast<std::uint32_t>(dim); ++mask) {
      const FockVector e = FockVector::basis_state(modes, mask);
      fk.col(mask - 1) = symmetrized_product(e, u).amplitudes();
      const FockVector dinv = symmetrized_product(e, u_inv);
      gk.col(mask - 1) =
          -psi_product(psi_product(prefix, dinv), suffix).amplitudes();
    }
    frame.f.push_back(std::move(fk));
    frame.g.push_back(std::move(gk));
  }
  return frame;
}

FockVector frame_delta_u(const TangentFrame& frame, int k, const Eigen::VectorXcd& delta_x) {
  if (k < 1 || k >= frame.m) throw Error("frame_delta_u: subsystem index out of range");
  if (delta_x.size() != frame.coefficient_count()) {
    throw Error("frame_delta_u: coefficient vector has wrong size");
  }
  const int n = frame.basis_size();
  return {frame.modes, frame.f[k - 1] * delta_x.segment((k - 1) * n, n)};
}

FockVector delta_v(const Decomposition& dec, const TangentFrame& frame,
                   const FockVector& delta_psi, const Eigen::VectorXcd& delta_x) {
  if (delta_x.size() != frame.coefficient_count()) {
    throw Error("delta_v: coefficient vector has wrong size");
  }
  FockVector out = v_functional_psi(dec, delta_psi);
  const int n = frame.basis_size();
  for (int k = 1; k < frame.m; ++k) {
    out += FockVector(frame.modes, frame.g[k - 1] * delta_x.segment((k - 1) * n, n));
  }
  return out;
}

Eigen::MatrixXd beables(const Decomposition& dec,
                        const std::vector<ManyBodyOperator>& observables) {
  const int m = dec.subsystem_count();
  Eigen::MatrixXd table(m, static_cast<int>(observables.size()));
  for (int k = 0; k < m; ++k) {
    for (std::size_t a = 0; a < observables.size(); ++a) {
      table(k, static_cast<int>(a)) = expectation_real(observables[a], dec.creator(k));
    }
  }
  return table;
}

FockVector apply_number_phase(const FockVector& u, double phi) {
  FockVector out = u;
  const std::uint32_t dim = u.modes().mask_limit();
  for (std::uint32_t mask = 0; mask < dim; ++mask) {
    out[mask] *= std::exp(Complex(0.0, phi * std::popcount(mask)));
  }
  return out;
}

Decomposition apply_phase(const Decomposition& dec, double phi) {
  Decomposition out(dec.modes(), dec.subsystem_count());
  out.set_order(dec.order());
  for (int k = 1; k < dec.subsystem_count(); ++k) {
    out.set_exponent(k, apply_number_phase(dec.exponent(k), phi));
  }
  if (dec.has_v()) out.set_v(apply_number_phase(dec.v(), phi));
  return out;
}

}  // namespace fockdec
