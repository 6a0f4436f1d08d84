#pragma once

#include <array>
#include <cmath>
#include <string>
#include <vector>

#include "teleportsim/complexmat.hpp"
#include "teleportsim/errors.hpp"

namespace tsim {

inline constexpr int kMaxDim = 8;  // three polarization qubits

enum class BellLabel { PhiPlus, PhiMinus, PsiPlus, PsiMinus };
enum class PauliLabel { I, X, Y, Z };

inline constexpr std::array<BellLabel, 4> kBellLabels{
    BellLabel::PhiPlus, BellLabel::PhiMinus, BellLabel::PsiPlus, BellLabel::PsiMinus};
inline constexpr std::array<PauliLabel, 4> kPauliLabels{
    PauliLabel::I, PauliLabel::X, PauliLabel::Y, PauliLabel::Z};

// BSM outcome -> single-qubit correction: phi+ -> I, psi+ -> X, psi- -> Y, phi- -> Z.
inline PauliLabel pauli_for_bell(BellLabel b) {
  switch (b) {
    case BellLabel::PhiPlus: return PauliLabel::I;
    case BellLabel::PsiPlus: return PauliLabel::X;
    case BellLabel::PsiMinus: return PauliLabel::Y;
    case BellLabel::PhiMinus: return PauliLabel::Z;
  }
  throw DomainError("pauli_for_bell: bad label");
}

inline std::string to_string(BellLabel b) {
  switch (b) {
    case BellLabel::PhiPlus: return "phi_plus";
    case BellLabel::PhiMinus: return "phi_minus";
    case BellLabel::PsiPlus: return "psi_plus";
    case BellLabel::PsiMinus: return "psi_minus";
  }
  return "?";
}

inline std::string to_string(PauliLabel p) {
  switch (p) {
    case PauliLabel::I: return "I";
    case PauliLabel::X: return "X";
    case PauliLabel::Y: return "Y";
    case PauliLabel::Z: return "Z";
  }
  return "?";
}

inline ComplexMatrix pauli(PauliLabel p) {
  ComplexMatrix m(2);
  switch (p) {
    case PauliLabel::I: m.at(0, 0) = 1; m.at(1, 1) = 1; break;
    case PauliLabel::X: m.at(0, 1) = 1; m.at(1, 0) = 1; break;
    case PauliLabel::Y: m.at(0, 1) = cplx(0, -1); m.at(1, 0) = cplx(0, 1); break;
    case PauliLabel::Z: m.at(0, 0) = 1; m.at(1, 1) = -1; break;
  }
  return m;
}

// Bell kets in the {H,V} basis, ordering {HH, HV, VH, VV}.
inline PureState bell_state(BellLabel b) {
  const double r = 1.0 / std::sqrt(2.0);
  switch (b) {
    case BellLabel::PhiPlus: return PureState(4, {r, 0, 0, r});
    case BellLabel::PhiMinus: return PureState(4, {r, 0, 0, -r});
    case BellLabel::PsiPlus: return PureState(4, {0, r, r, 0});
    case BellLabel::PsiMinus: return PureState(4, {0, r, -r, 0});
  }
  throw DomainError("bell_state: bad label");
}

inline ComplexMatrix bell_projector(BellLabel b) { return bell_state(b).outer(); }

// Polarization density matrix with the validated invariants. Tomography from
// finite counts may dip slightly negative; construction keeps the smallest
// eigenvalue on record and `physical()` reports the -1e-9 bound.
class DensityMatrix {
 public:
  DensityMatrix() = default;

  static DensityMatrix from_matrix(const ComplexMatrix& m, bool require_positive = true) {
    if (m.dim() < 2 || m.dim() > kMaxDim) throw DomainError("DensityMatrix: dim out of range");
    if (!m.is_hermitian(1e-10)) throw DomainError("DensityMatrix: not Hermitian within 1e-10");
    if (std::abs(m.trace() - cplx(1.0)) > 1e-10)
      throw DomainError("DensityMatrix: trace must be 1 within 1e-10");
    DensityMatrix rho;
    rho.m_ = m;
    const auto ev = hermitian_eigenvalues(m);
    rho.min_eigenvalue_ = ev.back();
    if (require_positive && rho.min_eigenvalue_ < -1e-9)
      throw DomainError("DensityMatrix: negative eigenvalue " +
                        std::to_string(rho.min_eigenvalue_));
    return rho;
  }

  static DensityMatrix pure(const PureState& psi) { return from_matrix(psi.outer()); }

  static DensityMatrix maximally_mixed(int dim) {
    return from_matrix(ComplexMatrix::identity(dim) * cplx(1.0 / dim));
  }

  const ComplexMatrix& matrix() const { return m_; }
  int dim() const { return m_.dim(); }
  double min_eigenvalue() const { return min_eigenvalue_; }
  bool physical(double tol = 1e-9) const { return min_eigenvalue_ >= -tol; }

 private:
  ComplexMatrix m_;
  double min_eigenvalue_ = 0;
};

// Kronecker products; the first argument owns the most-significant index.
inline DensityMatrix tensor(const DensityMatrix& a, const DensityMatrix& b) {
  if (a.dim() * b.dim() > kMaxDim)
    throw DomainError("tensor: result dim exceeds 3-qubit capacity");
  return DensityMatrix::from_matrix(ComplexMatrix::kron(a.matrix(), b.matrix()));
}

inline PureState tensor(const PureState& a, const PureState& b) {
  if (a.dim() * b.dim() > kMaxDim)
    throw DomainError("tensor: result dim exceeds 3-qubit capacity");
  std::vector<cplx> amps(static_cast<std::size_t>(a.dim()) * b.dim());
  for (int i = 0; i < a.dim(); ++i)
    for (int j = 0; j < b.dim(); ++j)
      amps[static_cast<std::size_t>(i) * b.dim() + j] = a.amp(i) * b.amp(j);
  return PureState(a.dim() * b.dim(), std::move(amps));
}

// Partial trace over the subsystems not listed in `keep` (0-based positions
// into `dims`, most significant first).
inline ComplexMatrix partial_trace_matrix(const ComplexMatrix& rho, const std::vector<int>& dims,
                                          const std::vector<int>& keep) {
  int total = 1;
  for (int d : dims) total *= d;
  if (total != rho.dim()) throw DomainError("partial_trace: dims do not match matrix");
  if (keep.empty()) throw DomainError("partial_trace: keep set must be nonempty");
  for (int kidx : keep)
    if (kidx < 0 || kidx >= static_cast<int>(dims.size()))
      throw DomainError("partial_trace: keep index out of range");

  const int n = static_cast<int>(dims.size());
  std::vector<bool> kept(static_cast<std::size_t>(n), false);
  for (int kidx : keep) kept[static_cast<std::size_t>(kidx)] = true;

  int keep_dim = 1, trace_dim = 1;
  for (int i = 0; i < n; ++i) (kept[static_cast<std::size_t>(i)] ? keep_dim : trace_dim) *= dims[static_cast<std::size_t>(i)];

  // strides of each subsystem in the full index
  std::vector<int> stride(static_cast<std::size_t>(n), 1);
  for (int i = n - 2; i >= 0; --i)
    stride[static_cast<std::size_t>(i)] = stride[static_cast<std::size_t>(i) + 1] * dims[static_cast<std::size_t>(i) + 1];

  // Kept subsystems in original order form the result's mixed-radix index
  // (most significant first); traced subsystems likewise.
  std::vector<int> kept_pos, traced_pos;
  for (int i = 0; i < n; ++i)
    (kept[static_cast<std::size_t>(i)] ? kept_pos : traced_pos).push_back(i);

  auto compose = [&](const std::vector<int>& pos, int value) {
    // decompose `value` most-significant-first over dims at `pos`,
    // return contribution to the flat index of the full space
    int idx = 0;
    for (std::size_t i = 0; i < pos.size(); ++i) {
      int radix = 1;
      for (std::size_t j = i + 1; j < pos.size(); ++j) radix *= dims[static_cast<std::size_t>(pos[j])];
      const int digit = (value / radix) % dims[static_cast<std::size_t>(pos[i])];
      idx += digit * stride[static_cast<std::size_t>(pos[i])];
    }
    return idx;
  };

  ComplexMatrix out(keep_dim);
  for (int kr = 0; kr < keep_dim; ++kr)
    for (int kc = 0; kc < keep_dim; ++kc) {
      cplx s = 0;
      for (int t = 0; t < trace_dim; ++t) {
        const int tpart = compose(traced_pos, t);
        s += rho.at(compose(kept_pos, kr) + tpart, compose(kept_pos, kc) + tpart);
      }
      out.at(kr, kc) = s;
    }
  return out;
}

inline DensityMatrix partial_trace(const DensityMatrix& rho, const std::vector<int>& dims,
                                   const std::vector<int>& keep) {
  return DensityMatrix::from_matrix(partial_trace_matrix(rho.matrix(), dims, keep));
}

inline double fidelity_to_pure(const DensityMatrix& rho, const PureState& psi) {
  if (rho.dim() != psi.dim()) throw DomainError("fidelity_to_pure: dimension mismatch");
  cplx f = 0;
  for (int i = 0; i < rho.dim(); ++i)
    for (int j = 0; j < rho.dim(); ++j)
      f += std::conj(psi.amp(i)) * rho.matrix().at(i, j) * psi.amp(j);
  return f.real();
}

// Wootters concurrence of a two-qubit state: eigenvalue square roots of
// sqrt(rho) * rho_tilde * sqrt(rho), descending.
inline double concurrence(const DensityMatrix& rho) {
  if (rho.dim() != 4) throw DomainError("concurrence: two-qubit state required");
  const ComplexMatrix yy = ComplexMatrix::kron(pauli(PauliLabel::Y), pauli(PauliLabel::Y));
  const ComplexMatrix rho_tilde = yy * rho.matrix().conjugate() * yy;

  auto es = hermitian_eigensystem(rho.matrix());
  ComplexMatrix sqrt_rho(4);
  for (int i = 0; i < 4; ++i) {
    const double lam = std::max(es.values[static_cast<std::size_t>(i)], 0.0);
    const double sl = std::sqrt(lam);
    for (int r = 0; r < 4; ++r)
      for (int c = 0; c < 4; ++c)
        sqrt_rho.at(r, c) += sl * es.vectors.at(r, i) * std::conj(es.vectors.at(c, i));
  }
  const ComplexMatrix t = sqrt_rho * rho_tilde * sqrt_rho;
  auto lam = hermitian_eigenvalues(t);  // descending
  double c = 0;
  for (std::size_t i = 0; i < lam.size(); ++i) {
    const double s = std::sqrt(std::max(lam[i], 0.0));
    c += (i == 0) ? s : -s;
  }
  return std::max(0.0, c);
}

}  // namespace tsim
