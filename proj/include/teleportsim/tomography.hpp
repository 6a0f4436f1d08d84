#pragma once

#include <array>
#include <cmath>
#include <map>

#include "teleportsim/quantum.hpp"

namespace tsim {

// Degrees of polarization in the H/V, D/A, R/L bases.
struct StokesVector {
  double s1 = 0, s2 = 0, s3 = 0;
  double norm2() const { return s1 * s1 + s2 * s2 + s3 * s3; }
  bool physical(double tol = 1e-9) const { return norm2() <= 1.0 + tol; }
};

struct StokesEstimate {
  StokesVector s;
  std::array<double, 3> err{};  // Gaussian propagation of Poisson counts
};

struct SixCounts {
  double h = 0, v = 0, d = 0, a = 0, r = 0, l = 0;
};

inline StokesEstimate stokes_from_counts(const SixCounts& n) {
  auto one = [](double p, double q, double& e) {
    const double tot = p + q;
    if (tot <= 0) throw DataError("stokes_from_counts: zero total counts in a basis pair");
    e = std::sqrt(4.0 * p * q / (tot * tot * tot));
    return (p - q) / tot;
  };
  StokesEstimate est;
  est.s.s1 = one(n.h, n.v, est.err[0]);
  est.s.s2 = one(n.d, n.a, est.err[1]);
  est.s.s3 = one(n.r, n.l, est.err[2]);
  return est;
}

struct StateEstimate {
  DensityMatrix rho;
  bool physical = true;  // false flags a (small) negative eigenvalue from finite counts
};

// Direct inversion: rho = (I + s1*sz + s2*sx + s3*sy)/2. No positivity
// projection; unphysical vectors from finite counts are flagged, not fixed.
inline StateEstimate state_from_stokes(const StokesVector& s) {
  ComplexMatrix m = ComplexMatrix::identity(2) * cplx(0.5);
  m = m + pauli(PauliLabel::Z) * cplx(0.5 * s.s1);
  m = m + pauli(PauliLabel::X) * cplx(0.5 * s.s2);
  m = m + pauli(PauliLabel::Y) * cplx(0.5 * s.s3);
  StateEstimate est{DensityMatrix::from_matrix(m, /*require_positive=*/false), true};
  est.physical = est.rho.physical(1e-9);
  return est;
}

inline StokesVector stokes_of_state(const DensityMatrix& rho) {
  if (rho.dim() != 2) throw DomainError("stokes_of_state: qubit state required");
  auto comp = [&](PauliLabel p) { return (rho.matrix() * pauli(p)).trace().real(); };
  return StokesVector{comp(PauliLabel::Z), comp(PauliLabel::X), comp(PauliLabel::Y)};
}

// chi over the Pauli basis {I, sx, sy, sz}. Hermitian and trace-one are hard
// requirements; off-diagonal magnitude is kept on record (all channels built
// here are Pauli-diagonal, tomography of sampled data may not be exactly so).
class ProcessMatrix {
 public:
  ProcessMatrix() = default;

  static ProcessMatrix from_matrix(const ComplexMatrix& chi) {
    if (chi.dim() != 4) throw DomainError("ProcessMatrix: chi must be 4x4");
    if (!chi.is_hermitian(1e-10)) throw DomainError("ProcessMatrix: not Hermitian within 1e-10");
    if (std::abs(chi.trace() - cplx(1.0)) > 1e-10)
      throw DomainError("ProcessMatrix: trace must be 1 within 1e-10");
    ProcessMatrix p;
    p.chi_ = chi;
    for (int i = 0; i < 4; ++i)
      for (int j = 0; j < 4; ++j)
        if (i != j) p.max_offdiag_ = std::max(p.max_offdiag_, std::abs(chi.at(i, j)));
    return p;
  }

  static ProcessMatrix diagonal(const std::array<double, 4>& d) {
    ComplexMatrix chi(4);
    for (int i = 0; i < 4; ++i) chi.at(i, i) = d[static_cast<std::size_t>(i)];
    return from_matrix(chi);
  }

  const ComplexMatrix& chi() const { return chi_; }
  double diag(PauliLabel p) const {
    const int i = static_cast<int>(p);
    return chi_.at(i, i).real();
  }
  double max_offdiag() const { return max_offdiag_; }
  bool diagonal_within(double tol = 1e-9) const { return max_offdiag_ <= tol; }

 private:
  ComplexMatrix chi_;
  double max_offdiag_ = 0;
};

// E(rho) = sum_mn chi_mn sigma_m rho sigma_n
inline DensityMatrix apply_process(const ProcessMatrix& p, const DensityMatrix& rho) {
  if (rho.dim() != 2) throw DomainError("apply_process: qubit state required");
  ComplexMatrix out(2);
  for (int m = 0; m < 4; ++m)
    for (int n = 0; n < 4; ++n) {
      const cplx w = p.chi().at(m, n);
      if (w == cplx{}) continue;
      out = out + w * (pauli(kPauliLabels[static_cast<std::size_t>(m)]) * rho.matrix() *
                       pauli(kPauliLabels[static_cast<std::size_t>(n)]));
    }
  return DensityMatrix::from_matrix(out, /*require_positive=*/false);
}

struct ChannelOutputs {
  DensityMatrix h, v, d, r;  // channel applied to |H>, |V>, |D>, |R>
};

// Single-qubit chi reconstruction by linear inversion: rebuild the channel on
// the operator basis |a><b| from the four probe outputs, assemble the Choi
// matrix, and read chi off in the Bell-like basis (I x sigma_m)|phi+>.
inline ProcessMatrix process_tomography(const ChannelOutputs& outputs) {
  const ComplexMatrix& eh = outputs.h.matrix();
  const ComplexMatrix& ev = outputs.v.matrix();
  const ComplexMatrix p = outputs.d.matrix() * cplx(2.0) - eh - ev;   // E(|H><V|) + E(|V><H|)
  const ComplexMatrix q = outputs.r.matrix() * cplx(2.0) - eh - ev;   // -i E(|H><V|) + i E(|V><H|)
  const ComplexMatrix ehv = (p + cplx(0, 1) * q) * cplx(0.5);
  const ComplexMatrix evh = (p - cplx(0, 1) * q) * cplx(0.5);

  ComplexMatrix choi(4);  // (1/2) sum_ab |a><b| (x) E(|a><b|)
  auto put = [&](int a, int b, const ComplexMatrix& e) {
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j) choi.at(a * 2 + i, b * 2 + j) = 0.5 * e.at(i, j);
  };
  put(0, 0, eh);
  put(0, 1, ehv);
  put(1, 0, evh);
  put(1, 1, ev);

  const PureState omega = bell_state(BellLabel::PhiPlus);
  std::array<PureState, 4> basis{omega, omega, omega, omega};
  for (int m = 1; m < 4; ++m)
    basis[static_cast<std::size_t>(m)] =
        omega.apply(ComplexMatrix::kron(ComplexMatrix::identity(2),
                                        pauli(kPauliLabels[static_cast<std::size_t>(m)])));

  ComplexMatrix chi(4);
  for (int m = 0; m < 4; ++m)
    for (int n = 0; n < 4; ++n) {
      cplx s = 0;
      for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j)
          s += std::conj(basis[static_cast<std::size_t>(m)].amp(i)) * choi.at(i, j) *
               basis[static_cast<std::size_t>(n)].amp(j);
      chi.at(m, n) = s;
    }
  // Clean numerical fuzz so the Hermiticity/trace contract holds exactly.
  for (int m = 0; m < 4; ++m)
    for (int n = m + 1; n < 4; ++n) {
      const cplx avg = 0.5 * (chi.at(m, n) + std::conj(chi.at(n, m)));
      chi.at(m, n) = avg;
      chi.at(n, m) = std::conj(avg);
    }
  return ProcessMatrix::from_matrix(chi);
}

// Nielsen's qubit formula: F_avg = (2 F_proc + 1)/3.
inline double average_gate_fidelity(const ProcessMatrix& chi, PauliLabel ideal) {
  return (2.0 * chi.diag(ideal) + 1.0) / 3.0;
}

}  // namespace tsim
