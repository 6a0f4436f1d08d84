#pragma once

#include <array>
#include <cmath>
#include <limits>
#include <sstream>

#include "teleportsim/quantum.hpp"

namespace tsim {

// hbar in ueV*ns, so S[ueV] * tau[ns] / hbar is dimensionless.
inline constexpr double kHbarUevNs = 0.6582119569;

inline constexpr double kInf = std::numeric_limits<double>::infinity();

// Physical knobs of the emitter. Infinite times mean the corresponding
// decoherence process is absent.
struct SourceParams {
  double v = 1.0;          // single-polarization HOM visibility
  double s_uev = 0.0;      // fine-structure splitting, ueV
  double tau_x_ns = 0.23;  // X lifetime
  double tau_ss_ns = kInf; // spin-scattering time
  double tau_hv_ns = kInf; // cross-dephasing time
  double t2star_ns = kInf; // pure-dephasing time
  double k = 1.0;          // pair purity fraction

  void validate() const {
    if (!(v >= 0.0 && v <= 1.0)) throw DomainError("SourceParams: V must be in [0,1]");
    if (!(s_uev >= 0.0)) throw DomainError("SourceParams: S must be >= 0");
    if (!(tau_x_ns > 0.0)) throw DomainError("SourceParams: tau_x must be positive");
    if (!(tau_ss_ns > 0.0)) throw DomainError("SourceParams: tau_ss must be positive");
    if (!(tau_hv_ns > 0.0)) throw DomainError("SourceParams: tau_hv must be positive");
    if (!(t2star_ns > 0.0)) throw DomainError("SourceParams: T2* must be positive");
    if (!(k >= 0.0 && k <= 1.0)) throw DomainError("SourceParams: k must be in [0,1]");
  }
};

struct GFactors {
  double g_ss = 1, g_hv = 1, g_deph = 1;
};

struct DampingFactors {
  double d_pair = 1;  // FSS damping of the pair coherence
  double d_bsm = 1;   // FSS-induced distinguishability damping in the BSM
};

inline GFactors g_factors(const SourceParams& p) {
  p.validate();
  auto ratio = [&](double tau) { return std::isinf(tau) ? 0.0 : p.tau_x_ns / tau; };
  GFactors g;
  g.g_ss = 1.0 / (1.0 + ratio(p.tau_ss_ns));
  g.g_hv = 1.0 / (1.0 + ratio(p.tau_ss_ns) + ratio(p.tau_hv_ns));
  g.g_deph = 1.0 / (1.0 + 2.0 * ratio(p.t2star_ns));
  return g;
}

inline DampingFactors damping_factors(const SourceParams& p, const GFactors& g) {
  const double a = p.s_uev * p.tau_x_ns / kHbarUevNs;
  DampingFactors d;
  d.d_pair = 1.0 / std::sqrt(1.0 + (a * g.g_hv) * (a * g.g_hv));
  d.d_bsm = 1.0 / std::sqrt(1.0 + (a * g.g_deph) * (a * g.g_deph));
  return d;
}

inline DampingFactors damping_factors(const SourceParams& p) {
  return damping_factors(p, g_factors(p));
}

// Two-photon polarization state of the cascade, basis {HH, HV, VH, VV}:
// diagonal (1 +/- k*g_ss)/4, real rephased corner k*g_hv*d_pair/2 (the
// retarder absorbs the FSS phase, leaving magnitude damping only).
inline DensityMatrix cascade_density_matrix(const SourceParams& p) {
  const GFactors g = g_factors(p);
  const DampingFactors d = damping_factors(p, g);
  const double diag_plus = (1.0 + p.k * g.g_ss) / 4.0;
  const double diag_minus = (1.0 - p.k * g.g_ss) / 4.0;
  const double corner = p.k * g.g_hv * d.d_pair / 2.0;
  ComplexMatrix m(4);
  m.at(0, 0) = diag_plus;
  m.at(1, 1) = diag_minus;
  m.at(2, 2) = diag_minus;
  m.at(3, 3) = diag_plus;
  m.at(0, 3) = corner;
  m.at(3, 0) = corner;
  return DensityMatrix::from_matrix(m);  // PSD for all k, g in range; the ctor asserts it
}

// Diagnostic decomposition: <bell_i| rho |bell_i>, indexed by kBellLabels.
struct BellWeights {
  std::array<double, 4> w{};
  bool bell_diagonal = true;  // residual off-Bell-diagonal weight above 1e-9 clears this

  double operator[](BellLabel b) const { return w[static_cast<std::size_t>(b)]; }
};

inline BellWeights bell_weights(const DensityMatrix& rho) {
  if (rho.dim() != 4) throw DomainError("bell_weights: two-qubit state required");
  BellWeights bw;
  ComplexMatrix recon(4);
  for (std::size_t i = 0; i < 4; ++i) {
    const PureState b = bell_state(kBellLabels[i]);
    bw.w[i] = fidelity_to_pure(rho, b);
    recon = recon + b.outer() * cplx(bw.w[i]);
  }
  bw.bell_diagonal = recon.max_abs_diff(rho.matrix()) <= 1e-9;
  return bw;
}

struct CalibrationTargets {
  double fidelity_phi_plus = 1.0;
  double concurrence = 1.0;  // consistency only; the family ties C = 2F - 1
  double g2_x = 0.0;
  double g2_xx = 0.0;
};

struct CalibrationFixed {
  double v = 1.0;
  double s_uev = 0.0;
  double tau_x_ns = 0.23;
  double t2star_ns = kInf;
};

// Solve source parameters from measured figures of merit:
//   k = (1 - g2_x)(1 - g2_xx); tau_ss = inf (so k*g_ss = k);
//   k*g_hv*d_pair = (4F - 1 - k)/2 back-solved for tau_hv.
inline SourceParams calibrate(const CalibrationTargets& t, const CalibrationFixed& fixed) {
  if (!(t.g2_x >= 0 && t.g2_x < 1 && t.g2_xx >= 0 && t.g2_xx < 1))
    throw DomainError("calibrate: g2 values must be in [0,1)");
  if (!(t.fidelity_phi_plus >= 0 && t.fidelity_phi_plus <= 1))
    throw DomainError("calibrate: fidelity target must be in [0,1]");

  SourceParams p;
  p.v = fixed.v;
  p.s_uev = fixed.s_uev;
  p.tau_x_ns = fixed.tau_x_ns;
  p.t2star_ns = fixed.t2star_ns;
  p.tau_ss_ns = kInf;
  p.k = (1.0 - t.g2_x) * (1.0 - t.g2_xx);

  const double a = p.s_uev * p.tau_x_ns / kHbarUevNs;
  const double f_min = (1.0 + p.k) / 4.0;
  const double f_max = f_min + p.k / (2.0 * std::sqrt(1.0 + a * a));
  double b = (4.0 * t.fidelity_phi_plus - 1.0 - p.k) / 2.0;  // = k*g_hv*d_pair
  if (b < 0 && b > -1e-12) b = 0;

  auto infeasible = [&](const char* side) {
    std::ostringstream os;
    os << "calibrate: fidelity target " << t.fidelity_phi_plus << " is " << side
       << " the feasible range [" << f_min << ", " << f_max << "] for k=" << p.k
       << ", S=" << p.s_uev << " ueV, tau_x=" << p.tau_x_ns << " ns";
    throw DomainError(os.str());
  };
  if (b < 0) infeasible("below");
  const double disc = p.k * p.k - a * a * b * b;
  if (disc <= 0) infeasible("above");
  const double g_hv = b / std::sqrt(disc);
  if (g_hv > 1.0 + 1e-12) infeasible("above");

  p.tau_hv_ns = (g_hv >= 1.0) ? kInf : p.tau_x_ns * g_hv / (1.0 - g_hv);
  return p;
}

}  // namespace tsim
