#pragma once

#include <array>

#include "teleportsim/source_model.hpp"

namespace tsim {

enum class BsmSetup { BeamSplitterOnly, PolarizationSelective };

inline std::string to_string(BsmSetup s) {
  return s == BsmSetup::BeamSplitterOnly ? "bs" : "pbs";
}

// Which BSM hardware and which tagged outcome. The bare beam splitter can
// only herald the antisymmetric state.
struct BsmSpec {
  BsmSetup setup = BsmSetup::BeamSplitterOnly;
  BellLabel tagged = BellLabel::PsiMinus;

  void validate() const {
    if (tagged != BellLabel::PsiMinus && tagged != BellLabel::PsiPlus)
      throw DomainError("BsmSpec: tagged outcome must be psi_minus or psi_plus");
    if (setup == BsmSetup::BeamSplitterOnly && tagged != BellLabel::PsiMinus)
      throw DomainError("BsmSpec: beam-splitter-only setup tags only psi_minus");
  }
};

// Mutual wave-packet overlaps at the beam splitter. Co-polarized photons
// see the measured HOM visibility; cross-polarized photons are additionally
// detuned by the fine-structure splitting.
struct OverlapFactors {
  double m_par = 1;
  double m_perp = 1;
};

inline OverlapFactors overlap_factors(const SourceParams& p) {
  p.validate();
  return OverlapFactors{p.v, p.v * damping_factors(p).d_bsm};
}

// Unnormalized probability that a pair in `true_state` produces the tagged
// click pattern. Antisymmetric total states anti-bunch, symmetric ones
// bunch; the overlap interpolates linearly. Polarization selection removes
// the co-polarized (phi) contributions entirely.
inline double detection_weight(BellLabel true_state, const BsmSpec& spec,
                               const OverlapFactors& m) {
  spec.validate();
  const bool swap = (spec.tagged == BellLabel::PsiPlus);
  switch (true_state) {
    case BellLabel::PsiMinus: return (swap ? (1.0 - m.m_perp) : (1.0 + m.m_perp)) / 2.0;
    case BellLabel::PsiPlus: return (swap ? (1.0 + m.m_perp) : (1.0 - m.m_perp)) / 2.0;
    case BellLabel::PhiPlus:
    case BellLabel::PhiMinus:
      return spec.setup == BsmSetup::BeamSplitterOnly ? (1.0 - m.m_par) / 2.0 : 0.0;
  }
  throw DomainError("detection_weight: bad label");
}

// p(i|BSM), indexed by kBellLabels; sums to 1.
struct BellConditional {
  std::array<double, 4> p{};
  double operator[](BellLabel b) const { return p[static_cast<std::size_t>(b)]; }
};

inline BellConditional bell_conditionals(const BsmSpec& spec, const SourceParams& params) {
  const OverlapFactors m = overlap_factors(params);
  BellConditional out;
  double total = 0;
  for (std::size_t i = 0; i < 4; ++i) {
    out.p[i] = detection_weight(kBellLabels[i], spec, m);
    total += out.p[i];
  }
  if (total <= 0) throw DomainError("bell_conditionals: all detection weights vanish");
  for (auto& v : out.p) v /= total;
  return out;
}

struct ContrastCoefficients {
  double c = 0;
  double c_prime = 0;
};

// c'_BS = c_BS = V/(2-V); c'_PBS = 1, c_PBS = V.
inline ContrastCoefficients contrast_coefficients(BsmSetup setup, double v) {
  if (!(v >= 0.0 && v <= 1.0)) throw DomainError("contrast_coefficients: V must be in [0,1]");
  if (setup == BsmSetup::BeamSplitterOnly) {
    const double c = v / (2.0 - v);
    return ContrastCoefficients{c, c};
  }
  return ContrastCoefficients{v, 1.0};
}

}  // namespace tsim
