#pragma once

#include <array>
#include <optional>
#include <thread>
#include <vector>

#include "teleportsim/bsm_model.hpp"
#include "teleportsim/tomography.hpp"

namespace tsim {

enum class InputLabel { H, V, D, A, R, L };

inline constexpr std::array<InputLabel, 6> kInputLabels{
    InputLabel::H, InputLabel::V, InputLabel::D, InputLabel::A, InputLabel::R, InputLabel::L};

inline std::string to_string(InputLabel l) {
  switch (l) {
    case InputLabel::H: return "H";
    case InputLabel::V: return "V";
    case InputLabel::D: return "D";
    case InputLabel::A: return "A";
    case InputLabel::R: return "R";
    case InputLabel::L: return "L";
  }
  return "?";
}

// Preset polarization states; R = (|H> + i|V>)/sqrt(2).
inline PureState input_state(InputLabel l) {
  const double r = 1.0 / std::sqrt(2.0);
  switch (l) {
    case InputLabel::H: return PureState(2, {1, 0});
    case InputLabel::V: return PureState(2, {0, 1});
    case InputLabel::D: return PureState(2, {r, r});
    case InputLabel::A: return PureState(2, {r, -r});
    case InputLabel::R: return PureState(2, {r, cplx(0, r)});
    case InputLabel::L: return PureState(2, {r, cplx(0, -r)});
  }
  throw DomainError("input_state: bad label");
}

// Everything the channel depends on: the source, the BSM flavor, an optional
// measured pair matrix, and an optional filtered visibility (the etalon only
// changes V seen by the BSM; the pair state is untouched).
struct Scenario {
  SourceParams source;
  BsmSpec bsm;
  std::optional<DensityMatrix> pair_override;
  std::optional<double> v_filtered;

  double effective_visibility() const { return v_filtered.value_or(source.v); }

  SourceParams effective_source() const {
    SourceParams p = source;
    p.v = effective_visibility();
    return p;
  }

  DensityMatrix pair() const {
    if (pair_override) {
      if (pair_override->dim() != 4 || !pair_override->physical())
        throw DomainError("Scenario: pair_override must be a valid two-qubit state");
      return *pair_override;
    }
    return cascade_density_matrix(source);
  }
};

struct TeleportResult {
  DensityMatrix rho_out;
  double fidelity = 0;   // to the Pauli-corrected target
  PureState expected;
};

// Execute the teleportation channel: project the three-photon state onto each
// Bell state of (input, early half of the interfering pair), normalize per
// branch, and mix branches with the BSM conditionals. Branch norms below
// 1e-14 drop out and the remaining conditionals renormalize.
inline TeleportResult teleport(const PureState& input, const Scenario& scenario) {
  if (input.dim() != 2) throw DomainError("teleport: input must be a qubit");
  scenario.bsm.validate();
  const DensityMatrix pair = scenario.pair();
  const BellConditional cond = bell_conditionals(scenario.bsm, scenario.effective_source());

  const ComplexMatrix rho_psi = ComplexMatrix::kron(input.outer(), pair.matrix());
  const ComplexMatrix id2 = ComplexMatrix::identity(2);

  ComplexMatrix mix(2);
  double kept_weight = 0;
  for (std::size_t i = 0; i < 4; ++i) {
    const ComplexMatrix proj = ComplexMatrix::kron(bell_projector(kBellLabels[i]), id2);
    const ComplexMatrix branch = proj * rho_psi * proj;
    const double norm = branch.trace().real();
    if (norm < 1e-14) continue;
    const ComplexMatrix out =
        partial_trace_matrix(branch, {2, 2, 2}, {2}) * cplx(1.0 / norm);
    mix = mix + out * cplx(cond.p[i]);
    kept_weight += cond.p[i];
  }
  if (kept_weight <= 0) throw DomainError("teleport: all branch norms vanish");
  mix = mix * cplx(1.0 / kept_weight);

  TeleportResult res;
  res.rho_out = DensityMatrix::from_matrix(mix);
  res.expected = input.apply(pauli(pauli_for_bell(scenario.bsm.tagged)));
  res.fidelity = fidelity_to_pure(res.rho_out, res.expected);
  return res;
}

// Mean teleportation fidelity over the {H, D, R} probe set (equal to the
// six-state mean for the Pauli-diagonal channels built here).
inline double average_fidelity(const Scenario& scenario) {
  double sum = 0;
  for (InputLabel l : {InputLabel::H, InputLabel::D, InputLabel::R})
    sum += teleport(input_state(l), scenario).fidelity;
  return sum / 3.0;
}

inline double average_fidelity_six_state(const Scenario& scenario) {
  double sum = 0;
  for (InputLabel l : kInputLabels) sum += teleport(input_state(l), scenario).fidelity;
  return sum / 6.0;
}

// Closed-form process matrix for the parametric source:
//   chi_00 = chi_33 = (1 - c'*k*g_ss)/4
//   ideal slot      = (1 + c'*k*g_ss + 2c*k*g_hv*d_pair*d_bsm)/4
//   swapped slot    = (1 + c'*k*g_ss - 2c*k*g_hv*d_pair*d_bsm)/4
// where the ideal slot is sigma_y for a psi- tag and sigma_x for psi+.
inline ProcessMatrix chi_analytic(const Scenario& scenario) {
  if (scenario.pair_override)
    throw DomainError("chi_analytic: requires the parametric source, not a pair override");
  scenario.bsm.validate();
  const SourceParams p = scenario.source;
  const GFactors g = g_factors(p);
  const DampingFactors d = damping_factors(p, g);
  const ContrastCoefficients cc =
      contrast_coefficients(scenario.bsm.setup, scenario.effective_visibility());

  const double corr = cc.c_prime * p.k * g.g_ss;
  const double interf = 2.0 * cc.c * p.k * g.g_hv * d.d_pair * d.d_bsm;
  const double chi_ii = (1.0 - corr) / 4.0;
  const double chi_ideal = (1.0 + corr + interf) / 4.0;
  const double chi_other = (1.0 + corr - interf) / 4.0;

  std::array<double, 4> diag{chi_ii, 0, 0, chi_ii};  // I, X, Y, Z slots
  if (scenario.bsm.tagged == BellLabel::PsiMinus) {
    diag[static_cast<std::size_t>(PauliLabel::Y)] = chi_ideal;
    diag[static_cast<std::size_t>(PauliLabel::X)] = chi_other;
  } else {
    diag[static_cast<std::size_t>(PauliLabel::X)] = chi_ideal;
    diag[static_cast<std::size_t>(PauliLabel::Y)] = chi_other;
  }
  return ProcessMatrix::diagonal(diag);
}

// Process matrix from the engine itself: teleport the four probe states and
// run the tomographic inversion.
inline ProcessMatrix chi_numeric(const Scenario& scenario) {
  ChannelOutputs out{
      teleport(input_state(InputLabel::H), scenario).rho_out,
      teleport(input_state(InputLabel::V), scenario).rho_out,
      teleport(input_state(InputLabel::D), scenario).rho_out,
      teleport(input_state(InputLabel::R), scenario).rho_out,
  };
  return process_tomography(out);
}

struct SweepRow {
  double v = 0;
  double f_analytic = 0;
  double f_numeric = 0;
  double f_analytic_s0 = 0;
  double f_numeric_s0 = 0;
};

struct SweepResult {
  std::vector<SweepRow> rows;
  std::optional<double> classical_crossing_v;  // for the scenario's own S
};

// F_avg from the closed form at visibility v.
inline double analytic_average_fidelity(const Scenario& base, double v, bool zero_fss) {
  Scenario s = base;
  s.v_filtered.reset();
  s.source.v = v;
  if (zero_fss) s.source.s_uev = 0;
  const ProcessMatrix chi = chi_analytic(s);
  return average_gate_fidelity(chi, pauli_for_bell(s.bsm.tagged));
}

inline double numeric_average_fidelity(const Scenario& base, double v, bool zero_fss) {
  Scenario s = base;
  s.v_filtered.reset();
  s.source.v = v;
  if (zero_fss) s.source.s_uev = 0;
  return average_fidelity(s);
}

// Visibility at which F_avg crosses the classical limit 2/3, by bisection on
// the closed form (monotone in V). Empty when there is no crossing in [0,1].
inline std::optional<double> classical_limit_crossing(const Scenario& base) {
  const double target = 2.0 / 3.0;
  double lo = 0.0, hi = 1.0;
  double flo = analytic_average_fidelity(base, lo, false) - target;
  double fhi = analytic_average_fidelity(base, hi, false) - target;
  if (flo > 0 || fhi < 0) return std::nullopt;
  for (int it = 0; it < 200 && hi - lo > 1e-13; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (analytic_average_fidelity(base, mid, false) - target >= 0)
      hi = mid;
    else
      lo = mid;
  }
  return 0.5 * (lo + hi);
}

// Grid sweep over V; grid points may be evaluated by several workers, the
// output is ordered by grid index and bit-identical for any worker count.
inline SweepResult sweep_visibility(const Scenario& base, double v_min, double v_max,
                                    int steps, int workers = 1) {
  if (steps < 2) throw DomainError("sweep_visibility: grid size must be >= 2");
  if (!(v_min >= 0 && v_max <= 1 && v_min < v_max))
    throw DomainError("sweep_visibility: V range must satisfy 0 <= v_min < v_max <= 1");
  SweepResult result;
  result.rows.resize(static_cast<std::size_t>(steps));

  auto work = [&](int begin, int end) {
    for (int i = begin; i < end; ++i) {
      const double v = v_min + (v_max - v_min) * i / (steps - 1);
      SweepRow& row = result.rows[static_cast<std::size_t>(i)];
      row.v = v;
      row.f_analytic = analytic_average_fidelity(base, v, false);
      row.f_numeric = numeric_average_fidelity(base, v, false);
      row.f_analytic_s0 = analytic_average_fidelity(base, v, true);
      row.f_numeric_s0 = numeric_average_fidelity(base, v, true);
    }
  };

  if (workers <= 1) {
    work(0, steps);
  } else {
    std::vector<std::thread> pool;
    const int chunk = (steps + workers - 1) / workers;
    for (int w = 0; w < workers; ++w) {
      const int begin = w * chunk;
      const int end = std::min(steps, begin + chunk);
      if (begin >= end) break;
      pool.emplace_back(work, begin, end);
    }
    for (auto& t : pool) t.join();
  }

  result.classical_crossing_v = classical_limit_crossing(base);
  return result;
}

}  // namespace tsim
