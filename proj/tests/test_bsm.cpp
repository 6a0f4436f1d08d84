#include <catch2/catch_amalgamated.hpp>

#include "helpers.hpp"
#include "teleportsim/bsm_model.hpp"

using namespace tsim;

namespace {

SourceParams device_params() {
  SourceParams p;
  p.v = 0.55;
  p.s_uev = 1.8;
  p.tau_x_ns = 0.23;
  p.t2star_ns = 1.4;
  p.tau_hv_ns = 5.2669;
  p.k = 0.96922;
  return p;
}

BsmSpec bs_only() { return {BsmSetup::BeamSplitterOnly, BellLabel::PsiMinus}; }
BsmSpec pbs(BellLabel tagged = BellLabel::PsiMinus) {
  return {BsmSetup::PolarizationSelective, tagged};
}

}  // namespace

TEST_CASE("overlap factors") {
  SECTION("ideal source") {
    SourceParams p;
    const OverlapFactors m = overlap_factors(p);
    REQUIRE(m.m_par == 1.0);
    REQUIRE(m.m_perp == 1.0);
  }
  SECTION("device values") {
    const OverlapFactors m = overlap_factors(device_params());
    REQUIRE(m.m_par == Catch::Approx(0.55));
    REQUIRE(m.m_perp == Catch::Approx(0.497).margin(5e-4));
  }
  SECTION("splitting alone hurts only cross-polarized overlap") {
    SourceParams p = device_params();
    p.v = 1.0;
    const OverlapFactors m = overlap_factors(p);
    REQUIRE(m.m_par == 1.0);
    REQUIRE(m.m_perp == Catch::Approx(0.904).margin(5e-4));
    REQUIRE(m.m_perp <= m.m_par);
  }
}

TEST_CASE("detection weights") {
  SECTION("antisymmetric state always anti-bunches at full overlap") {
    const OverlapFactors m{1.0, 1.0};
    REQUIRE(detection_weight(BellLabel::PsiMinus, bs_only(), m) == Catch::Approx(1.0));
    REQUIRE(detection_weight(BellLabel::PsiMinus, pbs(), m) == Catch::Approx(1.0));
  }
  SECTION("distinguishable co-polarized photons split randomly") {
    const OverlapFactors m{0.0, 0.0};
    REQUIRE(detection_weight(BellLabel::PhiPlus, bs_only(), m) == Catch::Approx(0.5));
  }
  SECTION("polarization selection discards co-polarized coincidences") {
    const OverlapFactors m{0.3, 0.2};
    REQUIRE(detection_weight(BellLabel::PhiPlus, pbs(), m) == 0.0);
    REQUIRE(detection_weight(BellLabel::PhiMinus, pbs(), m) == 0.0);
  }
  SECTION("unsupported setup/outcome combination") {
    REQUIRE_THROWS_AS(
        detection_weight(BellLabel::PsiMinus, BsmSpec{BsmSetup::BeamSplitterOnly, BellLabel::PsiPlus},
                         OverlapFactors{1, 1}),
        DomainError);
  }
}

TEST_CASE("bell conditionals") {
  SECTION("no interference carries no information") {
    SourceParams p;
    p.v = 0;
    const BellConditional c = bell_conditionals(bs_only(), p);
    for (BellLabel b : kBellLabels) REQUIRE(c[b] == Catch::Approx(0.25));
  }
  SECTION("ideal HOM tags psi- perfectly") {
    SourceParams p;  // V=1, S=0
    const BellConditional c = bell_conditionals(bs_only(), p);
    REQUIRE(c[BellLabel::PsiMinus] == Catch::Approx(1.0));
    REQUIRE(c[BellLabel::PsiPlus] == Catch::Approx(0.0).margin(1e-14));
  }
  SECTION("device visibility at S=0") {
    SourceParams p;
    p.v = 0.55;
    const BellConditional c = bell_conditionals(bs_only(), p);
    REQUIRE(c[BellLabel::PsiMinus] == Catch::Approx(0.5345).margin(5e-5));
    REQUIRE(c[BellLabel::PsiPlus] == Catch::Approx(0.1552).margin(5e-5));
    REQUIRE(c[BellLabel::PhiPlus] == Catch::Approx(0.1552).margin(5e-5));
    REQUIRE(c[BellLabel::PsiMinus] - c[BellLabel::PhiPlus] ==
            Catch::Approx(0.55 / 1.45).margin(1e-12));
  }
}

TEST_CASE("conditionals normalize across random parameters") {
  Rng rng(31, 0);
  for (int rep = 0; rep < 300; ++rep) {
    SourceParams p;
    p.v = rng.uniform();
    p.s_uev = rng.uniform(0.0, 6.0);
    p.tau_x_ns = rng.uniform(0.05, 1.0);
    p.t2star_ns = rng.uniform(0.2, 20.0);
    const BsmSpec spec = rep % 3 == 0   ? bs_only()
                         : rep % 3 == 1 ? pbs(BellLabel::PsiMinus)
                                        : pbs(BellLabel::PsiPlus);
    const BellConditional c = bell_conditionals(spec, p);
    double sum = 0;
    for (BellLabel b : kBellLabels) {
      REQUIRE(c[b] >= 0.0);
      sum += c[b];
    }
    REQUIRE(sum == Catch::Approx(1.0).margin(1e-12));
  }
}

TEST_CASE("contrast coefficients") {
  SECTION("printed formulas") {
    const auto bs = contrast_coefficients(BsmSetup::BeamSplitterOnly, 0.55);
    REQUIRE(bs.c == Catch::Approx(0.3793).margin(5e-5));
    REQUIRE(bs.c_prime == Catch::Approx(0.3793).margin(5e-5));
    const auto pbs_c = contrast_coefficients(BsmSetup::PolarizationSelective, 0.79);
    REQUIRE(pbs_c.c == Catch::Approx(0.79));
    REQUIRE(pbs_c.c_prime == 1.0);
  }
  SECTION("ideal visibility") {
    const auto bs = contrast_coefficients(BsmSetup::BeamSplitterOnly, 1.0);
    REQUIRE(bs.c == Catch::Approx(1.0));
    REQUIRE(bs.c_prime == Catch::Approx(1.0));
  }
}

TEST_CASE("S=0 contrasts reproduce the printed coefficients exactly") {
  Rng rng(41, 0);
  for (int rep = 0; rep < 100; ++rep) {
    SourceParams p;
    p.v = rng.uniform();
    const BellConditional bs = bell_conditionals(bs_only(), p);
    const double contrast_bs = bs[BellLabel::PsiMinus] - bs[BellLabel::PhiPlus];
    REQUIRE(contrast_bs ==
            Catch::Approx(contrast_coefficients(BsmSetup::BeamSplitterOnly, p.v).c_prime)
                .margin(1e-12));

    const BellConditional ps = bell_conditionals(pbs(), p);
    const double contrast_pbs = ps[BellLabel::PsiMinus] - ps[BellLabel::PsiPlus];
    REQUIRE(contrast_pbs ==
            Catch::Approx(contrast_coefficients(BsmSetup::PolarizationSelective, p.v).c)
                .margin(1e-12));
  }
}

TEST_CASE("label-swap symmetry for the polarization-selective outcomes") {
  Rng rng(51, 0);
  for (int rep = 0; rep < 100; ++rep) {
    SourceParams p = device_params();
    p.v = rng.uniform();
    p.s_uev = rng.uniform(0.0, 4.0);
    const BellConditional minus = bell_conditionals(pbs(BellLabel::PsiMinus), p);
    const BellConditional plus = bell_conditionals(pbs(BellLabel::PsiPlus), p);
    REQUIRE(minus[BellLabel::PsiMinus] == Catch::Approx(plus[BellLabel::PsiPlus]).margin(1e-14));
    REQUIRE(minus[BellLabel::PsiPlus] == Catch::Approx(plus[BellLabel::PsiMinus]).margin(1e-14));
    REQUIRE(minus[BellLabel::PhiPlus] == 0.0);
    REQUIRE(plus[BellLabel::PhiPlus] == 0.0);
  }
}

TEST_CASE("stacked-probability structure across the visibility sweep") {
  // phi contributions vanish identically for the polarization-selective
  // setup; with finite splitting the psi+ contamination survives even at
  // perfect visibility.
  for (int i = 0; i <= 20; ++i) {
    SourceParams p = device_params();
    p.v = i / 20.0;
    const BellConditional ps = bell_conditionals(pbs(), p);
    REQUIRE(ps[BellLabel::PhiPlus] == 0.0);
    REQUIRE(ps[BellLabel::PhiMinus] == 0.0);
  }
  SourceParams ideal_v = device_params();
  ideal_v.v = 1.0;
  REQUIRE(bell_conditionals(bs_only(), ideal_v)[BellLabel::PsiPlus] > 0.0);
  REQUIRE(bell_conditionals(pbs(), ideal_v)[BellLabel::PsiPlus] > 0.0);
  ideal_v.s_uev = 0.0;
  REQUIRE(bell_conditionals(bs_only(), ideal_v)[BellLabel::PsiPlus] ==
          Catch::Approx(0.0).margin(1e-14));
}
