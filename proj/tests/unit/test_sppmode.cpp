#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <limits>

#include "oracles.hpp"
#include "sppqm/errors.hpp"
#include "sppqm/sppmode.hpp"
#include "sppqm/units.hpp"

using namespace sppqm;
using oracle::rel;

namespace {

// eps1 = 1.31, |eps_r + eps1| / |eps_r| = 1e-2, eps_i / |eps_r| = 1e-4
InterfaceSpec representative() {
  InterfaceSpec s;
  const double er = -1.31 / 0.99;
  s.nimm.eps2 = {er, 1e-4 * std::abs(er)};
  return s;
}

InterfaceSpec random_spec(oracle::Gen& g) {
  InterfaceSpec s;
  s.dielectric.eps1 = g.uniform(1.0, 2.5);
  const double er = -s.dielectric.eps1 * g.uniform(1.003, 3.0);
  s.nimm.eps2 = {er, g.log_uniform(1e-6, 1e-2)};
  s.lambda_o = g.log_uniform(100e-9, 2e-6);
  return s;
}

}  // namespace

TEST_CASE("representative point against a high-precision reference") {
  // 40-digit evaluation of K = k0 eps2 / sqrt(eps2^2 - eps1^2), k1 = sqrt(K^2 - k0^2)
  const InterfaceSpec s = representative();
  const SppMode m = solve_mode(s);
  CHECK(rel(m.K / s.k0(), oracle::cd(7.088548903797194, 0.03491109477992434)) < 1e-12);
  CHECK(rel(m.xi1 / s.lambda_o, 0.02267920441048041) < 1e-12);
  CHECK(rel(m.xi2 / s.lambda_o, 0.02245212879061788) < 1e-12);
  CHECK(rel(m.l_x / s.lambda_o, 4.558864283551989) < 1e-10);
  CHECK(rel(magnetic_suppression(m, s), s.k0() / std::abs(m.k1)) < 1e-12);
  CHECK(rel(magnetic_suppression(m, s), 0.1424976439304530) < 1e-4);
}

TEST_CASE("dispersion matches the rationalised oracle form (property)") {
  oracle::Gen g(101);
  for (int n = 0; n < 300; ++n) {
    const InterfaceSpec s = random_spec(g);
    const cdouble K = dispersion_exact(s);
    const cdouble ref = oracle::spp_wavevector(s.k0(), s.dielectric.eps1, s.nimm.eps2);
    CHECK(rel(K, ref) < 1e-12);
    const cdouble r = s.dielectric.eps1 / s.nimm.eps2;
    const cdouble sq = s.k0() * s.k0() / (1.0 - r * r);
    CHECK(rel(K * K, sq) < 1e-12);
  }
}

TEST_CASE("branch and boundary invariants (property)") {
  oracle::Gen g(202);
  for (int n = 0; n < 300; ++n) {
    const InterfaceSpec s = random_spec(g);
    const SppMode m = solve_mode(s);
    CHECK(m.k_par > 0.0);
    CHECK(m.kappa > 0.0);
    CHECK(m.k1.real() > 0.0);
    CHECK(m.k2.real() > 0.0);
    CHECK(rel(m.k1 / m.k2, -s.dielectric.eps1 / s.nimm.eps2) < 1e-10);
    CHECK(m.l_x * m.kappa == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(m.lambda_par * m.k_par == doctest::Approx(2.0 * oracle::kPi).epsilon(1e-15));
    CHECK(rel(m.k1 * m.k1, m.K * m.K - s.k0() * s.k0()) < 1e-9);
    CHECK(m.k2 == m.K);
    CHECK(m.xi1 == doctest::Approx(1.0 / m.k1.real()));
    CHECK(m.xi2 == doctest::Approx(1.0 / std::abs(m.k2)));
  }
}

// To leading order in eps_i the approximate form equals the exact one times
// sqrt(1 - r2), so the 2% agreement holds for r2 <= 0.0396 only.
TEST_CASE("approximation agrees with exact when the low-loss check passes (property)") {
  oracle::Gen g(303);
  int checked = 0;
  while (checked < 200) {
    InterfaceSpec s;
    const double r2 = g.uniform(0.002, 0.0396);
    const double r1 = g.uniform(0.0, 0.05) * r2;
    const double er = -s.dielectric.eps1 / (1.0 - r2);
    s.nimm.eps2 = {er, r1 * std::abs(er)};
    if (s.nimm.eps2.imag() <= 0.0) continue;
    const auto ll = low_loss_check(s, 0.05);
    if (!ll.pass) continue;
    ++checked;
    const auto ap = dispersion_approx(s);
    CHECK(rel(std::abs(ap.K), std::abs(dispersion_exact(s))) < 0.02);
    // u formula written out
    const double ar = std::abs(er), ei = s.nimm.eps2.imag(), e1 = s.dielectric.eps1;
    CHECK(rel(ap.u, 2.0 * ei * ar / (ar * ar - ei * ei - e1 * e1)) < 1e-12);
  }
}

TEST_CASE("approximation error follows 1 - sqrt(1 - r2) up to the margin") {
  for (double r2 : {0.005, 0.01, 0.02, 0.03, 0.04, 0.05}) {
    InterfaceSpec s;
    const double er = -s.dielectric.eps1 / (1.0 - r2);
    s.nimm.eps2 = {er, 1e-6 * std::abs(er)};
    const double err = rel(std::abs(dispersion_approx(s).K), std::abs(dispersion_exact(s)));
    CHECK(err == doctest::Approx(1.0 - std::sqrt(1.0 - r2)).epsilon(1e-6));
  }
  // at the edge of the 0.05 margin the 2% agreement is not reached
  InterfaceSpec edge;
  const double er = -edge.dielectric.eps1 / 0.9501;
  edge.nimm.eps2 = {er, 1e-6 * std::abs(er)};
  CHECK(low_loss_check(edge, 0.05).pass);
  CHECK(rel(std::abs(dispersion_approx(edge).K), std::abs(dispersion_exact(edge))) > 0.02);
}

TEST_CASE("approximation: small-u ratio and invalid region") {
  InterfaceSpec s = representative();
  const auto ap = dispersion_approx(s);
  CHECK(ap.u == doctest::Approx(0.0100).epsilon(0.02));
  CHECK(ap.K.imag() / ap.K.real() == doctest::Approx(ap.u / 2.0).epsilon(1e-3));
  s.nimm.eps2 = {-1.2, 1e-3};  // |eps_r|^2 - eps_i^2 - eps1^2 < 0
  CHECK_THROWS_AS(dispersion_approx(s), DomainError);
}

TEST_CASE("low-loss diagnostics") {
  const auto a = low_loss_check(representative(), 0.1);
  CHECK(a.r1 == doctest::Approx(1e-4));
  CHECK(a.r2 == doctest::Approx(1e-2));
  CHECK(a.pass);
  InterfaceSpec lossless = representative();
  lossless.nimm.eps2.imag(0.0);
  CHECK(low_loss_check(lossless, 0.1).r1 == 0.0);
  CHECK(low_loss_check(lossless, 0.1).pass);
  InterfaceSpec far;
  far.nimm.eps2 = {-1.31 / 0.5, 1e-6};  // r2 = 0.5
  CHECK_FALSE(low_loss_check(far, 0.1).pass);
}

TEST_CASE("limits and errors") {
  InterfaceSpec lossless = representative();
  lossless.nimm.eps2.imag(0.0);
  const SppMode m = solve_mode(lossless);
  CHECK(m.kappa == 0.0);
  CHECK(std::isinf(m.l_x));

  InterfaceSpec mirror;
  mirror.nimm.eps2 = {-1e9, 0.0};
  CHECK(rel(dispersion_exact(mirror).real(), mirror.k0()) < 1e-12);

  InterfaceSpec singular;
  singular.nimm.eps2 = {-1.31, 0.0};
  CHECK_THROWS_AS(dispersion_exact(singular), SingularityError);

  InterfaceSpec magnetic;
  magnetic.nimm.mu2 = {0.5, 0.0};
  CHECK_THROWS_AS(dispersion_exact(magnetic), DomainError);
}

TEST_CASE("field profile boundary conditions (property)") {
  oracle::Gen g(404);
  for (int n = 0; n < 100; ++n) {
    const InterfaceSpec s = random_spec(g);
    const SppMode m = solve_mode(s);
    const FieldSample above = field_profile(m, s, 0.0);
    const FieldSample below = field_profile(m, s, -0.0 - 1e-300);
    CHECK(rel(above.ex, oracle::cd(1.0, 0.0)) < 1e-15);
    CHECK(rel(below.ex, above.ex) < 1e-12);
    CHECK(rel(below.hy, above.hy) < 1e-10);
    CHECK(rel(below.ez, s.dielectric.eps1 / s.nimm.eps2 * above.ez) < 1e-10);
    // transverse structure [e_x + i e_z K / k1] above the interface
    CHECK(rel(above.ez, oracle::cd(0.0, 1.0) * m.K / m.k1) < 1e-12);
    const double decay = std::abs(field_profile(m, s, m.xi1).ex) / std::abs(above.ex);
    CHECK(decay == doctest::Approx(std::exp(-1.0)).epsilon(1e-12));
    CHECK(rel(magnetic_suppression(m, s), s.k0() / std::abs(m.k1)) < 1e-12);
    // 2 pi xi1 / lambda_o differs from k0 / |k1| only through Im k1
    const double t = m.k1.imag() / m.k1.real();
    CHECK(rel(magnetic_suppression(m, s), 2.0 * oracle::kPi * m.xi1 / s.lambda_o) <= t * t);
  }
}

TEST_CASE("quantization length, written-out arithmetic") {
  InterfaceSpec s;
  const double xi = s.lambda_o / 40.0;
  // q = 2 pi / 40: {2.62 + 1.31 q^2} / 40 + {10.62 + 5.24 q^2} / 40
  const double q2 = (2.0 * oracle::kPi / 40.0) * (2.0 * oracle::kPi / 40.0);
  const double hand = (2.62 + 1.31 * q2) / 40.0 + (10.62 + 5.24 * q2) / 40.0;
  CHECK(rel(quantization_length(s, xi, xi) / s.lambda_o, hand) < 1e-14);
  CHECK(rel(hand, 0.3350403693016960) < 1e-14);
  CHECK(quantization_length(s, 0.0, 0.0) == 0.0);
  CHECK_THROWS_AS(quantization_length(s, -1.0, 1.0), DomainError);

  // dropping the q^2 terms gives 4 (eps_o + eps1) xi
  CHECK(rel(quantization_length(s, 1e-15, 1e-15), 4.0 * (2.0 + 1.31) * 1e-15) < 1e-12);
}

TEST_CASE("quantization length limit forms") {
  InterfaceSpec s;
  DrudeModel d;
  d.omega_mu = d.omega_e / 1.67;
  const double xi = s.lambda_o / 40.0;
  const auto q = quantization_length_limit(d, s, xi);
  CHECK(rel(q.form_b / s.lambda_o, 8.0 * 1.67 * 1.67 / 40.0) < 1e-12);
  CHECK(rel(q.form_a / s.lambda_o, 13.24 / 40.0) < 1e-12);
  const auto q2 = quantization_length_limit(d, s, 2.0 * xi);
  CHECK(rel(q2.form_a, 2.0 * q.form_a) < 1e-15);
  CHECK(rel(q2.form_b, 2.0 * q.form_b) < 1e-15);
  CHECK_THROWS_AS(quantization_length_limit(d, s, 0.0), DomainError);
}

TEST_CASE("group velocity against the analytic Drude derivative") {
  DrudeModel d;
  const DielectricParams diel;
  const double w_match = d.omega_e / std::sqrt(d.eps_inf + diel.eps1);
  for (double frac : {0.6, 0.8, 0.95}) {
    const double w = frac * w_match;
    const double lam = 2.0 * oracle::kPi * oracle::kC / (w * std::sqrt(diel.eps1 * diel.mu1));
    const InterfaceSpec s = InterfaceSpec::from_drude(diel, d, lam);
    CHECK(s.nimm.mu2 == oracle::cd(0.0, 0.0));
    const SppMode m = solve_mode(s);
    CHECK(m.vg_policy == VgPolicy::kFiniteDifference);
    // K(w) = -a w e s^{-1/2}, e = eps_inf - we^2/w^2, s = e^2 - eps1^2
    const double a = std::sqrt(diel.eps1 * diel.mu1) / oracle::kC;
    const double e = d.eps_inf - d.omega_e * d.omega_e / (w * w);
    const double de = 2.0 * d.omega_e * d.omega_e / (w * w * w);
    const double sq = e * e - diel.eps1 * diel.eps1;
    const double dK = -a * e / std::sqrt(sq) + a * w * de * diel.eps1 * diel.eps1 / std::pow(sq, 1.5);
    // centred difference with relative step 1e-4
    CHECK(rel(m.v_group, 1.0 / dK) < 1e-5);
    CHECK(rel(m.k_par, -a * w * e / std::sqrt(sq)) < 1e-12);
  }
  const SppMode direct = solve_mode(InterfaceSpec{});
  CHECK(direct.vg_policy == VgPolicy::kPhaseVelocity);
  CHECK(direct.v_group == direct.v_phase);
  CHECK(vg_policy_name(VgPolicy::kFiniteDifference) == "finite_difference");
  CHECK(vg_policy_name(VgPolicy::kPhaseVelocity) == "phase_velocity");
}

TEST_CASE("figure sweeps: layout, order and loss trends") {
  SweepGrid grid;
  const InterfaceSpec base;
  const auto f1 = sweep_figure1(grid, base);
  const auto f2 = sweep_figure2(grid, base);
  const auto er = grid.eps_r_values();
  REQUIRE(er.size() == 115);
  REQUIRE(f1.size() == er.size() * 3);
  for (std::size_t k = 1; k < f1.size(); ++k) {
    const bool ordered = f1[k - 1].eps_r < f1[k].eps_r ||
                         (f1[k - 1].eps_r == f1[k].eps_r && f1[k - 1].eps_i < f1[k].eps_i);
    CHECK(ordered);
  }
  for (const auto& r : f1) CHECK(r.error.empty());
  // rows for one eps_r are (1e-3, 1e-2, 10^-1.5)
  for (std::size_t b = 0; b < er.size(); ++b) CHECK(f1[3 * b].value > f1[3 * b + 1].value);
  // near eps_r = -1.35 confinement length grows with loss
  std::size_t b = 0;
  while (er[b] < -1.35 - 1e-9) ++b;
  CHECK(f2[3 * b + 1].value > f2[3 * b].value);
  // weak-binding side: xi1 grows as |eps_r| grows
  CHECK(f2[0].value > f2[3 * (er.size() - 20)].value);
}

TEST_CASE("sweep records per-point errors without aborting") {
  SweepGrid grid;
  grid.eps_r_start = -1.3125;
  grid.eps_r_stop = -1.3075;
  grid.eps_r_step = 0.0025;
  grid.eps_i = {0.0};
  const auto rows = sweep_figure1(grid, InterfaceSpec{});
  REQUIRE(rows.size() == 3);
  CHECK(rows[1].error.find("(eps1/eps2)^2 = 1") != std::string::npos);
  CHECK(std::isnan(rows[1].value));
  CHECK(rows[0].error.empty());

  SweepGrid empty;
  empty.eps_i.clear();
  CHECK_THROWS_AS(sweep_figure1(empty, InterfaceSpec{}), DomainError);
}
