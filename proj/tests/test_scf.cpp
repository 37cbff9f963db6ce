#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>

#include "bdf/errors.hpp"
#include "bdf/scf.hpp"

using namespace bdf;

namespace {

SolverConfig base_config() {
  SolverConfig cfg;
  cfg.alpha = 0.1;
  cfg.lattice = {4, 1.0, 2.0};
  cfg.source = {SourceSpec::Profile::gaussian, 1.0, 1.0};
  cfg.tol = 1e-9;
  return cfg;
}

}  // namespace

TEST_CASE("negative spectral projector of the free operator") {
  const auto lat = Lattice::create({4, 1.0, 2.0});
  const auto proj = negative_spectral_projector(free_dirac(lat), 1e-6);
  CHECK(proj.negative_count == 2 * lat->mode_count());
  // the spectrum is +-E(p), so the smallest magnitude is E(0) = 1
  CHECK(proj.min_abs_eig == doctest::Approx(1.0).epsilon(1e-12));
  CHECK((proj.projector - p0_projector(lat)).hs_norm() < 1e-11);

  // a protective gap wider than the physical one must trip
  CHECK_THROWS_AS(negative_spectral_projector(free_dirac(lat), 2.0), GapCollapse);
}

TEST_CASE("small solve converges and verifies") {
  const auto res = solve(base_config());
  CHECK(res.status == SolveStatus::converged);
  CHECK(res.converged);
  CHECK(res.history.size() >= 2);
  CHECK(res.history.back().x_increment <= 1e-9);
  CHECK(res.contraction_rate > 0.0);
  CHECK(res.contraction_rate < 1.0);

  // neutral vacuum: quantised charge zero, protected gap, stationary energy
  CHECK(std::abs(res.verification.charge_str) < 1e-8);
  CHECK(res.verification.commutator_ok);
  CHECK(res.verification.charge_ok);
  CHECK(res.verification.d_ok);
  CHECK(res.verification.optimality_ok);
  CHECK(res.verification.all_ok);

  // the interacting vacuum undercuts the free one
  CHECK(res.history.back().energy.total < 0.0);
}

TEST_CASE("density mixing beats the plain iteration on the density channel") {
  // the mixing weights cancel the density-response feedback, which dominates
  // when the exchange channel is off; that is the regime where the speed-up
  // is a theorem rather than a tendency
  auto cfg = base_config();
  cfg.alpha = 0.3;
  cfg.tol = 1e-10;
  cfg.exchange_enabled = false;

  cfg.scheme = Scheme::plain;
  const auto plain = solve(cfg);
  cfg.scheme = Scheme::preconditioned;
  const auto mixed = solve(cfg);

  REQUIRE(plain.converged);
  REQUIRE(mixed.converged);
  CHECK(mixed.contraction_rate < plain.contraction_rate);
  CHECK(mixed.history.size() <= plain.history.size());

  // both land on the same fixed point
  CHECK((plain.q - mixed.q).hs_norm() < 1e-7);
  CHECK(plain.history.back().energy.total ==
        doctest::Approx(mixed.history.back().energy.total).epsilon(1e-8));
}

TEST_CASE("fixed point is stable under re-iteration") {
  const auto cfg = base_config();
  const auto res = solve(cfg);
  REQUIRE(res.converged);

  const auto again = solve(cfg, res.q, res.rho_prime);
  CHECK(again.converged);
  CHECK(again.history.size() <= 2);
  CHECK((again.q - res.q).hs_norm() < 100.0 * cfg.tol);
}

TEST_CASE("state snapshots round-trip and guard their lattice") {
  const auto cfg = base_config();
  const auto res = solve(cfg);
  REQUIRE(res.converged);

  const char* path = "scf_state_roundtrip.bin";
  save_state(path, res.q, res.rho_prime);
  auto [q2, rho2] = load_state(path);
  CHECK((q2 - res.q).hs_norm() == 0.0);
  double drho = 0.0;
  for (int d = 0; d < rho2.size(); ++d) drho = std::max(drho, std::abs(rho2[d] - res.rho_prime[d]));
  CHECK(drho == 0.0);

  // warm start accepts the state only on the configured lattice
  auto other = cfg;
  other.lattice = {4, 1.0, 1.0};
  CHECK_THROWS_AS(solve(other, std::move(q2), std::move(rho2)), ConfigError);

  // unreadable or foreign files are rejected up front
  CHECK_THROWS_AS(load_state("scf_state_missing.bin"), SnapshotError);
  {
    std::FILE* f = std::fopen(path, "wb");
    std::fputs("not a snapshot", f);
    std::fclose(f);
  }
  CHECK_THROWS_AS(load_state(path), SnapshotError);
  std::remove(path);
}

TEST_CASE("diagnostics reject a non-solution") {
  const auto cfg = base_config();
  const auto lat = Lattice::create(cfg.lattice);
  const auto n = source_density(lat, cfg.source);
  const auto rep = verify_solution(cfg, KernelOperator::zero(lat), -n, 20, 1);
  CHECK_FALSE(rep.commutator_ok);  // free projector does not commute with D
  CHECK_FALSE(rep.all_ok);
}

TEST_CASE("exchange-free variant solves cleanly") {
  auto cfg = base_config();
  cfg.alpha = 0.3;
  cfg.exchange_enabled = false;
  const auto res = solve(cfg);
  CHECK(res.converged);
  CHECK(res.verification.all_ok);
  for (const auto& rec : res.history) CHECK(rec.energy.exchange == 0.0);
}

TEST_CASE("runs are deterministic") {
  const auto cfg = base_config();
  const auto a = solve(cfg);
  const auto b = solve(cfg);
  REQUIRE(a.history.size() == b.history.size());
  for (size_t j = 0; j < a.history.size(); ++j) {
    CHECK(a.history[j].x_increment == b.history[j].x_increment);
    CHECK(a.history[j].energy.total == b.history[j].energy.total);
  }
  CHECK((a.q - b.q).hs_norm() == 0.0);
}

TEST_CASE("iteration budget is honoured") {
  auto cfg = base_config();
  cfg.tol = 1e-15;  // unreachable
  cfg.max_iter = 2;
  const auto res = solve(cfg);
  CHECK(res.status == SolveStatus::max_iter_exceeded);
  CHECK_FALSE(res.converged);
  CHECK(res.history.size() == 2);
  CHECK_FALSE(res.verification.all_ok);  // diagnostics only run on convergence
}

TEST_CASE("solver surfaces a collapsing gap") {
  auto cfg = base_config();
  cfg.gap_tol = 2.0;
  CHECK_THROWS_AS(solve(cfg), GapCollapse);
}
