#pragma once

#include <utility>
#include <vector>

#include "bdf/energy.hpp"
#include "bdf/kernel.hpp"

namespace bdf {

enum class Scheme { plain, preconditioned };

struct SolverConfig {
  double alpha = 0.0;
  LatticeSpec lattice;
  SourceSpec source;
  Scheme scheme = Scheme::preconditioned;
  bool exchange_enabled = true;
  double tol = 1e-8;       // fixed-point tolerance in the combined iteration norm
  int max_iter = 200;
  double gap_tol = 1e-6;   // protective gap for the spectral projector
};

struct IterationRecord {
  int iter = 0;
  double x_increment = 0.0;
  EnergyBreakdown energy;
  double charge_str = 0.0;
  double charge_cube = 0.0;
  double min_abs_eig = 0.0;
};

enum class SolveStatus { converged, max_iter_exceeded, diverged };

struct VerificationReport {
  double commutator_norm = 0.0;  // || [P0 + Q, D_Q] ||_HS
  bool commutator_ok = false;
  double charge_str = 0.0;
  bool charge_ok = false;
  double d_value = 0.0;          // gap certificate d = 1/(1 - alpha(...))
  double d_times_alpha_pi4 = 0.0;
  bool d_ok = false;
  int optimality_samples = 0;
  double worst_delta_e = 0.0;    // most negative energy change over perturbations
  bool optimality_ok = false;
  bool all_ok = false;
};

struct SolverResult {
  explicit SolverResult(LatticePtr lat)
      : lattice(lat), q(lat), rho_prime(std::move(lat)) {}

  SolveStatus status = SolveStatus::max_iter_exceeded;
  bool converged = false;
  std::vector<IterationRecord> history;
  LatticePtr lattice;
  KernelOperator q;
  DensityField rho_prime;       // total density iterate rho_Q - n (or mixed variant)
  double contraction_rate = 0.0;  // geometric fit of the increment sequence
  VerificationReport verification;
};

struct SpectralProjection {
  explicit SpectralProjection(LatticePtr lat) : projector(std::move(lat)) {}

  KernelOperator projector;
  double min_abs_eig = 0.0;
  int negative_count = 0;
};

// Projector onto the negative spectral subspace of a self-adjoint kernel.
// Throws GapCollapse when an eigenvalue sits closer than gap_tol to zero.
SpectralProjection negative_spectral_projector(const KernelOperator& h, double gap_tol);

// Self-consistent vacuum iteration from (Q, rho') = (0, -n).
//   plain:          rho' fed back directly;
//   preconditioned: density mixed mode-by-mode with L = 1/(1 + alpha B(|k|)),
//                   which cancels the linear-response feedback.
SolverResult solve(const SolverConfig& cfg);

// Same, warm-started from a previous state.
SolverResult solve(const SolverConfig& cfg, KernelOperator q0, DensityField rho0);

// Fixed-point diagnostics for a claimed solution: commutator residual, charge
// quantisation, coercivity certificate of D_Q, and energy non-decrease under
// random admissible rank-two perturbations.
VerificationReport verify_solution(const SolverConfig& cfg, const KernelOperator& q,
                                   const DensityField& rho_prime, int optimality_samples = 100,
                                   std::uint64_t seed = 0);

// Solver-state snapshots (magic "BDFS"): kernel plus density iterate.
void save_state(const std::string& path, const KernelOperator& q, const DensityField& rho_prime);
std::pair<KernelOperator, DensityField> load_state(const std::string& path);

}  // namespace bdf
