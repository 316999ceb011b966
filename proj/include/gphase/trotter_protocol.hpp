// trotter_protocol.hpp: Simulated two-qubit experiment for the geometric-phase correction
//
// Target Hamiltonian on (system (x) environment):
//   H = Omega Z_S + delta Z_S Z_E + B Z_E + Delta X_E
// evolved exactly or with the symmetric step
//   U(dt) = e^{-i Delta dt X_E/2} e^{-i delta dt Z_S Z_E} e^{-i Omega dt Z_S} e^{-i B dt Z_E} e^{-i Delta dt X_E/2}.
// The decoherence factor is read back from the system coherence,
//   r(t) = <0|rho_S|1> (2 / sin theta_in) e^{+2i Omega t}.

#pragma once

#include "gphase/bath_two_level.hpp"
#include "gphase/gp_core.hpp"
#include "gphase/qmat.hpp"

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace gphase::protocol {

enum class Decomposition {
    Exact,
    CoarseTrotter,
    PulseLevel,  // Z rotations realised as X-conjugated Y rotations
};

/// Steps per cycle at which the 0.3% fidelity budget holds over B in [-0.2, 0.2] Omega.
inline constexpr int kPinnedTrotterSteps = 2;

struct ProtocolParams {
    SystemParams sys{1.0, 0.7853981633974483};
    two_level::TwoLevelBathParams bath{};
    int trotter_steps = kPinnedTrotterSteps;  // steps per period tau
    Decomposition decomposition = Decomposition::Exact;
    double input_theta = 1.5707963267948966;  // polar angle of the prepared system state

    void validate() const;
};

/// 4x4 target Hamiltonian. The bath is coupled through delta Z_S Z_E
/// regardless of the bath's stored convention.
qmat::ComplexMatrix build_target_hamiltonian(const ProtocolParams& p);

qmat::ComplexMatrix exact_propagator(const ProtocolParams& p, double t);

/// One symmetric step, five exact factor exponentials in the order above.
qmat::ComplexMatrix trotter_step(const ProtocolParams& p, double dt);

/// trotter_step with e^{-i a Z} replaced by e^{-i pi X/4} e^{-i a Y} e^{i pi X/4}.
qmat::ComplexMatrix pulse_level_step(const ProtocolParams& p, double dt);

/// Propagator to time t for the configured decomposition. Trotterised
/// evolution uses max(1, ceil(n t / tau)) equal steps.
qmat::ComplexMatrix propagator(const ProtocolParams& p, double t);

/// Full-cycle propagator error |U_n(tau) - U(tau)|_2 (spectral norm).
double cycle_error(const ProtocolParams& p);

struct PulseCheckReport {
    int angles_checked = 0;
    double max_residual_environment = 0.0;  // e^{-i a Z_E} identity
    double max_residual_system = 0.0;       // e^{-i a Z_S} identity
    double max_residual_coupling = 0.0;     // coupling gate angle delta t
    bool passed = false;
};

/// Checks the pulse identities on a fixed angle grid plus random angles.
PulseCheckReport pulse_decompositions_check(int random_angles = 100, std::uint64_t seed = 20240611);

/// (sin(th/2)|0> + cos(th/2)|1>) (x) |g>, th = input_theta.
qmat::StateVector initial_state(const ProtocolParams& p);

/// Decoherence factor read from a two-qubit state at time t.
Complex readout(const qmat::StateVector& psi, const ProtocolParams& p, double t);

struct ProtocolRun {
    DecoherenceTrace trace;
    std::vector<double> fidelity_vs_exact;
    GpResult gp;
};

/// Runs the protocol at uniform sample times over one period (first 0, last tau).
ProtocolRun run_protocol(const ProtocolParams& p, std::span<const double> sample_times);
ProtocolRun run_protocol(const ProtocolParams& p, std::size_t intervals = 64);

/// |<psi_exact(tau)|psi(tau)>|^2 for the configured decomposition.
double cycle_fidelity(const ProtocolParams& p);

struct CorrectionPoint {
    double b_field = 0.0;
    double dphi_protocol = 0.0;
    double dphi_theory = 0.0;
    bool ok = false;
    std::string error;
};

/// delta Phi(B) from the protocol (coupled minus delta = 0 baseline) next to
/// the branch-oracle prediction. Failing points keep ok = false.
std::vector<CorrectionPoint> correction_experiment(const ProtocolParams& p, std::span<const double> b_grid,
                                                   std::size_t intervals = 256);

struct TrotterSweep {
    int pinned_steps = 0;  // 0 when no n <= max_steps meets the threshold
    std::vector<int> steps;
    std::vector<double> min_fidelity;
};

/// Smallest power-of-two n with cycle fidelity >= threshold at every B.
TrotterSweep find_min_trotter_steps(const ProtocolParams& p, std::span<const double> b_grid,
                                    double threshold = 0.997, int max_steps = 512);

}  // namespace gphase::protocol
