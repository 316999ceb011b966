// gp_core.hpp: Open-system geometric phase of a dephased spin-1/2
//
// Two independent routes to the same number:
//   * geometric_phase: the closed expression in terms of the sampled
//     decoherence factor r(t) (integral of (Omega - dphi/dt) sin^2(theta_+/2)
//     plus the arctan boundary term),
//   * gp_from_trajectory: the kinematic definition evaluated directly on a
//     sequence of reduced density matrices (instantaneous eigenvector of the
//     largest eigenvalue, discrete parallel transport).
//
// Cycle convention: the spin completes one Bloch-sphere loop per period
// tau = 2 pi / Omega, i.e. the reduced coherence is
//   <0|rho_r(t)|1> = (sin(theta)/2) e^{-i Omega t} r(t).
// The unitary limit is then Phi_0 = pi (1 - cos theta).

#pragma once

#include "gphase/qmat.hpp"

#include <complex>
#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace gphase {

using Complex = std::complex<double>;

struct SystemParams {
    double omega;  // angular frequency (rad/s)
    double theta;  // Bloch polar angle of the initial state, [0, pi]

    SystemParams(double omega, double theta);
    double tau() const;
};

/// r(t) sampled uniformly on [0, tau].
///
/// The phase follows r = |r| e^{-i phi}: phase_unwrapped holds phi, i.e. the
/// negated, continuously unwrapped argument of r, with phi(0) = -arg r(0) ~ 0.
class DecoherenceTrace {
public:
    /// Validates a uniform sample set starting at t = 0 and unwraps its phase.
    DecoherenceTrace(std::vector<double> times, std::vector<Complex> r_values);

    const std::vector<double>& times() const { return times_; }
    const std::vector<Complex>& r_values() const { return r_; }
    const std::vector<double>& magnitude() const { return magnitude_; }
    const std::vector<double>& phase_unwrapped() const { return phase_; }

    std::size_t intervals() const { return times_.size() - 1; }
    double step() const { return times_[1] - times_[0]; }
    double end_time() const { return times_.back(); }
    /// Largest |phi(t_{i+1}) - phi(t_i)|.
    double max_phase_step() const;

private:
    std::vector<double> times_;
    std::vector<Complex> r_;
    std::vector<double> magnitude_;
    std::vector<double> phase_;
};

using DecoherenceSampler = std::function<Complex(double)>;

struct TraceOptions {
    std::size_t max_samples = std::size_t{1} << 16;
    // Largest accepted per-sample phase increment before the grid is refined.
    double phase_step_limit = 0.7853981633974483;
};

/// Samples r(t) on M uniform intervals over one period, doubling M until the
/// phase increments are below the limit. Throws UnwrapFailure when the limit
/// is still exceeded at max_samples (e.g. r passes through zero).
DecoherenceTrace build_trace(const DecoherenceSampler& sampler, const SystemParams& params,
                             std::size_t samples, const TraceOptions& options = {});

/// Largest eigenvalue of the reduced density matrix, (1 + sqrt(cos^2 + |r|^2 sin^2)) / 2.
double eps_plus(double r_abs, double theta);

struct HalfAngle {
    double cos_half;
    double sin_half;
};

/// Components of the eigenvector belonging to eps_plus:
/// |+> = sin(theta_+/2)|0> + cos(theta_+/2) e^{i chi}|1>.
/// Throws DegenerateEigenvector when |r| sin(theta) and eps_plus - sin^2(theta/2)
/// both vanish.
HalfAngle bloch_plus_angle(double r_abs, double theta, double eps_plus_value);

struct GpResult {
    double phi_total;
    double phi_unitary;
    double correction;
    double integral_part;
    double arctan_part;
    double eps_plus_final;
};

/// Geometric phase from a decoherence trace covering exactly one period.
/// The integral part is not reduced modulo 2 pi. At theta = 0 or pi the bath
/// drops out of the reduced state and the unitary value is returned.
GpResult geometric_phase(const DecoherenceTrace& trace, const SystemParams& params);

/// Reduced density matrices of the cycle: diagonal sin^2(theta/2), cos^2(theta/2),
/// coherence (sin(theta)/2) e^{-i Omega t} r(t).
std::vector<qmat::ComplexMatrix> density_trajectory(const DecoherenceTrace& trace,
                                                    const SystemParams& params);

/// arg[<k_0|k_M> prod_i <k_{i+1}|k_i>], invariant under per-sample rephasing.
double bargmann_phase(std::span<const qmat::StateVector> vectors);

/// Kinematic geometric phase of the + eigenmode along a closed trajectory,
/// returned in (-pi, pi]. With extrapolate set and an even number of
/// intervals, the O(h^2) discretisation error is removed by Richardson
/// extrapolation against the every-other-sample path.
double gp_from_trajectory(std::span<const qmat::ComplexMatrix> rho_t, bool extrapolate = true);

/// pi (1 - cos theta)
double unitary_geometric_phase(double theta);

/// -pi cos theta
double dynamical_phase(const SystemParams& params);

}  // namespace gphase
