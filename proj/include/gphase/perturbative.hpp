// perturbative.hpp: Weak-coupling expansion of the open-system geometric phase
//
// With |r(t)|^2 = 1 - R2(t) d^2 - R3(t) d^3 + O(d^4) and arg r(t) = phi1(t) d + ...,
// the phase to third order in the coupling d is
//
//   Phi ~ pi(1 - cos th) - cos th sin^2 th [ d^2 (Omega/4) int R2
//         + d^3/24 (3 R2(tau) phi1(tau) + phi1(tau)^3 + 6 Omega int R3 - 6 int R2 phi1') ]
//
// For the Ising chain every ingredient has a closed form in the thermodynamic
// limit; G1 involves the complete elliptic integrals K and E.

#pragma once

#include "gphase/bath_ising.hpp"
#include "gphase/gp_core.hpp"

#include <functional>
#include <span>
#include <vector>

namespace gphase::perturbative {

/// Complete elliptic integral of the first kind, parameter convention
/// K(m) = int_0^{pi/2} (1 - m sin^2 x)^{-1/2} dx, m in [0, 1). AGM iteration.
double elliptic_k(double m);

/// Complete elliptic integral of the second kind, m in [0, 1].
double elliptic_e(double m);

struct ExpansionCoefficients {
    std::vector<double> times;
    std::vector<double> r2;
    std::vector<double> r3;
    std::vector<double> phi1;  // coefficient of arg r, i.e. r = |r| e^{+i phi}
};

/// Sampler of r(t) for a given coupling d.
using CouplingFamily = std::function<DecoherenceSampler(double coupling)>;

/// Finite-difference extraction at d = 0 from seven-point stencils in d
/// (sixth order for R2 and phi1, fourth order for R3). Throws
/// StencilConditioning when R2 comes out negative beyond roundoff.
ExpansionCoefficients extract_coefficients_numeric(const CouplingFamily& family,
                                                   std::span<const double> times, double step = 1e-3);

struct ApproxPhase {
    double order2;
    double order3;
};

/// Third-order (and second-order truncated) phase from sampled coefficients.
/// The grid must be uniform and span exactly one period.
ApproxPhase gp_third_order(const ExpansionCoefficients& coeffs, const SystemParams& sys, double coupling);

/// Per-mode expansion coefficients of the one-sided Ising decoherence factor:
///   1 - R_k^2 = r2 d^2 + r3 d^3 + ...,  phi_k - eps_k t = phi1 d + ...
struct ModeCoefficients {
    double r2;
    double r3;
    double phi1;
};

ModeCoefficients mode_coefficients(double j_coupling, double lambda, double k, double t);

/// The same three coefficients as printed (J = 1):
///   16 sin^2k sin^2(e t)/e^4, -128 (cos k - l) sin^2k sin(e t)[sin(e t) - e t cos(e t)]/e^6,
///   (l - cos k)/e.
ModeCoefficients printed_mode_coefficients(double lambda, double k, double t);

/// Finite-N coefficients: sums of mode_coefficients over the N/2 momenta.
ExpansionCoefficients ising_coefficients(const ising::IsingBathParams& p, std::span<const double> times);

/// Thermodynamic-limit ingredients of the Ising phase, with T = tau:
///   f2 = R2(T), F2 = int_0^T R2, F3 = int_0^T R3, G1 = phi1(t)/t,
/// each k-sum replaced by (N / 2 pi) int_0^pi dk.
struct IsingClosedForms {
    double period;
    double f2;
    double F2;
    double F3;
    double G1;
};

IsingClosedForms ising_closed_forms(const ising::IsingBathParams& p, const SystemParams& sys);

/// The f2, F2, F3 integrands exactly as printed (J = 1), and G1 from the
/// printed elliptic expression. F2 and G1 agree with ising_closed_forms; the
/// printed F3 is -1/128 of int R3, and the printed f2 integrand carries
/// sin(e T) where R2(T) has 16 sin^2(e T).
IsingClosedForms printed_closed_forms(const ising::IsingBathParams& p, const SystemParams& sys);

/// (N J / (pi lambda)) [(lambda + 1) E(m) + (lambda - 1) K(m)], m = 4 lambda / (1 + lambda)^2.
double g1_closed_form(int n_spins, double j_coupling, double lambda);

/// Sum over the N/2 momenta of d eps_k / d lambda.
double g1_direct_sum(int n_spins, double j_coupling, double lambda);

/// Ising phase from the closed forms at order 2 or 3.
double gp_approx_ising(const ising::IsingBathParams& p, const SystemParams& sys, int order);

/// Adaptive Gauss-Kronrod over [a, b] split into equal panels. Throws
/// QuadratureNonconvergence above the absolute tolerance.
double integrate(const std::function<double(double)>& f, double a, double b, int panels = 8,
                 double abs_tol = 1e-10);

}  // namespace gphase::perturbative
