// trotter_protocol.cpp: Simulated two-qubit experiment for the geometric-phase correction

#include "gphase/trotter_protocol.hpp"

#include "gphase/errors.hpp"
#include "gphase/numerics.hpp"

#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <random>

namespace gphase::protocol {

using qmat::ComplexMatrix;
using qmat::StateVector;

namespace {

const ComplexMatrix& id2() {
    static const ComplexMatrix m = qmat::identity(2);
    return m;
}

ComplexMatrix on_system(const ComplexMatrix& a) { return qmat::kron(a, id2()); }
ComplexMatrix on_environment(const ComplexMatrix& a) { return qmat::kron(id2(), a); }

// e^{-i a P} for a Pauli matrix P.
ComplexMatrix pauli_rotation(const ComplexMatrix& pauli, double a) {
    return std::cos(a) * id2() - Complex(0.0, std::sin(a)) * pauli;
}

ComplexMatrix zz_rotation(double a) {
    ComplexMatrix u = ComplexMatrix::Zero(4, 4);
    u(0, 0) = std::exp(Complex(0.0, -a));
    u(1, 1) = std::exp(Complex(0.0, a));
    u(2, 2) = std::exp(Complex(0.0, a));
    u(3, 3) = std::exp(Complex(0.0, -a));
    return u;
}

// e^{-i pi X/4} e^{-i a Y} e^{+i pi X/4}
ComplexMatrix pulsed_z_rotation(double a) {
    const double q = numerics::kPi / 4.0;
    return pauli_rotation(qmat::pauli_x(), q) * pauli_rotation(qmat::pauli_y(), a) *
           pauli_rotation(qmat::pauli_x(), -q);
}

ComplexMatrix step_with(const ProtocolParams& p, double dt, bool pulsed) {
    const double omega = p.sys.omega;
    const double b = p.bath.b_field();
    const double gap = p.bath.delta_gap;
    const double d = p.bath.coupling;
    const ComplexMatrix half_x = on_environment(pauli_rotation(qmat::pauli_x(), 0.5 * gap * dt));
    const ComplexMatrix rot_s = on_system(pulsed ? pulsed_z_rotation(omega * dt)
                                                 : pauli_rotation(qmat::pauli_z(), omega * dt));
    const ComplexMatrix rot_e = on_environment(pulsed ? pulsed_z_rotation(b * dt)
                                                      : pauli_rotation(qmat::pauli_z(), b * dt));
    return half_x * zz_rotation(d * dt) * rot_s * rot_e * half_x;
}

int steps_for(const ProtocolParams& p, double t) {
    const double n = static_cast<double>(p.trotter_steps) * t / p.sys.tau();
    return std::max(1, static_cast<int>(std::ceil(n - 1e-9)));
}

ComplexMatrix matrix_power(const ComplexMatrix& u, int n) {
    ComplexMatrix result = qmat::identity(u.rows());
    ComplexMatrix base = u;
    while (n > 0) {
        if (n & 1) result = result * base;
        base = base * base;
        n >>= 1;
    }
    return result;
}

}  // namespace

void ProtocolParams::validate() const {
    bath.validate();
    if (!(sys.omega > 0.0) || !std::isfinite(sys.omega)) throw ValidationError("ProtocolParams: Omega must be positive");
    if (trotter_steps < 1) throw ValidationError("ProtocolParams: trotter_steps must be >= 1");
    if (!(input_theta > 0.0 && input_theta < numerics::kPi))
        throw ValidationError("ProtocolParams: input_theta must lie in (0, pi)");
}

ComplexMatrix build_target_hamiltonian(const ProtocolParams& p) {
    p.validate();
    const ComplexMatrix z = qmat::pauli_z();
    const ComplexMatrix x = qmat::pauli_x();
    return p.sys.omega * on_system(z) + p.bath.coupling * qmat::kron(z, z) + p.bath.b_field() * on_environment(z) +
           p.bath.delta_gap * on_environment(x);
}

ComplexMatrix exact_propagator(const ProtocolParams& p, double t) {
    return qmat::spectrum(build_target_hamiltonian(p)).propagator(t);
}

ComplexMatrix trotter_step(const ProtocolParams& p, double dt) {
    p.validate();
    if (!(dt > 0.0)) throw ValidationError("trotter_step: dt must be positive");
    return step_with(p, dt, false);
}

ComplexMatrix pulse_level_step(const ProtocolParams& p, double dt) {
    p.validate();
    if (!(dt > 0.0)) throw ValidationError("pulse_level_step: dt must be positive");
    return step_with(p, dt, true);
}

ComplexMatrix propagator(const ProtocolParams& p, double t) {
    p.validate();
    if (t == 0.0) return qmat::identity(4);
    switch (p.decomposition) {
        case Decomposition::Exact:
            return exact_propagator(p, t);
        case Decomposition::CoarseTrotter:
        case Decomposition::PulseLevel: {
            const int n = steps_for(p, t);
            const bool pulsed = p.decomposition == Decomposition::PulseLevel;
            return matrix_power(step_with(p, t / n, pulsed), n);
        }
    }
    throw ValidationError("propagator: unknown decomposition");
}

double cycle_error(const ProtocolParams& p) {
    const double tau = p.sys.tau();
    const ComplexMatrix diff = propagator(p, tau) - exact_propagator(p, tau);
    return Eigen::JacobiSVD<ComplexMatrix>(diff).singularValues()(0);
}

PulseCheckReport pulse_decompositions_check(int random_angles, std::uint64_t seed) {
    std::vector<double> angles;
    for (int i = -12; i <= 12; ++i) angles.push_back(i * numerics::kPi / 12.0);
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> dist(-4.0 * numerics::kPi, 4.0 * numerics::kPi);
    for (int i = 0; i < random_angles; ++i) angles.push_back(dist(rng));

    const ComplexMatrix z = qmat::pauli_z();
    PulseCheckReport report;
    for (double a : angles) {
        const ComplexMatrix target = pauli_rotation(z, a);
        const ComplexMatrix pulsed = pulsed_z_rotation(a);
        report.max_residual_environment =
            std::max(report.max_residual_environment,
                     (on_environment(target) - on_environment(pulsed)).cwiseAbs().maxCoeff());
        report.max_residual_system =
            std::max(report.max_residual_system, (on_system(target) - on_system(pulsed)).cwiseAbs().maxCoeff());
        const ComplexMatrix zz = qmat::kron(z, z);
        const ComplexMatrix coupling_exact = qmat::spectrum(zz).propagator(a);
        report.max_residual_coupling =
            std::max(report.max_residual_coupling, (coupling_exact - zz_rotation(a)).cwiseAbs().maxCoeff());
        ++report.angles_checked;
    }
    report.passed = report.max_residual_environment < 1e-12 && report.max_residual_system < 1e-12 &&
                    report.max_residual_coupling < 1e-12;
    return report;
}

StateVector initial_state(const ProtocolParams& p) {
    p.validate();
    StateVector s(2);
    s << std::sin(0.5 * p.input_theta), std::cos(0.5 * p.input_theta);
    return qmat::kron(s, two_level::ground_state(p.bath));
}

Complex readout(const StateVector& psi, const ProtocolParams& p, double t) {
    if (psi.size() != 4) throw DimensionMismatch("readout: expected a two-qubit state");
    const ComplexMatrix rho_s = qmat::partial_trace_env(qmat::projector(psi));
    return rho_s(0, 1) * (2.0 / std::sin(p.input_theta)) * std::exp(Complex(0.0, 2.0 * p.sys.omega * t));
}

ProtocolRun run_protocol(const ProtocolParams& p, std::span<const double> sample_times) {
    p.validate();
    const StateVector psi0 = initial_state(p);
    const qmat::HermitianSpectrum spec = qmat::spectrum(build_target_hamiltonian(p));

    std::vector<Complex> r;
    std::vector<double> fidelity;
    r.reserve(sample_times.size());
    fidelity.reserve(sample_times.size());
    for (double t : sample_times) {
        const StateVector ref = spec.propagator(t) * psi0;
        StateVector psi = ref;
        if (p.decomposition != Decomposition::Exact) psi = propagator(p, t) * psi0;
        r.push_back(readout(psi, p, t));
        fidelity.push_back(std::clamp(std::norm(ref.dot(psi)), 0.0, 1.0));
    }
    DecoherenceTrace trace(std::vector<double>(sample_times.begin(), sample_times.end()), std::move(r));
    const GpResult gp = geometric_phase(trace, p.sys);
    return ProtocolRun{std::move(trace), std::move(fidelity), gp};
}

ProtocolRun run_protocol(const ProtocolParams& p, std::size_t intervals) {
    p.validate();
    const std::vector<double> times = numerics::uniform_grid(p.sys.tau(), intervals);
    return run_protocol(p, times);
}

double cycle_fidelity(const ProtocolParams& p) {
    const StateVector psi0 = initial_state(p);
    const double tau = p.sys.tau();
    const StateVector ref = exact_propagator(p, tau) * psi0;
    const StateVector psi = propagator(p, tau) * psi0;
    return std::clamp(std::norm(ref.dot(psi)), 0.0, 1.0);
}

std::vector<CorrectionPoint> correction_experiment(const ProtocolParams& p, std::span<const double> b_grid,
                                                   std::size_t intervals) {
    p.validate();
    two_level::TwoLevelBathParams theory_base = p.bath;
    theory_base.convention = two_level::CouplingConvention::ZzTarget;
    const std::vector<two_level::CurvePoint> theory =
        two_level::gp_correction_curve(b_grid, theory_base, p.sys, intervals);

    std::vector<CorrectionPoint> out;
    out.reserve(b_grid.size());
    for (std::size_t i = 0; i < b_grid.size(); ++i) {
        CorrectionPoint pt;
        pt.b_field = b_grid[i];
        try {
            ProtocolParams coupled = p;
            coupled.bath = two_level::TwoLevelBathParams::from_field(b_grid[i], p.bath.delta_gap, p.bath.coupling,
                                                                     two_level::CouplingConvention::ZzTarget);
            ProtocolParams baseline = coupled;
            baseline.bath.coupling = 0.0;
            const double phi_c = run_protocol(coupled, intervals).gp.phi_total;
            const double phi_b = run_protocol(baseline, intervals).gp.phi_total;
            pt.dphi_protocol = phi_c - phi_b;
            if (!theory[i].ok) throw Error(theory[i].error);
            pt.dphi_theory = theory[i].delta_phi;
            pt.ok = true;
        } catch (const Error& e) {
            pt.error = e.what();
        }
        out.push_back(std::move(pt));
    }
    return out;
}

TrotterSweep find_min_trotter_steps(const ProtocolParams& p, std::span<const double> b_grid, double threshold,
                                    int max_steps) {
    p.validate();
    TrotterSweep sweep;
    for (int n = 1; n <= max_steps; n *= 2) {
        double worst = 1.0;
        for (double b : b_grid) {
            ProtocolParams q = p;
            q.decomposition = Decomposition::CoarseTrotter;
            q.trotter_steps = n;
            q.bath = two_level::TwoLevelBathParams::from_field(b, p.bath.delta_gap, p.bath.coupling,
                                                               two_level::CouplingConvention::ZzTarget);
            worst = std::min(worst, cycle_fidelity(q));
        }
        sweep.steps.push_back(n);
        sweep.min_fidelity.push_back(worst);
        if (worst >= threshold) {
            sweep.pinned_steps = n;
            break;
        }
    }
    return sweep;
}

}  // namespace gphase::protocol
