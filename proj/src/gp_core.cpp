// gp_core.cpp: Open-system geometric phase of a dephased spin-1/2

#include "gphase/gp_core.hpp"

#include "gphase/errors.hpp"
#include "gphase/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace gphase {

using numerics::kPi;
using numerics::kTwoPi;

SystemParams::SystemParams(double omega_, double theta_) : omega(omega_), theta(theta_) {
    if (!(std::isfinite(omega) && omega > 0.0))
        throw ValidationError("SystemParams: omega must be positive and finite");
    if (!(std::isfinite(theta) && theta >= 0.0 && theta <= kPi))
        throw ValidationError("SystemParams: theta must lie in [0, pi]");
}

double SystemParams::tau() const { return kTwoPi / omega; }

DecoherenceTrace::DecoherenceTrace(std::vector<double> times, std::vector<Complex> r_values)
    : times_(std::move(times)), r_(std::move(r_values)) {
    if (times_.size() != r_.size())
        throw ValidationError("DecoherenceTrace: times and r_values differ in length");
    if (times_.size() < 5) throw ValidationError("DecoherenceTrace: need at least 5 samples");
    if (times_.front() != 0.0) throw ValidationError("DecoherenceTrace: grid must start at t = 0");
    const double h = (times_.back() - times_.front()) / static_cast<double>(times_.size() - 1);
    if (!(h > 0.0)) throw ValidationError("DecoherenceTrace: grid must be increasing");
    for (std::size_t i = 1; i < times_.size(); ++i) {
        if (std::abs(times_[i] - times_[i - 1] - h) > 1e-9 * h)
            throw ValidationError("DecoherenceTrace: grid is not uniform");
    }
    if (std::abs(r_.front() - 1.0) > 1e-9) {
        std::ostringstream os;
        os << "DecoherenceTrace: r(0) = " << r_.front() << ", expected 1";
        throw InvalidInitialValue(os.str());
    }

    magnitude_.resize(r_.size());
    std::vector<double> arg(r_.size());
    for (std::size_t i = 0; i < r_.size(); ++i) {
        if (!std::isfinite(r_[i].real()) || !std::isfinite(r_[i].imag()))
            throw ValidationError("DecoherenceTrace: non-finite sample");
        magnitude_[i] = std::abs(r_[i]);
        if (magnitude_[i] > 1.0 + 1e-9)
            throw ValidationError("DecoherenceTrace: |r| exceeds 1");
        arg[i] = std::arg(r_[i]);
    }
    phase_ = numerics::unwrap(arg);
    for (double& p : phase_) p = -p;
}

double DecoherenceTrace::max_phase_step() const {
    double m = 0.0;
    for (std::size_t i = 1; i < phase_.size(); ++i) m = std::max(m, std::abs(phase_[i] - phase_[i - 1]));
    return m;
}

DecoherenceTrace build_trace(const DecoherenceSampler& sampler, const SystemParams& params,
                             std::size_t samples, const TraceOptions& options) {
    if (samples < 64) throw ValidationError("build_trace: need at least 64 intervals");
    const double tau = params.tau();

    std::size_t m = samples;
    std::vector<Complex> r(m + 1);
    for (std::size_t i = 0; i <= m; ++i)
        r[i] = sampler(tau * static_cast<double>(i) / static_cast<double>(m));
    if (std::abs(r[0] - 1.0) > 1e-9) {
        std::ostringstream os;
        os << "build_trace: sampler(0) = " << r[0] << ", expected 1";
        throw InvalidInitialValue(os.str());
    }

    while (true) {
        DecoherenceTrace trace(numerics::uniform_grid(tau, m), r);
        const double step = trace.max_phase_step();
        bool near_zero = false;
        for (double a : trace.magnitude()) near_zero = near_zero || a < 1e-12;
        if (step < options.phase_step_limit && !near_zero) return trace;
        if (2 * m > options.max_samples || near_zero) {
            std::ostringstream os;
            os << "build_trace: phase increment " << step << " rad at " << m
               << " intervals" << (near_zero ? " (r passes through zero)" : "");
            throw UnwrapFailure(os.str());
        }
        // Refine, reusing the existing samples at even indices.
        std::vector<Complex> finer(2 * m + 1);
        for (std::size_t i = 0; i <= m; ++i) finer[2 * i] = r[i];
        for (std::size_t i = 0; i < m; ++i)
            finer[2 * i + 1] = sampler(tau * static_cast<double>(2 * i + 1) / static_cast<double>(2 * m));
        r = std::move(finer);
        m *= 2;
    }
}

double eps_plus(double r_abs, double theta) {
    const double a = std::min(std::max(r_abs, 0.0), 1.0);
    const double c = std::cos(theta);
    const double s = std::sin(theta);
    return 0.5 * (1.0 + std::sqrt(c * c + a * a * s * s));
}

HalfAngle bloch_plus_angle(double r_abs, double theta, double eps_plus_value) {
    const double a = std::min(std::max(r_abs, 0.0), 1.0);
    const double c = std::cos(theta);
    const double s = std::sin(theta);
    // numerator 2(eps_+ - sin^2(theta/2)) = cos(theta) + root, written without
    // cancellation when cos(theta) < 0
    const double root = 2.0 * eps_plus_value - 1.0;
    const double num = c >= 0.0 ? c + root : (a * a * s * s) / (root - c);
    const double den = a * s;
    const double norm = std::hypot(num, den);
    if (!(norm > 1e-15)) {
        std::ostringstream os;
        os << "bloch_plus_angle: degenerate eigenvector at |r| = " << r_abs << ", theta = " << theta;
        throw DegenerateEigenvector(os.str());
    }
    return {num / norm, den / norm};
}

double unitary_geometric_phase(double theta) { return kPi * (1.0 - std::cos(theta)); }

double dynamical_phase(const SystemParams& params) { return -kPi * std::cos(params.theta); }

GpResult geometric_phase(const DecoherenceTrace& trace, const SystemParams& params) {
    const double phi0 = unitary_geometric_phase(params.theta);
    const double tau = params.tau();
    if (std::abs(trace.end_time() - tau) > 1e-9 * tau)
        throw ValidationError("geometric_phase: trace does not span exactly one period");

    if (std::sin(params.theta) < 1e-12) {
        // Poles: sin(theta) = 0 removes every bath term from the reduced state.
        return {phi0, phi0, 0.0, phi0, 0.0, 1.0};
    }

    const std::size_t n = trace.times().size();
    const double h = trace.step();
    const double half = 0.5 * params.theta;

    // The phase formula takes r = |r| e^{+i psi}; the trace stores phi = -psi.
    std::vector<double> psi(n);
    for (std::size_t i = 0; i < n; ++i) psi[i] = -trace.phase_unwrapped()[i];
    const std::vector<double> dpsi = numerics::derivative(psi, h);

    std::vector<double> integrand(n);
    HalfAngle last{};
    double eps_last = 1.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double a = trace.magnitude()[i];
        const double ep = eps_plus(a, params.theta);
        const HalfAngle ha = bloch_plus_angle(a, params.theta, ep);
        integrand[i] = (params.omega - dpsi[i]) * ha.sin_half * ha.sin_half;
        last = ha;
        eps_last = ep;
    }

    const double integral = numerics::simpson(integrand, h);
    const double psi_end = psi.back();
    const double y = std::sin(psi_end) * last.sin_half * std::sin(half);
    const double x = std::cos(psi_end) * last.sin_half * std::sin(half) + last.cos_half * std::cos(half);
    const double arctan = std::atan2(y, x);

    GpResult out;
    out.integral_part = integral;
    out.arctan_part = arctan;
    out.phi_total = integral + arctan;
    out.phi_unitary = phi0;
    out.correction = out.phi_total - phi0;
    out.eps_plus_final = eps_last;
    return out;
}

std::vector<qmat::ComplexMatrix> density_trajectory(const DecoherenceTrace& trace,
                                                    const SystemParams& params) {
    const double s2 = std::pow(std::sin(0.5 * params.theta), 2);
    const double c2 = std::pow(std::cos(0.5 * params.theta), 2);
    const double amp = 0.5 * std::sin(params.theta);
    std::vector<qmat::ComplexMatrix> out;
    out.reserve(trace.times().size());
    for (std::size_t i = 0; i < trace.times().size(); ++i) {
        const double t = trace.times()[i];
        const Complex coh = amp * std::exp(Complex(0.0, -params.omega * t)) * trace.r_values()[i];
        qmat::ComplexMatrix rho(2, 2);
        rho << s2, coh,
               std::conj(coh), c2;
        out.push_back(std::move(rho));
    }
    return out;
}

double bargmann_phase(std::span<const qmat::StateVector> vectors) {
    if (vectors.size() < 2) throw ValidationError("bargmann_phase: need at least two vectors");
    Complex product = vectors.front().dot(vectors.back());  // <k_0|k_M>
    for (std::size_t i = 0; i + 1 < vectors.size(); ++i) {
        const Complex overlap = vectors[i + 1].dot(vectors[i]);  // <k_{i+1}|k_i>
        product *= overlap / std::abs(overlap);
    }
    return std::arg(product);
}

namespace {

std::vector<qmat::StateVector> plus_branch(std::span<const qmat::ComplexMatrix> rho_t) {
    std::vector<qmat::StateVector> vecs;
    vecs.reserve(rho_t.size());
    for (std::size_t i = 0; i < rho_t.size(); ++i) {
        const qmat::Eigh2 e = qmat::eigh_2x2(rho_t[i]);
        if (e.values[1] - e.values[0] < 1e-8) {
            std::ostringstream os;
            os << "gp_from_trajectory: eigenvalue gap " << e.values[1] - e.values[0] << " at sample " << i;
            throw EigenbranchCrossing(os.str());
        }
        vecs.push_back(e.vectors[1]);
    }
    return vecs;
}

}  // namespace

double gp_from_trajectory(std::span<const qmat::ComplexMatrix> rho_t, bool extrapolate) {
    if (rho_t.size() < 3) throw ValidationError("gp_from_trajectory: need at least three samples");
    for (const auto& rho : rho_t) {
        if (rho.rows() != 2 || rho.cols() != 2)
            throw DimensionMismatch("gp_from_trajectory: expected 2x2 density matrices");
        if (std::abs(rho.trace() - 1.0) > 1e-10)
            throw InvalidDensityMatrix("gp_from_trajectory: trace != 1");
    }
    const std::vector<qmat::StateVector> vecs = plus_branch(rho_t);
    const double fine = bargmann_phase(vecs);

    const std::size_t intervals = vecs.size() - 1;
    if (!extrapolate || intervals % 2 != 0 || intervals < 4) return fine;

    std::vector<qmat::StateVector> coarse;
    coarse.reserve(intervals / 2 + 1);
    for (std::size_t i = 0; i < vecs.size(); i += 2) coarse.push_back(vecs[i]);
    const double rough = bargmann_phase(coarse);
    return numerics::wrap_phase(fine + numerics::wrap_phase(fine - rough) / 3.0);
}

}  // namespace gphase
