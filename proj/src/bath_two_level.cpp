// bath_two_level.cpp: Two-level model of a critical environment

#include "gphase/bath_two_level.hpp"

#include "gphase/errors.hpp"
#include "gphase/numerics.hpp"

#include <algorithm>
#include <cmath>

namespace gphase::two_level {

namespace {

double field_of(double lambda, double znu, double delta_gap) {
    if (lambda == 0.0) return 0.0;
    return lambda * std::pow(std::abs(lambda), znu - 1.0) * delta_gap;
}

double energy_magnitude(double lambda, double znu, double delta_gap) {
    return delta_gap * std::sqrt(1.0 + std::pow(std::abs(lambda), 2.0 * znu));
}

qmat::ComplexMatrix field_hamiltonian(double field, double delta_gap) {
    return field * qmat::pauli_z() + delta_gap * qmat::pauli_x();
}

}  // namespace

TwoLevelBathParams TwoLevelBathParams::from_field(double b_field, double delta_gap, double coupling,
                                                  CouplingConvention convention) {
    if (!(delta_gap > 0.0))
        throw ValidationError("TwoLevelBathParams::from_field: delta_gap must be positive");
    TwoLevelBathParams p;
    p.delta_gap = delta_gap;
    p.lambda = b_field / delta_gap;
    p.znu = 1.0;
    p.coupling = coupling;
    p.convention = convention;
    p.validate();
    return p;
}

double TwoLevelBathParams::b_field() const { return field_of(lambda, znu, delta_gap); }

void TwoLevelBathParams::validate() const {
    if (!(std::isfinite(delta_gap) && delta_gap > 0.0))
        throw ValidationError("TwoLevelBathParams: delta_gap must be positive");
    if (!(std::isfinite(znu) && znu > 0.0)) throw ValidationError("TwoLevelBathParams: znu must be positive");
    if (!std::isfinite(lambda) || !std::isfinite(coupling))
        throw ValidationError("TwoLevelBathParams: non-finite lambda or coupling");
}

std::pair<double, double> bath_eigenenergies(const TwoLevelBathParams& p) {
    p.validate();
    const double e = energy_magnitude(p.lambda, p.znu, p.delta_gap);
    return {-e, e};
}

qmat::ComplexMatrix bath_hamiltonian(const TwoLevelBathParams& p) {
    p.validate();
    return field_hamiltonian(p.b_field(), p.delta_gap);
}

qmat::StateVector ground_state(const TwoLevelBathParams& p) {
    p.validate();
    const double alpha = std::atan2(p.delta_gap, -p.b_field());  // in (0, pi) for Delta > 0
    qmat::StateVector g(2);
    g << std::cos(0.5 * alpha), -std::sin(0.5 * alpha);
    return g;
}

Complex decoherence_factor_analytic(const TwoLevelBathParams& p, double t) {
    p.validate();
    const double d = p.coupling / p.delta_gap;
    const double em = -energy_magnitude(p.lambda, p.znu, p.delta_gap);
    const double em_shift = -energy_magnitude(p.lambda + d, p.znu, p.delta_gap);
    const double coeff = (em_shift * em_shift - p.delta_gap * p.delta_gap * d * d) / (em * em_shift);
    return std::exp(Complex(0.0, em * t)) *
           Complex(std::cos(em_shift * t), -coeff * std::sin(em_shift * t));
}

Complex loschmidt_closed_form(const TwoLevelBathParams& p, double lambda_shift, double t) {
    p.validate();
    const double lam2 = p.lambda + lambda_shift;
    const double h = field_of(p.lambda, p.znu, p.delta_gap);
    const double h2 = field_of(lam2, p.znu, p.delta_gap);
    const double e = energy_magnitude(p.lambda, p.znu, p.delta_gap);
    const double e2 = energy_magnitude(lam2, p.znu, p.delta_gap);
    // <g| e^{-iH' t} |g> = cos(e' t) + i sin(e' t) n.n'  (g is the -1 eigenstate of n.sigma)
    const double overlap = (p.delta_gap * p.delta_gap + h * h2) / (e * e2);
    return std::exp(Complex(0.0, -e * t)) * Complex(std::cos(e2 * t), overlap * std::sin(e2 * t));
}

std::pair<qmat::ComplexMatrix, qmat::ComplexMatrix> branch_hamiltonians(const TwoLevelBathParams& p) {
    const qmat::ComplexMatrix he = bath_hamiltonian(p);
    const qmat::ComplexMatrix z = qmat::pauli_z();
    switch (p.convention) {
        case CouplingConvention::ZzTarget:
            return {he + p.coupling * z, he - p.coupling * z};
        case CouplingConvention::Projector:
            return {he, he + 2.0 * p.coupling * z};
    }
    throw ValidationError("branch_hamiltonians: unknown coupling convention");
}

BranchOracle::BranchOracle(const TwoLevelBathParams& p) : BranchOracle(p, ground_state(p)) {}

BranchOracle::BranchOracle(const TwoLevelBathParams& p, const qmat::StateVector& initial)
    : initial_(initial) {
    if (initial_.size() != 2) throw DimensionMismatch("BranchOracle: initial state must have dimension 2");
    const auto [h0, h1] = branch_hamiltonians(p);
    branch0_ = qmat::spectrum(h0);
    branch1_ = qmat::spectrum(h1);
}

Complex BranchOracle::operator()(double t) const {
    if (t == 0.0) return initial_.squaredNorm();
    const qmat::StateVector k0 = branch0_.propagator(t) * initial_;
    const qmat::StateVector k1 = branch1_.propagator(t) * initial_;
    return k1.dot(k0);
}

Complex decoherence_factor_oracle(const TwoLevelBathParams& p, double t) {
    return BranchOracle(p)(t);
}

Complex decoherence_factor_oracle(const TwoLevelBathParams& p, double t, const qmat::StateVector& initial) {
    return BranchOracle(p, initial)(t);
}

std::vector<CurvePoint> gp_correction_curve(std::span<const double> b_values,
                                            const TwoLevelBathParams& base, const SystemParams& sys,
                                            std::size_t samples) {
    std::vector<CurvePoint> out;
    out.reserve(b_values.size());
    for (double b : b_values) {
        CurvePoint pt;
        pt.b_field = b;
        try {
            TwoLevelBathParams coupled =
                TwoLevelBathParams::from_field(b, base.delta_gap, base.coupling, base.convention);
            TwoLevelBathParams uncoupled = coupled;
            uncoupled.coupling = 0.0;
            const BranchOracle rc(coupled);
            const BranchOracle ru(uncoupled);
            pt.coupled = geometric_phase(build_trace(rc, sys, samples), sys);
            pt.baseline = geometric_phase(build_trace(ru, sys, samples), sys);
            pt.delta_phi = pt.coupled.phi_total - pt.baseline.phi_total;
            pt.ok = true;
        } catch (const Error& e) {
            pt.error = e.what();
        }
        out.push_back(std::move(pt));
    }
    return out;
}

FormulaDiscrepancy compare_analytic_to_oracle(const TwoLevelBathParams& p, std::span<const double> times) {
    TwoLevelBathParams proj = p;
    proj.convention = CouplingConvention::Projector;
    const BranchOracle oracle(proj);

    struct Candidate {
        const char* name;
        bool corrected;
        double shift_scale;  // lambda shift in units of delta/Delta
        bool conjugate;
    };
    const Candidate candidates[] = {
        {"printed, shift delta/Delta", false, 1.0, false},
        {"printed, shift 2 delta/Delta", false, 2.0, false},
        {"printed, shift 2 delta/Delta, conjugated", false, 2.0, true},
        {"corrected, shift 2 delta/Delta", true, 2.0, false},
        {"corrected, shift 2 delta/Delta, conjugated", true, 2.0, true},
    };

    FormulaDiscrepancy report;
    report.best_max_error = INFINITY;
    for (const Candidate& c : candidates) {
        double worst = 0.0;
        for (double t : times) {
            TwoLevelBathParams q = p;
            q.coupling = p.coupling * c.shift_scale;
            Complex v = c.corrected ? loschmidt_closed_form(q, q.coupling / q.delta_gap, t)
                                    : decoherence_factor_analytic(q, t);
            if (c.conjugate) v = std::conj(v);
            worst = std::max(worst, std::abs(v - oracle(t)));
        }
        if (c.shift_scale == 1.0 && !c.corrected && !c.conjugate) report.verbatim_max_error = worst;
        if (worst < report.best_max_error) {
            report.best_max_error = worst;
            report.best_interpretation = c.name;
        }
    }
    return report;
}

}  // namespace gphase::two_level
