#include "doctest.h"
#include "support.hpp"

#include "gphase/errors.hpp"
#include "gphase/trotter_protocol.hpp"

#include <Eigen/SVD>

#include <algorithm>
#include <numeric>

using namespace gphase;
using namespace gphase::protocol;
using testsupport::Complex;
using testsupport::kCoupling;
using testsupport::kGap;
using testsupport::kOmega;
using testsupport::kPi;

namespace {

ProtocolParams params(double b, double coupling = kCoupling, Decomposition d = Decomposition::Exact) {
    ProtocolParams p;
    p.sys = SystemParams(kOmega, kPi / 4);
    p.bath = testsupport::paper_bath(b, coupling);
    p.decomposition = d;
    return p;
}

std::vector<double> b_grid() {
    std::vector<double> out;
    for (int i = 0; i < 21; ++i) out.push_back(-0.2 * kOmega + 0.4 * kOmega * i / 20);
    return out;
}

double spectral_norm(const qmat::ComplexMatrix& m) {
    return Eigen::JacobiSVD<qmat::ComplexMatrix>(m).singularValues()(0);
}

double unitarity_defect(const qmat::ComplexMatrix& u) {
    return (u.adjoint() * u - qmat::identity(u.rows())).cwiseAbs().maxCoeff();
}

}  // namespace

TEST_CASE("parameter validation") {
    ProtocolParams p = params(0.0);
    p.trotter_steps = 0;
    CHECK_THROWS_AS(p.validate(), ValidationError);
    p = params(0.0);
    p.input_theta = 0.0;
    CHECK_THROWS_AS(p.validate(), ValidationError);
    CHECK_NOTHROW(params(0.0).validate());
}

TEST_CASE("target Hamiltonian") {
    const qmat::ComplexMatrix diag = build_target_hamiltonian(params(0.0, 0.0));
    CHECK((diag - diag.adjoint()).cwiseAbs().maxCoeff() == 0.0);

    // with Delta = 0 every term is diagonal
    ProtocolParams flat = params(0.0, 0.0);
    flat.bath = two_level::TwoLevelBathParams::from_field(0.3 * kOmega, 1e-300, 0.0);
    const qmat::ComplexMatrix h = build_target_hamiltonian(flat);
    const double b = 0.3 * kOmega;
    CHECK(std::abs(h(0, 0) - (kOmega + b)) < 1e-9);
    CHECK(std::abs(h(1, 1) - (kOmega - b)) < 1e-9);
    CHECK(std::abs(h(2, 2) - (-kOmega + b)) < 1e-9);
    CHECK(std::abs(h(3, 3) - (-kOmega - b)) < 1e-9);
    CHECK((h - qmat::ComplexMatrix(h.diagonal().asDiagonal())).cwiseAbs().maxCoeff() < 1e-250);

    // uncoupled spectrum is the tensor sum
    const double bb = 0.07 * kOmega;
    const qmat::ComplexMatrix h0 = build_target_hamiltonian(params(bb, 0.0));
    Eigen::SelfAdjointEigenSolver<qmat::ComplexMatrix> es(h0);
    const double w = std::sqrt(bb * bb + kGap * kGap);
    std::vector<double> expected{-kOmega - w, -kOmega + w, kOmega - w, kOmega + w};
    std::sort(expected.begin(), expected.end());
    for (int i = 0; i < 4; ++i) CHECK(std::abs(es.eigenvalues()(i) - expected[i]) < 1e-10);

    const qmat::ComplexMatrix full = build_target_hamiltonian(params(0.05 * kOmega));
    CHECK((full - full.adjoint()).cwiseAbs().maxCoeff() < 1e-15);
}

TEST_CASE("Trotter step without transverse field is exact") {
    ProtocolParams p = params(0.0);
    p.bath = two_level::TwoLevelBathParams::from_field(0.08 * kOmega, 1e-300, kCoupling);
    for (double dt : {1e-4, 3e-3, 0.02}) {
        CHECK((trotter_step(p, dt) - exact_propagator(p, dt)).cwiseAbs().maxCoeff() < 1e-12);
    }
}

TEST_CASE("Trotter step local error is third order") {
    const ProtocolParams p = params(0.05 * kOmega);
    const double tau = p.sys.tau();
    std::vector<double> errors;
    for (int n : {64, 128, 256, 512, 1024}) {
        const double dt = tau / n;
        errors.push_back(spectral_norm(trotter_step(p, dt) - exact_propagator(p, dt)));
    }
    for (std::size_t i = 0; i + 1 < errors.size(); ++i)
        CHECK(errors[i] / errors[i + 1] == doctest::Approx(8.0).epsilon(0.05));
}

TEST_CASE("pulse identities") {
    const PulseCheckReport report = pulse_decompositions_check();
    CHECK(report.passed);
    CHECK(report.angles_checked >= 100);
    CHECK(report.max_residual_environment < 1e-12);
    CHECK(report.max_residual_system < 1e-12);
    CHECK(report.max_residual_coupling < 1e-12);

    const PulseCheckReport none = pulse_decompositions_check(0);
    CHECK(none.passed);

    // the pulse-level step is the same operator as the plain step
    const ProtocolParams p = params(-0.13 * kOmega);
    for (double dt : {1e-6, kPi / (3 * kOmega), 0.004})
        CHECK((pulse_level_step(p, dt) - trotter_step(p, dt)).cwiseAbs().maxCoeff() < 1e-12);
    CHECK_THROWS_AS(trotter_step(p, 0.0), ValidationError);
}

TEST_CASE("every propagator is unitary") {
    for (auto d : {Decomposition::Exact, Decomposition::CoarseTrotter, Decomposition::PulseLevel}) {
        const ProtocolParams p = params(0.11 * kOmega, kCoupling, d);
        for (double t : {0.0, 0.0013, 0.0101, p.sys.tau()}) CHECK(unitarity_defect(propagator(p, t)) < 1e-12);
    }
}

TEST_CASE("exact evolution conserves energy") {
    const ProtocolParams p = params(0.05 * kOmega);
    const qmat::ComplexMatrix h = build_target_hamiltonian(p);
    const qmat::StateVector psi0 = initial_state(p);
    const double e0 = psi0.dot(h * psi0).real();
    for (int i = 1; i <= 64; ++i) {
        const qmat::StateVector psi = exact_propagator(p, p.sys.tau() * i / 64) * psi0;
        CHECK(std::abs(psi.norm() - 1.0) < 1e-12);
        CHECK(std::abs(psi.dot(h * psi).real() - e0) < 1e-10 * std::max(1.0, std::abs(e0)));
    }
}

TEST_CASE("initial state and readout") {
    const ProtocolParams p = params(0.05 * kOmega);
    const qmat::StateVector psi = initial_state(p);
    CHECK(std::abs(psi.norm() - 1.0) < 1e-15);
    CHECK(std::abs(readout(psi, p, 0.0) - 1.0) < 1e-12);
}

TEST_CASE("decoupled protocol is dephasing free") {
    const ProtocolRun run = run_protocol(params(0.05 * kOmega, 0.0));
    for (const Complex& r : run.trace.r_values()) CHECK(std::abs(r - 1.0) < 1e-12);
    CHECK(std::abs(run.gp.phi_total - unitary_geometric_phase(kPi / 4)) < 1e-12);
    for (double f : run.fidelity_vs_exact) CHECK(f == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("exact protocol reproduces the branch oracle") {
    for (double b : b_grid()) {
        const ProtocolParams p = params(b);
        const ProtocolRun run = run_protocol(p, 64);
        const two_level::BranchOracle oracle(p.bath);
        const auto& t = run.trace.times();
        REQUIRE(t.size() == 65);
        for (std::size_t i = 0; i < t.size(); ++i) CHECK(std::abs(run.trace.r_values()[i] - oracle(t[i])) < 1e-10);
    }
}

TEST_CASE("readout does not depend on the prepared polar angle") {
    ProtocolParams p = params(-0.04 * kOmega, kCoupling, Decomposition::CoarseTrotter);
    p.trotter_steps = 8;
    const ProtocolRun reference = run_protocol(p);
    for (double th : {kPi / 6, kPi / 4}) {
        p.input_theta = th;
        const ProtocolRun run = run_protocol(p);
        for (std::size_t i = 0; i < run.trace.r_values().size(); ++i)
            CHECK(std::abs(run.trace.r_values()[i] - reference.trace.r_values()[i]) < 1e-12);
    }
}

TEST_CASE("fidelities lie in the unit interval") {
    ProtocolParams p = params(0.2 * kOmega, kCoupling, Decomposition::PulseLevel);
    p.trotter_steps = 1;
    const ProtocolRun run = run_protocol(p);
    for (double f : run.fidelity_vs_exact) {
        CHECK(f >= 0.0);
        CHECK(f <= 1.0);
    }
    CHECK(run.fidelity_vs_exact.front() == doctest::Approx(1.0));
}

TEST_CASE("cycle error is second order in the step count") {
    ProtocolParams p = params(0.05 * kOmega, kCoupling, Decomposition::CoarseTrotter);
    std::vector<double> logn, logerr;
    for (int n = 8; n <= 512; n *= 2) {
        p.trotter_steps = n;
        logn.push_back(std::log(static_cast<double>(n)));
        logerr.push_back(std::log(cycle_error(p)));
    }
    const double mean_x = std::accumulate(logn.begin(), logn.end(), 0.0) / logn.size();
    const double mean_y = std::accumulate(logerr.begin(), logerr.end(), 0.0) / logerr.size();
    double sxy = 0.0, sxx = 0.0;
    for (std::size_t i = 0; i < logn.size(); ++i) {
        sxy += (logn[i] - mean_x) * (logerr[i] - mean_y);
        sxx += (logn[i] - mean_x) * (logn[i] - mean_x);
    }
    CHECK(-sxy / sxx == doctest::Approx(2.0).epsilon(0.1));
}

TEST_CASE("pinned Trotter step count") {
    const ProtocolParams p = params(0.0, kCoupling, Decomposition::CoarseTrotter);
    const auto grid = b_grid();
    const TrotterSweep sweep = find_min_trotter_steps(p, grid);
    CHECK(sweep.pinned_steps == kPinnedTrotterSteps);
    REQUIRE(!sweep.min_fidelity.empty());
    CHECK(sweep.min_fidelity.back() >= 0.997);
    for (std::size_t i = 0; i + 1 < sweep.min_fidelity.size(); ++i) CHECK(sweep.min_fidelity[i] < 0.997);

    ProtocolParams pinned = p;
    pinned.trotter_steps = kPinnedTrotterSteps;
    for (double b : grid) {
        pinned.bath = testsupport::paper_bath(b);
        CHECK(cycle_fidelity(pinned) >= 0.997);
    }
    CHECK(find_min_trotter_steps(p, grid, 1.0 - 1e-15, 4).pinned_steps == 0);
}

TEST_CASE("correction experiment: uncoupled baseline") {
    const auto grid = b_grid();
    const auto points = correction_experiment(params(0.0, 0.0), grid, 64);
    for (const auto& pt : points) {
        REQUIRE(pt.ok);
        CHECK(std::abs(pt.dphi_protocol) < 1e-8);
        CHECK(std::abs(pt.dphi_theory) < 1e-8);
    }
}

TEST_CASE("correction experiment: exact and Trotterised curves") {
    const auto grid = b_grid();
    const auto exact = correction_experiment(params(0.0), grid);
    ProtocolParams coarse = params(0.0, kCoupling, Decomposition::CoarseTrotter);
    coarse.trotter_steps = kPinnedTrotterSteps;
    const auto trotter = correction_experiment(coarse, grid);

    double peak = 0.0;
    std::size_t arg = 0;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        REQUIRE(exact[i].ok);
        REQUIRE(trotter[i].ok);
        CHECK(std::abs(exact[i].dphi_protocol - exact[i].dphi_theory) < 1e-8);
        if (std::abs(exact[i].dphi_protocol) > peak) {
            peak = std::abs(exact[i].dphi_protocol);
            arg = i;
        }
    }
    CHECK(arg == 10);
    for (std::size_t i = 0; i < grid.size(); ++i)
        CHECK(std::abs(exact[i].dphi_protocol - trotter[i].dphi_protocol) < 0.02 * peak);
    const double plus = std::abs(exact[15].dphi_protocol);
    const double minus = std::abs(exact[5].dphi_protocol);
    CHECK(std::abs(plus - minus) / std::max(plus, minus) > 0.05);
}
