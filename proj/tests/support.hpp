// support.hpp: Shared parameter points and independent reference computations for the tests

#pragma once

#include "gphase/bath_two_level.hpp"
#include "gphase/gp_core.hpp"
#include "gphase/numerics.hpp"

#include <Eigen/Dense>
#include <unsupported/Eigen/MatrixFunctions>

#include <cmath>
#include <complex>
#include <vector>

namespace testsupport {

using Complex = std::complex<double>;

inline constexpr double kPi = gphase::numerics::kPi;

// Experiment parameter point: Omega = 100 pi, Delta = 0.02 Omega, delta = 0.1 Omega.
inline constexpr double kOmega = 100.0 * kPi;
inline constexpr double kGap = 0.02 * kOmega;
inline constexpr double kCoupling = 0.1 * kOmega;

inline gphase::two_level::TwoLevelBathParams paper_bath(double b_field, double coupling = kCoupling) {
    return gphase::two_level::TwoLevelBathParams::from_field(b_field, kGap, coupling);
}

// e^{-iHt} by Pade scaling-and-squaring, independent of the library's eigen route.
inline Eigen::MatrixXcd pade_expm(const Eigen::MatrixXcd& h, double t) {
    const Eigen::MatrixXcd a = Complex(0.0, -t) * h;
    return a.exp();
}

// Reduced density matrices of one Bloch loop computed from the full two-qubit
// state evolved under (Omega/2) Z_S + delta Z_S Z_E + B Z_E + Delta X_E.
inline std::vector<Eigen::MatrixXcd> four_level_loop(double omega, double theta, double b_field, double gap,
                                                     double coupling, std::size_t intervals) {
    Eigen::Matrix2cd z, x, id;
    z << 1, 0, 0, -1;
    x << 0, 1, 1, 0;
    id.setIdentity();
    auto kron = [](const Eigen::Matrix2cd& a, const Eigen::Matrix2cd& b) {
        Eigen::Matrix4cd out;
        for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 2; ++j) out.block<2, 2>(2 * i, 2 * j) = a(i, j) * b;
        return out;
    };
    const Eigen::Matrix4cd h = 0.5 * omega * kron(z, id) + coupling * kron(z, z) + b_field * kron(id, z) +
                               gap * kron(id, x);
    // environment ground state from a numerical eigensolver
    const Eigen::Matrix2cd he = b_field * z + gap * x;
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix2cd> es(he);
    const Eigen::Vector2cd g = es.eigenvectors().col(0);
    Eigen::Vector2cd s;
    s << std::sin(0.5 * theta), std::cos(0.5 * theta);
    Eigen::Vector4cd psi0;
    for (int i = 0; i < 2; ++i) psi0.segment<2>(2 * i) = s(i) * g;

    const double tau = 2.0 * kPi / omega;
    std::vector<Eigen::MatrixXcd> out;
    for (std::size_t i = 0; i <= intervals; ++i) {
        const double t = tau * static_cast<double>(i) / static_cast<double>(intervals);
        const Eigen::Vector4cd psi = pade_expm(h, t) * psi0;
        Eigen::MatrixXcd rho = Eigen::MatrixXcd::Zero(2, 2);
        for (int a = 0; a < 2; ++a)
            for (int b = 0; b < 2; ++b)
                for (int e = 0; e < 2; ++e) rho(a, b) += psi(2 * a + e) * std::conj(psi(2 * b + e));
        out.push_back(rho);
    }
    return out;
}

inline double wrapped_distance(double a, double b) { return std::abs(gphase::numerics::wrap_phase(a - b)); }

}  // namespace testsupport
