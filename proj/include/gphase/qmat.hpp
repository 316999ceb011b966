// qmat.hpp: Small dense complex linear algebra for 2- and 4-level systems
//
// Hermitian exponentials, Kronecker products, the environment partial trace
// and 2x2 eigendecompositions. Basis convention: Z|0> = +|0>, Z|1> = -|1>.

#pragma once

#include <Eigen/Dense>

#include <array>
#include <complex>

namespace gphase::qmat {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using StateVector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;

inline constexpr double kHermitianTol = 1e-12;

ComplexMatrix identity(Eigen::Index dim);
ComplexMatrix pauli_x();
ComplexMatrix pauli_y();
ComplexMatrix pauli_z();

/// Basis state |index> in dimension dim.
StateVector basis_state(Eigen::Index dim, Eigen::Index index);

/// Largest |M - M^dagger| entry, scaled by max(1, |M|_max).
double hermiticity_residual(const ComplexMatrix& m);
bool is_hermitian(const ComplexMatrix& m, double tol = kHermitianTol);

/// Rescales the first nonzero component of v to be real and positive.
void fix_phase(StateVector& v);

/// Standard tensor product, (A (x) B)[i*dB + k, j*dB + l] = A[i,j] B[k,l].
ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b);

struct Eigh2 {
    std::array<double, 2> values;        // ascending
    std::array<StateVector, 2> vectors;  // first nonzero component real positive
};

/// Closed-form eigendecomposition of a 2x2 Hermitian matrix.
Eigh2 eigh_2x2(const ComplexMatrix& h);

/// Eigendecomposition of a Hermitian matrix of any supported size.
/// Eigenvalues ascending, eigenvector columns phase-fixed.
struct HermitianSpectrum {
    RealVector values;
    ComplexMatrix vectors;

    /// e^{-iHt} assembled from the stored decomposition.
    ComplexMatrix propagator(double t) const;
};

HermitianSpectrum spectrum(const ComplexMatrix& h);

/// U = e^{-iHt}. Closed form for 2x2, eigendecomposition otherwise.
ComplexMatrix expm_hermitian(const ComplexMatrix& h, double t);

/// Traces the second (environment) qubit out of a two-qubit density matrix.
/// Requires a Hermitian, unit-trace, positive semidefinite input.
ComplexMatrix partial_trace_env(const ComplexMatrix& rho);

/// Projector |psi><psi|.
ComplexMatrix projector(const StateVector& psi);

}  // namespace gphase::qmat
