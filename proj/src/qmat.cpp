// qmat.cpp: Small dense complex linear algebra

#include "gphase/qmat.hpp"

#include "gphase/errors.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <sstream>
#include <string>

namespace gphase::qmat {

namespace {

constexpr Complex kI{0.0, 1.0};

void require_hermitian(const ComplexMatrix& m, const char* where) {
    if (m.rows() != m.cols()) {
        std::ostringstream os;
        os << where << ": matrix is " << m.rows() << "x" << m.cols() << ", expected square";
        throw DimensionMismatch(os.str());
    }
    if (!m.allFinite()) throw NonHermitianInput(std::string(where) + ": non-finite entries");
    const double res = hermiticity_residual(m);
    if (res >= kHermitianTol) {
        std::ostringstream os;
        os << where << ": hermiticity residual " << res;
        throw NonHermitianInput(os.str());
    }
}

}  // namespace

ComplexMatrix identity(Eigen::Index dim) { return ComplexMatrix::Identity(dim, dim); }

ComplexMatrix pauli_x() {
    ComplexMatrix m(2, 2);
    m << 0.0, 1.0,
         1.0, 0.0;
    return m;
}

ComplexMatrix pauli_y() {
    ComplexMatrix m(2, 2);
    m << 0.0, -kI,
         kI, 0.0;
    return m;
}

ComplexMatrix pauli_z() {
    ComplexMatrix m(2, 2);
    m << 1.0, 0.0,
         0.0, -1.0;
    return m;
}

StateVector basis_state(Eigen::Index dim, Eigen::Index index) {
    StateVector v = StateVector::Zero(dim);
    v(index) = 1.0;
    return v;
}

double hermiticity_residual(const ComplexMatrix& m) {
    if (m.size() == 0) return 0.0;
    const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
    return (m - m.adjoint()).cwiseAbs().maxCoeff() / scale;
}

bool is_hermitian(const ComplexMatrix& m, double tol) {
    return m.rows() == m.cols() && m.allFinite() && hermiticity_residual(m) < tol;
}

void fix_phase(StateVector& v) {
    const double scale = v.cwiseAbs().maxCoeff();
    for (Eigen::Index i = 0; i < v.size(); ++i) {
        const double a = std::abs(v(i));
        if (a > 1e-14 * scale) {
            v *= std::conj(v(i)) / a;
            v(i) = a;
            return;
        }
    }
}

ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b) {
    const Eigen::Index rows = a.rows() * b.rows();
    const Eigen::Index cols = a.cols() * b.cols();
    if (rows == 0 || cols == 0) throw DimensionMismatch("kron: empty operand");
    if (rows > 4096 || cols > 4096) throw DimensionMismatch("kron: product exceeds supported dimension");
    ComplexMatrix out(rows, cols);
    for (Eigen::Index i = 0; i < a.rows(); ++i)
        for (Eigen::Index j = 0; j < a.cols(); ++j)
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    return out;
}

Eigh2 eigh_2x2(const ComplexMatrix& h) {
    if (h.rows() != 2 || h.cols() != 2) throw DimensionMismatch("eigh_2x2: expected a 2x2 matrix");
    require_hermitian(h, "eigh_2x2");

    const double a = h(0, 0).real();
    const double d = h(1, 1).real();
    const Complex b = 0.5 * (h(0, 1) + std::conj(h(1, 0)));
    const double mean = 0.5 * (a + d);
    const double half = 0.5 * (a - d);
    const double radius = std::hypot(half, std::abs(b));

    Eigh2 out;
    out.values = {mean - radius, mean + radius};
    if (radius <= 1e-15 * std::max(1.0, std::abs(mean))) {
        out.vectors = {basis_state(2, 0), basis_state(2, 1)};
        return out;
    }

    StateVector lo(2), hi(2);
    // Pick the better-conditioned null-space representative of (H - lambda).
    if (half >= 0.0) {
        hi << radius + half, std::conj(b);
        lo << b, -(radius + half);
    } else {
        hi << b, radius - half;
        lo << half - radius, std::conj(b);
    }
    lo.normalize();
    hi.normalize();
    fix_phase(lo);
    fix_phase(hi);
    out.vectors = {lo, hi};
    return out;
}

ComplexMatrix HermitianSpectrum::propagator(double t) const {
    const Eigen::VectorXcd phases =
        (values.cast<Complex>() * Complex(0.0, -t)).array().exp().matrix();
    return vectors * phases.asDiagonal() * vectors.adjoint();
}

HermitianSpectrum spectrum(const ComplexMatrix& h) {
    require_hermitian(h, "spectrum");
    HermitianSpectrum s;
    if (h.rows() == 2) {
        const Eigh2 e = eigh_2x2(h);
        s.values = RealVector(2);
        s.values << e.values[0], e.values[1];
        s.vectors = ComplexMatrix(2, 2);
        s.vectors.col(0) = e.vectors[0];
        s.vectors.col(1) = e.vectors[1];
        return s;
    }
    const ComplexMatrix sym = 0.5 * (h + h.adjoint());
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(sym);
    if (solver.info() != Eigen::Success) throw NonHermitianInput("spectrum: eigensolver failed");
    s.values = solver.eigenvalues();
    s.vectors = solver.eigenvectors();
    for (Eigen::Index j = 0; j < s.vectors.cols(); ++j) {
        StateVector col = s.vectors.col(j);
        fix_phase(col);
        s.vectors.col(j) = col;
    }
    return s;
}

ComplexMatrix expm_hermitian(const ComplexMatrix& h, double t) {
    if (!std::isfinite(t)) throw DimensionMismatch("expm_hermitian: non-finite time");
    if (h.rows() == 2 && h.cols() == 2) {
        require_hermitian(h, "expm_hermitian");
        // e^{-iHt} = e^{-i m t} [cos(wt) I - i sin(wt) (H - m I)/w]
        const double mean = 0.5 * (h(0, 0).real() + h(1, 1).real());
        ComplexMatrix traceless = h;
        traceless(0, 0) -= mean;
        traceless(1, 1) -= mean;
        const double w = std::hypot(traceless(0, 0).real(), std::abs(traceless(0, 1)));
        const Complex global = std::exp(Complex(0.0, -mean * t));
        ComplexMatrix u = identity(2) * std::cos(w * t);
        if (w > 0.0) u -= kI * (std::sin(w * t) / w) * traceless;
        return global * u;
    }
    return spectrum(h).propagator(t);
}

ComplexMatrix partial_trace_env(const ComplexMatrix& rho) {
    if (rho.rows() != 4 || rho.cols() != 4)
        throw DimensionMismatch("partial_trace_env: expected a 4x4 density matrix");
    if (!is_hermitian(rho, 1e-10)) throw InvalidDensityMatrix("partial_trace_env: not Hermitian");
    const Complex tr = rho.trace();
    if (std::abs(tr - 1.0) > 1e-10) {
        std::ostringstream os;
        os << "partial_trace_env: trace " << tr.real() << " != 1";
        throw InvalidDensityMatrix(os.str());
    }
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(0.5 * (rho + rho.adjoint()),
                                                        Eigen::EigenvaluesOnly);
    if (solver.eigenvalues().minCoeff() < -1e-10)
        throw InvalidDensityMatrix("partial_trace_env: negative eigenvalue");

    ComplexMatrix out = ComplexMatrix::Zero(2, 2);
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j)
            for (int k = 0; k < 2; ++k) out(i, j) += rho(2 * i + k, 2 * j + k);
    return out;
}

ComplexMatrix projector(const StateVector& psi) { return psi * psi.adjoint(); }

}  // namespace gphase::qmat
