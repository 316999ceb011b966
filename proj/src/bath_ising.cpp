// bath_ising.cpp: Transverse-field Ising chain as a dephasing environment

#include "gphase/bath_ising.hpp"

#include "gphase/errors.hpp"
#include "gphase/numerics.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <sstream>

namespace gphase::ising {

using numerics::kPi;

void IsingBathParams::validate() const {
    if (n_spins < 2 || n_spins % 2 != 0) throw ValidationError("IsingBathParams: N must be even and >= 2");
    if (!(std::isfinite(j_coupling) && j_coupling > 0.0)) throw ValidationError("IsingBathParams: J must be positive");
    if (!std::isfinite(lambda) || !std::isfinite(coupling))
        throw ValidationError("IsingBathParams: non-finite lambda or coupling");
}

double IsingBathParams::field_branch0() const { return lambda + coupling; }

double IsingBathParams::field_branch1() const {
    return shift == ShiftConvention::OneSided ? lambda : lambda - coupling;
}

std::vector<double> momenta(int n_spins) {
    if (n_spins < 2 || n_spins % 2 != 0) throw ValidationError("momenta: N must be even and >= 2");
    std::vector<double> k(static_cast<std::size_t>(n_spins / 2));
    for (std::size_t m = 0; m < k.size(); ++m)
        k[m] = static_cast<double>(2 * m + 1) * kPi / static_cast<double>(n_spins);
    return k;
}

double mode_energy(double j_coupling, double lambda, double k) {
    return 2.0 * j_coupling * std::sqrt(1.0 + lambda * lambda - 2.0 * lambda * std::cos(k));
}

double bogoliubov_angle(double lambda, double k) { return std::atan2(std::sin(k), lambda - std::cos(k)); }

ModeFactors mode_factors(const IsingBathParams& p, double k) {
    ModeFactors mf;
    mf.k = k;
    mf.eps_k = mode_energy(p.j_coupling, p.lambda, k);
    mf.eps_tilde_k = mode_energy(p.j_coupling, p.lambda + p.coupling, k);
    mf.theta_k_lambda = bogoliubov_angle(p.lambda, k);
    mf.theta_k_lambda_shift = bogoliubov_angle(p.lambda + p.coupling, k);
    mf.alpha_k = 0.5 * (mf.theta_k_lambda_shift - mf.theta_k_lambda);
    return mf;
}

ModeAmplitude mode_amplitude(const ModeFactors& mf, double t) {
    const double x = mf.eps_tilde_k * t;
    const double c2a = std::cos(2.0 * mf.alpha_k);
    const double cx = std::cos(x);
    const double sx = std::sin(x);
    ModeAmplitude out;
    out.r_k = std::sqrt(cx * cx + sx * sx * c2a * c2a);
    // Continue arg(cos x + i c2a sin x) across the zeros of cos x.
    const double n = std::nearbyint(x / kPi);
    const double y = x - n * kPi;
    const double sign = c2a >= 0.0 ? 1.0 : -1.0;
    out.phi_k = sign * n * kPi + std::atan2(c2a * std::sin(y), std::cos(y));
    return out;
}

Complex DecoherenceValue::value() const {
    if (underflow) return 0.0;
    return std::polar(std::exp(log_magnitude), phase);
}

namespace {

qmat::ComplexMatrix mode_hamiltonian(double j, double lambda, double k) {
    qmat::ComplexMatrix h(2, 2);
    const double d = lambda - std::cos(k);
    const double s = std::sin(k);
    h << -2.0 * j * d, 2.0 * j * s,
         2.0 * j * s, 2.0 * j * d;
    return h;
}

}  // namespace

DecoherenceValue decoherence_modes(const IsingBathParams& p, double t, std::size_t first_mode,
                                   std::size_t last_mode) {
    p.validate();
    const std::vector<double> ks = momenta(p.n_spins);
    if (first_mode > last_mode || last_mode > ks.size())
        throw ValidationError("decoherence_modes: mode range out of bounds");

    DecoherenceValue out;
    for (std::size_t m = first_mode; m < last_mode; ++m) {
        const double k = ks[m];
        if (p.shift == ShiftConvention::OneSided) {
            const ModeFactors mf = mode_factors(p, k);
            const ModeAmplitude a = mode_amplitude(mf, t);
            out.log_magnitude += std::log(a.r_k);
            out.phase += a.phi_k - mf.eps_k * t;
        } else {
            const qmat::ComplexMatrix h = mode_hamiltonian(p.j_coupling, p.lambda, k);
            const qmat::StateVector g = qmat::eigh_2x2(h).vectors[0];
            const qmat::StateVector k0 =
                qmat::expm_hermitian(mode_hamiltonian(p.j_coupling, p.field_branch0(), k), t) * g;
            const qmat::StateVector k1 =
                qmat::expm_hermitian(mode_hamiltonian(p.j_coupling, p.field_branch1(), k), t) * g;
            const Complex z = k1.dot(k0);
            out.log_magnitude += std::log(std::abs(z));
            out.phase += std::arg(z);
        }
    }
    out.underflow = out.log_magnitude < -700.0;
    return out;
}

DecoherenceValue decoherence_product(const IsingBathParams& p, double t) {
    return decoherence_modes(p, t, 0, static_cast<std::size_t>(p.n_spins / 2));
}

Eigen::MatrixXd ising_hamiltonian(int n_spins, double j_coupling, double lambda) {
    if (n_spins < 2) throw ValidationError("ising_hamiltonian: N must be >= 2");
    if (n_spins > kMaxBruteForceSpins) {
        std::ostringstream os;
        os << "ising_hamiltonian: N = " << n_spins << " exceeds " << kMaxBruteForceSpins;
        throw DimensionTooLarge(os.str());
    }
    const Eigen::Index dim = Eigen::Index{1} << n_spins;
    Eigen::MatrixXd h = Eigen::MatrixXd::Zero(dim, dim);
    auto bit = [n_spins](int site) { return Eigen::Index{1} << (n_spins - 1 - site); };
    for (Eigen::Index s = 0; s < dim; ++s) {
        double diag = 0.0;
        for (int n = 0; n < n_spins; ++n) {
            const int m = (n + 1) % n_spins;
            const double zn = (s & bit(n)) ? -1.0 : 1.0;
            const double zm = (s & bit(m)) ? -1.0 : 1.0;
            diag -= j_coupling * zn * zm;
            h(s ^ bit(n), s) -= j_coupling * lambda;
        }
        h(s, s) += diag;
    }
    return h;
}

BruteForceOracle::BruteForceOracle(const IsingBathParams& p) {
    p.validate();
    if (p.n_spins > kMaxBruteForceSpins) {
        std::ostringstream os;
        os << "BruteForceOracle: N = " << p.n_spins << " exceeds " << kMaxBruteForceSpins;
        throw DimensionTooLarge(os.str());
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> env(ising_hamiltonian(p.n_spins, p.j_coupling, p.lambda));
    ground_ = env.eigenvectors().col(0);
    ground_energy_ = env.eigenvalues()(0);
    if (env.eigenvalues()(1) - ground_energy_ < 1e-12 * p.j_coupling)
        throw DegenerateGroundState("BruteForceOracle: ground state is degenerate");

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> b0(ising_hamiltonian(p.n_spins, p.j_coupling, p.field_branch0()));
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> b1(ising_hamiltonian(p.n_spins, p.j_coupling, p.field_branch1()));
    vectors0_ = b0.eigenvectors();
    values0_ = b0.eigenvalues();
    vectors1_ = b1.eigenvectors();
    values1_ = b1.eigenvalues();
    proj0_ = vectors0_.transpose() * ground_;
    proj1_ = vectors1_.transpose() * ground_;
}

Complex BruteForceOracle::operator()(double t) const {
    const Eigen::Index dim = ground_.size();
    Eigen::VectorXcd c0(dim), c1(dim);
    for (Eigen::Index i = 0; i < dim; ++i) {
        c0(i) = proj0_(i) * std::exp(Complex(0.0, -values0_(i) * t));
        c1(i) = proj1_(i) * std::exp(Complex(0.0, -values1_(i) * t));
    }
    const Eigen::VectorXcd k0 = vectors0_.cast<Complex>() * c0;
    const Eigen::VectorXcd k1 = vectors1_.cast<Complex>() * c1;
    return k1.dot(k0);
}

Complex brute_force_oracle(const IsingBathParams& p, double t) { return BruteForceOracle(p)(t); }

}  // namespace gphase::ising
