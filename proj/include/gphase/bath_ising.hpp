// bath_ising.hpp: Transverse-field Ising chain as a dephasing environment
//
// H_E(lambda) = -J sum_n (Z_n Z_{n+1} + lambda X_n), periodic, N even.
// The system shifts the transverse field: the two branches evolve under
// H_E(lambda) and H_E(lambda + delta) (one-sided) or H_E(lambda -+ delta)
// (symmetric). Starting from the ground state of H_E(lambda), which sits in
// the even-fermion-parity sector, the decoherence factor factorises over the
// momenta k = (2m - 1) pi / N, m = 1..N/2, each mode being a two-level
// problem in the {|0>, |k,-k>} pair space with
//   h_k(lambda) = 2J [ -(lambda - cos k) sigma_z + sin k sigma_x ].

#pragma once

#include "gphase/qmat.hpp"

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

namespace gphase::ising {

using Complex = std::complex<double>;

enum class ShiftConvention {
    OneSided,   // branches lambda, lambda + delta
    Symmetric,  // branches lambda - delta, lambda + delta
};

struct IsingBathParams {
    int n_spins = 100;
    double j_coupling = 1.0;  // J (rad/s)
    double lambda = 1.0;
    double coupling = 0.0;    // delta, dimensionless shift of lambda
    ShiftConvention shift = ShiftConvention::OneSided;

    void validate() const;
    /// Transverse fields of the branch conditioned on system |0> and |1>.
    double field_branch0() const;
    double field_branch1() const;
};

/// Positive momenta (2m - 1) pi / N.
std::vector<double> momenta(int n_spins);

/// 2 J sqrt(1 + lambda^2 - 2 lambda cos k)
double mode_energy(double j_coupling, double lambda, double k);

/// Bogoliubov angle, atan2(sin k, lambda - cos k).
double bogoliubov_angle(double lambda, double k);

struct ModeFactors {
    double k;
    double eps_k;
    double eps_tilde_k;
    double alpha_k;
    double theta_k_lambda;
    double theta_k_lambda_shift;
};

/// One-sided mode data for lambda and lambda + delta.
ModeFactors mode_factors(const IsingBathParams& p, double k);

struct ModeAmplitude {
    double r_k;
    double phi_k;
};

/// R_k = sqrt(cos^2(e~ t) + sin^2(e~ t) cos^2(2 alpha)) and
/// phi_k = arg(cos(e~ t) + i sin(e~ t) cos(2 alpha)), continued without jumps
/// in t from phi_k(0) = 0. The mode factor is R_k e^{i (phi_k - eps_k t)}.
ModeAmplitude mode_amplitude(const ModeFactors& mf, double t);

struct DecoherenceValue {
    double log_magnitude = 0.0;
    double phase = 0.0;
    bool underflow = false;  // log_magnitude below -700; value() is then 0

    Complex value() const;
};

/// Product over modes m in [first_mode, last_mode) (0-based), accumulated in log space.
DecoherenceValue decoherence_modes(const IsingBathParams& p, double t, std::size_t first_mode,
                                   std::size_t last_mode);

/// r(t) over all N/2 modes.
DecoherenceValue decoherence_product(const IsingBathParams& p, double t);

/// Dense H_E(lambda) on 2^N states (qubit 0 is the most significant bit).
Eigen::MatrixXd ising_hamiltonian(int n_spins, double j_coupling, double lambda);

inline constexpr int kMaxBruteForceSpins = 11;

/// Exact many-body overlap <g| e^{iH_1 t} e^{-iH_0 t} |g> for N <= 11, with
/// |g> the ground state of H_E(lambda) found by full diagonalisation.
class BruteForceOracle {
public:
    explicit BruteForceOracle(const IsingBathParams& p);
    Complex operator()(double t) const;
    double ground_energy() const { return ground_energy_; }

private:
    Eigen::VectorXd ground_;
    double ground_energy_ = 0.0;
    Eigen::MatrixXd vectors0_, vectors1_;
    Eigen::VectorXd values0_, values1_;
    Eigen::VectorXd proj0_, proj1_;
};

Complex brute_force_oracle(const IsingBathParams& p, double t);

}  // namespace gphase::ising
