// perturbative.cpp: Weak-coupling expansion of the open-system geometric phase

#include "gphase/perturbative.hpp"

#include "gphase/errors.hpp"
#include "gphase/numerics.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <sstream>

namespace gphase::perturbative {

using numerics::kPi;

namespace {

constexpr int kAgmIterations = 64;
constexpr double kAgmTolerance = 4.0 * std::numeric_limits<double>::epsilon();

}  // namespace

double elliptic_k(double m) {
    if (!(m >= 0.0 && m < 1.0)) throw DomainError("elliptic_k: parameter must lie in [0, 1)");
    double a = 1.0;
    double b = std::sqrt(1.0 - m);
    for (int it = 0; it < kAgmIterations && std::abs(a - b) > kAgmTolerance * a; ++it) {
        const double an = 0.5 * (a + b);
        b = std::sqrt(a * b);
        a = an;
    }
    return kPi / (2.0 * a);
}

double elliptic_e(double m) {
    if (!(m >= 0.0 && m <= 1.0)) throw DomainError("elliptic_e: parameter must lie in [0, 1]");
    if (m == 1.0) return 1.0;
    double a = 1.0;
    double b = std::sqrt(1.0 - m);
    double c = std::sqrt(m);
    double sum = 0.5 * c * c;
    double weight = 0.5;
    for (int it = 0; it < kAgmIterations && std::abs(c) > kAgmTolerance * a; ++it) {
        const double an = 0.5 * (a + b);
        c = 0.5 * (a - b);
        b = std::sqrt(a * b);
        a = an;
        weight *= 2.0;
        sum += weight * c * c;
    }
    return (kPi / (2.0 * a)) * (1.0 - sum);
}

ExpansionCoefficients extract_coefficients_numeric(const CouplingFamily& family, std::span<const double> times,
                                                   double step) {
    if (!(step > 0.0)) throw ValidationError("extract_coefficients_numeric: step must be positive");
    if (times.empty()) throw ValidationError("extract_coefficients_numeric: empty time grid");

    constexpr int kHalf = 3;
    std::array<DecoherenceSampler, 2 * kHalf + 1> samplers;
    for (int j = -kHalf; j <= kHalf; ++j) samplers[j + kHalf] = family(j * step);

    ExpansionCoefficients out;
    out.times.assign(times.begin(), times.end());
    out.r2.resize(times.size());
    out.r3.resize(times.size());
    out.phi1.resize(times.size());

    const double h = step;
    double r2_scale = 0.0;
    for (std::size_t i = 0; i < times.size(); ++i) {
        std::array<double, 2 * kHalf + 1> g{};
        std::array<double, 2 * kHalf + 1> phi{};
        const Complex r0 = samplers[kHalf](times[i]);
        for (int j = 0; j < 2 * kHalf + 1; ++j) {
            const Complex r = samplers[j](times[i]);
            g[j] = std::norm(r);
            phi[j] = std::arg(r * std::conj(r0));
        }
        const double g2 = (2.0 * g[0] - 27.0 * g[1] + 270.0 * g[2] - 490.0 * g[3] + 270.0 * g[4] - 27.0 * g[5] +
                           2.0 * g[6]) / (180.0 * h * h);
        const double g3 = (g[0] - 8.0 * g[1] + 13.0 * g[2] - 13.0 * g[4] + 8.0 * g[5] - g[6]) / (8.0 * h * h * h);
        const double p1 = (-phi[0] + 9.0 * phi[1] - 45.0 * phi[2] + 45.0 * phi[4] - 9.0 * phi[5] + phi[6]) /
                          (60.0 * h);
        out.r2[i] = -0.5 * g2;
        out.r3[i] = -g3 / 6.0;
        out.phi1[i] = p1;
        r2_scale = std::max(r2_scale, std::abs(out.r2[i]));
    }
    for (std::size_t i = 0; i < times.size(); ++i) {
        if (out.r2[i] < -1e-9 * std::max(1.0, r2_scale)) {
            std::ostringstream os;
            os << "extract_coefficients_numeric: R2(t = " << times[i] << ") = " << out.r2[i]
               << " is negative; reduce the stencil step";
            throw StencilConditioning(os.str());
        }
    }
    return out;
}

ApproxPhase gp_third_order(const ExpansionCoefficients& c, const SystemParams& sys, double coupling) {
    const std::size_t n = c.times.size();
    if (n < 5 || c.r2.size() != n || c.r3.size() != n || c.phi1.size() != n)
        throw DimensionMismatch("gp_third_order: coefficient arrays must share a grid of >= 5 points");
    const double h = c.times[1] - c.times[0];
    if (std::abs(c.times.front()) > 1e-12 || std::abs(c.times.back() - sys.tau()) > 1e-9 * sys.tau())
        throw ValidationError("gp_third_order: grid must span [0, tau]");

    const double int_r2 = numerics::simpson(c.r2, h);
    const double int_r3 = numerics::simpson(c.r3, h);
    const std::vector<double> dphi1 = numerics::derivative(c.phi1, h);
    std::vector<double> r2_dphi1(n);
    for (std::size_t i = 0; i < n; ++i) r2_dphi1[i] = c.r2[i] * dphi1[i];
    const double int_r2_dphi1 = numerics::simpson(r2_dphi1, h);

    const double ct = std::cos(sys.theta);
    const double st = std::sin(sys.theta);
    const double pref = ct * st * st;
    const double d = coupling;
    const double phi0 = unitary_geometric_phase(sys.theta);
    const double r2_end = c.r2.back();
    const double p_end = c.phi1.back();

    ApproxPhase out;
    const double second = d * d * sys.omega / 4.0 * int_r2;
    const double third = d * d * d / 24.0 *
                         (3.0 * r2_end * p_end + p_end * p_end * p_end + 6.0 * sys.omega * int_r3 -
                          6.0 * int_r2_dphi1);
    out.order2 = phi0 - pref * second;
    out.order3 = phi0 - pref * (second + third);
    return out;
}

namespace {

// Cancellation-free forms of 1 + l^2 - 2 l cos k and l - cos k.
double disc(double lambda, double k) {
    const double s = std::sin(0.5 * k);
    return (lambda - 1.0) * (lambda - 1.0) + 4.0 * lambda * s * s;
}

double detuning(double lambda, double k) {
    const double s = std::sin(0.5 * k);
    return (lambda - 1.0) + 2.0 * s * s;
}

// 1 - sin(x)/x = sum_{n>=1} (-1)^(n+1) x^2n / (2n+1)!
double one_minus_sinc(double x) {
    if (std::abs(x) < 1.0) {
        const double x2 = x * x;
        double term = x2 / 6.0;
        double sum = 0.0;
        for (int n = 1; n < 20 && term != 0.0; ++n) {
            sum += term;
            term *= -x2 / ((2.0 * n + 2.0) * (2.0 * n + 3.0));
        }
        return sum;
    }
    return 1.0 - std::sin(x) / x;
}

// (x (2 + cos x) - 3 sin x) / x = sum_{n>=2} (-1)^n (2n - 2) x^2n / (2n+1)!
double h_over_x(double x) {
    if (std::abs(x) < 1.0) {
        const double x2 = x * x;
        double inv_fact = 1.0 / 120.0;  // 1 / (2n+1)! at n = 2
        double power = x2 * x2;
        double sum = 0.0;
        for (int n = 2; n < 20; ++n) {
            const double sign = (n % 2 == 0) ? 1.0 : -1.0;
            sum += sign * (2.0 * n - 2.0) * inv_fact * power;
            inv_fact /= (2.0 * n + 2.0) * (2.0 * n + 3.0);
            power *= x2;
        }
        return sum;
    }
    return (2.0 + std::cos(x)) - 3.0 * std::sin(x) / x;
}

int panel_count(double max_energy, double period) {
    // Roughly one panel per oscillation of sin(2 eps T) across [0, pi].
    const double osc = max_energy * period / kPi;
    return std::clamp(static_cast<int>(std::ceil(osc)), 8, 4096);
}

double integrate_breakpoints(const std::function<double(double)>& f, const std::vector<double>& edges,
                             double abs_tol) {
    using Quad = boost::math::quadrature::gauss_kronrod<double, 31>;
    double total = 0.0;
    double error = 0.0;
    for (std::size_t i = 0; i + 1 < edges.size(); ++i) {
        double err = 0.0;
        total += Quad::integrate(f, edges[i], edges[i + 1], 15, 1e-12, &err);
        error += err;
    }
    if (!(error <= abs_tol * std::max(1.0, std::abs(total))) || !std::isfinite(total)) {
        std::ostringstream os;
        os << "integrate: estimated error " << error << " exceeds tolerance";
        throw QuadratureNonconvergence(os.str());
    }
    return total;
}

}  // namespace

ModeCoefficients mode_coefficients(double j_coupling, double lambda, double k, double t) {
    const double dd = disc(lambda, k);
    const double det = detuning(lambda, k);
    const double eps = 2.0 * j_coupling * std::sqrt(dd);
    const double sk = std::sin(k);
    const double x = eps * t;
    const double sx = std::sin(x);
    ModeCoefficients out;
    out.r2 = sk * sk * sx * sx / (dd * dd);
    out.r3 = -2.0 * sk * sk * det / (dd * dd * dd) * sx * (sx - x * std::cos(x));
    out.phi1 = t * 2.0 * j_coupling * det / std::sqrt(dd);
    return out;
}

ModeCoefficients printed_mode_coefficients(double lambda, double k, double t) {
    const double eps = ising::mode_energy(1.0, lambda, k);
    const double sk = std::sin(k);
    const double x = eps * t;
    const double e2 = eps * eps;
    ModeCoefficients out;
    out.r2 = 16.0 * sk * sk * std::sin(x) * std::sin(x) / (e2 * e2);
    out.r3 = -128.0 * (std::cos(k) - lambda) * sk * sk * std::sin(x) / (e2 * e2 * e2) *
             (std::sin(x) - x * std::cos(x));
    out.phi1 = (lambda - std::cos(k)) / eps;
    return out;
}

ExpansionCoefficients ising_coefficients(const ising::IsingBathParams& p, std::span<const double> times) {
    p.validate();
    if (p.shift != ising::ShiftConvention::OneSided)
        throw ValidationError("ising_coefficients: only the one-sided shift is supported");
    const std::vector<double> ks = ising::momenta(p.n_spins);
    ExpansionCoefficients out;
    out.times.assign(times.begin(), times.end());
    out.r2.assign(times.size(), 0.0);
    out.r3.assign(times.size(), 0.0);
    out.phi1.assign(times.size(), 0.0);
    for (std::size_t i = 0; i < times.size(); ++i) {
        for (double k : ks) {
            const ModeCoefficients m = mode_coefficients(p.j_coupling, p.lambda, k, times[i]);
            out.r2[i] += m.r2;
            out.r3[i] += m.r3;
            out.phi1[i] += m.phi1;
        }
    }
    return out;
}

double integrate(const std::function<double(double)>& f, double a, double b, int panels, double abs_tol) {
    if (panels < 1) throw ValidationError("integrate: need at least one panel");
    std::vector<double> edges;
    for (int i = 0; i < panels; ++i) edges.push_back(a + (b - a) * i / panels);
    edges.push_back(b);
    return integrate_breakpoints(f, edges, abs_tol);
}

double g1_closed_form(int n_spins, double j_coupling, double lambda) {
    if (!(lambda >= 0.0)) throw DomainError("g1_closed_form: lambda must be non-negative");
    const double scale = static_cast<double>(n_spins) * j_coupling / kPi;
    if (lambda == 1.0) return 2.0 * scale;
    if (lambda < 1e-3) {
        // The bracket cancels to O(lambda^2); integrate directly.
        const double integral = integrate(
            [lambda](double k) { return detuning(lambda, k) / std::sqrt(disc(lambda, k)); }, 0.0, kPi);
        return scale * integral;
    }
    const double ratio = (1.0 - lambda) / (1.0 + lambda);
    const double m = 1.0 - ratio * ratio;
    // (lambda - 1) K(m) vanishes like |1 - lambda| log|1 - lambda| at the critical point
    if (m >= 1.0) return scale / lambda * (lambda + 1.0);
    return scale / lambda * ((lambda + 1.0) * elliptic_e(m) + (lambda - 1.0) * elliptic_k(m));
}

double g1_direct_sum(int n_spins, double j_coupling, double lambda) {
    double sum = 0.0;
    for (double k : ising::momenta(n_spins)) sum += 2.0 * j_coupling * detuning(lambda, k) / std::sqrt(disc(lambda, k));
    return sum;
}

IsingClosedForms ising_closed_forms(const ising::IsingBathParams& p, const SystemParams& sys) {
    p.validate();
    if (p.shift != ising::ShiftConvention::OneSided)
        throw ValidationError("ising_closed_forms: only the one-sided shift is supported");
    if (!(p.lambda >= 0.0)) throw DomainError("ising_closed_forms: lambda must be non-negative");

    const double big_t = sys.tau();
    const double l = p.lambda;
    const double j = p.j_coupling;
    const double measure = static_cast<double>(p.n_spins) / (2.0 * kPi);
    const int panels = panel_count(2.0 * j * (1.0 + std::abs(l)), 2.0 * big_t);

    auto eps_of = [j, l](double k) { return 2.0 * j * std::sqrt(disc(l, k)); };

    IsingClosedForms out;
    out.period = big_t;
    out.f2 = measure * integrate(
                           [&](double k) {
                               const double dd = disc(l, k);
                               const double sk = std::sin(k);
                               const double s = std::sin(eps_of(k) * big_t);
                               return sk * sk * s * s / (dd * dd);
                           },
                           0.0, kPi, panels);
    out.F2 = measure * integrate(
                           [&](double k) {
                               const double dd = disc(l, k);
                               const double sk = std::sin(k);
                               return sk * sk / (dd * dd) * 0.5 * big_t * one_minus_sinc(2.0 * eps_of(k) * big_t);
                           },
                           0.0, kPi, panels);
    out.F3 = measure * integrate(
                           [&](double k) {
                               const double dd = disc(l, k);
                               const double sk = std::sin(k);
                               return -2.0 * sk * sk * detuning(l, k) / (dd * dd * dd) * 0.25 * big_t *
                                      h_over_x(2.0 * eps_of(k) * big_t);
                           },
                           0.0, kPi, panels);
    out.G1 = g1_closed_form(p.n_spins, j, l);
    return out;
}

IsingClosedForms printed_closed_forms(const ising::IsingBathParams& p, const SystemParams& sys) {
    p.validate();
    if (!(p.lambda >= 0.0)) throw DomainError("printed_closed_forms: lambda must be non-negative");
    const double big_t = sys.tau();
    const double omega = sys.omega;
    const double l = p.lambda;
    const double measure = static_cast<double>(p.n_spins) / (2.0 * kPi);
    const int panels = panel_count(2.0 * (1.0 + std::abs(l)), 2.0 * big_t);
    auto eps_of = [l](double k) { return ising::mode_energy(1.0, l, k); };

    IsingClosedForms out;
    out.period = big_t;
    out.f2 = measure * integrate(
                           [&](double k) {
                               const double e = eps_of(k);
                               return std::sin(k) * std::sin(k) * std::sin(e * big_t) / (e * e * e * e);
                           },
                           0.0, kPi, panels);
    out.F2 = measure * integrate(
                           [&](double k) {
                               const double e = eps_of(k);
                               const double x = 2.0 * e * big_t;
                               return 8.0 * big_t * std::sin(k) * std::sin(k) / (e * e * e * e) *
                                      (1.0 - std::sin(x) / x);
                           },
                           0.0, kPi, panels);
    out.F3 = measure * integrate(
                           [&](double k) {
                               const double e = eps_of(k);
                               const double x = 2.0 * e * big_t;
                               const double e7 = std::pow(e, 7.0);
                               return (l - std::cos(k)) * std::sin(k) * std::sin(k) / (8.0 * omega * e7) *
                                      (4.0 * kPi * e * (2.0 + std::cos(x)) - 3.0 * omega * std::sin(x));
                           },
                           0.0, kPi, panels);
    out.G1 = g1_closed_form(p.n_spins, 1.0, l);
    return out;
}

double gp_approx_ising(const ising::IsingBathParams& p, const SystemParams& sys, int order) {
    if (order != 2 && order != 3) throw ValidationError("gp_approx_ising: order must be 2 or 3");
    const IsingClosedForms c = ising_closed_forms(p, sys);
    const double ct = std::cos(sys.theta);
    const double st = std::sin(sys.theta);
    const double d = p.coupling;
    const double big_t = c.period;
    double bracket = d * d * sys.omega / 4.0 * c.F2;
    if (order == 3) {
        const double g1t = big_t * c.G1;
        bracket += d * d * d / 24.0 *
                   (3.0 * c.f2 * g1t + g1t * g1t * g1t + 6.0 * sys.omega * c.F3 - 6.0 * c.G1 * c.F2);
    }
    return unitary_geometric_phase(sys.theta) - ct * st * st * bracket;
}

}  // namespace gphase::perturbative
