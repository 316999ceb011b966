// numerics.cpp: Uniform-grid quadrature, finite differences and phase helpers

#include "gphase/numerics.hpp"

#include "gphase/errors.hpp"

#include <cmath>

namespace gphase::numerics {

double wrap_phase(double angle) {
    double w = std::remainder(angle, kTwoPi);
    if (w <= -kPi) w += kTwoPi;
    return w;
}

double simpson(std::span<const double> f, double h) {
    const std::size_t n = f.size();
    if (n < 2) throw ValidationError("simpson: need at least two samples");
    if (n == 2) return 0.5 * h * (f[0] + f[1]);
    const std::size_t intervals = n - 1;
    std::size_t even_end = intervals;
    double tail = 0.0;
    if (intervals % 2 == 1) {
        // 3/8 rule on the last three intervals
        even_end = intervals - 3;
        const std::size_t a = even_end;
        tail = 3.0 * h / 8.0 * (f[a] + 3.0 * f[a + 1] + 3.0 * f[a + 2] + f[a + 3]);
    }
    double sum = 0.0;
    for (std::size_t i = 0; i + 2 <= even_end; i += 2) sum += f[i] + 4.0 * f[i + 1] + f[i + 2];
    return sum * h / 3.0 + tail;
}

std::vector<double> derivative(std::span<const double> f, double h) {
    const std::size_t n = f.size();
    if (n < 5) throw ValidationError("derivative: need at least five samples");
    std::vector<double> d(n);
    const double s = 1.0 / (12.0 * h);
    d[0] = s * (-25.0 * f[0] + 48.0 * f[1] - 36.0 * f[2] + 16.0 * f[3] - 3.0 * f[4]);
    d[1] = s * (-3.0 * f[0] - 10.0 * f[1] + 18.0 * f[2] - 6.0 * f[3] + f[4]);
    for (std::size_t i = 2; i + 2 < n; ++i)
        d[i] = s * (f[i - 2] - 8.0 * f[i - 1] + 8.0 * f[i + 1] - f[i + 2]);
    const std::size_t m = n - 1;
    d[m - 1] = s * (3.0 * f[m] + 10.0 * f[m - 1] - 18.0 * f[m - 2] + 6.0 * f[m - 3] - f[m - 4]);
    d[m] = s * (25.0 * f[m] - 48.0 * f[m - 1] + 36.0 * f[m - 2] - 16.0 * f[m - 3] + 3.0 * f[m - 4]);
    return d;
}

std::vector<double> unwrap(std::span<const double> wrapped) {
    std::vector<double> out(wrapped.begin(), wrapped.end());
    for (std::size_t i = 1; i < out.size(); ++i)
        out[i] = out[i - 1] + wrap_phase(wrapped[i] - wrapped[i - 1]);
    return out;
}

std::vector<double> uniform_grid(double end, std::size_t intervals) {
    if (intervals == 0) throw ValidationError("uniform_grid: zero intervals");
    std::vector<double> t(intervals + 1);
    for (std::size_t i = 0; i <= intervals; ++i)
        t[i] = end * static_cast<double>(i) / static_cast<double>(intervals);
    t.back() = end;
    return t;
}

}  // namespace gphase::numerics
