#ifndef QTUBE_TEST_ORACLES_HPP
#define QTUBE_TEST_ORACLES_HPP

#include <cmath>
#include <complex>
#include <functional>
#include <numbers>

namespace oracle {

using cplx = std::complex<double>;
constexpr double pi = std::numbers::pi;

// k^2 mu - (n pi / a)^2 under the principal root, Im >= 0
inline cplx wavenumber(int n, double k2, double mu, double a)
{
    return std::sqrt(cplx(k2 * mu - std::pow(n * pi / a, 2), 0.0));
}

// composite Simpson on [lo, hi]
inline double simpson(const std::function<double(double)>& f, double lo, double hi, int panels = 2000)
{
    const double h = (hi - lo) / (2 * panels);
    double s = f(lo) + f(hi);
    for (int i = 1; i < 2 * panels; ++i) s += f(lo + i * h) * (i % 2 ? 4.0 : 2.0);
    return s * h / 3.0;
}

// (2/a) int_0^a k2 mu(v) sin(n pi v/a) sin(m pi v/a) dv - (n pi/a)^2 delta_nm
inline double coupling(const std::function<double(double)>& mu, double a, double k2, int n, int m)
{
    const double q = simpson([&](double v) { return mu(v) * std::sin(n * pi * v / a) * std::sin(m * pi * v / a); },
                             0.0, a);
    return 2.0 / a * k2 * q - (n == m ? std::pow(n * pi / a, 2) : 0.0);
}

// prevertex separation of a single step a -> b in a strip of width a
inline double step_gap(double a, double b) { return 2.0 * a / pi * std::log(a / b); }

} // namespace oracle

#endif
