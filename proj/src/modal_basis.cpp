#include "qtube/modal_basis.hpp"

#include <cmath>
#include <numbers>

#include "qtube/errors.hpp"

namespace qtube {

using std::numbers::pi;

ModeCoefficients::ModeCoefficients(Eigen::VectorXcd c, double a) : coeffs(std::move(c)), width_a(a)
{
    if (coeffs.size() < 1) throw InvalidArgument("ModeCoefficients: need at least one mode");
    if (!(a > 0.0)) throw InvalidArgument("ModeCoefficients: width must be positive");
}

ModeCoefficients ModeCoefficients::unit(int n, int N, double a)
{
    if (n < 1 || n > N) throw InvalidArgument("ModeCoefficients::unit: index out of range");
    Eigen::VectorXcd c = Eigen::VectorXcd::Zero(N);
    c(n - 1) = 1.0;
    return {std::move(c), a};
}

ModeCoefficients ModeCoefficients::zero(int N, double a)
{
    return {Eigen::VectorXcd::Zero(N), a};
}

DispersionSpec::DispersionSpec(double k2_, double mu_, double a_) : k2(k2_), mu_const(mu_), width_a(a_)
{
    if (!std::isfinite(k2)) throw InvalidArgument("DispersionSpec: k2 must be finite");
    if (!(mu_const > 0.0)) throw InvalidArgument("DispersionSpec: mu must be positive");
    if (!(width_a > 0.0)) throw InvalidArgument("DispersionSpec: width must be positive");
}

double radicand(int n, const DispersionSpec& spec)
{
    const double q = n * pi / spec.width_a;
    return spec.k2 * spec.mu_const - q * q;
}

cplx axial_wavenumber(int n, const DispersionSpec& spec)
{
    if (n < 1) throw InvalidArgument("axial_wavenumber: mode index must be >= 1");
    const double r = radicand(n, spec);
    if (r >= 0.0) return {std::sqrt(r), 0.0};
    return {0.0, std::sqrt(-r)};
}

Eigen::VectorXcd axial_wavenumbers(int N, const DispersionSpec& spec)
{
    Eigen::VectorXcd out(N);
    for (int n = 1; n <= N; ++n) out(n - 1) = axial_wavenumber(n, spec);
    return out;
}

std::vector<int> cutoff_modes(int N, const DispersionSpec& spec)
{
    std::vector<int> out;
    for (int n = 1; n <= N; ++n)
        if (radicand(n, spec) == 0.0) out.push_back(n);
    return out;
}

int propagating_count(int N, const DispersionSpec& spec)
{
    int count = 0;
    for (int n = 1; n <= N; ++n)
        if (radicand(n, spec) > 0.0) ++count;
    return count;
}

ModeCoefficients apply_B_const(const ModeCoefficients& f, const DispersionSpec& spec)
{
    if (!f.coeffs.allFinite()) throw InvalidArgument("apply_B_const: non-finite coefficients");
    const Eigen::VectorXcd alpha = axial_wavenumbers(f.size(), spec);
    return {f.coeffs.cwiseProduct(alpha), f.width_a};
}

double ds_norm(const ModeCoefficients& f, double s)
{
    double acc = 0.0;
    for (int i = 0; i < f.size(); ++i) {
        const double n = i + 1;
        acc += std::norm(f.coeffs(i)) * std::pow(1.0 + n * n, s);
    }
    return std::sqrt(acc);
}

std::vector<double> sample_grid(int M, double a)
{
    std::vector<double> v(M);
    for (int j = 0; j < M; ++j) v[j] = (j + 1) * a / (M + 1);
    return v;
}

ModeCoefficients decompose(std::span<const cplx> samples, int N, double a)
{
    const int M = static_cast<int>(samples.size());
    if (N < 1) throw InvalidArgument("decompose: N must be >= 1");
    if (M < N) throw InvalidArgument("decompose: grid has fewer samples than requested modes");
    if (!(a > 0.0)) throw InvalidArgument("decompose: width must be positive");
    Eigen::VectorXcd c = Eigen::VectorXcd::Zero(N);
    const double scale = 2.0 / (M + 1);
    for (int n = 1; n <= N; ++n) {
        cplx acc = 0.0;
        for (int j = 1; j <= M; ++j) acc += samples[j - 1] * std::sin(pi * n * j / (M + 1.0));
        c(n - 1) = scale * acc;
    }
    return {std::move(c), a};
}

ModeCoefficients decompose(std::span<const double> samples, int N, double a)
{
    std::vector<cplx> z(samples.begin(), samples.end());
    return decompose(std::span<const cplx>(z), N, a);
}

cplx synthesize(const ModeCoefficients& f, double v)
{
    cplx acc = 0.0;
    for (int i = 0; i < f.size(); ++i) acc += f.coeffs(i) * std::sin((i + 1) * pi * v / f.width_a);
    return acc;
}

} // namespace qtube
