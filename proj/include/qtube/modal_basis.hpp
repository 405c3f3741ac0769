#ifndef QTUBE_MODAL_BASIS_HPP
#define QTUBE_MODAL_BASIS_HPP

#include <complex>
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace qtube {

using cplx = std::complex<double>;

/// Coefficients f_n, n = 1..N, of a transverse slice f(v) = sum f_n sin(n pi v / a).
///
/// The basis is the plain (un-normalized) sine family, so (phi_n, phi_n) = a/2.
/// coeffs(0) holds f_1.
struct ModeCoefficients {
    Eigen::VectorXcd coeffs;
    double width_a = 1.0;

    ModeCoefficients() = default;
    ModeCoefficients(Eigen::VectorXcd c, double a);

    static ModeCoefficients unit(int n, int N, double a);
    static ModeCoefficients zero(int N, double a);

    int size() const { return static_cast<int>(coeffs.size()); }
};

/// Energy and asymptotic refractive factor fixing the constant-coefficient operator
/// sqrt(d_v^2 + k2 * mu) on a strip of width a.
struct DispersionSpec {
    double k2 = 0.0;
    double mu_const = 1.0;
    double width_a = 1.0;

    DispersionSpec() = default;
    DispersionSpec(double k2_, double mu_, double a_);
};

/// sqrt(k2 mu - n^2 pi^2 / a^2) on the branch Im >= 0 (real part >= 0 when real).
cplx axial_wavenumber(int n, const DispersionSpec& spec);

/// The radicand k2 mu - n^2 pi^2 / a^2.
double radicand(int n, const DispersionSpec& spec);

/// diag(alpha_1..alpha_N).
Eigen::VectorXcd axial_wavenumbers(int N, const DispersionSpec& spec);

/// Indices (1-based) of modes whose radicand is exactly zero.
std::vector<int> cutoff_modes(int N, const DispersionSpec& spec);

/// Number of modes with positive radicand (propagating), counted from n = 1.
int propagating_count(int N, const DispersionSpec& spec);

/// B0 / B+- applied to f: componentwise multiplication by alpha_n.
ModeCoefficients apply_B_const(const ModeCoefficients& f, const DispersionSpec& spec);

/// sqrt(sum |f_n|^2 (1 + n^2)^s) over the truncated range.
double ds_norm(const ModeCoefficients& f, double s);

/// Sine coefficients of samples taken at the interior grid v_j = j a / (M + 1), j = 1..M.
/// Exact (discrete sine transform) for band-limited data with N <= M.
ModeCoefficients decompose(std::span<const cplx> samples, int N, double a);
ModeCoefficients decompose(std::span<const double> samples, int N, double a);

/// Interior sample locations used by decompose.
std::vector<double> sample_grid(int M, double a);

/// Evaluates sum f_n sin(n pi v / a).
cplx synthesize(const ModeCoefficients& f, double v);

} // namespace qtube

#endif
