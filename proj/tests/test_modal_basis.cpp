#include <doctest.h>

#include <vector>

#include "oracles.hpp"
#include "qtube/errors.hpp"
#include "qtube/modal_basis.hpp"

using namespace qtube;

TEST_CASE("axial wavenumbers")
{
    const DispersionSpec spec(16.0, 1.0, 1.0);
    CHECK(axial_wavenumber(1, spec).real() == doctest::Approx(2.47596).epsilon(1e-5));
    for (int n = 1; n <= 6; ++n) {
        const cplx want = oracle::wavenumber(n, 16.0, 1.0, 1.0);
        CHECK(std::abs(axial_wavenumber(n, spec) - want) < 1e-14);
    }
    CHECK(axial_wavenumber(2, spec).imag() > 0.0);
    CHECK(propagating_count(6, spec) == 1);

    const DispersionSpec wide(16.0, 0.36, 2.0);
    for (int n = 1; n <= 6; ++n)
        CHECK(std::abs(axial_wavenumber(n, wide) - oracle::wavenumber(n, 16.0, 0.36, 2.0)) < 1e-14);
}

TEST_CASE("cutoffs")
{
    const DispersionSpec at(oracle::pi * oracle::pi, 1.0, 1.0);
    CHECK(cutoff_modes(3, at) == std::vector<int>{1});
    CHECK(propagating_count(3, at) == 0);
    CHECK(axial_wavenumber(1, at) == cplx(0.0, 0.0));
    CHECK_THROWS_AS(axial_wavenumber(0, at), InvalidArgument);
    CHECK_THROWS_AS(DispersionSpec(1.0, 1.0, 0.0), InvalidArgument);
}

TEST_CASE("sine decomposition of v(a - v)")
{
    const double a = 1.7;
    const int M = 4095;
    std::vector<double> s;
    for (double v : sample_grid(M, a)) s.push_back(v * (a - v));
    const ModeCoefficients f = decompose(std::span<const double>(s), 9, a);
    for (int n = 1; n <= 9; ++n) {
        const double want = n % 2 ? 8.0 * a * a / std::pow(n * oracle::pi, 3) : 0.0;
        CHECK(std::abs(f.coeffs(n - 1) - want) < 1e-9);
    }
    CHECK(std::abs(synthesize(f, 0.4 * a) - 0.4 * a * 0.6 * a) < 2e-3);
}

TEST_CASE("band-limited round trip")
{
    const double a = 1.0;
    Eigen::VectorXcd c(4);
    c << cplx(1, 0.5), cplx(-0.25, 0), cplx(0, 2), cplx(0.1, -0.1);
    const ModeCoefficients f(c, a);
    std::vector<cplx> s;
    for (double v : sample_grid(16, a)) s.push_back(synthesize(f, v));
    const ModeCoefficients g = decompose(std::span<const cplx>(s), 4, a);
    CHECK((g.coeffs - c).norm() < 1e-13);
}

TEST_CASE("operator and norm")
{
    const DispersionSpec spec(30.0, 1.0, 1.0);
    const ModeCoefficients e2 = ModeCoefficients::unit(2, 4, 1.0);
    const ModeCoefficients b = apply_B_const(e2, spec);
    CHECK(std::abs(b.coeffs(1) - oracle::wavenumber(2, 30.0, 1.0, 1.0)) < 1e-14);
    CHECK(std::abs(b.coeffs(0)) == 0.0);
    CHECK(ds_norm(e2, 1.0) == doctest::Approx(std::sqrt(5.0)));
    CHECK(ds_norm(ModeCoefficients::zero(3, 1.0), 2.0) == 0.0);
}
