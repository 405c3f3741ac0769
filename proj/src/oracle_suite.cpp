#include "qtube/oracle_suite.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <Eigen/Sparse>

#include "qtube/coupled_mode.hpp"
#include "qtube/errors.hpp"

namespace qtube {

using std::numbers::pi;

OracleResult mode_match_step(double a, double b, double k2, int N)
{
    if (!(a > 0.0) || !(b > 0.0) || b > a) throw InvalidArgument("mode_match_step: need 0 < b <= a");
    if (N < 1) throw InvalidArgument("mode_match_step: N must be positive");
    const int Na = N;
    const int Nb = std::max(1, static_cast<int>(std::lround(N * b / a)));
    const DispersionSpec left(k2, 1.0, a);
    const Eigen::VectorXcd al = axial_wavenumbers(Na, left);
    // right-side physical wavenumbers sqrt(k2 - m^2 pi^2 / b^2)
    const Eigen::VectorXcd be = axial_wavenumbers(Nb, DispersionSpec(k2, 1.0, b));

    Eigen::MatrixXd Q(Na, Nb);
    for (int n = 1; n <= Na; ++n)
        for (int m = 1; m <= Nb; ++m) {
            const double cm = pi * (n / a - m / b);
            const double cp = pi * (n / a + m / b);
            const double first = (std::abs(cm) < 1e-14) ? b : std::sin(cm * b) / cm;
            Q(n - 1, m - 1) = 0.5 * (first - std::sin(cp * b) / cp);
        }
    const Eigen::MatrixXcd Qc = Q.cast<cplx>();
    Eigen::MatrixXcd M(Na + Nb, Na + Nb);
    M.topLeftCorner(Na, Na) = 0.5 * a * Eigen::MatrixXcd::Identity(Na, Na);
    M.topRightCorner(Na, Nb) = -Qc;
    M.bottomLeftCorner(Nb, Na) = Qc.transpose() * al.asDiagonal();
    M.bottomRightCorner(Nb, Nb) = (0.5 * b * be).asDiagonal();

    // columns: Na incidences from the left, Nb from the right
    Eigen::MatrixXcd rhs = Eigen::MatrixXcd::Zero(Na + Nb, Na + Nb);
    for (int j = 0; j < Na; ++j) {
        rhs(j, j) = -0.5 * a;
        rhs.col(j).tail(Nb) = Qc.transpose().col(j) * al(j);
    }
    for (int j = 0; j < Nb; ++j) {
        rhs.col(Na + j).head(Na) = Qc.col(j);
        rhs(Na + j, Na + j) = 0.5 * b * be(j);
    }
    const Eigen::PartialPivLU<Eigen::MatrixXcd> lu(M);
    const double rc = lu.rcond();
    if (!(rc > 1e-14)) throw SingularSystemError("mode_match_step: matching matrix is singular");
    const Eigen::MatrixXcd X = lu.solve(rhs);

    const int n = std::min(Na, Nb);
    OracleResult out;
    out.method = "mode-matching";
    out.modes_left = Na;
    out.modes_right = Nb;
    ScatteringSet& S = out.S;
    S.N = n;
    S.k2 = k2;
    S.mu_left = 1.0;
    S.mu_right = (b / a) * (b / a);
    S.width_a = a;
    S.Rplus = X.topLeftCorner(n, n);
    S.Tplus = X.block(Na, 0, n, n);
    S.Tminus = X.block(0, Na, n, n);
    S.Rminus = X.block(Na, Na, n, n);
    return out;
}

namespace {

// Returns [Rplus | Rminus ; Tplus | Tminus] style columns packed in a ScatteringSet.
ScatteringSet fd_solve(const ProfileSource& profile, double k2, int N, double u1, double u2, int M)
{
    const double h = (u2 - u1) / M;
    const double a = profile.width();
    const SplitterDiagonals B(k2, N, profile.mu_minus(), profile.mu_plus(), a);
    const cplx I(0.0, 1.0);
    const int n_unknown = (M + 1) * N;
    std::vector<Eigen::Triplet<cplx>> trip;
    trip.reserve(static_cast<std::size_t>(M + 1) * (N * N + 2 * N));
    const double ih2 = 1.0 / (h * h);
    for (int j = 0; j <= M; ++j) {
        const double u = u1 + j * h;
        const Eigen::MatrixXd B2 = assemble_B2(profile, u, k2, N);
        const int r0 = j * N;
        for (int p = 0; p < N; ++p)
            for (int q = 0; q < N; ++q)
                if (B2(p, q) != 0.0) trip.emplace_back(r0 + p, r0 + q, B2(p, q));
        for (int p = 0; p < N; ++p) {
            if (j == 0) {
                trip.emplace_back(r0 + p, r0 + p, (-2.0 + 2.0 * I * h * B.minus(p)) * ih2);
                trip.emplace_back(r0 + p, r0 + N + p, 2.0 * ih2);
            } else if (j == M) {
                trip.emplace_back(r0 + p, r0 + p, (-2.0 + 2.0 * I * h * B.plus(p)) * ih2);
                trip.emplace_back(r0 + p, r0 - N + p, 2.0 * ih2);
            } else {
                trip.emplace_back(r0 + p, r0 + p, -2.0 * ih2);
                trip.emplace_back(r0 + p, r0 - N + p, ih2);
                trip.emplace_back(r0 + p, r0 + N + p, ih2);
            }
        }
    }
    Eigen::SparseMatrix<cplx> A(n_unknown, n_unknown);
    A.setFromTriplets(trip.begin(), trip.end());
    A.makeCompressed();
    Eigen::SparseLU<Eigen::SparseMatrix<cplx>, Eigen::COLAMDOrdering<int>> lu;
    lu.compute(A);
    if (lu.info() != Eigen::Success) throw SingularSystemError("direct_bvp_solve: finite-difference system is singular");

    Eigen::MatrixXcd rhs = Eigen::MatrixXcd::Zero(n_unknown, 2 * N);
    for (int p = 0; p < N; ++p) {
        rhs(p, p) = 4.0 * I * h * B.minus(p) * ih2;
        rhs(M * N + p, N + p) = 4.0 * I * h * B.plus(p) * ih2;
    }
    const Eigen::MatrixXcd X = lu.solve(rhs);
    if (lu.info() != Eigen::Success || !X.allFinite())
        throw SingularSystemError("direct_bvp_solve: solve failed");

    ScatteringSet S;
    S.N = N;
    S.k2 = k2;
    S.mu_left = profile.mu_minus();
    S.mu_right = profile.mu_plus();
    S.width_a = a;
    S.u1 = u1;
    S.u2 = u2;
    const Eigen::MatrixXcd Id = Eigen::MatrixXcd::Identity(N, N);
    S.Rplus = X.block(0, 0, N, N) - Id;
    S.Tplus = X.block(M * N, 0, N, N);
    S.Rminus = X.block(M * N, N, N, N) - Id;
    S.Tminus = X.block(0, N, N, N);
    return S;
}

} // namespace

OracleResult direct_bvp_solve(const ProfileSource& profile, double k2, int N, double u1, double u2,
                              const BvpOptions& opts)
{
    if (N < 1) throw InvalidArgument("direct_bvp_solve: N must be positive");
    if (!(u1 < u2)) throw InvalidArgument("direct_bvp_solve: empty interval");
    if (profile.order() < 2 * N) throw InvalidArgument("direct_bvp_solve: profile order below 2N");
    const auto [c1, c2] = profile.core();
    if (c1 < u1 || c2 > u2) throw InvalidArgument("direct_bvp_solve: profile is not flat at the grid ends");
    int M = opts.points;
    if (M <= 0) {
        double kmax = 0.0;
        for (double mu : {profile.mu_minus(), profile.mu_plus(), profile.coefficients(0.5 * (c1 + c2))(0)})
            kmax = std::max(kmax, std::sqrt(std::max(k2 * mu, 0.0)));
        const Eigen::VectorXcd am = axial_wavenumbers(N, DispersionSpec(k2, 1.0, profile.width()));
        kmax = std::max(kmax, am.cwiseAbs().maxCoeff());
        const double wavelength = 2.0 * pi / std::max(kmax, 1e-12);
        M = std::max(2000, static_cast<int>(std::ceil(300.0 * (u2 - u1) / wavelength)));
    }
    OracleResult out;
    out.method = opts.richardson ? "finite-difference (Richardson)" : "finite-difference";
    const ScatteringSet coarse = fd_solve(profile, k2, N, u1, u2, M);
    if (!opts.richardson) {
        out.S = coarse;
        out.grid_points = M + 1;
        return out;
    }
    const ScatteringSet fine = fd_solve(profile, k2, N, u1, u2, 2 * M);
    out.grid_points = 2 * M + 1;
    out.S = fine;
    auto extrapolate = [](const OperatorMatrix& f, const OperatorMatrix& c) { return (4.0 * f - c) / 3.0; };
    out.S.Tplus = extrapolate(fine.Tplus, coarse.Tplus);
    out.S.Rplus = extrapolate(fine.Rplus, coarse.Rplus);
    out.S.Rminus = extrapolate(fine.Rminus, coarse.Rminus);
    out.S.Tminus = extrapolate(fine.Tminus, coarse.Tminus);
    return out;
}

} // namespace qtube
