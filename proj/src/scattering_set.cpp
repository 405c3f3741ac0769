#include "qtube/scattering_set.hpp"

#include <algorithm>
#include <cmath>

#include "qtube/errors.hpp"

namespace qtube {

ScatteringSet ScatteringSet::identity(int N, double k2, double mu, double a, double u)
{
    return flat(N, k2, mu, a, 0.0, u);
}

ScatteringSet ScatteringSet::flat(int N, double k2, double mu, double a, double L, double u1)
{
    if (N < 1) throw InvalidArgument("ScatteringSet: N must be positive");
    ScatteringSet S;
    S.N = N;
    S.k2 = k2;
    S.mu_left = mu;
    S.mu_right = mu;
    S.width_a = a;
    S.u1 = u1;
    S.u2 = u1;
    S.Tplus = OperatorMatrix::Identity(N, N);
    S.Tminus = OperatorMatrix::Identity(N, N);
    S.Rplus = OperatorMatrix::Zero(N, N);
    S.Rminus = OperatorMatrix::Zero(N, N);
    return flat_propagate(S, 0.0, L);
}

Eigen::VectorXcd ScatteringSet::alpha_left() const
{
    return axial_wavenumbers(N, DispersionSpec(k2, mu_left, width_a));
}

Eigen::VectorXcd ScatteringSet::alpha_right() const
{
    return axial_wavenumbers(N, DispersionSpec(k2, mu_right, width_a));
}

int ScatteringSet::propagating_left() const
{
    return propagating_count(N, DispersionSpec(k2, mu_left, width_a));
}

int ScatteringSet::propagating_right() const
{
    return propagating_count(N, DispersionSpec(k2, mu_right, width_a));
}

ScatteringSet flat_propagate(const ScatteringSet& S, double extra_left, double extra_right)
{
    ScatteringSet out = S;
    const cplx I(0.0, 1.0);
    if (extra_left != 0.0) {
        const Eigen::VectorXcd E = (I * extra_left * S.alpha_left()).array().exp();
        out.Tplus = out.Tplus * E.asDiagonal();
        out.Rplus = E.asDiagonal() * out.Rplus * E.asDiagonal();
        out.Tminus = E.asDiagonal() * out.Tminus;
        out.u1 -= extra_left;
    }
    if (extra_right != 0.0) {
        const Eigen::VectorXcd E = (I * extra_right * S.alpha_right()).array().exp();
        out.Tplus = E.asDiagonal() * out.Tplus;
        out.Rminus = E.asDiagonal() * out.Rminus * E.asDiagonal();
        out.Tminus = out.Tminus * E.asDiagonal();
        out.u2 += extra_right;
    }
    return out;
}

double flux_residual(const ScatteringSet& S)
{
    const Eigen::VectorXcd aL = S.alpha_left();
    const Eigen::VectorXcd aR = S.alpha_right();
    const int pL = S.propagating_left();
    const int pR = S.propagating_right();
    auto outgoing = [&](const OperatorMatrix& R, const Eigen::VectorXcd& aR_side, int pr, const OperatorMatrix& T,
                        const Eigen::VectorXcd& aT_side, int pt, int j) {
        double s = 0.0;
        for (int n = 0; n < pr; ++n) s += aR_side(n).real() * std::norm(R(n, j));
        for (int n = 0; n < pt; ++n) s += aT_side(n).real() * std::norm(T(n, j));
        return s;
    };
    double worst = 0.0;
    for (int j = 0; j < pL; ++j) {
        const double in = aL(j).real();
        worst = std::max(worst, std::abs(in - outgoing(S.Rplus, aL, pL, S.Tplus, aR, pR, j)) / in);
    }
    for (int j = 0; j < pR; ++j) {
        const double in = aR(j).real();
        worst = std::max(worst, std::abs(in - outgoing(S.Rminus, aR, pR, S.Tminus, aL, pL, j)) / in);
    }
    return worst;
}

double max_difference(const ScatteringSet& A, const ScatteringSet& B)
{
    if (A.N != B.N) throw InvalidArgument("max_difference: truncation orders differ");
    return std::max({(A.Tplus - B.Tplus).cwiseAbs().maxCoeff(), (A.Rplus - B.Rplus).cwiseAbs().maxCoeff(),
                     (A.Rminus - B.Rminus).cwiseAbs().maxCoeff(), (A.Tminus - B.Tminus).cwiseAbs().maxCoeff()});
}

} // namespace qtube
