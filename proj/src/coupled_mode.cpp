#include "qtube/coupled_mode.hpp"

#include <cmath>
#include <numbers>

#include "qtube/errors.hpp"

namespace qtube {

using std::numbers::pi;

SplitterConfig::SplitterConfig(double scale_, double center_) : scale(scale_), center(center_)
{
    if (!(scale > 0.0) || !std::isfinite(center)) throw InvalidArgument("SplitterConfig: scale must be positive");
}

SplitterConfig SplitterConfig::for_profile(const ProfileSource& profile)
{
    const auto [lo, hi] = profile.core();
    return SplitterConfig(0.5 * profile.width(), 0.5 * (lo + hi));
}

double SplitterConfig::f(double u) const
{
    return 0.5 * (1.0 + std::tanh((u - center) / scale));
}

double SplitterConfig::df(double u) const
{
    const double c = std::cosh((u - center) / scale);
    return 0.5 / (scale * c * c);
}

std::pair<double, double> SplitterConfig::tails(double threshold) const
{
    // 1 - f(u) = 1 / (1 + exp(2 s)) < exp(-2 s)
    const double reach = 0.5 * scale * std::log(1.0 / threshold);
    return {center - reach, center + reach};
}

Eigen::MatrixXd assemble_B2(const Eigen::Ref<const Eigen::VectorXd>& mu, double a, double k2, int N)
{
    if (N < 1) throw InvalidArgument("assemble_B2: N must be positive");
    if (mu.size() < 2 * N + 1) throw InvalidArgument("assemble_B2: need cosine coefficients up to 2N");
    // 2/a int sin(n) mu sin(m) = mu_{|n-m|} (1 + [n == m]) / 2 ... - mu_{n+m} / 2, with mu_0 counted once
    Eigen::MatrixXd B(N, N);
    for (int n = 1; n <= N; ++n)
        for (int m = 1; m <= N; ++m) {
            const int d = std::abs(n - m);
            const double diff = (d == 0) ? 2.0 * mu(0) : mu(d);
            B(n - 1, m - 1) = 0.5 * k2 * (diff - mu(n + m));
        }
    for (int n = 1; n <= N; ++n) B(n - 1, n - 1) -= n * n * pi * pi / (a * a);
    return B;
}

Eigen::MatrixXd assemble_B2(const ProfileSource& profile, double u, double k2, int N)
{
    if (profile.order() < 2 * N) throw InvalidArgument("assemble_B2: profile order below 2N");
    return assemble_B2(profile.coefficients(u), profile.width(), k2, N);
}

SplitterDiagonals::SplitterDiagonals(double k2, int N, double mu_minus, double mu_plus, double a)
{
    const DispersionSpec left(k2, mu_minus, a);
    const DispersionSpec right(k2, mu_plus, a);
    for (const auto* s : {&left, &right}) {
        const auto cut = cutoff_modes(N, *s);
        if (!cut.empty()) throw CutoffError("energy sits on a transverse cutoff", cut.front());
    }
    minus = axial_wavenumbers(N, left);
    plus = axial_wavenumbers(N, right);
}

Eigen::VectorXcd splitter_C(const SplitterConfig& cfg, double u, const SplitterDiagonals& B)
{
    const Eigen::VectorXcd C = B.minus + cfg.f(u) * (B.plus - B.minus);
    for (Eigen::Index i = 0; i < C.size(); ++i)
        if (C(i) == 0.0) throw CutoffError("splitting operator is singular", static_cast<int>(i) + 1);
    return C;
}

Eigen::VectorXcd d_Cinv_du(const SplitterConfig& cfg, double u, const SplitterDiagonals& B)
{
    const Eigen::VectorXcd C = splitter_C(cfg, u, B);
    return -(cfg.df(u) * (B.plus - B.minus)).cwiseQuotient(C.cwiseProduct(C));
}

SplitBlocks split_blocks(const Eigen::Ref<const Eigen::MatrixXcd>& B2, const Eigen::VectorXcd& C,
                         const Eigen::VectorXcd& dCinv)
{
    const auto N = C.size();
    if (B2.rows() != N || B2.cols() != N || dCinv.size() != N)
        throw InvalidArgument("split_blocks: dimension mismatch");
    const cplx I(0.0, 1.0);
    for (Eigen::Index i = 0; i < N; ++i)
        if (C(i) == 0.0) throw CutoffError("splitting operator is singular", static_cast<int>(i) + 1);
    // P = i C^{-1} B2, D = (C^{-1})' C
    OperatorMatrix P = I * C.cwiseInverse().asDiagonal() * B2;
    const Eigen::VectorXcd D = dCinv.cwiseProduct(C);
    SplitBlocks s;
    s.alpha = 0.5 * P;
    s.beta = 0.5 * P;
    s.gamma = -0.5 * P;
    s.delta = -0.5 * P;
    s.alpha.diagonal() += 0.5 * (D + I * C);
    s.beta.diagonal() -= 0.5 * (D + I * C);
    s.gamma.diagonal() += 0.5 * (I * C - D);
    s.delta.diagonal() += 0.5 * (D - I * C);
    return s;
}

} // namespace qtube
