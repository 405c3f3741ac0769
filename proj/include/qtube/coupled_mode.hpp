#ifndef QTUBE_COUPLED_MODE_HPP
#define QTUBE_COUPLED_MODE_HPP

#include <Eigen/Dense>

#include "qtube/modal_basis.hpp"
#include "qtube/refractive_profile.hpp"

namespace qtube {

/// Truncated operator in the sine basis, N x N.
using OperatorMatrix = Eigen::MatrixXcd;

/// Transition f(u) = (1 + tanh((u - center) / scale)) / 2 of the splitting operator.
struct SplitterConfig {
    double scale = 0.5;
    double center = 0.0;

    SplitterConfig() = default;
    SplitterConfig(double scale_, double center_);

    /// scale = a / 2, center at the middle of the profile core.
    static SplitterConfig for_profile(const ProfileSource& profile);

    double f(double u) const;
    double df(double u) const;
    /// Smallest interval outside of which min(f, 1 - f) < threshold.
    std::pair<double, double> tails(double threshold) const;
};

/// Projection of d_v^2 + k2 mu(u, .) onto sin(n pi v / a), n = 1..N, from cosine coefficients mu_l, l = 0..2N.
Eigen::MatrixXd assemble_B2(const Eigen::Ref<const Eigen::VectorXd>& mu, double a, double k2, int N);
Eigen::MatrixXd assemble_B2(const ProfileSource& profile, double u, double k2, int N);

/// The constant operators B_- and B_+ as diagonals.
struct SplitterDiagonals {
    Eigen::VectorXcd minus;
    Eigen::VectorXcd plus;

    /// Throws CutoffError when an axial wavenumber vanishes on either side.
    SplitterDiagonals(double k2, int N, double mu_minus, double mu_plus, double a);
};

/// Diagonal of C(u) = B_- + f(u) (B_+ - B_-).
Eigen::VectorXcd splitter_C(const SplitterConfig& cfg, double u, const SplitterDiagonals& B);
/// Diagonal of d C^{-1} / du.
Eigen::VectorXcd d_Cinv_du(const SplitterConfig& cfg, double u, const SplitterDiagonals& B);

struct SplitBlocks {
    OperatorMatrix alpha, beta, gamma, delta;
};

/// Blocks of the split system (phi+, phi-)' = [[alpha, beta], [gamma, delta]] (phi+, phi-)
/// for C and d C^{-1}/du given as diagonals.
SplitBlocks split_blocks(const Eigen::Ref<const Eigen::MatrixXcd>& B2, const Eigen::VectorXcd& C,
                         const Eigen::VectorXcd& dCinv);

} // namespace qtube

#endif
