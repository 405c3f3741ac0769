#ifndef QTUBE_SCATTERING_SET_HPP
#define QTUBE_SCATTERING_SET_HPP

#include <Eigen/Dense>

#include "qtube/coupled_mode.hpp"

namespace qtube {

/// Reflection and transmission operators between two reference planes u1 < u2.
///
/// Tplus  : right-going amplitudes at u1 -> right-going at u2
/// Rplus  : right-going at u1 -> left-going at u1
/// Rminus : left-going at u2 -> right-going at u2
/// Tminus : left-going at u2 -> left-going at u1
///
/// Amplitudes are sine-mode coefficients with the phase referred to the plane.
struct ScatteringSet {
    OperatorMatrix Tplus, Rplus, Rminus, Tminus;
    double k2 = 0.0;
    int N = 0;
    double mu_left = 1.0;
    double mu_right = 1.0;
    double u1 = 0.0;
    double u2 = 0.0;
    double width_a = 1.0;

    /// Zero-length segment: T = I, R = 0.
    static ScatteringSet identity(int N, double k2, double mu, double a, double u = 0.0);
    /// Straight segment of length L: diagonal phases, R = 0.
    static ScatteringSet flat(int N, double k2, double mu, double a, double L, double u1 = 0.0);

    Eigen::VectorXcd alpha_left() const;
    Eigen::VectorXcd alpha_right() const;
    int propagating_left() const;
    int propagating_right() const;
};

/// Moves the left plane by extra_left outwards and the right plane by extra_right.
/// Negative lengths move the planes inwards.
ScatteringSet flat_propagate(const ScatteringSet& S, double extra_left, double extra_right);

/// max over propagating incident columns (both sides) of |incident flux - outgoing flux| / incident flux.
double flux_residual(const ScatteringSet& S);

/// Largest entrywise modulus of the difference of all four operators.
double max_difference(const ScatteringSet& A, const ScatteringSet& B);

} // namespace qtube

#endif
