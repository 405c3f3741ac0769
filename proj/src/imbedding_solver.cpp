#include "qtube/imbedding_solver.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include <boost/numeric/odeint.hpp>

#include "qtube/errors.hpp"

namespace qtube {

namespace odeint = boost::numeric::odeint;

namespace {

using State = std::vector<double>;
using CMap = Eigen::Map<OperatorMatrix>;
using CCMap = Eigen::Map<const OperatorMatrix>;

struct BlockSource {
    const ProfileSource& profile;
    const SplitterConfig& splitter;
    SplitterDiagonals B;
    double k2;
    int N;
    mutable Eigen::VectorXd mu;

    SplitBlocks at(double u) const
    {
        profile.coefficients(u, mu);
        const Eigen::MatrixXcd B2 = assemble_B2(mu, profile.width(), k2, N).cast<cplx>();
        return split_blocks(B2, splitter_C(splitter, u, B), d_Cinv_du(splitter, u, B));
    }
};

CMap block(State& x, int N, int k)
{
    return CMap(reinterpret_cast<cplx*>(x.data()) + static_cast<std::ptrdiff_t>(k) * N * N, N, N);
}

CCMap block(const State& x, int N, int k)
{
    return CCMap(reinterpret_cast<const cplx*>(x.data()) + static_cast<std::ptrdiff_t>(k) * N * N, N, N);
}

// Integrates the pair (R, T) over s in [0, length] with R = 0, T = I at s = 0.
// rhs(u, R, T, dR, dT) gives derivatives with respect to s.
template <class Rhs>
std::pair<OperatorMatrix, OperatorMatrix> sweep(int N, double length, double max_step, const SolveOptions& opts,
                                                Rhs rhs, std::function<double(double)> u_of_s, long& steps,
                                                double& max_norm)
{
    State x(4 * static_cast<std::size_t>(N) * N, 0.0);
    block(x, N, 1).setIdentity();
    auto system = [&](const State& y, State& dy, double s) {
        dy.resize(y.size());
        CMap dR = block(dy, N, 0);
        CMap dT = block(dy, N, 1);
        rhs(u_of_s(s), block(y, N, 0), block(y, N, 1), dR, dT);
    };
    auto observer = [&](const State& y, double s) {
        ++steps;
        if (steps > opts.max_steps) throw ConvergenceError("imbedding: step limit exceeded", s);
        const auto R = block(y, N, 0);
        const double fro = R.norm();
        if (!std::isfinite(fro)) throw ConvergenceError("imbedding: non-finite reflection operator", s);
        max_norm = std::max(max_norm, fro);
        if (fro > opts.bound) {
            const double two = Eigen::JacobiSVD<OperatorMatrix>(R).singularValues()(0);
            if (two > opts.bound)
                throw BoundStateError("imbedding: reflection operator exceeded its bound (near a bound state)",
                                      u_of_s(s), two);
        }
    };
    if (length > 0.0) {
        auto stepper = odeint::make_controlled(opts.atol, opts.rtol, max_step, odeint::runge_kutta_dopri5<State>());
        odeint::integrate_adaptive(stepper, system, x, 0.0, length, std::min(max_step, 0.01 * length), observer);
    }
    return {block(x, N, 0), block(x, N, 1)};
}

} // namespace

std::pair<double, double> imbedding_interval(const ProfileSource& profile, const SplitterConfig& splitter,
                                             double flat_threshold)
{
    const auto [c1, c2] = profile.core();
    const auto [t1, t2] = splitter.tails(flat_threshold);
    return {std::min(c1, t1), std::max(c2, t2)};
}

ScatteringSet integrate_scattering(const ProfileSource& profile, const SplitterConfig& splitter, double k2, int N,
                                   const SolveOptions& opts, SolveReport* report)
{
    const auto [u1, u2] = imbedding_interval(profile, splitter, opts.flat_threshold);
    return integrate_scattering(profile, splitter, k2, N, u1, u2, opts, report);
}

ScatteringSet integrate_scattering(const ProfileSource& profile, const SplitterConfig& splitter, double k2, int N,
                                   double u1, double u2, const SolveOptions& opts, SolveReport* report)
{
    if (N < 1) throw InvalidArgument("integrate_scattering: N must be positive");
    if (!(u1 <= u2)) throw InvalidArgument("integrate_scattering: empty interval");
    if (!(opts.rtol > 0.0) || !(opts.atol > 0.0) || !(opts.flat_threshold > 0.0) || !(opts.bound > 0.0))
        throw InvalidArgument("integrate_scattering: tolerances must be positive");
    if (profile.order() < 2 * N) throw InvalidArgument("integrate_scattering: profile order below 2N");
    const auto [c1, c2] = profile.core();
    if (c1 < u1 || c2 > u2) throw InvalidArgument("integrate_scattering: interval does not cover the profile core");
    const auto [t1, t2] = splitter.tails(opts.flat_threshold);
    if (t1 < u1 || t2 > u2)
        throw InvalidArgument("integrate_scattering: interval does not cover the splitter transition");

    const BlockSource src{profile, splitter, SplitterDiagonals(k2, N, profile.mu_minus(), profile.mu_plus(),
                                                               profile.width()),
                          k2, N, Eigen::VectorXd(profile.order() + 1)};
    const double max_step = opts.max_step > 0.0 ? opts.max_step : 0.25 * profile.width();
    const double length = u2 - u1;
    SolveReport rep;

    // leftward: u = u2 - s, d/ds = -d/du
    auto rhs_plus = [&](double u, const CCMap& R, const CCMap& T, CMap& dR, CMap& dT) {
        const SplitBlocks b = src.at(u);
        const OperatorMatrix betaR = b.beta * R;
        dR.noalias() = -(b.gamma + b.delta * R - R * b.alpha - R * betaR);
        dT.noalias() = T * b.alpha + T * betaR;
    };
    auto [Rp, Tp] = sweep(N, length, max_step, opts, rhs_plus, [u2](double s) { return u2 - s; }, rep.steps_plus,
                          rep.max_norm);

    // rightward: u = u1 + s
    auto rhs_minus = [&](double u, const CCMap& R, const CCMap& T, CMap& dR, CMap& dT) {
        const SplitBlocks b = src.at(u);
        const OperatorMatrix gammaR = b.gamma * R;
        dR.noalias() = b.beta + b.alpha * R - R * b.delta - R * gammaR;
        dT.noalias() = -(T * b.delta + T * gammaR);
    };
    auto [Rm, Tm] = sweep(N, length, max_step, opts, rhs_minus, [u1](double s) { return u1 + s; },
                          rep.steps_minus, rep.max_norm);

    if (report) *report = rep;
    ScatteringSet S;
    S.Tplus = std::move(Tp);
    S.Rplus = std::move(Rp);
    S.Rminus = std::move(Rm);
    S.Tminus = std::move(Tm);
    S.k2 = k2;
    S.N = N;
    S.mu_left = profile.mu_minus();
    S.mu_right = profile.mu_plus();
    S.u1 = u1;
    S.u2 = u2;
    S.width_a = profile.width();
    return S;
}

GrowthReport illposedness_demo(int N, double k2, double L, double a)
{
    if (N < 1 || !(L >= 0.0)) throw InvalidArgument("illposedness_demo: bad arguments");
    const DispersionSpec spec(k2, 1.0, a);
    GrowthReport r;
    r.length = L;
    for (int n = N; n >= 1; --n)
        if (radicand(n, spec) < 0.0) {
            r.mode = n;
            break;
        }
    if (r.mode == 0) return r;
    const Eigen::VectorXcd alpha = axial_wavenumbers(N, spec);
    r.decay = std::abs(alpha(r.mode - 1));
    r.predicted = std::exp(r.decay * L);

    // psi' = i B0 psi in x; with x = -s the march runs towards negative x
    State x(2 * static_cast<std::size_t>(N), 0.0);
    for (int n = 0; n < N; ++n) x[2 * n] = 1.0;
    auto system = [&](const State& y, State& dy, double) {
        dy.resize(y.size());
        for (int n = 0; n < N; ++n) {
            const cplx psi(y[2 * n], y[2 * n + 1]);
            const cplx d = -cplx(0.0, 1.0) * alpha(n) * psi;
            dy[2 * n] = d.real();
            dy[2 * n + 1] = d.imag();
        }
    };
    if (L > 0.0) {
        auto stepper = odeint::make_controlled(1e-12, 1e-10, odeint::runge_kutta_dopri5<State>());
        odeint::integrate_adaptive(stepper, system, x, 0.0, L, 1e-3 * L);
    }
    const int k = r.mode - 1;
    r.measured = std::hypot(x[2 * k], x[2 * k + 1]);
    return r;
}

} // namespace qtube
