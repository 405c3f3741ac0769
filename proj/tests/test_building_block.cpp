#include <doctest.h>

#include <algorithm>
#include <cstdlib>

#include "oracles.hpp"
#include "qtube/building_block.hpp"
#include "qtube/errors.hpp"
#include "qtube/oracle_suite.hpp"
#include "qtube/pipeline.hpp"

using namespace qtube;

namespace {

ScatteringSet random_set(int N, double k2, unsigned seed)
{
    std::srand(seed);
    ScatteringSet S = ScatteringSet::identity(N, k2, 1.0, 1.0);
    S.Tplus = 0.6 * Eigen::MatrixXcd::Random(N, N);
    S.Rplus = 0.3 * Eigen::MatrixXcd::Random(N, N);
    S.Rminus = 0.3 * Eigen::MatrixXcd::Random(N, N);
    S.Tminus = 0.6 * Eigen::MatrixXcd::Random(N, N);
    S.u2 = 1.0;
    return S;
}

// amplitudes at the junction solved as one linear system
ScatteringSet joined(const ScatteringSet& A, const ScatteringSet& B)
{
    const int N = A.N;
    const Eigen::MatrixXcd I = Eigen::MatrixXcd::Identity(N, N);
    Eigen::MatrixXcd K(2 * N, 2 * N);
    K << I, -A.Rminus, -B.Rplus, I;
    const Eigen::FullPivLU<Eigen::MatrixXcd> lu(K);
    ScatteringSet S = A;
    Eigen::MatrixXcd rhs = Eigen::MatrixXcd::Zero(2 * N, N);
    rhs.topRows(N) = A.Tplus;
    Eigen::MatrixXcd x = lu.solve(rhs);
    S.Tplus = B.Tplus * x.topRows(N);
    S.Rplus = A.Rplus + A.Tminus * x.bottomRows(N);
    rhs.setZero();
    rhs.bottomRows(N) = B.Tminus;
    x = lu.solve(rhs);
    S.Tminus = A.Tminus * x.bottomRows(N);
    S.Rminus = B.Rminus + B.Tplus * x.topRows(N);
    return S;
}

} // namespace

TEST_CASE("star product")
{
    const int N = 3;
    const ScatteringSet A = random_set(N, 20.0, 1), B = random_set(N, 20.0, 2), C = random_set(N, 20.0, 3);
    const ScatteringSet Id = ScatteringSet::identity(N, 20.0, 1.0, 1.0);
    CHECK(max_difference(star_compose(Id, A).S, A) < 1e-15);
    CHECK(max_difference(star_compose(A, Id).S, A) < 1e-15);
    const Composition AB = star_compose(A, B);
    CHECK(max_difference(AB.S, joined(A, B)) < 1e-13);
    CHECK(AB.condition >= 1.0);
    CHECK(AB.S.u2 - AB.S.u1 == doctest::Approx(2.0));
    const ScatteringSet left = star_compose(AB.S, C).S;
    const ScatteringSet right = star_compose(A, star_compose(B, C).S).S;
    CHECK(max_difference(left, right) < 1e-13);

    const ScatteringSet F1 = ScatteringSet::flat(N, 20.0, 1.0, 1.0, 0.7);
    const ScatteringSet F2 = ScatteringSet::flat(N, 20.0, 1.0, 1.0, 1.1);
    CHECK(max_difference(star_compose(F1, F2).S, ScatteringSet::flat(N, 20.0, 1.0, 1.0, 1.8)) < 1e-14);

    CHECK_THROWS_AS(star_compose(A, random_set(2, 20.0, 4)), InvalidArgument);
    CHECK_THROWS_AS(star_compose(A, random_set(N, 21.0, 4)), InvalidArgument);
    ScatteringSet trap = Id;
    trap.Rminus = Eigen::MatrixXcd::Identity(N, N);
    ScatteringSet mirror = Id;
    mirror.Rplus = Eigen::MatrixXcd::Identity(N, N);
    CHECK_THROWS_AS(star_compose(trap, mirror), SingularSystemError);
}

TEST_CASE("partition")
{
    const DuctGeometry g = round_corners(DuctGeometry::step(1.0, 0.6), 0.05);
    const CascadePlan p = partition_geometry(g, {-0.5, 0.5});
    REQUIRE(p.parts.size() == 3);
    REQUIRE(p.interfaces.size() == 2);
    CHECK(p.interfaces[0].width() == doctest::Approx(1.0));
    CHECK(p.interfaces[1].width() == doctest::Approx(0.6));
    CHECK(p.parts[1].width_left() == doctest::Approx(1.0));
    CHECK(p.parts[1].width_right() == doctest::Approx(0.6));
    CHECK(p.parts[2].corners().empty());
    CHECK(partition_geometry(g, {}).parts.size() == 1);
    CHECK_THROWS_AS(partition_geometry(g, {0.0}), GeometryError);
    CHECK_THROWS_AS(partition_geometry(g, {0.02}), GeometryError);
    CHECK_THROWS_AS(partition_geometry(g, {0.5, 0.5}), GeometryError);
}

TEST_CASE("placed sets on a straight duct")
{
    const DuctGeometry g({{0, 0}, {4, 0}}, {{0, 1}, {4, 1}});
    const TubeModel model(g, 4);
    const PlacedScattering P = model.solve(30.0, 2);
    const double len = P.x_right - P.x_left;
    CHECK(len > 0.0);
    CHECK(max_difference(P.S, ScatteringSet::flat(2, 30.0, 1.0, 1.0, len)) < 1e-8);
    const PlacedScattering Q = move_planes(P, P.x_left - 1.0, P.x_right + 2.0);
    CHECK(max_difference(Q.S, ScatteringSet::flat(2, 30.0, 1.0, 1.0, len + 3.0)) < 1e-8);
    CHECK_THROWS(move_planes(P, P.x_left + 0.5, P.x_right));

    const CascadePlan plan = partition_geometry(g, {1.5});
    double cond = 0.0;
    const PlacedScattering C = solve_cascade(plan, 30.0, 2, {}, 2, &cond);
    CHECK(cond >= 1.0);
    const double lo = std::min(C.x_left, P.x_left), hi = std::max(C.x_right, P.x_right);
    CHECK(max_difference(move_planes(C, lo, hi).S, move_planes(P, lo, hi).S) < 1e-8);
}

TEST_CASE("flux-normalized amplitudes")
{
    const OracleResult r = mode_match_step(1.0, 0.6, 30.0, 12);
    const cplx t = transmission_amplitude(r.S, 1, 1);
    const cplx q = reflection_amplitude(r.S, 1, 1);
    CHECK(std::norm(t) + std::norm(q) == doctest::Approx(1.0).epsilon(1e-8));
    const double ratio = oracle::wavenumber(1, 30.0, 0.36, 1.0).real() / oracle::wavenumber(1, 30.0, 1.0, 1.0).real();
    CHECK(std::abs(t - r.S.Tplus(0, 0) * std::sqrt(ratio)) < 1e-14);
}

TEST_CASE("parallel_for covers every index once")
{
    std::vector<int> hits(37, 0);
    parallel_for(37, 4, [&](int i) { ++hits[static_cast<std::size_t>(i)]; });
    CHECK(std::all_of(hits.begin(), hits.end(), [](int h) { return h == 1; }));
    CHECK_THROWS_AS(parallel_for(5, 2, [](int i) {
                        if (i == 3) throw InvalidArgument("x");
                    }),
                    InvalidArgument);
}
