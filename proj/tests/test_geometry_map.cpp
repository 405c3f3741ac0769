#include <doctest.h>

#include <algorithm>
#include <vector>

#include "oracles.hpp"
#include "qtube/duct_geometry.hpp"
#include "qtube/errors.hpp"
#include "qtube/strip_map.hpp"

using namespace qtube;

namespace {

double distance_to_wall(const std::vector<cplx>& pts, cplx z)
{
    double best = 1e300;
    for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
        const cplx d = pts[i + 1] - pts[i];
        const double t = std::clamp(std::real((z - pts[i]) * std::conj(d)) / std::norm(d), 0.0, 1.0);
        best = std::min(best, std::abs(z - (pts[i] + t * d)));
    }
    // walls extend to infinity along their end segments
    const cplx l = pts.front(), r = pts.back();
    if (z.real() < l.real()) best = std::min(best, std::abs(z.imag() - l.imag()));
    if (z.real() > r.real()) best = std::min(best, std::abs(z.imag() - r.imag()));
    return best;
}

} // namespace

TEST_CASE("geometry parsing and validation")
{
    const DuctGeometry g = parse_geometry(R"({"lower": [[-2,0],[2,0]], "upper": [[-2,1],[0,1],[0,0.6],[2,0.6]]})");
    CHECK(g.width_left() == 1.0);
    CHECK(g.width_right() == doctest::Approx(0.6));
    CHECK(g.corners().size() == 2);
    const DuctGeometry back = parse_geometry(geometry_to_json(g));
    CHECK(back.points(Wall::upper) == g.points(Wall::upper));

    CHECK_THROWS_AS(parse_geometry("{"), GeometryError);
    CHECK_THROWS_AS(parse_geometry(R"({"lower": [[0,0],[1,0]]})"), GeometryError);
    CHECK_THROWS_AS(parse_geometry(R"({"lower": [[0,0],[2,0]], "upper": [[0,1],[1,1],[1,-0.5],[2,-0.5]]})"),
                    GeometryError);
    CHECK_THROWS_AS(parse_geometry(R"({"lower": [[0,0],[1,0]], "upper": [[0,1],[1,1]], "width_left": 2})"),
                    GeometryError);
    CHECK_THROWS_AS(round_corners(g, 5.0), GeometryError);
    CHECK_THROWS_AS(DuctGeometry({{0, 0}, {1, 0}, {1, 3}, {2, 3}}, {{0, 2}, {2, 2}}), GeometryError);
}

TEST_CASE("horizontal sections")
{
    const DuctGeometry g = round_corners(DuctGeometry::step(1.0, 0.6), 0.05);
    double y = 0.0;
    CHECK(g.horizontal_at(Wall::upper, -1.0, &y));
    CHECK(y == 1.0);
    CHECK(g.horizontal_at(Wall::upper, 1.0, &y));
    CHECK(y == doctest::Approx(0.6));
    CHECK_FALSE(g.horizontal_at(Wall::upper, 0.0));
    CHECK_FALSE(g.horizontal_at(Wall::upper, 0.03));
}

TEST_CASE("identity map")
{
    const StripMap m = StripMap::identity(2.0, -1.0);
    CHECK(m.is_identity());
    CHECK(std::abs(m.map(cplx(0.3, 0.4)) - cplx(0.3, -0.6)) < 1e-15);
    CHECK(m.mu(1.0, 0.5) == 1.0);
}

TEST_CASE("sharp step map")
{
    for (double b : {0.6, 0.3}) {
        const DuctGeometry g = DuctGeometry::step(1.0, b);
        const StripMap m = solve_strip_map(g);
        CHECK(m.residual() < 1e-10);
        CHECK(m.scale() == doctest::Approx(b).epsilon(1e-12));
        REQUIRE(m.prevertices().size() == 2);
        const double gap = std::abs(m.prevertices()[0].x - m.prevertices()[1].x);
        CHECK(std::abs(gap - oracle::step_gap(1.0, b)) < 1e-9);

        for (double u : {-3.0, -0.4, 0.1, 0.9, 3.0}) {
            CHECK(std::abs(m.map(cplx(u, 0.0)).imag()) < 1e-9);
            CHECK(distance_to_wall(g.points(Wall::upper), m.map(cplx(u, 1.0))) < 1e-9);
        }
        const cplx w(0.2, 0.37);
        const double h = 1e-5;
        const cplx fd = (m.map(w + h) - m.map(w - h)) / (2 * h);
        const cplx fdv = (m.map(w + cplx(0, h)) - m.map(w - cplx(0, h))) / cplx(0, 2 * h);
        CHECK(std::abs(fd - m.derivative(w)) < 1e-7);
        CHECK(std::abs(fdv - m.derivative(w)) < 1e-7);
        CHECK(m.mu(0.2, 0.37) == doctest::Approx(std::norm(m.derivative(w))).epsilon(1e-12));
        CHECK(m.decay_rate() == doctest::Approx(oracle::pi).epsilon(0.05));
    }
}

TEST_CASE("rounded corners keep the walls")
{
    const DuctGeometry g = round_corners(DuctGeometry::step(1.0, 0.6), 0.05);
    const StripMap m = solve_strip_map(g);
    CHECK(m.residual() < 1e-10);
    const auto [lo, hi] = m.prevertex_range();
    for (int i = 0; i <= 20; ++i) {
        const double u = lo - 1.0 + (hi - lo + 2.0) * i / 20.0;
        CHECK(std::abs(m.map(cplx(u, 0.0)).imag()) < 1e-8);
        const cplx z = m.map(cplx(u, 1.0));
        CHECK(z.imag() <= 1.0 + 1e-8);
        CHECK(z.imag() >= 0.6 - 1e-8);
    }
    CHECK(m.mu(-40.0, 0.5) == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(m.mu(40.0, 0.5) == doctest::Approx(0.36).epsilon(1e-10));
}

TEST_CASE("rounded right-angle corners keep the derivative bounded")
{
    std::vector<double> lows, highs;
    for (double eps : {0.05, 0.02}) {
        const StripMap m = solve_strip_map(round_corners(DuctGeometry::step(1.0, 0.6), eps));
        const auto [lo, hi] = m.prevertex_range();
        double mn = 1e300, mx = 0.0;
        for (int i = 0; i <= 4000; ++i) {
            const double u = lo - 1.0 + (hi - lo + 2.0) * i / 4000.0;
            for (double v : {0.0, 1.0}) {
                const double d = std::abs(m.derivative(cplx(u, v)));
                mn = std::min(mn, d);
                mx = std::max(mx, d);
            }
        }
        CHECK(mn > 0.0);
        CHECK(std::isfinite(mx));
        lows.push_back(mn);
        highs.push_back(mx);
    }
    CHECK(lows[1] < lows[0]);
    CHECK(highs[1] > highs[0]);
}
