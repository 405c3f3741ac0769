#include "qtube/building_block.hpp"

#include <algorithm>
#include <cmath>

#include "qtube/errors.hpp"

namespace qtube {

Composition star_compose(const ScatteringSet& A, const ScatteringSet& B)
{
    if (A.N != B.N) throw InvalidArgument("star_compose: truncation orders differ");
    if (A.k2 != B.k2) throw InvalidArgument("star_compose: energies differ");
    // B's strip of width a_B becomes width a_A: mu scales by (a_B / a_A)^2
    const double s2 = (B.width_a / A.width_a) * (B.width_a / A.width_a);
    const double mu_join = B.mu_left * s2;
    if (std::abs(mu_join - A.mu_right) > 1e-9 * std::max(1.0, A.mu_right))
        throw InvalidArgument("star_compose: interface widths do not match");

    const int N = A.N;
    const Eigen::MatrixXcd Id = Eigen::MatrixXcd::Identity(N, N);
    const Eigen::MatrixXcd M1 = Id - A.Rminus * B.Rplus;
    const Eigen::MatrixXcd M2 = Id - B.Rplus * A.Rminus;
    const Eigen::PartialPivLU<Eigen::MatrixXcd> lu1(M1);
    const Eigen::PartialPivLU<Eigen::MatrixXcd> lu2(M2);
    const double rc = std::min(lu1.rcond(), lu2.rcond());
    if (!(rc > 1e-14)) throw SingularSystemError("star_compose: interface matrix is singular (trapped mode)");

    Composition out;
    out.condition = 1.0 / rc;
    ScatteringSet& S = out.S;
    S.N = N;
    S.k2 = A.k2;
    S.width_a = A.width_a;
    S.mu_left = A.mu_left;
    S.mu_right = B.mu_right * s2;
    S.u1 = A.u1;
    S.u2 = A.u2 + (B.u2 - B.u1) * A.width_a / B.width_a;
    const Eigen::MatrixXcd X = lu1.solve(A.Tplus);  // (I - R-_A R+_B)^-1 T+_A
    const Eigen::MatrixXcd Y = lu2.solve(B.Tminus); // (I - R+_B R-_A)^-1 T-_B
    S.Tplus = B.Tplus * X;
    S.Rplus = A.Rplus + A.Tminus * B.Rplus * X;
    S.Tminus = A.Tminus * Y;
    S.Rminus = B.Rminus + B.Tplus * A.Rminus * Y;
    return out;
}

namespace {

// Restricts a wall polyline to one side of x, adding the cut point itself.
std::vector<cplx> clip(const std::vector<cplx>& pts, double y_at_cut, double x, bool keep_left)
{
    std::vector<cplx> out;
    for (const cplx& p : pts)
        if (keep_left ? p.real() < x : p.real() > x) out.push_back(p);
    if (keep_left)
        out.push_back(cplx(x, y_at_cut));
    else
        out.insert(out.begin(), cplx(x, y_at_cut));
    return out;
}

std::vector<double> clip_rounding(const std::vector<cplx>& pts, const std::vector<double>& r, double x,
                                  bool keep_left)
{
    std::vector<double> out;
    for (std::size_t i = 0; i < pts.size(); ++i)
        if (keep_left ? pts[i].real() < x : pts[i].real() > x) out.push_back(r.empty() ? 0.0 : r[i]);
    if (keep_left)
        out.push_back(0.0);
    else
        out.insert(out.begin(), 0.0);
    return out;
}

} // namespace

CascadePlan partition_geometry(const DuctGeometry& geom, std::vector<double> cuts)
{
    std::sort(cuts.begin(), cuts.end());
    if (std::adjacent_find(cuts.begin(), cuts.end()) != cuts.end())
        throw GeometryError("partition_geometry: repeated cut point");
    CascadePlan plan;
    DuctGeometry rest = geom;
    for (double x : cuts) {
        Interface itf;
        itf.x = x;
        if (!rest.horizontal_at(Wall::lower, x, &itf.y_lower) || !rest.horizontal_at(Wall::upper, x, &itf.y_upper))
            throw GeometryError("partition_geometry: cut is not in a straight section of the duct");
        const auto& lo = rest.points(Wall::lower);
        const auto& up = rest.points(Wall::upper);
        const auto& rlo = rest.rounding(Wall::lower);
        const auto& rup = rest.rounding(Wall::upper);
        DuctGeometry left(clip(lo, itf.y_lower, x, true), clip(up, itf.y_upper, x, true),
                          clip_rounding(lo, rlo, x, true), clip_rounding(up, rup, x, true));
        DuctGeometry right(clip(lo, itf.y_lower, x, false), clip(up, itf.y_upper, x, false),
                           clip_rounding(lo, rlo, x, false), clip_rounding(up, rup, x, false));
        plan.parts.push_back(std::move(left));
        plan.interfaces.push_back(itf);
        rest = std::move(right);
    }
    plan.parts.push_back(std::move(rest));
    return plan;
}

} // namespace qtube
