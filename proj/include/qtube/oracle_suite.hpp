#ifndef QTUBE_ORACLE_SUITE_HPP
#define QTUBE_ORACLE_SUITE_HPP

#include <string>
#include <vector>

#include "qtube/refractive_profile.hpp"
#include "qtube/scattering_set.hpp"

namespace qtube {

struct OracleResult {
    ScatteringSet S;
    std::string method;
    int grid_points = 0;  ///< finite-difference nodes (finest grid)
    int modes_left = 0;   ///< matching truncation on each side
    int modes_right = 0;
};

/// Transverse mode matching at a sharp narrowing step, width a -> b at x = 0,
/// lower walls aligned. Both reference planes are at x = 0; amplitudes use the
/// strip convention (width a, mu_right = (b/a)^2). N modes on the wide side and
/// round(N b / a) on the narrow side; the returned set is the leading block.
OracleResult mode_match_step(double a, double b, double k2, int N);

struct BvpOptions {
    int points = 0;            ///< nodes of the coarse grid (0: 300 per shortest wavelength, at least 2000)
    bool richardson = true;    ///< combine grids h and h/2
};

/// Finite-difference solve of phi'' + B2(u) phi = 0 on [u1, u2] with modal radiation
/// conditions at both ends. The profile must be flat outside [u1, u2].
OracleResult direct_bvp_solve(const ProfileSource& profile, double k2, int N, double u1, double u2,
                              const BvpOptions& opts = {});

} // namespace qtube

#endif
