#ifndef QTUBE_IMBEDDING_SOLVER_HPP
#define QTUBE_IMBEDDING_SOLVER_HPP

#include <optional>

#include "qtube/coupled_mode.hpp"
#include "qtube/scattering_set.hpp"

namespace qtube {

struct SolveOptions {
    double rtol = 1e-9;
    double atol = 1e-12;
    double max_step = 0.0;         ///< 0: a / 4
    double flat_threshold = 1e-8;  ///< splitter tails beyond the interval ends
    double bound = 1e3;            ///< ||R||_2 above this aborts the sweep
    long max_steps = 2000000;
};

struct SolveReport {
    long steps_plus = 0;   ///< accepted steps of the leftward sweep
    long steps_minus = 0;  ///< accepted steps of the rightward sweep
    double max_norm = 0.0; ///< largest ||R||_F seen
};

/// Integrates the Riccati equations over [u1, u2] covering the profile core and the
/// splitter transition. The result is referenced to the planes u1, u2.
ScatteringSet integrate_scattering(const ProfileSource& profile, const SplitterConfig& splitter, double k2, int N,
                                   const SolveOptions& opts = {}, SolveReport* report = nullptr);

/// Same, on a prescribed interval (must contain the splitter transition to flat_threshold).
ScatteringSet integrate_scattering(const ProfileSource& profile, const SplitterConfig& splitter, double k2, int N,
                                   double u1, double u2, const SolveOptions& opts = {},
                                   SolveReport* report = nullptr);

/// Interval used by integrate_scattering.
std::pair<double, double> imbedding_interval(const ProfileSource& profile, const SplitterConfig& splitter,
                                             double flat_threshold);

struct GrowthReport {
    int mode = 0;             ///< designated evanescent mode (0: none)
    double decay = 0.0;       ///< |alpha_mode|
    double length = 0.0;
    double measured = 1.0;    ///< |psi_mode(-L)| / |psi_mode(0)|
    double predicted = 1.0;   ///< exp(|alpha_mode| L)
};

/// Marches psi' = i B0 psi from x = 0 to x = -L (straight duct, mu = 1, width a)
/// and reports the amplification of the highest evanescent mode among 1..N.
GrowthReport illposedness_demo(int N, double k2, double L, double a = 1.0);

} // namespace qtube

#endif
