#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "qtube/errors.hpp"
#include "qtube/imbedding_solver.hpp"
#include "qtube/oracle_suite.hpp"
#include "qtube/pipeline.hpp"

using namespace qtube;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

const std::string data_dir = QTUBE_DATA;

int failures = 0;

void report(int id, bool ok, const std::string& what, const std::string& detail)
{
    std::printf("%s criterion %d: %s (%s)\n", ok ? "PASS" : "FAIL", id, what.c_str(), detail.c_str());
    std::fflush(stdout);
    if (!ok) ++failures;
}

std::string fmt(const char* f, double x)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, f, x);
    return buf;
}

// 50 energies between lo and hi kept at least `gap` away from every cutoff of the given widths
std::vector<double> sweep(double lo, double hi, const std::vector<double>& widths, double gap = 0.1)
{
    std::vector<double> k2;
    for (int i = 0; i < 50; ++i) {
        double k = lo + (hi - lo) * i / 49.0;
        for (int pass = 0; pass < 4; ++pass)
            for (double w : widths)
                for (int n = 1; n <= 8; ++n) {
                    const double c = std::pow(n * oracle::pi / w, 2);
                    if (std::abs(k - c) < gap) k = c + (k < c ? -gap : gap);
                }
        k2.push_back(k);
    }
    return k2;
}

void flux_conservation()
{
    struct Case {
        const char* name;
        const char* file;
    };
    bool ok = true;
    std::string detail;
    for (const Case& c : {Case{"uniform", "uniform.json"}, Case{"step", "step.json"},
                          Case{"s-bend", "sbend_short.json"}}) {
        const auto t0 = Clock::now();
        const DuctGeometry g = load_geometry(data_dir + "/" + c.file);
        const TubeModel model(g, 16);
        const std::vector<double> k2 = sweep(10.5, 38.5, {g.width_left(), g.width_right()});
        double worst = 0.0;
        int failed = 0;
        for (int N : {1, 2, 4, 8})
            for (double k : k2) {
                try {
                    worst = std::max(worst, flux_residual(model.solve(k, N).S));
                } catch (const Error&) {
                    ++failed;
                }
            }
        ok = ok && failed == 0 && worst < 1e-6;
        detail += std::string(detail.empty() ? "" : "; ") + c.name + " max " + fmt("%.2e", worst) + ", " +
                  std::to_string(failed) + " failed, " + fmt("%.1f s", seconds_since(t0));
    }
    report(1, ok, "flux residual < 1e-6 over 50 energies, N = 1, 2, 4, 8", detail);
}

void flat_exactness()
{
    const TubeModel model(load_geometry(data_dir + "/uniform.json"), 16);
    double worst_r = 0.0, worst_t = 0.0;
    for (double k2 : {12.0, 25.0, 45.0, 95.0}) {
        const int N = 8;
        const PlacedScattering P = model.solve(k2, N);
        const double len = P.x_right - P.x_left;
        worst_r = std::max({worst_r, P.S.Rplus.cwiseAbs().maxCoeff(), P.S.Rminus.cwiseAbs().maxCoeff()});
        for (int n = 1; n <= N; ++n) {
            const cplx alpha = oracle::wavenumber(n, k2, 1.0, 1.0);
            const double want = alpha.imag() > 0.0 ? std::exp(-alpha.imag() * len) : 1.0;
            worst_t = std::max({worst_t, std::abs(std::abs(P.S.Tplus(n - 1, n - 1)) - want),
                                std::abs(std::abs(P.S.Tminus(n - 1, n - 1)) - want)});
        }
    }
    report(2, worst_r < 1e-10 && worst_t < 1e-8, "uniform duct: |R| < 1e-10, |T_nn| exact to 1e-8",
           "max |R| " + fmt("%.2e", worst_r) + ", max |T_nn| error " + fmt("%.2e", worst_t));
}

void oracle_equivalence()
{
    const auto t0 = Clock::now();
    const FunctionProfile bump = bump_profile(0.2, 1.0, 0.8, 1.0, 16);
    const SplitterConfig s = SplitterConfig::for_profile(bump);
    double worst = 0.0;
    for (double k2 : {20.0, 45.0})
        for (int N : {1, 2, 4, 8}) {
            const ScatteringSet S = integrate_scattering(bump, s, k2, N);
            const OracleResult ref = direct_bvp_solve(bump, k2, N, S.u1, S.u2);
            worst = std::max(worst, max_difference(S, ref.S));
        }
    const double t = seconds_since(t0);
    report(3, worst < 1e-6 && t < 60.0, "imbedding vs finite differences on a smooth bump, N <= 8",
           "max entry difference " + fmt("%.2e", worst) + ", " + fmt("%.1f s", t));
}

void step_physics()
{
    const std::vector<double> eps = {0.05, 0.02, 0.01};
    const std::vector<double> energies = {30.0, 33.0, 36.0};
    std::vector<std::vector<double>> t2(energies.size());
    for (double e : eps) {
        const TubeModel model(round_corners(DuctGeometry::step(1.0, 0.6), e), 16);
        for (std::size_t i = 0; i < energies.size(); ++i)
            t2[i].push_back(std::norm(transmission_amplitude(model.solve(energies[i], 8).S, 1, 1)));
    }
    bool ok = true;
    std::string detail;
    for (std::size_t i = 0; i < energies.size(); ++i) {
        double sx = 0, sy = 0, sxx = 0, sxy = 0;
        for (std::size_t j = 0; j < eps.size(); ++j) {
            sx += eps[j];
            sy += t2[i][j];
            sxx += eps[j] * eps[j];
            sxy += eps[j] * t2[i][j];
        }
        const double n = static_cast<double>(eps.size());
        const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
        const double limit = (sy - slope * sx) / n;
        const double ref = std::norm(transmission_amplitude(mode_match_step(1.0, 0.6, energies[i], 48).S, 1, 1));
        const double rel = std::abs(limit - ref) / ref;
        ok = ok && rel < 0.01;
        detail += std::string(detail.empty() ? "" : "; ") + "k2 " + fmt("%g", energies[i]) + ": " +
                  fmt("%.6f", limit) + " vs " + fmt("%.6f", ref) + " (" + fmt("%.2e", rel) + ")";
    }
    report(4, ok, "rounded-step |T11|^2 extrapolated to sharp corners matches mode matching within 1%", detail);
}

void truncation_convergence()
{
    const TubeModel model(DuctGeometry::step(1.0, 0.6), 32);
    bool ok = true;
    std::string detail;
    for (double k2 : {30.0, 33.0, 36.0}) {
        std::vector<double> t;
        for (int N : {2, 4, 8, 16}) t.push_back(std::abs(transmission_amplitude(model.solve(k2, N).S, 1, 1)));
        std::vector<double> d;
        for (std::size_t i = 1; i < t.size(); ++i) d.push_back(std::abs(t[i] - t[i - 1]));
        const bool mono = d[1] < d[0] && d[2] < d[1];
        ok = ok && mono && d.back() < 1e-4;
        detail += std::string(detail.empty() ? "" : "; ") + "k2 " + fmt("%g", k2) + ": " + fmt("%.1e", d[0]) + " " +
                  fmt("%.1e", d[1]) + " " + fmt("%.1e", d[2]);
    }
    report(5, ok, "step |T11| differences shrink monotonically over N = 2, 4, 8, 16, last < 1e-4", detail);
}

void building_blocks()
{
    const DuctGeometry g = load_geometry(data_dir + "/sbend.json");
    PipelineOptions opts;
    opts.profile.flat_threshold = 1e-11;
    opts.solve.flat_threshold = 1e-11;
    opts.solve.rtol = 1e-11;
    opts.solve.atol = 1e-13;
    const int N = 4;
    const TubeModel whole(g, 2 * N, opts);
    const CascadeModel parts(partition_geometry(g, {11.0}), 2 * N, opts);
    double worst = 0.0, cond = 0.0;
    for (double k2 : {20.0, 30.0}) {
        const PlacedScattering W = whole.solve(k2, N);
        const PlacedScattering C = parts.solve(k2, N, &cond);
        const double lo = std::min(W.x_left, C.x_left), hi = std::max(W.x_right, C.x_right);
        worst = std::max(worst, max_difference(move_planes(W, lo, hi).S, move_planes(C, lo, hi).S));
    }
    report(6, worst < 1e-8, "s-bend split at a straight section and recombined matches the unsplit solve",
           "max entry difference " + fmt("%.2e", worst) + ", interface condition " + fmt("%.4f", cond));
}

void illposedness()
{
    const GrowthReport g = illposedness_demo(8, 20.0, 2.0);
    const double rel = std::abs(g.measured / g.predicted - 1.0);
    report(7, g.mode > 0 && rel < 0.1, "one-directional marching amplifies evanescent mode as exp(|alpha| L)",
           "mode " + std::to_string(g.mode) + ", measured " + fmt("%.4e", g.measured) + ", predicted " +
               fmt("%.4e", g.predicted));
}

void plateaus()
{
    bool ok = true;
    std::string detail;
    for (double b : {0.4, 0.6, 0.8}) {
        const StripMap m = solve_strip_map(DuctGeometry::step(1.0, b));
        const auto [lo, hi] = m.prevertex_range();
        double left = 0.0, right = 0.0;
        for (double v : {0.1, 0.37, 0.5, 0.83}) {
            left = std::max(left, std::abs(m.mu(lo - 10.0, v) - 1.0));
            right = std::max(right, std::abs(m.mu(hi + 10.0, v) - b * b));
        }
        ok = ok && left < 1e-6 && right < 1e-6;
        detail += std::string(detail.empty() ? "" : "; ") + "b/a " + fmt("%g", b) + ": " + fmt("%.1e", left) + ", " +
                  fmt("%.1e", right);
    }
    report(8, ok, "mu plateaus equal 1 and (b/a)^2", detail);
}

} // namespace

int main()
{
    const std::vector<std::function<void()>> criteria = {flux_conservation, flat_exactness,   oracle_equivalence,
                                                          step_physics,      truncation_convergence, building_blocks,
                                                          illposedness,      plateaus};
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        try {
            criteria[i]();
        } catch (const std::exception& e) {
            report(static_cast<int>(i + 1), false, "exception", e.what());
        }
    }
    std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failures, criteria.size());
    return failures == 0 ? 0 : 1;
}
