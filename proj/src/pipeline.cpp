#include "qtube/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <thread>

#include "qtube/errors.hpp"

namespace qtube {

PlacedScattering move_planes(const PlacedScattering& P, double x_left, double x_right)
{
    if (x_left > P.x_left + 1e-12 * (1.0 + std::abs(P.x_left)) ||
        x_right < P.x_right - 1e-12 * (1.0 + std::abs(P.x_right)))
        throw InvalidArgument("move_planes: planes may only move outwards");
    // strip units: u = x on the left, (x - x0) / K on the right, K = width_right / width_left
    const double K = P.width_right / P.S.width_a;
    const double Kl = P.width_left / P.S.width_a;
    PlacedScattering out = P;
    out.S = flat_propagate(P.S, (P.x_left - x_left) / Kl, (x_right - P.x_right) / K);
    out.x_left = x_left;
    out.x_right = x_right;
    return out;
}

PlacedScattering compose(const PlacedScattering& A, const PlacedScattering& B, double* condition)
{
    if (std::abs(A.x_right - B.x_left) > 1e-9 * (1.0 + std::abs(A.x_right)))
        throw InvalidArgument("compose: reference planes do not coincide");
    if (std::abs(A.width_right - B.width_left) > 1e-9 * (1.0 + A.width_right))
        throw InvalidArgument("compose: interface widths differ");
    const Composition c = star_compose(A.S, B.S);
    if (condition) *condition = c.condition;
    PlacedScattering out;
    out.S = c.S;
    out.x_left = A.x_left;
    out.x_right = B.x_right;
    out.width_left = A.width_left;
    out.width_right = B.width_right;
    out.report.steps_plus = A.report.steps_plus + B.report.steps_plus;
    out.report.steps_minus = A.report.steps_minus + B.report.steps_minus;
    out.report.max_norm = std::max(A.report.max_norm, B.report.max_norm);
    return out;
}

cplx transmission_amplitude(const ScatteringSet& S, int n, int m)
{
    const cplx an = S.alpha_right()(n - 1);
    const cplx am = S.alpha_left()(m - 1);
    return S.Tplus(n - 1, m - 1) * std::sqrt(an.real() / am.real());
}

cplx reflection_amplitude(const ScatteringSet& S, int n, int m)
{
    const cplx an = S.alpha_left()(n - 1);
    const cplx am = S.alpha_left()(m - 1);
    return S.Rplus(n - 1, m - 1) * std::sqrt(an.real() / am.real());
}

TubeModel::TubeModel(const DuctGeometry& geom, int L, const PipelineOptions& opts) : geom_(geom), opts_(opts)
{
    if (L < 0) throw InvalidArgument("TubeModel: negative profile order");
    map_ = std::make_shared<const StripMap>(
        geom.has_corners() ? solve_strip_map(geom, opts.map)
                           : StripMap::identity(geom.width_left(), geom.points(Wall::lower).front().imag()));
    profile_ = std::make_shared<const RefractiveProfile>(build_profile(*map_, L, opts.profile));
    SplitterConfig s = SplitterConfig::for_profile(*profile_);
    if (opts.splitter_scale > 0.0) s.scale = opts.splitter_scale;
    if (opts.splitter_center) s.center = *opts.splitter_center;
    splitter_ = SplitterConfig(s.scale, s.center);
}

PlacedScattering TubeModel::solve(double k2, int N) const
{
    PlacedScattering P;
    if (map_->is_identity()) {
        const auto cut = cutoff_modes(N, DispersionSpec(k2, 1.0, map_->width()));
        if (!cut.empty())
            throw CutoffError("solve: k2 is at the cutoff of mode " + std::to_string(cut.front()), cut.front());
        const double x1 = geom_.x_min(), x2 = geom_.x_max();
        P.S = ScatteringSet::flat(N, k2, 1.0, map_->width(), x2 - x1, map_->strip_u_left(x1));
        P.x_left = x1;
        P.x_right = x2;
        P.width_left = P.width_right = geom_.width_left();
        return P;
    }
    P.S = integrate_scattering(*profile_, splitter_, k2, N, opts_.solve, &P.report);
    P.x_left = map_->physical_x_left(P.S.u1);
    P.x_right = map_->physical_x_right(P.S.u2);
    P.width_left = geom_.width_left();
    P.width_right = geom_.width_right();
    return P;
}

void parallel_for(int count, int workers, const std::function<void(int)>& fn)
{
    workers = std::max(1, std::min(workers, count));
    if (workers == 1) {
        for (int i = 0; i < count; ++i) fn(i);
        return;
    }
    std::atomic<int> next{0};
    std::exception_ptr failure;
    std::mutex m;
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w)
        pool.emplace_back([&] {
            for (int i = next++; i < count; i = next++) {
                try {
                    fn(i);
                } catch (...) {
                    std::lock_guard<std::mutex> lock(m);
                    if (!failure) failure = std::current_exception();
                }
            }
        });
    for (auto& t : pool) t.join();
    if (failure) std::rethrow_exception(failure);
}

CascadeModel::CascadeModel(const CascadePlan& plan, int L, const PipelineOptions& opts, int workers) : plan_(plan)
{
    if (plan.parts.empty()) throw InvalidArgument("CascadeModel: empty plan");
    std::vector<std::optional<TubeModel>> built(plan.parts.size());
    parallel_for(static_cast<int>(built.size()), workers,
                 [&](int i) { built[static_cast<std::size_t>(i)].emplace(plan.parts[static_cast<std::size_t>(i)], L, opts); });
    for (auto& b : built) parts_.push_back(std::move(*b));
}

PlacedScattering CascadeModel::solve(double k2, int N, double* condition) const
{
    std::vector<PlacedScattering> parts;
    for (const auto& m : parts_) parts.push_back(m.solve(k2, N));
    double worst = 1.0;
    PlacedScattering acc = parts.front();
    for (std::size_t i = 1; i < parts.size(); ++i) {
        const double x = plan_.interfaces[i - 1].x;
        if (acc.x_right > parts[i].x_left)
            throw GeometryError("cascade: sub-tube reference planes overlap across the cut");
        const double meet = std::clamp(x, acc.x_right, parts[i].x_left);
        acc = move_planes(acc, acc.x_left, meet);
        const PlacedScattering next = move_planes(parts[i], meet, parts[i].x_right);
        double c = 1.0;
        acc = compose(acc, next, &c);
        worst = std::max(worst, c);
    }
    if (condition) *condition = worst;
    return acc;
}

PlacedScattering solve_cascade(const CascadePlan& plan, double k2, int N, const PipelineOptions& opts, int workers,
                               double* condition)
{
    const CascadeModel model(plan, 2 * N, opts, workers);
    return model.solve(k2, N, condition);
}

} // namespace qtube
