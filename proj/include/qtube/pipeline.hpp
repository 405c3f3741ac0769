#ifndef QTUBE_PIPELINE_HPP
#define QTUBE_PIPELINE_HPP

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "qtube/building_block.hpp"
#include "qtube/duct_geometry.hpp"
#include "qtube/imbedding_solver.hpp"
#include "qtube/refractive_profile.hpp"
#include "qtube/strip_map.hpp"

namespace qtube {

struct PipelineOptions {
    StripMapOptions map;
    ProfileOptions profile;
    SolveOptions solve;
    double splitter_scale = 0.0;            ///< 0: a / 2
    std::optional<double> splitter_center;  ///< default: middle of the profile core
};

/// Scattering set together with the physical abscissae of its reference planes.
struct PlacedScattering {
    ScatteringSet S;
    double x_left = 0.0;
    double x_right = 0.0;
    double width_left = 1.0;
    double width_right = 1.0;
    SolveReport report;
};

/// Moves the reference planes to the given abscissae through the straight end ducts.
PlacedScattering move_planes(const PlacedScattering& P, double x_left, double x_right);

/// Joins A and B; A's right plane must coincide with B's left plane.
PlacedScattering compose(const PlacedScattering& A, const PlacedScattering& B, double* condition = nullptr);

/// Flux-normalized transmission / reflection amplitude for incidence in mode m from the left.
cplx transmission_amplitude(const ScatteringSet& S, int n, int m);
cplx reflection_amplitude(const ScatteringSet& S, int n, int m);

/// A duct prepared for solving: strip map and tabulated profile.
class TubeModel {
public:
    TubeModel(const DuctGeometry& geom, int L, const PipelineOptions& opts = {});

    const DuctGeometry& geometry() const { return geom_; }
    const StripMap& map() const { return *map_; }
    const RefractiveProfile& profile() const { return *profile_; }
    const SplitterConfig& splitter() const { return splitter_; }
    int order() const { return profile_->order(); }

    PlacedScattering solve(double k2, int N) const;

private:
    DuctGeometry geom_;
    PipelineOptions opts_;
    std::shared_ptr<const StripMap> map_;
    std::shared_ptr<const RefractiveProfile> profile_;
    SplitterConfig splitter_;
};

/// Prepared sub-tubes of a cascade plan.
class CascadeModel {
public:
    CascadeModel(const CascadePlan& plan, int L, const PipelineOptions& opts = {}, int workers = 1);

    const std::vector<TubeModel>& parts() const { return parts_; }
    /// Solves every part and composes them left to right.
    PlacedScattering solve(double k2, int N, double* condition = nullptr) const;

private:
    CascadePlan plan_;
    std::vector<TubeModel> parts_;
};

/// Solves each part of the plan (workers threads) and composes them left to right.
PlacedScattering solve_cascade(const CascadePlan& plan, double k2, int N, const PipelineOptions& opts = {},
                               int workers = 1, double* condition = nullptr);

/// Runs fn(i) for i in [0, count) on up to workers threads.
void parallel_for(int count, int workers, const std::function<void(int)>& fn);

} // namespace qtube

#endif
