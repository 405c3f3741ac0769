#ifndef QTUBE_BUILDING_BLOCK_HPP
#define QTUBE_BUILDING_BLOCK_HPP

#include <vector>

#include "qtube/duct_geometry.hpp"
#include "qtube/scattering_set.hpp"

namespace qtube {

struct Composition {
    ScatteringSet S;
    double condition = 1.0; ///< worst 1-norm condition estimate of the interface matrices
};

/// Redheffer star product: A on the left, B on the right, joined at A's right plane
/// and B's left plane. B is re-expressed on A's strip width before joining.
Composition star_compose(const ScatteringSet& A, const ScatteringSet& B);

/// Interface between consecutive sub-tubes: a cut at physical abscissa x where both walls are straight.
struct Interface {
    double x = 0.0;
    double y_lower = 0.0;
    double y_upper = 0.0;
    double width() const { return y_upper - y_lower; }
};

struct CascadePlan {
    std::vector<DuctGeometry> parts;
    std::vector<Interface> interfaces; ///< parts.size() - 1 entries
};

/// Splits the duct at the given abscissae. Every cut must meet both walls in a
/// horizontal piece; each part is closed off by straight semi-infinite ducts.
CascadePlan partition_geometry(const DuctGeometry& geom, std::vector<double> cuts);

} // namespace qtube

#endif
