#ifndef QTUBE_STRIP_MAP_HPP
#define QTUBE_STRIP_MAP_HPP

#include <complex>
#include <utility>
#include <vector>

#include "qtube/duct_geometry.hpp"

namespace qtube {

/// One boundary prevertex of the strip map together with its rounding interval.
///
/// In the half-plane variable z = exp(pi w / a) the corner factor is
/// (z - t)^exponent averaged over t in [t1, t2]; t1 = t2 for a sharp corner.
/// Lower-wall prevertices sit on v = 0 (z > 0), upper-wall ones on v = a (z < 0).
struct Prevertex {
    Corner corner;
    double x = 0.0;           ///< real part of the prevertex in the strip
    double v = 0.0;           ///< 0 (lower wall) or a (upper wall)
    double half_width = 0.0;  ///< rounding half-width in strip units (0 = sharp)
    double t1 = 0.0;          ///< interval ends in the z variable, t1 < t2
    double t2 = 0.0;
    double x_t1 = 0.0;        ///< strip abscissae of t1, t2
    double x_t2 = 0.0;

    bool upper() const { return corner.wall == Wall::upper; }
    bool sharp() const { return half_width == 0.0; }
};

struct StripMapOptions {
    double residual_tol = 1e-10;   ///< parameter-problem residual, in units of a
    double quad_tol = 1e-13;       ///< relative tolerance of path quadratures
    int max_iterations = 200;
};

/// Schwarz-Christoffel map zeta(w) from the strip 0 < Im w < a onto a polygonal
/// channel (optionally with rounded corners).
///
///   dzeta/dw = K * prod_k F_k(z),  z = exp(pi w / a),
///
/// with K = b / a so that dzeta/dw -> 1 as u -> -inf and -> b/a as u -> +inf.
class StripMap {
public:
    /// zeta(w) = w + i * y_lower.
    static StripMap identity(double a, double y_lower = 0.0);

    double width() const { return a_; }
    double scale() const { return K_; }
    double mu_minus() const { return 1.0; }
    double mu_plus() const { return K_ * K_; }
    bool is_identity() const { return pre_.empty(); }
    const std::vector<Prevertex>& prevertices() const { return pre_; }
    double residual() const { return residual_; }
    int iterations() const { return iterations_; }

    /// dzeta/dw on the closed strip. Throws SingularPointError at a sharp prevertex.
    cplx derivative(cplx w) const;
    /// d/dw log(dzeta/dw).
    cplx log_derivative(cplx w) const;
    /// zeta(w), integrated along interior paths from the anchor vertex.
    cplx map(cplx w) const;
    /// |dzeta/dw|^2 and its u-derivative.
    double mu(double u, double v) const;
    std::pair<double, double> mu_and_du(double u, double v) const;

    /// lim (zeta - w) as u -> -inf and lim (zeta - K w) as u -> +inf.
    cplx offset_left() const { return offset_left_; }
    cplx offset_right() const { return offset_right_; }
    /// Physical abscissa of a strip abscissa inside the left / right flat region.
    double physical_x_left(double u) const { return offset_left_.real() + u; }
    double physical_x_right(double u) const { return offset_right_.real() + K_ * u; }
    /// Inverse of the above.
    double strip_u_left(double x) const { return x - offset_left_.real(); }
    double strip_u_right(double x) const { return (x - offset_right_.real()) / K_; }

    /// Smallest / largest prevertex abscissa including rounding intervals.
    std::pair<double, double> prevertex_range() const;

    /// (u1, u2) outside of which sup_v |mu - mu_-+| < threshold.
    std::pair<double, double> flat_interval(double threshold) const;

    /// Fitted exponential decay rate c of sup_v |mu - mu_-+| in the two tails.
    double decay_rate() const;

    /// Integral of dzeta/dw along the straight segment w0 -> w1.
    cplx integrate(cplx w0, cplx w1) const;

private:
    friend class StripMapSolver;
    StripMap() = default;

    cplx derivative_offset(cplx base, cplx d) const;
    void finalize();

    double a_ = 1.0;
    double K_ = 1.0;
    double quad_tol_ = 1e-13;
    std::vector<Prevertex> pre_;
    cplx anchor_w_;        ///< interior point above the anchor vertex
    cplx anchor_zeta_;     ///< zeta(anchor_w_)
    cplx offset_left_;
    cplx offset_right_;
    double residual_ = 0.0;
    int iterations_ = 0;
};

/// Solves the parameter problem for the geometry (rounded corners included).
StripMap solve_strip_map(const DuctGeometry& geom, const StripMapOptions& opts = {});

cplx map_derivative(const StripMap& map, cplx w);
double mu_field(const StripMap& map, double u, double v);

} // namespace qtube

#endif
