#ifndef QTUBE_DUCT_GEOMETRY_HPP
#define QTUBE_DUCT_GEOMETRY_HPP

#include <complex>
#include <filesystem>
#include <string>
#include <vector>

namespace qtube {

using cplx = std::complex<double>;

enum class Wall { lower, upper };

/// A boundary corner of a polygonal channel, in traversal order (left to right).
struct Corner {
    Wall wall = Wall::lower;
    int index = 0;         ///< position in the wall's point list
    cplx position;         ///< vertex in the zeta-plane
    double exponent = 0.0; ///< interior angle / pi - 1
    double rounding = 0.0; ///< corner rounding radius epsilon (0 = sharp)
    cplx dir_in;           ///< unit direction of the incoming side
    cplx dir_out;          ///< unit direction of the outgoing side
};

/// Polygonal channel in the zeta = x + iy plane.
///
/// Each wall is a polyline, entered from x = -inf along a horizontal ray and left
/// towards x = +inf along a horizontal ray. A wall given by a single point is a
/// straight horizontal line. Points where the polyline does not turn are kept in
/// the description but are not corners.
class DuctGeometry {
public:
    DuctGeometry(std::vector<cplx> lower, std::vector<cplx> upper,
                 std::vector<double> lower_rounding = {}, std::vector<double> upper_rounding = {});

    /// Straight duct of width a with lower wall on y = 0.
    static DuctGeometry straight(double a);
    /// Lower wall y = 0, upper wall dropping from y = a to y = b at x = 0.
    static DuctGeometry step(double a, double b);

    const std::vector<cplx>& points(Wall w) const { return w == Wall::lower ? lower_ : upper_; }
    const std::vector<double>& rounding(Wall w) const
    {
        return w == Wall::lower ? lower_rounding_ : upper_rounding_;
    }

    double width_left() const { return upper_.front().imag() - lower_.front().imag(); }
    double width_right() const { return upper_.back().imag() - lower_.back().imag(); }

    /// Corners of one wall (points with non-zero turning), left to right.
    std::vector<Corner> corners(Wall w) const;
    /// All corners, lower wall first.
    std::vector<Corner> corners() const;
    bool has_corners() const { return !corners().empty(); }

    /// x-range containing all listed points.
    double x_min() const;
    double x_max() const;

    /// True when the wall is a single horizontal piece at abscissa x, outside every
    /// rounding disc; the height is stored in *y when requested.
    bool horizontal_at(Wall w, double x, double* y = nullptr) const;

    /// Same geometry with every corner rounding radius replaced.
    DuctGeometry with_rounding(double eps) const;

private:
    void validate() const;

    std::vector<cplx> lower_;
    std::vector<cplx> upper_;
    std::vector<double> lower_rounding_;
    std::vector<double> upper_rounding_;
};

/// Replaces every sharp corner by a rounded one of radius eps.
/// Throws GeometryError when eps is not smaller than half of an adjacent finite side.
DuctGeometry round_corners(const DuctGeometry& geom, double eps);

/// Reads the JSON geometry schema documented in README.md.
DuctGeometry load_geometry(const std::filesystem::path& path);
DuctGeometry parse_geometry(const std::string& json_text);
std::string geometry_to_json(const DuctGeometry& geom);

} // namespace qtube

#endif
