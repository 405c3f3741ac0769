#include "qtube/duct_geometry.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

#include <json.hpp>

#include "qtube/errors.hpp"

namespace qtube {

namespace {

constexpr double turn_tol = 1e-12;

struct Segment {
    cplx p;
    cplx q;
};

double cross(cplx a, cplx b) { return a.real() * b.imag() - a.imag() * b.real(); }

bool segments_intersect(const Segment& s, const Segment& t)
{
    const cplx r = s.q - s.p;
    const cplx d = t.q - t.p;
    const double denom = cross(r, d);
    const cplx qp = t.p - s.p;
    if (std::abs(denom) < 1e-300) {
        // parallel: overlap only if collinear and the projections overlap
        if (std::abs(cross(qp, r)) > 1e-12 * (std::abs(r) + 1.0)) return false;
        const double rr = std::norm(r);
        const double t0 = (qp.real() * r.real() + qp.imag() * r.imag()) / rr;
        const double t1 = t0 + (d.real() * r.real() + d.imag() * r.imag()) / rr;
        return std::max(std::min(t0, t1), 0.0) <= std::min(std::max(t0, t1), 1.0);
    }
    const double a = cross(qp, d) / denom;
    const double b = cross(qp, r) / denom;
    return a >= 0.0 && a <= 1.0 && b >= 0.0 && b <= 1.0;
}

// Finite segments of a wall plus its two horizontal rays truncated at +-reach.
std::vector<Segment> wall_segments(const std::vector<cplx>& pts, double reach)
{
    std::vector<Segment> segs;
    segs.push_back({cplx(-reach, pts.front().imag()), pts.front()});
    for (std::size_t i = 0; i + 1 < pts.size(); ++i) segs.push_back({pts[i], pts[i + 1]});
    segs.push_back({pts.back(), cplx(reach, pts.back().imag())});
    return segs;
}

cplx incoming_direction(const std::vector<cplx>& pts, std::size_t i)
{
    if (i == 0) return {1.0, 0.0};
    const cplx d = pts[i] - pts[i - 1];
    return d / std::abs(d);
}

cplx outgoing_direction(const std::vector<cplx>& pts, std::size_t i)
{
    if (i + 1 == pts.size()) return {1.0, 0.0};
    const cplx d = pts[i + 1] - pts[i];
    return d / std::abs(d);
}

double side_length_before(const std::vector<cplx>& pts, std::size_t i)
{
    return i == 0 ? INFINITY : std::abs(pts[i] - pts[i - 1]);
}

double side_length_after(const std::vector<cplx>& pts, std::size_t i)
{
    return i + 1 == pts.size() ? INFINITY : std::abs(pts[i + 1] - pts[i]);
}

std::vector<cplx> parse_points(const nlohmann::json& j, const char* key)
{
    if (!j.contains(key) || !j.at(key).is_array())
        throw GeometryError(std::string("geometry: missing point list '") + key + "'");
    std::vector<cplx> out;
    for (const auto& p : j.at(key)) {
        if (!p.is_array() || p.size() != 2)
            throw GeometryError(std::string("geometry: points in '") + key + "' must be [x, y] pairs");
        out.emplace_back(p.at(0).get<double>(), p.at(1).get<double>());
    }
    return out;
}

} // namespace

DuctGeometry::DuctGeometry(std::vector<cplx> lower, std::vector<cplx> upper,
                           std::vector<double> lower_rounding, std::vector<double> upper_rounding)
    : lower_(std::move(lower)), upper_(std::move(upper)),
      lower_rounding_(std::move(lower_rounding)), upper_rounding_(std::move(upper_rounding))
{
    if (lower_.empty() || upper_.empty()) throw GeometryError("geometry: each wall needs at least one point");
    if (lower_rounding_.empty()) lower_rounding_.assign(lower_.size(), 0.0);
    if (upper_rounding_.empty()) upper_rounding_.assign(upper_.size(), 0.0);
    if (lower_rounding_.size() != lower_.size() || upper_rounding_.size() != upper_.size())
        throw GeometryError("geometry: rounding list length must match the point list");
    validate();
}

DuctGeometry DuctGeometry::straight(double a)
{
    return DuctGeometry({cplx(0.0, 0.0)}, {cplx(0.0, a)});
}

DuctGeometry DuctGeometry::step(double a, double b)
{
    return DuctGeometry({cplx(0.0, 0.0)}, {cplx(0.0, a), cplx(0.0, b)});
}

std::vector<Corner> DuctGeometry::corners(Wall w) const
{
    const auto& pts = points(w);
    const auto& rnd = rounding(w);
    std::vector<Corner> out;
    for (std::size_t i = 0; i < pts.size(); ++i) {
        const cplx din = incoming_direction(pts, i);
        const cplx dout = outgoing_direction(pts, i);
        const double theta = std::arg(dout / din);
        if (std::abs(theta) < turn_tol) continue;
        Corner c;
        c.wall = w;
        c.index = static_cast<int>(i);
        c.position = pts[i];
        c.exponent = (w == Wall::lower ? -theta : theta) / std::numbers::pi;
        c.rounding = rnd[i];
        c.dir_in = din;
        c.dir_out = dout;
        out.push_back(c);
    }
    return out;
}

std::vector<Corner> DuctGeometry::corners() const
{
    auto out = corners(Wall::lower);
    auto up = corners(Wall::upper);
    out.insert(out.end(), up.begin(), up.end());
    return out;
}

double DuctGeometry::x_min() const
{
    double x = INFINITY;
    for (auto p : lower_) x = std::min(x, p.real());
    for (auto p : upper_) x = std::min(x, p.real());
    return x;
}

double DuctGeometry::x_max() const
{
    double x = -INFINITY;
    for (auto p : lower_) x = std::max(x, p.real());
    for (auto p : upper_) x = std::max(x, p.real());
    return x;
}

bool DuctGeometry::horizontal_at(Wall w, double x, double* y) const
{
    const auto& pts = points(w);
    // the abscissa must not fall inside any corner's rounding disc or on a vertex
    for (const auto& c : corners(w)) {
        if (std::abs(x - c.position.real()) <= std::max(c.rounding, 1e-12)) return false;
    }
    int hits = 0;
    double height = 0.0;
    bool horizontal = true;
    auto visit = [&](cplx p, cplx q) {
        const double lo = std::min(p.real(), q.real());
        const double hi = std::max(p.real(), q.real());
        if (x < lo || x > hi) return;
        ++hits;
        if (p.imag() != q.imag()) horizontal = false;
        height = p.imag();
    };
    visit(cplx(-INFINITY, pts.front().imag()), pts.front());
    for (std::size_t i = 0; i + 1 < pts.size(); ++i) visit(pts[i], pts[i + 1]);
    visit(pts.back(), cplx(INFINITY, pts.back().imag()));
    // a point shared by two collinear horizontal pieces counts twice
    if (hits == 0 || !horizontal) return false;
    if (hits > 2) return false;
    if (y) *y = height;
    return true;
}

DuctGeometry DuctGeometry::with_rounding(double eps) const
{
    std::vector<double> lr(lower_.size(), 0.0);
    std::vector<double> ur(upper_.size(), 0.0);
    for (const auto& c : corners(Wall::lower)) lr[c.index] = eps;
    for (const auto& c : corners(Wall::upper)) ur[c.index] = eps;
    return DuctGeometry(lower_, upper_, lr, ur);
}

void DuctGeometry::validate() const
{
    for (Wall w : {Wall::lower, Wall::upper}) {
        const auto& pts = points(w);
        const auto& rnd = rounding(w);
        for (std::size_t i = 0; i < pts.size(); ++i) {
            if (!std::isfinite(pts[i].real()) || !std::isfinite(pts[i].imag()))
                throw GeometryError("geometry: non-finite vertex");
            if (i > 0 && std::abs(pts[i] - pts[i - 1]) < 1e-12)
                throw GeometryError("geometry: repeated vertex");
            if (!(rnd[i] >= 0.0)) throw GeometryError("geometry: rounding radius must be >= 0");
        }
        double total = 0.0;
        for (std::size_t i = 0; i < pts.size(); ++i) {
            const double theta = std::arg(outgoing_direction(pts, i) / incoming_direction(pts, i));
            if (std::abs(std::abs(theta) - std::numbers::pi) < 1e-9)
                throw GeometryError("geometry: wall reverses direction");
            total += theta;
        }
        if (std::abs(total) > 1e-9) throw GeometryError("geometry: wall turning does not sum to zero");
        for (const auto& c : corners(w)) {
            const double before = side_length_before(pts, c.index);
            const double after = side_length_after(pts, c.index);
            if (c.rounding > 0.0 && !(c.rounding < 0.5 * std::min(before, after)))
                throw GeometryError("geometry: rounding radius must be below half of each adjacent side");
        }
    }
    if (!(width_left() > 0.0) || !(width_right() > 0.0))
        throw GeometryError("geometry: upper wall must lie above the lower wall at both ends");

    const double reach = 1e3 * (1.0 + std::abs(x_max()) + std::abs(x_min()));
    const auto ls = wall_segments(lower_, reach);
    const auto us = wall_segments(upper_, reach);
    for (const auto& s : ls)
        for (const auto& t : us)
            if (segments_intersect(s, t)) throw GeometryError("geometry: walls intersect");
    for (const auto* segs : {&ls, &us})
        for (std::size_t i = 0; i < segs->size(); ++i)
            for (std::size_t j = i + 2; j < segs->size(); ++j)
                if (segments_intersect((*segs)[i], (*segs)[j]))
                    throw GeometryError("geometry: wall intersects itself");
}

DuctGeometry round_corners(const DuctGeometry& geom, double eps)
{
    if (!(eps >= 0.0) || !std::isfinite(eps)) throw GeometryError("round_corners: eps must be >= 0");
    if (eps == 0.0) return geom;
    for (Wall w : {Wall::lower, Wall::upper}) {
        const auto& pts = geom.points(w);
        for (const auto& c : geom.corners(w)) {
            const double side = std::min(side_length_before(pts, c.index), side_length_after(pts, c.index));
            if (!(eps < 0.5 * side)) {
                std::ostringstream msg;
                msg << "round_corners: eps = " << eps << " too large for corner at (" << c.position.real()
                    << ", " << c.position.imag() << ")";
                throw GeometryError(msg.str());
            }
        }
    }
    return geom.with_rounding(eps);
}

DuctGeometry parse_geometry(const std::string& json_text)
{
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(json_text);
    } catch (const nlohmann::json::exception& e) {
        throw GeometryError(std::string("geometry: malformed JSON: ") + e.what());
    }
    try {
        auto lower = parse_points(j, "lower");
        auto upper = parse_points(j, "upper");
        std::vector<double> lr, ur;
        if (j.contains("lower_rounding")) lr = j.at("lower_rounding").get<std::vector<double>>();
        if (j.contains("upper_rounding")) ur = j.at("upper_rounding").get<std::vector<double>>();
        DuctGeometry g(std::move(lower), std::move(upper), std::move(lr), std::move(ur));
        if (j.contains("rounding")) {
            if (j.contains("lower_rounding") || j.contains("upper_rounding"))
                throw GeometryError("geometry: give either 'rounding' or per-wall rounding lists");
            g = round_corners(g, j.at("rounding").get<double>());
        }
        auto check_width = [&](const char* key, double actual) {
            if (j.contains(key) && std::abs(j.at(key).get<double>() - actual) > 1e-12 * (1.0 + actual))
                throw GeometryError(std::string("geometry: '") + key + "' does not match the vertices");
        };
        check_width("width_left", g.width_left());
        check_width("width_right", g.width_right());
        return g;
    } catch (const nlohmann::json::exception& e) {
        throw GeometryError(std::string("geometry: ") + e.what());
    }
}

DuctGeometry load_geometry(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in) throw GeometryError("geometry: cannot open " + path.string());
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_geometry(buf.str());
}

std::string geometry_to_json(const DuctGeometry& geom)
{
    nlohmann::json j;
    for (Wall w : {Wall::lower, Wall::upper}) {
        nlohmann::json pts = nlohmann::json::array();
        for (auto p : geom.points(w)) pts.push_back({p.real(), p.imag()});
        j[w == Wall::lower ? "lower" : "upper"] = pts;
        j[w == Wall::lower ? "lower_rounding" : "upper_rounding"] = geom.rounding(w);
    }
    j["width_left"] = geom.width_left();
    j["width_right"] = geom.width_right();
    return j.dump(2);
}

} // namespace qtube
