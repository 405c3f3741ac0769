#include "qtube/refractive_profile.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <boost/math/quadrature/gauss.hpp>

#include "qtube/errors.hpp"

namespace qtube {

using std::numbers::pi;

Eigen::VectorXd ProfileSource::coefficients(double u) const
{
    Eigen::VectorXd out(order() + 1);
    coefficients(u, out);
    return out;
}

double ProfileSource::evaluate(double u, double v) const
{
    const Eigen::VectorXd c = coefficients(u);
    double s = 0.0;
    for (int l = 0; l < c.size(); ++l) s += c(l) * std::cos(l * pi * v / width());
    return s;
}

// ---------------------------------------------------------------------------

namespace {

// Lobatto nodes cos(j pi / d), j = 0..d, mapped to [lo, hi] (descending in j).
double lobatto(double lo, double hi, int d, int j)
{
    return 0.5 * (lo + hi) + 0.5 * (hi - lo) * std::cos(pi * j / d);
}

// values at lobatto nodes (columns) -> Chebyshev coefficients (columns)
Eigen::MatrixXd chebyshev_transform(int d)
{
    Eigen::MatrixXd T(d + 1, d + 1);
    for (int k = 0; k <= d; ++k)
        for (int j = 0; j <= d; ++j) {
            double w = 2.0 / d * std::cos(pi * j * k / d);
            if (j == 0 || j == d) w *= 0.5;
            if (k == 0 || k == d) w *= 0.5;
            T(j, k) = w;
        }
    return T;
}

} // namespace

RefractiveProfile::RefractiveProfile(std::vector<Piece> pieces, double mu_minus, double mu_plus, double a)
    : pieces_(std::move(pieces)), mu_minus_(mu_minus), mu_plus_(mu_plus), a_(a)
{
    if (pieces_.empty()) throw InvalidArgument("RefractiveProfile: no pieces");
    const auto rows = pieces_.front().cheb.rows();
    for (std::size_t i = 0; i < pieces_.size(); ++i) {
        const Piece& p = pieces_[i];
        if (!(p.lo < p.hi)) throw InvalidArgument("RefractiveProfile: empty piece");
        if (i > 0 && p.lo != pieces_[i - 1].hi) throw InvalidArgument("RefractiveProfile: pieces are not contiguous");
        if (p.cheb.rows() != rows || rows < 1 || p.cheb.cols() < 1)
            throw InvalidArgument("RefractiveProfile: inconsistent coefficient tables");
        his_.push_back(p.hi);
    }
    if (!(a > 0.0) || !(mu_minus > 0.0) || !(mu_plus > 0.0))
        throw InvalidArgument("RefractiveProfile: width and asymptotic values must be positive");
}

RefractiveProfile RefractiveProfile::hermite(const std::vector<double>& u_grid, const Eigen::MatrixXd& values,
                                             const Eigen::MatrixXd& slopes, double mu_minus, double mu_plus,
                                             double a)
{
    if (u_grid.size() < 2) throw InvalidArgument("RefractiveProfile: need at least two grid points");
    if (values.cols() != static_cast<Eigen::Index>(u_grid.size()) || slopes.cols() != values.cols() ||
        slopes.rows() != values.rows())
        throw InvalidArgument("RefractiveProfile: table dimensions do not match the grid");
    const Eigen::MatrixXd T = chebyshev_transform(3);
    std::vector<Piece> pieces;
    for (std::size_t j = 0; j + 1 < u_grid.size(); ++j) {
        const double lo = u_grid[j];
        const double hi = u_grid[j + 1];
        const double h = hi - lo;
        const auto c0 = static_cast<Eigen::Index>(j);
        Eigen::MatrixXd samples(values.rows(), 4);
        for (int k = 0; k <= 3; ++k) {
            const double t = (lobatto(lo, hi, 3, k) - lo) / h;
            const double t2 = t * t;
            const double t3 = t2 * t;
            samples.col(k) = (2 * t3 - 3 * t2 + 1) * values.col(c0) + (t3 - 2 * t2 + t) * h * slopes.col(c0) +
                             (-2 * t3 + 3 * t2) * values.col(c0 + 1) + (t3 - t2) * h * slopes.col(c0 + 1);
        }
        pieces.push_back({lo, hi, samples * T});
    }
    return RefractiveProfile(std::move(pieces), mu_minus, mu_plus, a);
}

void RefractiveProfile::coefficients(double u, Eigen::Ref<Eigen::VectorXd> out) const
{
    if (u <= pieces_.front().lo || u >= pieces_.back().hi) {
        out.setZero();
        out(0) = (u <= pieces_.front().lo) ? mu_minus_ : mu_plus_;
        return;
    }
    const auto it = std::lower_bound(his_.begin(), his_.end(), u);
    const Piece& p = pieces_[static_cast<std::size_t>(it - his_.begin())];
    const double t = (2.0 * u - p.lo - p.hi) / (p.hi - p.lo);
    const Eigen::Index d = p.cheb.cols() - 1;
    if (d == 0) {
        out = p.cheb.col(0);
        return;
    }
    Eigen::VectorXd b1 = Eigen::VectorXd::Zero(p.cheb.rows());
    Eigen::VectorXd b2 = b1;
    for (Eigen::Index k = d; k >= 1; --k) {
        Eigen::VectorXd b0 = p.cheb.col(k) + 2.0 * t * b1 - b2;
        b2 = std::move(b1);
        b1 = std::move(b0);
    }
    out = p.cheb.col(0) + t * b1 - b2;
}

std::vector<double> RefractiveProfile::breakpoints() const
{
    std::vector<double> b{pieces_.front().lo};
    for (const auto& p : pieces_) b.push_back(p.hi);
    return b;
}

double RefractiveProfile::min_mu(int v_samples) const
{
    double lo = INFINITY;
    Eigen::VectorXd c(order() + 1);
    for (const auto& p : pieces_)
        for (double u : {p.lo, 0.5 * (p.lo + p.hi)}) {
            coefficients(u, c);
            for (int i = 1; i < v_samples - 1; ++i) {
                const double v = a_ * i / (v_samples - 1);
                double s = 0.0;
                for (Eigen::Index l = 0; l < c.size(); ++l) s += c(l) * std::cos(l * pi * v / a_);
                lo = std::min(lo, s);
            }
        }
    return lo;
}

// ---------------------------------------------------------------------------

FunctionProfile::FunctionProfile(Coefficients f, int L, std::pair<double, double> core, double mu_minus,
                                 double mu_plus, double a)
    : f_(std::move(f)), L_(L), core_(core), mu_minus_(mu_minus), mu_plus_(mu_plus), a_(a)
{
    if (L < 0) throw InvalidArgument("FunctionProfile: order must be non-negative");
    if (!(core.first <= core.second)) throw InvalidArgument("FunctionProfile: empty core");
}

void FunctionProfile::coefficients(double u, Eigen::Ref<Eigen::VectorXd> out) const
{
    out.setZero();
    if (u <= core_.first) {
        out(0) = mu_minus_;
    } else if (u >= core_.second) {
        out(0) = mu_plus_;
    } else {
        f_(u, out);
    }
}

FunctionProfile bump_profile(double amp, double center, double half, double a, int L)
{
    if (!(half > 0.0)) throw InvalidArgument("bump_profile: half width must be positive");
    auto f = [=](double u, Eigen::Ref<Eigen::VectorXd> out) {
        const double s = (u - center) / half;
        const double g = (std::abs(s) < 1.0) ? std::exp(1.0 - 1.0 / (1.0 - s * s)) : 0.0;
        out(0) = 1.0;
        if (out.size() > 1) out(1) = amp * g;
    };
    return FunctionProfile(f, std::max(L, 1), {center - half, center + half}, 1.0, 1.0, a);
}

FunctionProfile flat_profile(double a, int L)
{
    auto f = [](double, Eigen::Ref<Eigen::VectorXd> out) { out(0) = 1.0; };
    return FunctionProfile(f, L, {0.0, 0.0}, 1.0, 1.0, a);
}

// ---------------------------------------------------------------------------

CosineProjector::CosineProjector(double a, int L, int levels) : a_(a), L_(L)
{
    if (!(a > 0.0) || L < 0) throw InvalidArgument("CosineProjector: bad width or order");
    if (levels <= 0) levels = 14;
    using rule = boost::math::quadrature::gauss<double, 10>;
    const auto& xs = rule::abscissa();
    const auto& ws = rule::weights();

    // panel breakpoints: uniform interior, dyadic grading into both walls
    const int interior = std::max(8, L);
    std::vector<double> br;
    const double edge = a / interior;
    for (int k = levels; k >= 1; --k) br.push_back(edge * std::ldexp(1.0, -k));
    for (int j = 1; j < interior; ++j) br.push_back(edge * j);
    for (int k = 1; k <= levels; ++k) br.push_back(a - edge * std::ldexp(1.0, -k));
    br.insert(br.begin(), 0.0);
    br.push_back(a);

    std::vector<double> wts;
    for (std::size_t p = 0; p + 1 < br.size(); ++p) {
        const double c = 0.5 * (br[p] + br[p + 1]);
        const double h = 0.5 * (br[p + 1] - br[p]);
        for (std::size_t i = 0; i < xs.size(); ++i) {
            nodes_.push_back(c - h * xs[i]);
            wts.push_back(h * ws[i]);
            if (xs[i] != 0.0) {
                nodes_.push_back(c + h * xs[i]);
                wts.push_back(h * ws[i]);
            }
        }
    }
    weights_.resize(L + 1, static_cast<Eigen::Index>(nodes_.size()));
    for (std::size_t i = 0; i < nodes_.size(); ++i)
        for (int l = 0; l <= L; ++l)
            weights_(l, static_cast<Eigen::Index>(i)) = (l == 0 ? 1.0 : 2.0) / a * wts[i] * std::cos(l * pi * nodes_[i] / a);
}

Eigen::VectorXd CosineProjector::project(const Eigen::VectorXd& samples) const
{
    if (samples.size() != static_cast<Eigen::Index>(nodes_.size()))
        throw InvalidArgument("CosineProjector: sample count does not match the node count");
    return weights_ * samples;
}

namespace {

int grading_levels(const StripMap& map)
{
    double smallest = map.width();
    for (const auto& p : map.prevertices())
        smallest = std::min(smallest, p.sharp() ? 1e-5 * map.width() : p.half_width);
    return std::clamp(static_cast<int>(std::ceil(std::log2(map.width() / smallest))) + 4, 6, 24);
}

struct Node {
    Eigen::VectorXd value;
    Eigen::VectorXd slope;
};

Node project_node(const StripMap& map, const CosineProjector& proj, double u)
{
    const auto& v = proj.nodes();
    Eigen::VectorXd m(static_cast<Eigen::Index>(v.size()));
    Eigen::VectorXd dm(m.size());
    for (Eigen::Index i = 0; i < m.size(); ++i) {
        const auto [val, du] = map.mu_and_du(u, v[static_cast<std::size_t>(i)]);
        m(i) = val;
        dm(i) = du;
    }
    return {proj.project(m), proj.project(dm)};
}

Eigen::VectorXd project_value(const StripMap& map, const CosineProjector& proj, double u)
{
    const auto& v = proj.nodes();
    Eigen::VectorXd m(static_cast<Eigen::Index>(v.size()));
    for (Eigen::Index i = 0; i < m.size(); ++i) m(i) = map.mu(u, v[static_cast<std::size_t>(i)]);
    return proj.project(m);
}

} // namespace

RefractiveProfile build_profile(const StripMap& map, const std::vector<double>& u_grid, int L)
{
    if (u_grid.size() < 2) throw InvalidArgument("build_profile: need at least two grid points");
    const CosineProjector proj(map.width(), L, grading_levels(map));
    Eigen::MatrixXd values(L + 1, static_cast<Eigen::Index>(u_grid.size()));
    Eigen::MatrixXd slopes(L + 1, values.cols());
    for (std::size_t j = 0; j < u_grid.size(); ++j) {
        const Node n = project_node(map, proj, u_grid[j]);
        values.col(static_cast<Eigen::Index>(j)) = n.value;
        slopes.col(static_cast<Eigen::Index>(j)) = n.slope;
    }
    return RefractiveProfile::hermite(u_grid, values, slopes, map.mu_minus(), map.mu_plus(), map.width());
}

RefractiveProfile build_profile(const StripMap& map, int L, const ProfileOptions& opts)
{
    const double a = map.width();
    if (opts.degree < 2 || !(opts.tolerance > 0.0)) throw InvalidArgument("build_profile: bad options");
    if (map.is_identity()) {
        Eigen::MatrixXd c = Eigen::MatrixXd::Zero(L + 1, 1);
        c(0, 0) = 1.0;
        return RefractiveProfile({{-0.5 * a, 0.5 * a, c}}, 1.0, 1.0, a);
    }
    const auto [u1, u2] = map.flat_interval(opts.flat_threshold);
    const CosineProjector proj(a, L, grading_levels(map));
    const int d = opts.degree;
    const Eigen::MatrixXd T = chebyshev_transform(d);

    struct Interval {
        double lo, hi;
        int depth;
        Eigen::VectorXd left, right; // values at lo and hi (shared with neighbours)
    };
    std::vector<RefractiveProfile::Piece> pieces;
    const int initial = std::max(1, static_cast<int>(std::ceil((u2 - u1) / a)));
    std::vector<Interval> pending;
    Eigen::VectorXd right_end = project_value(map, proj, u2);
    for (int k = initial - 1; k >= 0; --k) {
        const double lo = u1 + (u2 - u1) * k / initial;
        const double hi = (k + 1 == initial) ? u2 : u1 + (u2 - u1) * (k + 1) / initial;
        Eigen::VectorXd left_end = project_value(map, proj, lo);
        pending.push_back({lo, hi, 0, left_end, right_end});
        right_end = left_end;
    }
    while (!pending.empty()) {
        Interval iv = std::move(pending.back());
        pending.pop_back();
        Eigen::MatrixXd samples(L + 1, d + 1);
        samples.col(0) = iv.right; // cos(0) = 1 maps to hi
        samples.col(d) = iv.left;
        for (int j = 1; j < d; ++j) samples.col(j) = project_value(map, proj, lobatto(iv.lo, iv.hi, d, j));
        Eigen::MatrixXd cheb = samples * T;
        const double scale = std::max(1.0, cheb.col(0).cwiseAbs().maxCoeff());
        const double tail = cheb.rightCols(2).cwiseAbs().maxCoeff();
        if (tail <= opts.tolerance * scale || iv.depth >= opts.max_depth) {
            pieces.push_back({iv.lo, iv.hi, std::move(cheb)});
            continue;
        }
        const double mid = 0.5 * (iv.lo + iv.hi);
        Eigen::VectorXd mv = (d % 2 == 0) ? Eigen::VectorXd(samples.col(d / 2)) : project_value(map, proj, mid);
        pending.push_back({mid, iv.hi, iv.depth + 1, mv, iv.right});
        pending.push_back({iv.lo, mid, iv.depth + 1, iv.left, mv});
    }
    return RefractiveProfile(std::move(pieces), map.mu_minus(), map.mu_plus(), a);
}

// ---------------------------------------------------------------------------

MappedProfile::MappedProfile(std::shared_ptr<const StripMap> map, int L, double flat_threshold)
    : map_(std::move(map)), projector_(map_->width(), L, grading_levels(*map_)),
      core_(map_->is_identity() ? std::pair<double, double>{0.0, 0.0} : map_->flat_interval(flat_threshold))
{
}

void MappedProfile::coefficients(double u, Eigen::Ref<Eigen::VectorXd> out) const
{
    if (u <= core_.first || u >= core_.second) {
        out.setZero();
        out(0) = (u <= core_.first) ? mu_minus() : mu_plus();
        return;
    }
    const auto& v = projector_.nodes();
    Eigen::VectorXd m(static_cast<Eigen::Index>(v.size()));
    for (Eigen::Index i = 0; i < m.size(); ++i) m(i) = map_->mu(u, v[static_cast<std::size_t>(i)]);
    out = projector_.project(m);
}

} // namespace qtube
