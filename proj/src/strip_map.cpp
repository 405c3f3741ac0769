#include "qtube/strip_map.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <optional>
#include <sstream>

#include <Eigen/Dense>
#include <boost/math/quadrature/tanh_sinh.hpp>

#include "qtube/errors.hpp"

namespace qtube {

using std::numbers::pi;

namespace {

// exp(s) - 1 without cancellation for small |s|.
cplx cexpm1(cplx s)
{
    const double x = s.real();
    const double y = s.imag();
    const double sh = std::sin(0.5 * y);
    return {std::expm1(x) * std::cos(y) - 2.0 * sh * sh, std::exp(x) * std::sin(y)};
}

// z - t lies in the closed upper half plane whenever w is in the closed strip; pin the
// sign of a vanishing imaginary part so that negative reals take arg = pi.
cplx upper_closed(cplx y)
{
    if (!(y.imag() > 0.0)) y.imag(0.0);
    return y;
}

// sum_{m>=0} C(q, 2m+1) x^{2m} = ((1+x)^q - (1-x)^q) / (2x), |x| < 1.
cplx odd_binomial_series(double q, cplx x)
{
    const cplx x2 = x * x;
    cplx sum = 0.0;
    cplx pw = 1.0;
    double c = q; // C(q, 1)
    for (int j = 1; j < 400; j += 2) {
        const cplx term = c * pw;
        sum += term;
        if (std::abs(term) <= 1e-18 * std::abs(sum) && j > 3) break;
        // C(q, j+2) = C(q, j) (q - j)(q - j - 1) / ((j + 1)(j + 2))
        c *= (q - j) * (q - j - 1) / ((j + 1.0) * (j + 2.0));
        pw *= x2;
    }
    return sum;
}

struct FactorValue {
    cplx F;
    cplx dlog; // d/dz log F
};

// Corner factor with y1 = z - t1, y2 = z - t2, h = (t2 - t1) / 2.
// Sharp corners (h == 0) give (z - t)^e, rounded ones its mean over [t1, t2].
FactorValue corner_factor(cplx y1, cplx y2, double h, double e)
{
    if (h == 0.0) {
        if (y1 == 0.0) throw SingularPointError("strip map: evaluation at a sharp-corner prevertex");
        return {std::pow(y1, e), e / y1};
    }
    const double p = e + 1.0;
    const cplx y = y1 - h; // z - (t1 + t2) / 2
    if (std::abs(y) > 2.0 * h) {
        const cplx x = h / y;
        const cplx gp = odd_binomial_series(p, x);
        const cplx ge = odd_binomial_series(e, x);
        const cplx ye = std::pow(y, e);
        return {ye * gp / p, ge * p / (y * gp)};
    }
    const cplx a1 = std::pow(y1, p);
    const cplx a2 = std::pow(y2, p);
    const cplx F = (a1 - a2) / (2.0 * h * p);
    const cplx dF = (a1 / y1 - a2 / y2) / (2.0 * h);
    return {F, dF / F};
}

// log of the corner factor; same branches as corner_factor
cplx corner_log(cplx y1, cplx y2, double h, double e)
{
    if (h == 0.0) {
        if (y1 == 0.0) throw SingularPointError("strip map: evaluation at a sharp-corner prevertex");
        return e * std::log(y1);
    }
    const double p = e + 1.0;
    const cplx y = y1 - h;
    if (std::abs(y) > 2.0 * h) return e * std::log(y) + std::log(odd_binomial_series(p, h / y) / p);
    return std::log((std::pow(y1, p) - std::pow(y2, p)) / (2.0 * h * p));
}

struct Chain {
    std::vector<cplx> t_minus; // zeta at left tangent point, relative to chain start
    std::vector<cplx> t_plus;
    std::vector<cplx> vertex;  // virtual vertex, same frame
    std::vector<double> s_in;  // tangent distances along incoming / outgoing sides
    std::vector<double> s_out;
};

} // namespace

// ---------------------------------------------------------------------------
// evaluation

cplx StripMap::derivative_offset(cplx base, cplx d) const
{
    if (pre_.empty()) return K_;
    cplx logF = 0.0;
    for (const auto& p : pre_) {
        const cplx w1 = cplx(p.x_t1, p.v);
        const cplx y1 = upper_closed(p.t1 * cexpm1(pi * ((base - w1) + d) / a_));
        if (p.sharp()) {
            logF += corner_log(y1, y1, 0.0, p.corner.exponent);
        } else {
            const cplx w2 = cplx(p.x_t2, p.v);
            const cplx y2 = upper_closed(p.t2 * cexpm1(pi * ((base - w2) + d) / a_));
            logF += corner_log(y1, y2, 0.5 * (p.t2 - p.t1), p.corner.exponent);
        }
    }
    return K_ * std::exp(logF);
}

cplx StripMap::derivative(cplx w) const
{
    return derivative_offset(w, 0.0);
}

cplx StripMap::log_derivative(cplx w) const
{
    if (pre_.empty()) return 0.0;
    const cplx z = std::exp(pi * w / a_);
    cplx acc = 0.0;
    for (const auto& p : pre_) {
        const cplx y1 = upper_closed(p.t1 * cexpm1(pi * (w - cplx(p.x_t1, p.v)) / a_));
        if (p.sharp()) {
            acc += corner_factor(y1, y1, 0.0, p.corner.exponent).dlog;
        } else {
            const cplx y2 = upper_closed(p.t2 * cexpm1(pi * (w - cplx(p.x_t2, p.v)) / a_));
            acc += corner_factor(y1, y2, 0.5 * (p.t2 - p.t1), p.corner.exponent).dlog;
        }
    }
    return acc * (pi * z / a_);
}

double StripMap::mu(double u, double v) const
{
    return std::norm(derivative(cplx(u, v)));
}

std::pair<double, double> StripMap::mu_and_du(double u, double v) const
{
    const cplx w(u, v);
    const double m = std::norm(derivative(w));
    return {m, 2.0 * m * log_derivative(w).real()};
}

cplx StripMap::integrate(cplx w0, cplx w1) const
{
    const cplx delta = w1 - w0;
    if (delta == 0.0) return 0.0;
    // chunks of length a/2 near prevertices, growing with the distance to them
    const double len = std::abs(delta);
    std::vector<double> cuts{0.0};
    while (cuts.back() < 1.0) {
        const cplx p = w0 + cuts.back() * delta;
        double dist = INFINITY;
        for (const auto& q : pre_)
            for (double x : {q.x_t1, q.x_t2}) dist = std::min(dist, std::abs(p - cplx(x, q.v)));
        const double step = std::max(0.5 * a_, 0.5 * dist) / len;
        cuts.push_back(cuts.back() + step >= 1.0 - 1e-12 ? 1.0 : cuts.back() + step);
    }
    boost::math::quadrature::tanh_sinh<double> ts(12);
    cplx total = 0.0;
    for (std::size_t k = 0; k + 1 < cuts.size(); ++k) {
        const cplx lo = (k == 0) ? w0 : w0 + cuts[k] * delta;
        const cplx hi = (k + 2 == cuts.size()) ? w1 : w0 + cuts[k + 1] * delta;
        const cplx step = hi - lo;
        // each half is parametrized from its own end so that points close to the end
        // are resolved by an exact small offset
        auto from_lo = [&](double s) -> cplx { return derivative_offset(lo, s * step) * step; };
        auto from_hi = [&](double s) -> cplx { return derivative_offset(hi, -s * step) * step; };
        double err1 = 0.0, err2 = 0.0, l1a = 0.0, l1b = 0.0;
        const cplx piece = ts.integrate(from_lo, 0.0, 0.5, quad_tol_, &err1, &l1a) +
                           ts.integrate(from_hi, 0.0, 0.5, quad_tol_, &err2, &l1b);
        const double err = err1 + err2;
        const double l1 = l1a + l1b;
        if (!(err <= 1e3 * quad_tol_ * std::max(l1, 1.0)) || !std::isfinite(piece.real()) ||
            !std::isfinite(piece.imag()))
            throw ConvergenceError("strip map: path quadrature did not converge", err);
        total += piece;
    }
    return total;
}

cplx StripMap::map(cplx w) const
{
    if (pre_.empty()) return w + anchor_zeta_;
    const cplx corner_pt(w.real(), anchor_w_.imag());
    return anchor_zeta_ + integrate(anchor_w_, corner_pt) + integrate(corner_pt, w);
}

std::pair<double, double> StripMap::prevertex_range() const
{
    if (pre_.empty()) return {0.0, 0.0};
    double lo = INFINITY;
    double hi = -INFINITY;
    for (const auto& p : pre_) {
        lo = std::min(lo, p.x - p.half_width);
        hi = std::max(hi, p.x + p.half_width);
    }
    return {lo, hi};
}

namespace {

double sup_deviation(const StripMap& m, double u, double target)
{
    double sup = 0.0;
    for (int j = 0; j <= 16; ++j) {
        const double v = m.width() * j / 16.0;
        sup = std::max(sup, std::abs(m.mu(u, v) - target));
    }
    return sup;
}

} // namespace

std::pair<double, double> StripMap::flat_interval(double threshold) const
{
    if (!(threshold > 0.0)) throw InvalidArgument("flat_interval: threshold must be positive");
    if (pre_.empty()) return {0.0, 0.0};
    const auto [lo, hi] = prevertex_range();
    auto search = [&](double start, double dir, double target) {
        double inside = start;
        double outside = start + dir * 0.25 * a_;
        while (sup_deviation(*this, outside, target) >= threshold) {
            inside = outside;
            outside += dir * 0.25 * a_;
            if (std::abs(outside - start) > 400.0 * a_)
                throw ConvergenceError("flat_interval: profile does not flatten", threshold);
        }
        for (int it = 0; it < 40; ++it) {
            const double mid = 0.5 * (inside + outside);
            if (sup_deviation(*this, mid, target) >= threshold)
                inside = mid;
            else
                outside = mid;
        }
        return outside;
    };
    return {search(lo, -1.0, mu_minus()), search(hi, 1.0, mu_plus())};
}

double StripMap::decay_rate() const
{
    if (pre_.empty()) return INFINITY;
    const auto [lo, hi] = prevertex_range();
    auto fit = [&](double start, double dir, double target) -> double {
        double su = 0, sy = 0, suu = 0, suy = 0;
        int n = 0;
        for (int j = 1; j <= 6; ++j) {
            const double u = start + dir * j * a_;
            const double d = sup_deviation(*this, u, target);
            if (!(d > 1e-14)) continue;
            const double y = std::log(d);
            su += u;
            sy += y;
            suu += u * u;
            suy += u * y;
            ++n;
        }
        if (n < 2) return std::numeric_limits<double>::infinity();
        const double slope = (n * suy - su * sy) / (n * suu - su * su);
        return -dir * slope;
    };
    return std::min(fit(lo, -1.0, mu_minus()), fit(hi, 1.0, mu_plus()));
}

StripMap StripMap::identity(double a, double y_lower)
{
    if (!(a > 0.0)) throw InvalidArgument("StripMap::identity: width must be positive");
    StripMap m;
    m.a_ = a;
    m.K_ = 1.0;
    m.anchor_w_ = cplx(0.0, 0.5 * a);
    m.anchor_zeta_ = cplx(0.0, y_lower);
    m.offset_left_ = cplx(0.0, y_lower);
    m.offset_right_ = cplx(0.0, y_lower);
    return m;
}

void StripMap::finalize()
{
    const auto [lo, hi] = prevertex_range();
    const double far = 40.0 * a_;
    const cplx wl(lo - far, 0.5 * a_);
    const cplx wr(hi + far, 0.5 * a_);
    offset_left_ = map(wl) - wl;
    offset_right_ = map(wr) - K_ * wr;
}

// ---------------------------------------------------------------------------
// parameter problem

class StripMapSolver {
public:
    StripMapSolver(const DuctGeometry& g, const StripMapOptions& opts)
        : geom_(g), opts_(opts), lower_(g.corners(Wall::lower)), upper_(g.corners(Wall::upper)),
          a_(g.width_left()), K_(g.width_right() / g.width_left())
    {
        for (const auto* wall : {&lower_, &upper_})
            for (const auto& c : *wall)
                if (c.rounding > 0.0) ++n_rounded_;
    }

    StripMap solve();

private:
    int n_gaps() const
    {
        return std::max<int>(0, static_cast<int>(lower_.size()) - 1) +
               std::max<int>(0, static_cast<int>(upper_.size()) - 1) +
               ((lower_.empty() || upper_.empty()) ? 0 : 1);
    }

    StripMap trial(const Eigen::VectorXd& theta, bool rounded) const;
    std::optional<Eigen::VectorXd> residual(const Eigen::VectorXd& theta, bool rounded) const;
    Chain chain(const StripMap& m, bool upper_wall) const;
    Eigen::VectorXd initial_sharp() const;
    Eigen::VectorXd initial_rounded(const Eigen::VectorXd& sharp_theta) const;
    Eigen::VectorXd levenberg_marquardt(Eigen::VectorXd theta, bool rounded, double& res_out, int& iters) const;

    const DuctGeometry& geom_;
    StripMapOptions opts_;
    std::vector<Corner> lower_;
    std::vector<Corner> upper_;
    double a_;
    double K_;
    int n_rounded_ = 0;
};

StripMap StripMapSolver::trial(const Eigen::VectorXd& theta, bool rounded) const
{
    StripMap m;
    m.a_ = a_;
    m.K_ = K_;
    m.quad_tol_ = opts_.quad_tol;
    int j = 0;
    int r = n_gaps();
    auto add_wall = [&](const std::vector<Corner>& corners, double v, double first_x) {
        double x = first_x;
        for (std::size_t k = 0; k < corners.size(); ++k) {
            if (k > 0) x += std::exp(theta(j++));
            Prevertex p;
            p.corner = corners[k];
            p.x = x;
            p.v = v;
            p.half_width = (rounded && corners[k].rounding > 0.0) ? std::exp(theta(r++)) : 0.0;
            const double sign = (v == 0.0) ? 1.0 : -1.0;
            // lower wall: z = e^{pi x/a}; upper wall: z = -e^{pi x/a}. t1 < t2 in both cases.
            const double xa = x - p.half_width;
            const double xb = x + p.half_width;
            if (sign > 0) {
                p.x_t1 = xa;
                p.x_t2 = xb;
            } else {
                p.x_t1 = xb;
                p.x_t2 = xa;
            }
            p.t1 = sign * std::exp(pi * p.x_t1 / a_);
            p.t2 = sign * std::exp(pi * p.x_t2 / a_);
            m.pre_.push_back(p);
        }
    };
    add_wall(lower_, 0.0, 0.0);
    double upper_first = 0.0;
    if (!lower_.empty() && !upper_.empty()) upper_first = theta(j + std::max<int>(0, int(upper_.size()) - 1));
    // layout: lower gaps, upper gaps, upper offset, rounding half-widths
    add_wall(upper_, a_, upper_first);
    return m;
}

Chain StripMapSolver::chain(const StripMap& m, bool upper_wall) const
{
    Chain c;
    std::vector<const Prevertex*> ps;
    for (const auto& p : m.prevertices())
        if (p.upper() == upper_wall) ps.push_back(&p);
    const double v = upper_wall ? a_ : 0.0;
    cplx pos = 0.0;
    for (std::size_t k = 0; k < ps.size(); ++k) {
        const Prevertex& p = *ps[k];
        const double l = p.x - p.half_width;
        const double r = p.x + p.half_width;
        if (k > 0) {
            const Prevertex& q = *ps[k - 1];
            pos += m.integrate(cplx(q.x + q.half_width, v), cplx(l, v));
        }
        const cplx tm = pos;
        if (!p.sharp()) pos += m.integrate(cplx(l, v), cplx(r, v));
        const cplx tp = pos;
        c.t_minus.push_back(tm);
        c.t_plus.push_back(tp);
        if (p.sharp()) {
            c.vertex.push_back(tm);
            c.s_in.push_back(0.0);
            c.s_out.push_back(0.0);
        } else {
            // tm + s d_in = tp - t d_out
            const cplx din = p.corner.dir_in;
            const cplx dout = p.corner.dir_out;
            const cplx D = tp - tm;
            Eigen::Matrix2d A;
            A << din.real(), dout.real(), din.imag(), dout.imag();
            const Eigen::Vector2d st = A.lu().solve(Eigen::Vector2d(D.real(), D.imag()));
            c.vertex.push_back(tm + st(0) * din);
            c.s_in.push_back(st(0));
            c.s_out.push_back(st(1));
        }
    }
    return c;
}

std::optional<Eigen::VectorXd> StripMapSolver::residual(const Eigen::VectorXd& theta, bool rounded) const
{
    if (!theta.allFinite()) return std::nullopt;
    const StripMap m = trial(theta, rounded);
    // rounding intervals of neighbours on one wall must not overlap
    for (std::size_t i = 0; i + 1 < m.prevertices().size(); ++i) {
        const auto& p = m.prevertices()[i];
        const auto& q = m.prevertices()[i + 1];
        if (p.upper() == q.upper() && p.x + p.half_width >= q.x - q.half_width) return std::nullopt;
    }
    try {
        std::vector<double> res;
        const Chain lo = chain(m, false);
        const Chain up = chain(m, true);
        auto push = [&](cplx d) {
            res.push_back(d.real() / a_);
            res.push_back(d.imag() / a_);
        };
        cplx up_origin; // absolute zeta at the first upper left-tangent point
        if (!lower_.empty()) {
            const cplx origin = lower_[0].position - lo.vertex[0];
            for (std::size_t k = 1; k < lower_.size(); ++k) push(origin + lo.vertex[k] - lower_[k].position);
            if (!upper_.empty()) {
                const auto& pl = m.prevertices().front();
                const Prevertex* pu = nullptr;
                for (const auto& p : m.prevertices())
                    if (p.upper()) {
                        pu = &p;
                        break;
                    }
                const double xl = pl.x - pl.half_width;
                const double xu = pu->x - pu->half_width;
                const cplx cross = m.integrate(cplx(xl, 0.0), cplx(xl, 0.5 * a_)) +
                                   m.integrate(cplx(xl, 0.5 * a_), cplx(xu, 0.5 * a_)) +
                                   m.integrate(cplx(xu, 0.5 * a_), cplx(xu, a_));
                up_origin = origin + cross;
                for (std::size_t k = 0; k < upper_.size(); ++k) push(up_origin + up.vertex[k] - upper_[k].position);
            }
        } else {
            up_origin = upper_[0].position - up.vertex[0];
            for (std::size_t k = 1; k < upper_.size(); ++k) push(up_origin + up.vertex[k] - upper_[k].position);
        }
        // left-end width: K prod F_k(0) = 1
        cplx F0 = K_;
        for (const auto& p : m.prevertices()) {
            const cplx y1 = upper_closed(cplx(-p.t1, 0.0));
            const cplx y2 = upper_closed(cplx(-p.t2, 0.0));
            F0 *= corner_factor(y1, y2, 0.5 * (p.t2 - p.t1), p.corner.exponent).F;
        }
        res.push_back(std::log(std::abs(F0)));
        if (rounded) {
            auto add_round = [&](const std::vector<Corner>& corners, const Chain& ch) {
                for (std::size_t k = 0; k < corners.size(); ++k) {
                    if (!(corners[k].rounding > 0.0)) continue;
                    const double s = ch.s_in[k];
                    const double t = ch.s_out[k];
                    const double reach = std::pow(std::pow(s, 8) + std::pow(t, 8), 0.125);
                    res.push_back(reach / corners[k].rounding - 1.0);
                }
            };
            add_round(lower_, lo);
            add_round(upper_, up);
        }
        Eigen::VectorXd out = Eigen::Map<Eigen::VectorXd>(res.data(), static_cast<Eigen::Index>(res.size()));
        if (!out.allFinite()) return std::nullopt;
        return out;
    } catch (const Error&) {
        return std::nullopt;
    }
}

Eigen::VectorXd StripMapSolver::initial_sharp() const
{
    Eigen::VectorXd theta(n_gaps());
    int j = 0;
    auto gaps = [&](const std::vector<Corner>& corners) {
        for (std::size_t k = 1; k < corners.size(); ++k) {
            const double len = std::abs(corners[k].position - corners[k - 1].position);
            theta(j++) = std::log(std::max(len, 0.05 * a_));
        }
    };
    gaps(lower_);
    gaps(upper_);
    if (!lower_.empty() && !upper_.empty()) theta(j++) = upper_[0].position.real() - lower_[0].position.real();
    return theta;
}

Eigen::VectorXd StripMapSolver::initial_rounded(const Eigen::VectorXd& sharp_theta) const
{
    const StripMap m = trial(sharp_theta, false);
    Eigen::VectorXd theta(n_gaps() + n_rounded_);
    theta.head(n_gaps()) = sharp_theta;
    int r = n_gaps();
    const auto& pre = m.prevertices();
    for (std::size_t i = 0; i < pre.size(); ++i) {
        const auto& p = pre[i];
        if (!(p.corner.rounding > 0.0)) continue;
        // largest admissible half-width: half the distance to the neighbours on the wall
        double room = 10.0 * a_;
        for (std::size_t k = 0; k < pre.size(); ++k)
            if (k != i && pre[k].upper() == p.upper()) room = std::min(room, 0.45 * std::abs(pre[k].x - p.x));
        const cplx base(p.x, p.v);
        auto reach = [&](double delta) {
            const double in = std::abs(m.integrate(base - delta, base));
            const double out = std::abs(m.integrate(base, base + delta));
            return std::max(in, out);
        };
        const double target = p.corner.rounding / std::pow(2.0, 0.125);
        double lo = std::log(1e-14 * a_);
        double hi = std::log(room);
        for (int it = 0; it < 30; ++it) {
            const double mid = 0.5 * (lo + hi);
            if (reach(std::exp(mid)) > target)
                hi = mid;
            else
                lo = mid;
        }
        theta(r++) = 0.5 * (lo + hi);
    }
    return theta;
}

Eigen::VectorXd StripMapSolver::levenberg_marquardt(Eigen::VectorXd theta, bool rounded, double& res_out,
                                                    int& iters) const
{
    auto r0 = residual(theta, rounded);
    if (!r0) throw ConvergenceError("strip map: initial guess is not admissible", INFINITY);
    Eigen::VectorXd r = *r0;
    double cost = r.squaredNorm();
    double lambda = 1e-3;
    const int n = static_cast<int>(theta.size());
    int it = 0;
    for (; it < opts_.max_iterations; ++it) {
        if (r.lpNorm<Eigen::Infinity>() < opts_.residual_tol) break;
        Eigen::MatrixXd J(r.size(), n);
        for (int k = 0; k < n; ++k) {
            const double h = 1e-7;
            Eigen::VectorXd tp = theta;
            tp(k) += h;
            if (auto rp = residual(tp, rounded)) {
                J.col(k) = (*rp - r) / h;
                continue;
            }
            tp(k) = theta(k) - h;
            if (auto rm = residual(tp, rounded)) {
                J.col(k) = (r - *rm) / h;
                continue;
            }
            throw ConvergenceError("strip map: Jacobian evaluation failed", std::sqrt(cost));
        }
        const Eigen::MatrixXd A = J.transpose() * J;
        const Eigen::VectorXd g = J.transpose() * r;
        bool accepted = false;
        while (lambda < 1e14) {
            Eigen::MatrixXd M = A;
            for (int k = 0; k < n; ++k) M(k, k) += lambda * (A(k, k) + 1e-12);
            Eigen::VectorXd step = -M.ldlt().solve(g);
            const double big = step.lpNorm<Eigen::Infinity>();
            if (big > 2.0) step *= 2.0 / big;
            const Eigen::VectorXd cand = theta + step;
            auto rc = residual(cand, rounded);
            if (rc && rc->squaredNorm() < cost) {
                theta = cand;
                r = *rc;
                cost = r.squaredNorm();
                lambda = std::max(lambda / 5.0, 1e-15);
                accepted = true;
                break;
            }
            lambda *= 4.0;
        }
        if (!accepted) break;
    }
    res_out = r.lpNorm<Eigen::Infinity>();
    iters = it;
    return theta;
}

StripMap StripMapSolver::solve()
{
    if (lower_.empty() && upper_.empty()) {
        if (std::abs(K_ - 1.0) > 1e-14) throw GeometryError("strip map: width change without corners");
        return StripMap::identity(a_, geom_.points(Wall::lower).front().imag());
    }
    double res = INFINITY;
    int iters = 0;
    Eigen::VectorXd theta = levenberg_marquardt(initial_sharp(), false, res, iters);
    int total_iters = iters;
    bool rounded = n_rounded_ > 0;
    if (rounded && res < 1e3 * opts_.residual_tol) {
        theta = levenberg_marquardt(initial_rounded(theta), true, res, iters);
        total_iters += iters;
    }
    if (!(res < opts_.residual_tol)) {
        std::ostringstream msg;
        msg << "strip map: parameter problem did not converge (residual " << res << ")";
        throw ConvergenceError(msg.str(), res);
    }
    StripMap m = trial(theta, rounded);
    m.residual_ = res;
    m.iterations_ = total_iters;

    // anchor: first corner's left tangent point, lifted to the midline
    const Prevertex& p0 = m.pre_.front();
    const Corner& c0 = p0.corner;
    const Chain ch = chain(m, p0.upper());
    const cplx boundary_pt(p0.x - p0.half_width, p0.v);
    const cplx boundary_zeta = c0.position - ch.vertex[0];
    m.anchor_w_ = cplx(boundary_pt.real(), 0.5 * a_);
    m.anchor_zeta_ = boundary_zeta + m.integrate(boundary_pt, m.anchor_w_);
    m.finalize();
    return m;
}

StripMap solve_strip_map(const DuctGeometry& geom, const StripMapOptions& opts)
{
    StripMapSolver solver(geom, opts);
    return solver.solve();
}

cplx map_derivative(const StripMap& map, cplx w)
{
    if (w.imag() < 0.0 || w.imag() > map.width()) throw InvalidArgument("map_derivative: w outside the strip");
    return map.derivative(w);
}

double mu_field(const StripMap& map, double u, double v)
{
    if (v < 0.0 || v > map.width()) throw InvalidArgument("mu_field: v outside the strip");
    return map.mu(u, v);
}

} // namespace qtube
