#ifndef QTUBE_REFRACTIVE_PROFILE_HPP
#define QTUBE_REFRACTIVE_PROFILE_HPP

#include <functional>
#include <memory>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "qtube/strip_map.hpp"

namespace qtube {

/// Cosine coefficients mu_l(u), l = 0..L, of the metric factor
///   mu(u, v) = sum_l mu_l(u) cos(l pi v / a)
/// on a strip of width a. Outside core() the coefficients are (mu_-+, 0, 0, ...).
class ProfileSource {
public:
    virtual ~ProfileSource() = default;

    virtual double width() const = 0;
    virtual double mu_minus() const = 0;
    virtual double mu_plus() const = 0;
    virtual int order() const = 0;
    /// Axial interval outside of which the profile is flat.
    virtual std::pair<double, double> core() const = 0;
    /// Writes mu_0..mu_L at u into out (size order() + 1).
    virtual void coefficients(double u, Eigen::Ref<Eigen::VectorXd> out) const = 0;

    Eigen::VectorXd coefficients(double u) const;
    /// Reconstructed sum_l mu_l(u) cos(l pi v / a).
    double evaluate(double u, double v) const;
};

/// Tabulated profile: piecewise polynomial interpolation of mu_l in u.
///
/// Each piece stores Chebyshev coefficients of mu_0..mu_L on [lo, hi]; adjacent
/// pieces share their end values.
class RefractiveProfile : public ProfileSource {
public:
    struct Piece {
        double lo = 0.0;
        double hi = 0.0;
        Eigen::MatrixXd cheb; ///< (L+1) x (degree+1)
    };

    RefractiveProfile(std::vector<Piece> pieces, double mu_minus, double mu_plus, double a);

    /// Cubic Hermite table: values(l, j) = mu_l(u_j), slopes(l, j) = d mu_l / du at u_j.
    static RefractiveProfile hermite(const std::vector<double>& u_grid, const Eigen::MatrixXd& values,
                                     const Eigen::MatrixXd& slopes, double mu_minus, double mu_plus, double a);

    double width() const override { return a_; }
    double mu_minus() const override { return mu_minus_; }
    double mu_plus() const override { return mu_plus_; }
    int order() const override { return static_cast<int>(pieces_.front().cheb.rows()) - 1; }
    std::pair<double, double> core() const override { return {pieces_.front().lo, pieces_.back().hi}; }
    void coefficients(double u, Eigen::Ref<Eigen::VectorXd> out) const override;
    using ProfileSource::coefficients;

    const std::vector<Piece>& pieces() const { return pieces_; }
    /// Piece boundaries.
    std::vector<double> breakpoints() const;

    /// Smallest reconstructed mu over a sample lattice (interior v only).
    double min_mu(int v_samples = 33) const;

private:
    std::vector<Piece> pieces_;
    std::vector<double> his_;
    double mu_minus_;
    double mu_plus_;
    double a_;
};

/// Profile given by closed-form coefficient functions. Used for synthetic tests.
class FunctionProfile : public ProfileSource {
public:
    using Coefficients = std::function<void(double u, Eigen::Ref<Eigen::VectorXd> out)>;

    FunctionProfile(Coefficients f, int L, std::pair<double, double> core, double mu_minus, double mu_plus,
                    double a);

    double width() const override { return a_; }
    double mu_minus() const override { return mu_minus_; }
    double mu_plus() const override { return mu_plus_; }
    int order() const override { return L_; }
    std::pair<double, double> core() const override { return core_; }
    void coefficients(double u, Eigen::Ref<Eigen::VectorXd> out) const override;
    using ProfileSource::coefficients;

private:
    Coefficients f_;
    int L_;
    std::pair<double, double> core_;
    double mu_minus_;
    double mu_plus_;
    double a_;
};

/// mu(u,v) = mu_0 (1 + amp * g(u) cos(pi v / a)) with g a smooth bump supported on
/// (center - half, center + half).
FunctionProfile bump_profile(double amp, double center, double half, double a, int L = 1);

/// Profile of a straight duct, mu = 1.
FunctionProfile flat_profile(double a, int L = 1);

/// Projects mu(u, .) onto cosines with composite Gauss-Legendre quadrature graded
/// towards the walls.
class CosineProjector {
public:
    /// levels: number of dyadic grading steps towards each wall (0 = default)
    CosineProjector(double a, int L, int levels = 0);

    int order() const { return L_; }
    /// samples(i) = mu(u, nodes()[i]).
    const std::vector<double>& nodes() const { return nodes_; }
    Eigen::VectorXd project(const Eigen::VectorXd& samples) const;

private:
    double a_;
    int L_;
    std::vector<double> nodes_;
    Eigen::MatrixXd weights_; // (L+1) x nodes
};

struct ProfileOptions {
    double flat_threshold = 1e-8; ///< sup |mu - mu_-+| at the ends of the tabulated range
    double tolerance = 1e-11;     ///< size of the trailing Chebyshev coefficients
    int degree = 16;              ///< polynomial degree per piece
    int max_depth = 30;           ///< bisection depth
};

/// Tabulates the cosine coefficients of mu on a given axial grid (cubic Hermite in u).
RefractiveProfile build_profile(const StripMap& map, const std::vector<double>& u_grid, int L);

/// Tabulates on adaptively bisected pieces covering the non-flat part of the map.
RefractiveProfile build_profile(const StripMap& map, int L, const ProfileOptions& opts = {});

/// Profile that evaluates the map at every request (no interpolation).
class MappedProfile : public ProfileSource {
public:
    MappedProfile(std::shared_ptr<const StripMap> map, int L, double flat_threshold = 1e-8);

    double width() const override { return map_->width(); }
    double mu_minus() const override { return map_->mu_minus(); }
    double mu_plus() const override { return map_->mu_plus(); }
    int order() const override { return projector_.order(); }
    std::pair<double, double> core() const override { return core_; }
    void coefficients(double u, Eigen::Ref<Eigen::VectorXd> out) const override;
    using ProfileSource::coefficients;

private:
    std::shared_ptr<const StripMap> map_;
    CosineProjector projector_;
    std::pair<double, double> core_;
};

} // namespace qtube

#endif
