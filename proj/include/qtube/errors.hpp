#ifndef QTUBE_ERRORS_HPP
#define QTUBE_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace qtube {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Invalid duct description, bad cut point, bad rounding radius.
class GeometryError : public Error {
public:
    using Error::Error;
};

/// Invalid arguments to a numerical routine (sizes, ranges, tolerances).
class InvalidArgument : public Error {
public:
    using Error::Error;
};

/// An iterative procedure (parameter solve, quadrature, ODE) failed to reach tolerance.
class ConvergenceError : public Error {
public:
    ConvergenceError(const std::string& what, double residual)
        : Error(what), residual_(residual) {}
    double residual() const { return residual_; }

private:
    double residual_;
};

/// Evaluation at a point where the map derivative is singular (sharp-corner prevertex).
class SingularPointError : public Error {
public:
    using Error::Error;
};

/// The energy sits on a transverse cutoff: some axial wavenumber is exactly zero.
class CutoffError : public Error {
public:
    CutoffError(const std::string& what, int mode) : Error(what), mode_(mode) {}
    int mode() const { return mode_; }

private:
    int mode_;
};

/// Riccati blow-up: the reflection operator exceeded its norm bound at axial position u.
class BoundStateError : public Error {
public:
    BoundStateError(const std::string& what, double u, double norm)
        : Error(what), u_(u), norm_(norm) {}
    double location() const { return u_; }
    double norm() const { return norm_; }

private:
    double u_;
    double norm_;
};

/// A dense linear system (interface matrix, matching matrix, FD system) is singular.
class SingularSystemError : public Error {
public:
    using Error::Error;
};

} // namespace qtube

#endif
