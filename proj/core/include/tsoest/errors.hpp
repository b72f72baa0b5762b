#pragma once

#include <stdexcept>
#include <string>

namespace tsoest {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class NotSkew : public Error {
public:
    using Error::Error;
};

class NotSPD : public Error {
public:
    using Error::Error;
};

class NotRotation : public Error {
public:
    using Error::Error;
};

/// The attitude profile matrix is singular; attitude is unobservable.
class DegenerateProfile : public Error {
public:
    using Error::Error;
};

/// Newton iteration for the relative attitude did not converge.
class NoConvergence : public Error {
public:
    using Error::Error;
};

class Degenerate : public Error {
public:
    using Error::Error;
};

class EmptyInput : public Error {
public:
    using Error::Error;
};

class ZeroTrace : public Error {
public:
    using Error::Error;
};

/// The predicted and measured ellipsoids do not intersect.
class EmptyIntersection : public Error {
public:
    using Error::Error;
};

/// Center offset reached the cut locus of the exponential chart.
class ChartOverflow : public Error {
public:
    using Error::Error;
};

class ConfigError : public Error {
public:
    using Error::Error;
};

class IoError : public Error {
public:
    using Error::Error;
};

/// An estimator or integrator failure inside a simulation, tagged with its step.
class SimulationError : public Error {
public:
    SimulationError(long step, const std::string& what)
        : Error("step " + std::to_string(step) + ": " + what), step_(step) {}

    long step() const { return step_; }

private:
    long step_;
};

}  // namespace tsoest
