#pragma once

#include <complex>
#include <stdexcept>
#include <string>

namespace semiscat {

/// Base class for all toolkit errors.
class error : public std::runtime_error {
public:
    explicit error(const std::string& what) : std::runtime_error(what) {}
};

class invalid_parameter : public error {
public:
    using error::error;
};

class unsupported_potential : public error {
public:
    using error::error;
};

class resolution_error : public error {
public:
    using error::error;
};

class branch_ambiguity : public error {
public:
    using error::error;
};

/// Thrown when a Green kernel is requested at a zero of the Jost determinant.
class at_pole_error : public error {
public:
    at_pole_error(const std::string& what, std::complex<double> z)
        : error(what), pole(z) {}
    std::complex<double> pole;
};

class numerical_failure : public error {
public:
    using error::error;
};

class below_threshold : public error {
public:
    using error::error;
};

class grid_too_coarse : public error {
public:
    using error::error;
};

class contour_failure : public error {
public:
    using error::error;
};

class unsupported_multiplicity : public error {
public:
    using error::error;
};

class geometry_error : public error {
public:
    using error::error;
};

class invalid_barrier : public error {
public:
    using error::error;
};

class degenerate_peak : public error {
public:
    using error::error;
};

class degenerate_fit : public error {
public:
    using error::error;
};

class dependency_error : public error {
public:
    using error::error;
};

class configuration_error : public error {
public:
    using error::error;
};

class pole_error : public error {
public:
    using error::error;
};

} // namespace semiscat
