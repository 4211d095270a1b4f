#ifndef BRANCHWAVE_TYPES_HPP
#define BRANCHWAVE_TYPES_HPP

#include <array>
#include <cmath>
#include <functional>
#include <stdexcept>
#include <string>

namespace branchwave {

// Points live in R^d with d <= 3; unused trailing components stay zero.
using Point = std::array<double, 3>;

using SpaceFn = std::function<double(const Point &)>;
using SpaceTimeFn = std::function<double(double, const Point &)>;

// Bad configuration or violated precondition (CLI exit code 2).
struct precondition_error : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// A bound audit failed (CLI exit code 3).
struct audit_failure : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Tolerance not reached or iteration failed to contract (CLI exit code 4).
struct numerical_diagnostic : std::runtime_error {
    double achieved;
    numerical_diagnostic(const std::string &what, double achieved_error)
        : std::runtime_error(what), achieved(achieved_error) {}
};

inline void check_dimension(int d)
{
    if (d < 1 || d > 3)
        throw std::domain_error("dimension must be 1, 2 or 3, got " + std::to_string(d));
}

inline double norm(const Point &x)
{
    return std::sqrt(x[0] * x[0] + x[1] * x[1] + x[2] * x[2]);
}

inline Point axpy(const Point &x, double a, const Point &z)
{
    return {x[0] + a * z[0], x[1] + a * z[1], x[2] + a * z[2]};
}

} // namespace branchwave

#endif
